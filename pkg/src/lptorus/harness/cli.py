"""
Command-line entry point: ``python -m lptorus <experiment> [options]``.

Every experiment writes ``<out>/<experiment>.csv`` and a JSON manifest
``<out>/<experiment>.manifest.json`` and prints its summary (fits, maxima)
to standard output.  Exit status is 0 on success, 1 on budget or validation
errors and 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..errors import LPTorusError
from ..frequency_sets import FreqSet, lacunary_product
from . import sweeps
from .baseline import load_baseline
from .records import FitResult, write_csv, write_manifest

__all__ = ["run_cli", "build_parser"]


def _plist(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _common(p, dim=2, p_list="4,8,16"):
    p.add_argument("--dim", type=int, default=dim, help="torus dimension d")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oversample", type=int, default=8)
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--p-list", type=_plist, default=_plist(p_list), help="comma-separated exponents")
    p.add_argument("--grid-log2", type=int, default=None, help="log2 of the grid size per dimension")
    p.add_argument("--workers", type=int, default=1, help="threads for independent sweep cells")


def build_parser():
    parser = argparse.ArgumentParser(prog="lptorus", description="Littlewood-Paley / Lambda(p) experiments on the torus.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sharpness", help="weighted l2 and Orlicz growth for tensor de la Vallee Poussin kernels")
    _common(p)
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=9)

    p = sub.add_parser("lemma-decay", help="operator norms of E_m Psi_k and D_m Psi_k")
    _common(p, dim=1)
    p.add_argument("--max", type=int, default=10, help="largest level m and index k")
    p.add_argument("--s", type=int, default=0, help="derivative order of the Psi symbol")

    for name, hlp in (("cww", "L^p norm against the dyadic square function"),
                      ("variant-lp", "L^p norm against the sup-norm square sum of projections")):
        p = sub.add_parser(name, help=hlp)
        _common(p)
        p.add_argument("--trials", type=int, default=50)
        p.add_argument("--degree", type=int, default=64, help="half-degree per dimension")
        if name == "cww":
            p.add_argument("--exponent", type=float, default=None, help="power of p (default d/2)")
        else:
            p.add_argument("--projector", choices=("smooth", "rough"), default="smooth")

    p = sub.add_parser("lambda-p", help="growth of ||f||_p / ||f||_2 on a frequency set")
    _common(p)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--base", type=int, default=2)
    p.add_argument("--count", type=int, default=12)
    p.add_argument("--set-file", type=Path, default=None, help="frequency set file (overrides --base/--count)")

    p = sub.add_parser("oberlin", help="Oberlin block-sum condition for 1/sqrt(k_1...k_d)")
    _common(p)
    p.add_argument("--nmax", type=int, default=2**20)

    p = sub.add_parser("exp-int", help="exponential integrability with the rough normaliser")
    _common(p)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--degree", type=int, default=32)
    p.add_argument("--c1-list", type=_plist, default=_plist("0.01,0.05,0.1"))

    p = sub.add_parser("selftest", help="fast internal consistency checks")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _summary_jsonable(v):
    if isinstance(v, FitResult):
        return v.as_dict()
    if isinstance(v, dict):
        return {str(k): _summary_jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_summary_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def _run(args):
    cmd = args.command
    if cmd == "sharpness":
        grid = 12 if args.grid_log2 is None else args.grid_log2
        res = sweeps.sharpness_sweep(args.dim, args.n_min, args.n_max, grid_log2=grid)
    elif cmd == "lemma-decay":
        res = sweeps.lemma_decay_sweep(args.dim, args.max, args.max, s=args.s, oversample=args.oversample)
    elif cmd == "cww":
        res = sweeps.cww_ratio_sweep(args.dim, args.p_list, args.trials, args.degree, args.seed,
                                     exponent=args.exponent, workers=args.workers)
    elif cmd == "variant-lp":
        res = sweeps.variant_lp_ratio_sweep(args.dim, args.p_list, args.trials, args.degree, args.seed,
                                            projector=args.projector, oversample=args.oversample,
                                            workers=args.workers)
    elif cmd == "lambda-p":
        E = FreqSet.load(args.set_file) if args.set_file else lacunary_product(args.base, args.count, args.dim)
        res = sweeps.lambda_p_sweep(E, args.p_list, args.trials, args.seed, grid_log2=args.grid_log2,
                                    workers=args.workers)
    elif cmd == "oberlin":
        res = sweeps.oberlin_sweep(args.dim, args.nmax)
    elif cmd == "exp-int":
        res = sweeps.exp_int_sweep(args.dim, args.trials, args.degree, args.seed, args.c1_list,
                                   oversample=args.oversample, workers=args.workers)
    else:  # pragma: no cover - argparse restricts the choices
        raise ValueError(cmd)
    return res


def _pinned(cmd, args):
    """Baseline constants relevant to a run, labelled as implementation artifacts."""
    base = load_baseline()
    key = {"cww": "cww", "variant-lp": f"variant-{getattr(args, 'projector', '')}", "exp-int": "exp-int"}.get(cmd)
    entry = base.get(key, {}).get(f"d{getattr(args, 'dim', '')}") if key else None
    return {"pinned_empirical_constants (implementation artifact)": entry} if entry else {}


def _selftest(seed):
    from .selftest import run_selftest

    ok = True
    for name, passed, detail in run_selftest(seed):
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        ok &= passed
    return 0 if ok else 1


def run_cli(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else 2
    if args.command == "selftest":
        return _selftest(args.seed)
    try:
        res = _run(args)
        out = Path(args.out)
        csv_path = write_csv(res.records, out / f"{res.experiment}.csv")
        resolution = sorted({r.provenance.get("resolution") for r in res.records}, key=str)
        summary = _summary_jsonable(res.summary)
        summary.update(_pinned(args.command, args))
        params = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()}
        write_manifest(out / f"{res.experiment}.manifest.json", res.experiment, params, seed=getattr(args, "seed", None),
                       resolution=resolution, oversample=getattr(args, "oversample", None), extra=summary)
    except (LPTorusError, ValueError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {csv_path} ({len(res.records)} records)")
    print(json.dumps(summary, indent=2, default=str))
    return 0


def run_cli_main():
    sys.exit(run_cli(sys.argv[1:]))
