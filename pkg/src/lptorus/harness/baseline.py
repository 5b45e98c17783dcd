"""
Pinned empirical constants.

The inequalities being probed carry unspecified constants, so the maxima
observed on a fixed reference run are stored in ``baseline.json`` and later
runs are compared against them.  They are implementation artifacts, not
values of any theoretical constant.

Regenerate with ``python -m lptorus.harness.baseline``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .. import __version__
from . import sweeps

__all__ = ["BASELINE_FILE", "REFERENCE", "load_baseline", "generate_baseline", "C2_HEADROOM"]

BASELINE_FILE = "baseline.json"

#: Parameters of the reference run.
REFERENCE = {"seed": 0, "trials": 50, "degree": 64, "plist": [4.0, 8.0, 16.0],
             "exp_int": {"dim": 2, "trials": 20, "degree": 32, "c1_list": [0.01, 0.05, 0.1]}}

#: ``c2`` is the largest observed integral at ``c1 = 0.05`` times this factor.
C2_HEADROOM = 1.05


def load_baseline():
    try:
        text = resources.files(__package__).joinpath(BASELINE_FILE).read_text(encoding="utf-8")
    except FileNotFoundError:
        return {}
    return json.loads(text)


def _max_table(res):
    return {f"{p:g}": v for p, v in res.summary["max_ratio"].items()}


def generate_baseline(ref=REFERENCE, workers=1):
    seed, trials, degree, plist = ref["seed"], ref["trials"], ref["degree"], ref["plist"]
    out = {"tool_version": __version__, "reference": ref,
           "label": "pinned empirical constants (implementation artifact)"}
    for d in (1, 2):
        key = f"d{d}"
        out.setdefault("cww", {})[key] = _max_table(
            sweeps.cww_ratio_sweep(d, plist, trials, degree, seed, workers=workers))
        for proj in ("smooth", "rough"):
            out.setdefault(f"variant-{proj}", {})[key] = _max_table(
                sweeps.variant_lp_ratio_sweep(d, plist, trials, degree, seed, projector=proj, workers=workers))
    e = ref["exp_int"]
    res = sweeps.exp_int_sweep(e["dim"], e["trials"], e["degree"], seed, e["c1_list"], workers=workers)
    top = res.summary["max_integral"]
    out["exp-int"] = {f"d{e['dim']}": {"max_integral": {f"{c:g}": v for c, v in top.items()},
                                        "c2": top[0.05] * C2_HEADROOM, "c2_headroom": C2_HEADROOM}}
    return out


def main(path=None):
    path = Path(path) if path else Path(__file__).with_name(BASELINE_FILE)
    data = generate_baseline()
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
