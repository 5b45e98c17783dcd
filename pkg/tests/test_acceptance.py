"""
Acceptance gate.

Each test checks one acceptance criterion at its stated tolerance and
prints a single ``[PASS]`` / ``[FAIL]`` line before asserting.
"""

import itertools
import math
import time

import numpy as np
import pytest

from lptorus import TrigPoly, linf_estimate, lp_norm, random_poly
from lptorus.dyadic import cond_exp, mart_diff, op_norm_DPsi, op_norm_EPsi
from lptorus.frequency_sets import (
    FreqSet,
    d_e_count,
    dominant_set,
    inverse_sqrt_orthant,
    lacunary_product,
    oberlin_block_sums,
    oberlin_sup,
)
from lptorus.harness import (
    cww_ratio_sweep,
    exp_int_sweep,
    lambda_p_sweep,
    lemma_decay_sweep,
    sharpness_sweep,
    variant_lp_ratio_sweep,
)
from lptorus.harness.baseline import load_baseline
from lptorus.harness.cli import run_cli
from lptorus.kernels import fejer_poly, phi_eval, vallee_poussin_poly
from lptorus.projections import projection_indices, psi_operator, rough_project, smooth_project

PLIST = (4.0, 8.0, 16.0)


@pytest.fixture
def report(capsys):
    def _report(number, title, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {title}: {detail}")
        assert passed, detail

    return _report


def _seeded_polys(count, seed, dims_degrees):
    seeds = np.random.SeedSequence(seed).spawn(count)
    return [random_poly(d, K, seed=s) for s, (d, K) in zip(seeds, itertools.cycle(dims_degrees))]


def test_01_partition_of_unity(report):
    t0 = time.perf_counter()
    xi = np.random.default_rng(2024).uniform(-(2.0**12), 2.0**12, 100_000)
    err = float(np.max(np.abs(sum(phi_eval(k, xi) for k in range(14)) - 1.0)))
    dt = time.perf_counter() - t0
    report(1, "partition of unity", err < 1e-10 and dt < 5, f"max error {err:.3g}, {dt:.2f} s")


def test_02_reconstruction(report):
    t0 = time.perf_counter()
    polys = _seeded_polys(20, 2, [(1, 256), (2, 16), (1, 100), (2, 64), (2, 256)])
    smooth_err, rough_exact = 0.0, True
    for f in polys:
        s = TrigPoly.zeros(f.halfdeg)
        r = TrigPoly.zeros(f.halfdeg)
        for k in projection_indices(f):
            s = s + smooth_project(f, k)
            r = r + rough_project(f, k)
        smooth_err = max(smooth_err, (s - f).l2norm() / f.l2norm())
        rough_exact &= bool(np.array_equal(r.coeffs, f.coeffs))
    dt = time.perf_counter() - t0
    ok = smooth_err < 1e-10 and rough_exact and dt < 30
    report(2, "LP reconstruction", ok, f"smooth rel. error {smooth_err:.3g}, rough exact {rough_exact}, {dt:.1f} s")


def test_03_psi_phi(report):
    f = random_poly(1, 2**12, seed=3)
    g2 = random_poly(2, 80, seed=4)
    worst = 0.0
    for k in range(11):
        g = smooth_project(f, k)
        worst = max(worst, float(np.max(np.abs(psi_operator(g, k).coeffs - g.coeffs))))
    for k in itertools.product(range(6), repeat=2):
        g = smooth_project(g2, k)
        worst = max(worst, float(np.max(np.abs(psi_operator(g, k).coeffs - g.coeffs))))
    report(3, "psi phi = phi", worst < 1e-12, f"max coefficient error {worst:.3g}")


def test_04_martingale_identities(report):
    polys = _seeded_polys(20, 4, [(1, 24), (2, 8)])
    tele, orth, idem = 0.0, 0.0, 0.0
    for f in polys:
        M = (6,) * f.dim
        cache = {}
        ms = list(itertools.product(*(range(v + 1) for v in M)))
        ds = {m: mart_diff(f, m, _cache=cache) for m in ms}
        total = ds[ms[0]]
        for m in ms[1:]:
            total = total + ds[m]
        target = cond_exp(f, M)
        tele = max(tele, float(np.max(np.abs(total.refined(M).values - target.values))))
        for a, b in itertools.combinations(ms[:: max(1, len(ms) // 12)], 2):
            orth = max(orth, abs(ds[a].inner(ds[b])))
        for m, mp in [(5, 2), (6, 0), (3, 3)]:
            fine = cond_exp(f, (m,) * f.dim).values
            for axis in range(f.dim):
                shape = list(fine.shape)
                shape[axis : axis + 1] = [2**mp, 2 ** (m - mp)]
                fine = fine.reshape(shape).mean(axis=axis + 1)
            idem = max(idem, float(np.max(np.abs(fine - cond_exp(f, (mp,) * f.dim).values))))
    ok = tele < 1e-12 and orth < 1e-10 and idem < 1e-12
    report(4, "martingale identities", ok, f"telescoping {tele:.2g}, orthogonality {orth:.2g}, nesting {idem:.2g}")


def test_05_operator_norm_decay(report):
    t0 = time.perf_counter()
    res = lemma_decay_sweep(1, 10, 10, s=0, oversample=8)
    d_slope = res.summary["d_fit"].slope
    e_slope = res.summary["e_fit"].slope
    prod_err = 0.0
    for m, k in itertools.product(itertools.product(range(0, 11, 2), repeat=2), repeat=2):
        for fn in (op_norm_EPsi, op_norm_DPsi):
            two = fn(m, k)
            one = fn(m[0], k[0]) * fn(m[1], k[1])
            prod_err = max(prod_err, abs(two - one))
    dt = time.perf_counter() - t0
    ok = d_slope <= -0.9 and e_slope <= -0.9 and prod_err < 1e-10 and dt < 300
    detail = (f"D slope {d_slope:.3f} (tail j>=4: {res.summary['d_fit_tail'].slope:.3f}), "
              f"E slope {e_slope:.3f}, d=2 product error {prod_err:.2g}, {dt:.1f} s")
    report(5, "operator-norm decay", ok, detail)


def test_06_sharpness(report):
    t0 = time.perf_counter()
    res = sharpness_sweep(2, 4, 9, grid_log2=12)
    w = res.summary["weighted_l2_fit"].slope
    o = res.summary["orlicz_fit"].slope
    dt = time.perf_counter() - t0
    ok = abs(w - 1.0) <= 0.15 and abs(o - 1.0) <= 0.2 and dt < 600
    report(6, "sharpness", ok, f"weighted_l2 slope {w:.3f}, Orlicz slope {o:.3f}, {dt:.1f} s")


def test_07_oberlin(report):
    res = oberlin_sup(inverse_sqrt_orthant(2), 2**20)
    B = oberlin_block_sums(inverse_sqrt_orthant(1).factors[0], 2**20)
    decreasing = bool(np.all(np.diff(B[1:]) < 0))
    # brute force: direct summation, every N up to 4096 and a log-spaced sample beyond
    Ns = sorted(set(range(1, 4097)) | set(np.unique(np.geomspace(4097, 2**20, 200).astype(int))))
    brute = np.array([math.fsum(1.0 / k for k in range(N, 2 * N + 1)) for N in Ns])
    agree = float(np.max(np.abs(brute - B[Ns])))
    ok = abs(res.value - 2.25) <= 1e-6 and decreasing and agree < 1e-10 and bool(np.all(np.diff(brute) < 0))
    report(7, "Oberlin condition", ok, f"sup {res.value:.12g} at N={res.argmax}, decreasing {decreasing}, "
                                       f"brute-force agreement {agree:.2g}")


def test_08_d_e_exactness(report):
    lac = d_e_count(lacunary_product(2, 12, 2))
    dom = [d_e_count(dominant_set(f)) for f in _seeded_polys(20, 8, [(2, 24), (1, 200)])]
    pair = d_e_count(FreqSet([(1, 1), (2, 1)]))
    ok = lac == 1 and all(v == 1 for v in dom) and pair == 2
    report(8, "D_E exactness", ok, f"lacunary product {lac}, dominant sets {sorted(set(dom))}, {{(1,1),(2,1)}} {pair}")


def test_09_lambda_p_growth(report):
    t0 = time.perf_counter()
    # the exact grid for p = 16 needs 2^14 x 2^14 points; 2^12 keeps p = 4, 8 exact
    res = lambda_p_sweep(lacunary_product(2, 12, 2), PLIST, trials=50, seed=9, grid_log2=12)
    slope = res.summary["growth_fit"].slope
    dt = time.perf_counter() - t0
    ok = slope <= 1.25 and dt < 300
    maxima = ", ".join(f"p={p:g}: {v:.4f}" for p, v in res.summary["max_ratio"].items())
    report(9, "Lambda(p) growth", ok, f"fitted exponent {slope:.3f} ({maxima}), {dt:.1f} s")


def test_10_ratio_constants(report):
    base = load_baseline()
    assert base, "baseline.json missing; run python -m lptorus.harness.baseline"
    worst, finite, lines = 0.0, True, []
    for d in (1, 2):
        runs = {
            "cww": cww_ratio_sweep(d, PLIST, 50, 64, seed=1),
            "variant-smooth": variant_lp_ratio_sweep(d, PLIST, 50, 64, seed=1, projector="smooth"),
            "variant-rough": variant_lp_ratio_sweep(d, PLIST, 50, 64, seed=1, projector="rough"),
        }
        for name, res in runs.items():
            pinned = base[name][f"d{d}"]
            for p, v in res.summary["max_ratio"].items():
                finite &= math.isfinite(v)
                rel = abs(v / pinned[f"{p:g}"] - 1.0)
                worst = max(worst, rel)
            trend = [res.summary["max_ratio"][p] for p in PLIST]
            lines.append(f"{name} d={d} " + "/".join(f"{v:.3f}" for v in trend))
    ok = finite and worst <= 0.05
    report(10, "ratio constants", ok, f"max deviation from pinned {100 * worst:.2f}% ({'; '.join(lines)})")


def test_11_classical_kernels(report):
    fej = max(abs(lp_norm(fejer_poly(n), 1) - 1.0) for n in (1, 7, 31))
    vp_ok, vp_l1 = True, 0.0
    for N in range(0, 8):
        V = vallee_poussin_poly(N)
        j = np.arange(-V.halfdeg[0], V.halfdeg[0] + 1)
        vp_ok &= bool(np.all(V.coeffs[np.abs(j) <= 2**N] == 1.0))
        vp_l1 = max(vp_l1, lp_norm(V, 1))
    peak = max(abs(linf_estimate(fejer_poly(n)) - (n + 1)) for n in (1, 7, 31))
    ok = fej <= 1e-8 and vp_ok and vp_l1 <= 3
    report(11, "Fejer / de la Vallee Poussin", ok, f"max | ||K_n||_1 - 1 | {fej:.2g}, V-hat plateau exact {vp_ok}, "
                                                     f"max ||V||_1 {vp_l1:.4f}, K_n(0) error {peak:.2g}")


def test_12_exponential_integrability(report):
    base = load_baseline()["exp-int"]["d2"]
    c2 = base["c2"]
    res = exp_int_sweep(2, trials=20, degree=32, seed=12, c1_list=(0.01, 0.05, 0.1))
    by_trial = {}
    for r in res.records:
        by_trial.setdefault(r.params["trial"], []).append(r.measured["integral"])
    finite = all(math.isfinite(v) for vals in by_trial.values() for v in vals)
    monotone = all(a <= b for vals in by_trial.values() for a, b in zip(vals, vals[1:]))
    top = res.summary["max_integral"][0.05]
    ok = finite and monotone and top < c2
    report(12, "exponential integrability", ok, f"max at c1=0.05 {top:.6f} < pinned c2 {c2:.6f}: {top < c2}, "
                                                  f"monotone {monotone}")


CLI_RUNS = {
    "sharpness": ["--dim", "2", "--n-min", "1", "--n-max", "4", "--grid-log2", "8"],
    "lemma-decay": ["--dim", "1", "--max", "10"],
    "cww": ["--dim", "2", "--trials", "3", "--degree", "8", "--seed", "13"],
    "variant-lp": ["--dim", "2", "--trials", "3", "--degree", "8", "--projector", "rough"],
    "lambda-p": ["--dim", "2", "--count", "5", "--trials", "4", "--seed", "4"],
    "oberlin": ["--dim", "2", "--nmax", "65536"],
    "exp-int": ["--dim", "2", "--trials", "3", "--degree", "6"],
}


def test_13_cli_determinism(tmp_path, report):
    same = {}
    for cmd, args in CLI_RUNS.items():
        outs = []
        for rep in ("first", "second"):
            out = tmp_path / rep / cmd
            assert run_cli([cmd, *args, "--out", str(out)]) == 0
            outs.append((out / f"{cmd}.csv").read_bytes())
        same[cmd] = outs[0] == outs[1]
    ok = all(same.values())
    report(13, "CLI determinism", ok, ", ".join(f"{k} {'identical' if v else 'DIFFERS'}" for k, v in same.items()))
