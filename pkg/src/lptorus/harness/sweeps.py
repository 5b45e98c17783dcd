"""
Parameter sweeps behind every numerical experiment.

Each sweep returns a :class:`SweepResult`: the per-cell records (sorted
deterministically, whatever order the cells were run in) and a summary
holding maxima and fitted slopes.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from ..dyadic import op_norm_DPsi, op_norm_EPsi, pd_lp_norm, square_function
from ..errors import BudgetError, DegenerateInputError
from ..frequency_sets import (
    inverse_sqrt_orthant,
    oberlin_block_sums,
    oberlin_sup,
    weighted_l2,
)
from ..kernels import vallee_poussin_poly
from ..projections import sq_sum_inf
from ..spectral_core import (
    _quadrature_levels,
    evaluate,
    lp_norms,
    orlicz_functional,
    random_poly,
    tensor_product,
)
from .records import SweepRecord, fit_loglog, fit_semilog2

__all__ = [
    "SweepResult",
    "sharpness_sweep",
    "lemma_decay_sweep",
    "cww_ratio_sweep",
    "variant_lp_ratio_sweep",
    "lambda_p_sweep",
    "exp_integrability",
    "exp_int_sweep",
    "oberlin_sweep",
    "trial_seeds",
]

#: Largest per-dimension degree ``2^(N+1)`` accepted by the sharpness sweep.
SHARPNESS_MAX_DEGREE = 2**10


class SweepResult(NamedTuple):
    experiment: str
    records: list
    summary: dict


def _pmap(fn, items, workers=1):
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def trial_seeds(seed, trials):
    """Independent per-trial seeds; trial ``i`` depends only on ``(seed, i)``."""
    return np.random.SeedSequence(seed).spawn(trials)


def _tensor_power(f, d):
    out = f
    for _ in range(d - 1):
        out = tensor_product(out, f)
    return out


def sharpness_sweep(d=2, n_min=4, n_max=9, grid_log2=12, budget=None):
    """
    Weighted ``l^2`` norm and Orlicz functional of ``V_{2^N} (x) ... (x) V_{2^N}``.

    The multiplier is ``1/sqrt(k_1 ... k_d)`` on the positive orthant and the
    Orlicz exponent is ``r = d/2``.  Both measures are fitted against ``N``
    on log-log axes.
    """
    if d not in (1, 2):
        raise ValueError("sharpness sweep supports d in {1, 2}")
    if n_min < 0 or n_max < n_min:
        raise ValueError("need 0 <= n_min <= n_max")
    if 2 ** (n_max + 1) > SHARPNESS_MAX_DEGREE:
        raise BudgetError(f"degree 2^{n_max + 1} exceeds the sweep limit {SHARPNESS_MAX_DEGREE}")
    m = inverse_sqrt_orthant(d)
    r = d / 2.0
    records = []
    for N in range(n_min, n_max + 1):
        f = _tensor_power(vallee_poussin_poly(N), d)
        L = grid_log2 if grid_log2 is not None else _quadrature_levels(f, 8)
        wl2 = weighted_l2(m, f)
        orl = orlicz_functional(f, r, grid_log2=L, budget=budget)
        harmonic = float(np.sum(1.0 / np.arange(1, 2**N + 1)))
        records.append(
            SweepRecord(
                "sharpness",
                {"d": d, "N": N},
                {
                    "weighted_l2": wl2,
                    "harmonic_lower_bound": harmonic ** (d / 2.0),
                    "orlicz": orl,
                    "ratio": wl2 / orl,
                },
                {"seed": "none", "resolution": L if np.ndim(L) == 0 else tuple(L), "oversample": "fixed-grid"},
            )
        )
    summary = {}
    if len(records) >= 2:
        Ns = [rec.params["N"] for rec in records]
        summary["weighted_l2_fit"] = fit_loglog(Ns, [rec.measured["weighted_l2"] for rec in records])
        summary["orlicz_fit"] = fit_loglog(Ns, [rec.measured["orlicz"] for rec in records])
        summary["expected_slope"] = d / 2.0
    return SweepResult("sharpness", records, summary)


def lemma_decay_sweep(d=1, m_max=10, k_max=10, s=0, oversample=8, fit_range=(2, 8)):
    """
    Operator norms of ``E_m Psi_k`` and ``D_m Psi_k`` over all level/index vectors.

    For the martingale differences ``a_j`` is the maximum over pairs with
    ``sum_j |k_j - m_j| = j``.  For the expectations the decay regime is
    ``m_j < k_j`` for every ``j`` with ``j = sum (k_j - m_j)``; the rest
    (some ``m_j >= k_j``) is reported as a plateau maximum.  Fits are
    ``log2`` of the maxima against ``j`` over ``fit_range``.
    """
    if not (0 <= m_max <= 12 and 0 <= k_max <= 12):
        raise ValueError("level and index ranges must lie in [0, 12]")
    sv = (int(s),) * d if np.ndim(s) == 0 else tuple(int(v) for v in s)
    vecs_m = list(itertools.product(range(m_max + 1), repeat=d))
    vecs_k = list(itertools.product(range(k_max + 1), repeat=d))
    records = []
    d_max, e_max, e_plateau = {}, {}, 0.0
    for mv in vecs_m:
        for kv in vecs_k:
            e = op_norm_EPsi(mv, kv, sv, oversample=oversample, full_output=True)
            dn = op_norm_DPsi(mv, kv, sv, oversample=oversample, full_output=True)
            dist = int(sum(abs(a - b) for a, b in zip(kv, mv)))
            A = [j for j in range(d) if mv[j] < kv[j]]
            e_bound = 2.0 ** sum(mv[j] - kv[j] for j in A)
            records.append(
                SweepRecord(
                    "lemma-decay",
                    {"d": d, "m": mv, "k": kv, "s": sv},
                    {
                        "e_norm": e.value,
                        "d_norm": dn.value,
                        "e_over_bound": e.value / e_bound,
                        "d_times_decay": dn.value * 2.0**dist,
                    },
                    {"seed": "none", "resolution": e.log2res, "oversample": oversample},
                )
            )
            d_max[dist] = max(d_max.get(dist, 0.0), dn.value)
            if len(A) == d:
                j = int(sum(kv[i] - mv[i] for i in range(d)))
                e_max[j] = max(e_max.get(j, 0.0), e.value)
            else:
                e_plateau = max(e_plateau, e.value)
    summary = {
        "d_maxima": dict(sorted(d_max.items())),
        "e_maxima": dict(sorted(e_max.items())),
        "e_plateau_max": e_plateau,
        "d_constant": max(rec.measured["d_times_decay"] for rec in records),
        "e_constant": max(rec.measured["e_over_bound"] for rec in records),
        "fit_range": tuple(fit_range),
    }
    lo, hi = fit_range
    for name, table in (("d_fit", d_max), ("e_fit", e_max)):
        js = [j for j in range(lo, hi + 1) if table.get(j, 0.0) > 0.0]
        if len(js) >= 2:
            summary[name] = fit_semilog2(js, [table[j] for j in js])
    tail = [j for j in sorted(d_max) if j >= 4 and d_max[j] > 0.0]
    if len(tail) >= 2:
        summary["d_fit_tail"] = fit_semilog2(tail, [d_max[j] for j in tail])
    return SweepResult("lemma-decay", records, summary)


def _max_by_p(records, plist, key="ratio"):
    return {float(p): max(r.measured[key] for r in records if r.params["p"] == float(p)) for p in plist}


def cww_ratio_sweep(d=2, plist=(4, 8, 16), trials=50, degree=64, seed=0, law="complex-gaussian",
                    exponent=None, mmax=None, workers=1):
    """
    ``||f||_p / (p^exponent ||S f||_p)`` for random ``f``; ``S`` is the dyadic square function.

    ``exponent`` defaults to ``d/2``.  Norms of ``f`` are exact for even ``p``;
    the square-function norm is an exact finite sum.
    """
    exponent = d / 2.0 if exponent is None else float(exponent)
    plist = [float(p) for p in plist]

    def run(item):
        i, ss = item
        f = random_poly(d, degree, seed=ss, law=law)
        S = square_function(f, mmax)
        norms = lp_norms(f, plist)
        out = []
        for p, info in zip(plist, norms):
            rhs = pd_lp_norm(S, p)
            out.append(
                SweepRecord(
                    "cww",
                    {"d": d, "trial": i, "p": p},
                    {"lp_norm": info.value, "sqfun_lp": rhs, "ratio": info.value / (p**exponent * rhs),
                     "exact": info.exact},
                    {"seed": seed, "resolution": info.log2res, "oversample": "exact", "mmax": S.levels},
                )
            )
        return out

    rows = _pmap(run, enumerate(trial_seeds(seed, trials)), workers)
    records = sorted(itertools.chain.from_iterable(rows), key=lambda r: (r.params["trial"], r.params["p"]))
    return SweepResult("cww", records, {"max_ratio": _max_by_p(records, plist), "exponent": exponent})


def variant_lp_ratio_sweep(d=2, plist=(4, 8, 16), trials=50, degree=64, seed=0, projector="smooth",
                           law="complex-gaussian", oversample=8, workers=1):
    """``||f||_p / (p^(d/2) (sum_k ||P_k f||_inf^2)^(1/2))`` for smooth or rough ``P_k``."""
    plist = [float(p) for p in plist]

    def run(item):
        i, ss = item
        f = random_poly(d, degree, seed=ss, law=law)
        rhs = sq_sum_inf(f, projector, oversample=oversample)
        norms = lp_norms(f, plist)
        return [
            SweepRecord(
                "variant-lp",
                {"d": d, "projector": projector, "trial": i, "p": p},
                {"lp_norm": info.value, "sq_sum_inf": rhs, "ratio": info.value / (p ** (d / 2.0) * rhs),
                 "exact": info.exact},
                {"seed": seed, "resolution": info.log2res, "oversample": oversample},
            )
            for p, info in zip(plist, norms)
        ]

    rows = _pmap(run, enumerate(trial_seeds(seed, trials)), workers)
    records = sorted(itertools.chain.from_iterable(rows), key=lambda r: (r.params["trial"], r.params["p"]))
    return SweepResult("variant-lp", records, {"max_ratio": _max_by_p(records, plist), "projector": projector})


def _centered(E):
    """Shift ``E`` to centre its bounding box; ``|f|`` is unchanged by the modulation."""
    lo = E.points.min(axis=0)
    hi = E.points.max(axis=0)
    return E.shifted(-((lo + hi) // 2))


def lambda_p_sweep(E, plist=(4, 8, 16), trials=50, seed=0, grid_log2=None, budget=None, workers=1):
    """
    ``max ||f||_p / ||f||_2`` over random-sign ``E``-polynomials, and its growth in ``p``.

    ``E`` is recentred first (a modulation, so ``|f|`` is unchanged).  By
    default the grid is the exact one for the largest even ``p``; a grid
    exceeding the memory budget raises :class:`BudgetError`.  An explicit
    ``grid_log2`` overrides this and records report ``exact = False`` when
    the grid is too coarse for exactness.
    """
    if len(E) == 0:
        raise ValueError("E must be non-empty")
    plist = [float(p) for p in plist]
    Ec = _centered(E)
    K = Ec.halfdeg()

    def run(item):
        i, ss = item
        f = random_poly(E.dim, K, seed=ss, law="random-sign-on-support", support=Ec.points)
        norms = lp_norms(f, plist, grid_log2=grid_log2, budget=budget)
        l2 = f.l2norm()
        return [
            SweepRecord(
                "lambda-p",
                {"d": E.dim, "trial": i, "p": p},
                {"lp_norm": info.value, "l2_norm": l2, "ratio": info.value / l2, "exact": info.exact},
                {"seed": seed, "resolution": info.log2res, "oversample": "fixed-grid", "set_size": len(E)},
            )
            for p, info in zip(plist, norms)
        ]

    rows = _pmap(run, enumerate(trial_seeds(seed, trials)), workers)
    records = sorted(itertools.chain.from_iterable(rows), key=lambda r: (r.params["trial"], r.params["p"]))
    maxima = _max_by_p(records, plist)
    summary = {"max_ratio": maxima, "resolution": records[0].provenance["resolution"]}
    if len(plist) >= 2:
        summary["growth_fit"] = fit_loglog(list(maxima), list(maxima.values()))
        summary["expected_exponent"] = E.dim / 2.0
    return SweepResult("lambda-p", records, summary)


def exp_integrability(f, c1, oversample=8, normalizer=None):
    """
    ``int exp(c1 (|f| / R)^(2/d))`` with ``R = (sum_k ||Delta_k f||_inf^2)^(1/2)`` (rough bands).

    Raises
    ------
    DegenerateInputError
        If ``f`` is identically zero.
    """
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    if not np.any(f.coeffs):
        raise DegenerateInputError("exponential integral is undefined for f = 0")
    R = sq_sum_inf(f, "rough", oversample=oversample) if normalizer is None else float(normalizer)
    if R <= 0:
        raise DegenerateInputError("rough square sum vanishes")
    if all(K == 0 for K in f.halfdeg):
        a = np.abs(f.coeffs.ravel())
    else:
        a = np.abs(evaluate(f, _quadrature_levels(f, oversample)).values)
    return float(np.mean(np.exp(c1 * (a / R) ** (2.0 / f.dim))))


def exp_int_sweep(d=2, trials=20, degree=32, seed=0, c1_list=(0.01, 0.05, 0.1), oversample=8, workers=1):
    """Exponential integrals of random polynomials over several ``c1``; the normaliser is shared."""
    c1_list = [float(c) for c in c1_list]

    def run(item):
        i, ss = item
        f = random_poly(d, degree, seed=ss)
        R = sq_sum_inf(f, "rough", oversample=oversample)
        return [
            SweepRecord(
                "exp-int",
                {"d": d, "trial": i, "c1": c},
                {"integral": exp_integrability(f, c, oversample, normalizer=R), "rough_sq_sum": R},
                {"seed": seed, "resolution": _quadrature_levels(f, oversample), "oversample": oversample},
            )
            for c in c1_list
        ]

    rows = _pmap(run, enumerate(trial_seeds(seed, trials)), workers)
    records = sorted(itertools.chain.from_iterable(rows), key=lambda r: (r.params["trial"], r.params["c1"]))
    maxima = {c: max(r.measured["integral"] for r in records if r.params["c1"] == c) for c in c1_list}
    return SweepResult("exp-int", records, {"max_integral": maxima})


def oberlin_sweep(d=2, nmax=2**20, n_report=256):
    """Oberlin block sums of ``1/sqrt(k_1 ... k_d)``: the supremum and the per-dimension profile."""
    m = inverse_sqrt_orthant(d)
    res = oberlin_sup(m, nmax)
    B = oberlin_block_sums(m.factors[0], nmax)
    decreasing = bool(np.all(np.diff(B[1:]) < 0))
    records = [
        SweepRecord("oberlin", {"d": d, "N": int(N)}, {"block_sum_1d": float(B[N])},
                    {"seed": "none", "resolution": nmax, "oversample": "exact"})
        for N in range(min(nmax, n_report) + 1)
    ]
    summary = {"sup": res.value, "argmax": res.argmax, "nmax": nmax, "factorized": res.factorized,
               "decreasing_for_N_ge_1": decreasing}
    return SweepResult("oberlin", records, summary)
