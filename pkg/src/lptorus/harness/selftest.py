"""Quick internal consistency checks run by ``lptorus selftest``."""

from __future__ import annotations

import numpy as np

from ..dyadic import cond_exp, mart_diff
from ..frequency_sets import inverse_sqrt_orthant, oberlin_sup
from ..kernels import default_bump, fejer_poly
from ..projections import projection_indices, smooth_project
from ..spectral_core import TrigPoly, lp_norm, random_poly

__all__ = ["run_selftest"]


def _partition(seed):
    xi = np.random.default_rng(seed).uniform(-2.0**12, 2.0**12, 10_000)
    bump = default_bump()
    err = np.max(np.abs(sum(bump.phi(k, xi) for k in range(14)) - 1.0))
    return err < 1e-10, f"max error {err:.3g}"


def _fejer(seed):
    err = max(abs(lp_norm(fejer_poly(n), 1) - 1.0) for n in (1, 7, 31))
    return err < 1e-8, f"max | ||K_n||_1 - 1 | = {err:.3g}"


def _reconstruction(seed):
    f = random_poly(2, 20, seed=seed)
    total = TrigPoly.zeros(f.halfdeg)
    for k in projection_indices(f):
        total = total + smooth_project(f, k)
    err = (total - f).l2norm() / f.l2norm()
    return err < 1e-10, f"relative error {err:.3g}"


def _telescoping(seed):
    f = random_poly(1, 12, seed=seed)
    cache = {}
    total = sum((mart_diff(f, m, _cache=cache) for m in range(1, 7)), mart_diff(f, 0))
    ok = total.allclose(cond_exp(f, 6), atol=1e-12)
    return ok, "sum of D_m matches E_M" if ok else "telescoping mismatch"


def _oberlin(seed):
    val = oberlin_sup(inverse_sqrt_orthant(2), 2**12).value
    return abs(val - 2.25) < 1e-12, f"sup = {val:.15g}"


def run_selftest(seed=0):
    """Yield ``(name, passed, detail)`` for each check."""
    checks = [
        ("partition-of-unity", _partition),
        ("fejer-l1", _fejer),
        ("smooth-reconstruction", _reconstruction),
        ("martingale-telescoping", _telescoping),
        ("oberlin-sup", _oberlin),
    ]
    for name, fn in checks:
        ok, detail = fn(seed)
        yield name, bool(ok), detail
