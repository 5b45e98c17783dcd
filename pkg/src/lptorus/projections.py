"""Littlewood-Paley projections and Psi^(s) operators as coefficient multipliers."""

from __future__ import annotations

import itertools

import numpy as np

from .kernels import default_bump, default_psi
from .spectral_core import TrigPoly, linf_estimate, next_pow2_log2

__all__ = [
    "smooth_project",
    "rough_project",
    "rough_band",
    "psi_operator",
    "index_range",
    "projection_indices",
    "sq_sum_inf",
    "projection_linf_table",
]


def _vec(k, dim):
    if np.ndim(k) == 0:
        return (int(k),) * dim
    k = tuple(int(v) for v in k)
    if len(k) != dim:
        raise ValueError(f"index vector has length {len(k)}, expected {dim}")
    return k


def _apply_separable(f, factors):
    c = f.coeffs
    for axis, w in enumerate(factors):
        shape = [1] * f.dim
        shape[axis] = -1
        c = c * np.asarray(w).reshape(shape)
    real = f.real and all(np.isrealobj(w) or not np.any(np.asarray(w).imag) for w in factors)
    return TrigPoly(c, real=real)


def smooth_project(f, k, bump=None):
    """``Delta~_k f``: multiply ``c_r`` by ``prod_j phi_{k_j}(r_j)``."""
    bump = default_bump() if bump is None else bump
    k = _vec(k, f.dim)
    return _apply_separable(f, [bump.phi(kj, ax) for kj, ax in zip(k, f.freq_axes())])


def rough_band(k, r):
    """Indicator of the rough band: ``{0}`` for ``k = 0``, ``2^(k-1) <= |r| <= 2^k - 1`` otherwise."""
    r = np.abs(np.asarray(r))
    if k == 0:
        return (r == 0).astype(float)
    return ((r >= 2 ** (k - 1)) & (r <= 2**k - 1)).astype(float)


def rough_project(f, k):
    """``Delta_k f``: sharp restriction to a product of dyadic bands."""
    k = _vec(k, f.dim)
    return _apply_separable(f, [rough_band(kj, ax) for kj, ax in zip(k, f.freq_axes())])


def psi_operator(f, k, s=None, spec=None):
    """``Psi_k^(s) f``: multiply ``c_r`` by ``prod_j psi^(s_j)(2^-k_j r_j)``."""
    spec = default_psi() if spec is None else spec
    k = _vec(k, f.dim)
    s = _vec(0 if s is None else s, f.dim)
    return _apply_separable(f, [spec.symbol(kj, sj, ax) for kj, sj, ax in zip(k, s, f.freq_axes())])


def index_range(K):
    """Band indices ``0 .. ceil(log2 K) + 1`` that can meet frequencies ``|r| <= K``."""
    return range(next_pow2_log2(K) + 2) if K > 0 else range(1)


def projection_indices(f):
    return itertools.product(*(index_range(K) for K in f.halfdeg))


def _projector(name):
    if name == "smooth":
        return smooth_project
    if name == "rough":
        return rough_project
    raise ValueError(f"projector must be 'smooth' or 'rough', got {name!r}")


def projection_linf_table(f, projector="smooth", oversample=8):
    """``{k: ||P_k f||_inf}`` for every index that can be nonzero (lower estimates)."""
    project = _projector(projector)
    out = {}
    for k in projection_indices(f):
        g = project(f, k).trimmed()
        out[k] = linf_estimate(g, oversample=oversample) if np.any(g.coeffs) else 0.0
    return out


def sq_sum_inf(f, projector="smooth", oversample=8):
    """``(sum_k ||P_k f||_inf^2)^(1/2)`` with ``P_k`` the smooth or rough projection."""
    table = projection_linf_table(f, projector, oversample)
    return float(np.sqrt(sum(v * v for v in table.values())))
