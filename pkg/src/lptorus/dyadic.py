"""
Dyadic conditional expectations, martingale differences and square functions.

All averages are computed in coefficient space: the mean of ``e(rx)`` over a
cell ``[a, a + h)`` is ``e(ra) (e(rh) - 1) / (2 pi i r h)``, so cell values
are an (aliased) inverse DFT of weighted coefficients and carry no
quadrature error.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .kernels import default_psi
from .spectral_core import TrigPoly, lp_norm, next_pow2_log2, sample_folded

__all__ = [
    "PiecewiseDyadic",
    "cell_average_weights",
    "cond_exp",
    "mart_diff",
    "square_function",
    "square_function_tail",
    "default_mmax",
    "pd_lp_norm",
    "pd_linf",
    "OpNorm",
    "op_norm_EPsi",
    "op_norm_DPsi",
    "row_kernel_E",
    "row_kernels_D",
]


@dataclass(frozen=True, eq=False)
class PiecewiseDyadic:
    """A function constant on the cells ``prod_j [s_j 2^-m_j, (s_j + 1) 2^-m_j)``."""

    levels: tuple
    values: np.ndarray

    def __post_init__(self):
        levels = tuple(int(m) for m in self.levels)
        values = np.asarray(self.values)
        if values.shape != tuple(2**m for m in levels):
            raise ValueError(f"values shape {values.shape} does not match levels {levels}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return len(self.levels)

    def refined(self, levels):
        """Same function represented on finer cells."""
        levels = tuple(int(m) for m in levels)
        v = self.values
        for axis, (old, new) in enumerate(zip(self.levels, levels)):
            if new < old:
                raise ValueError(f"cannot refine level {old} down to {new}")
            if new > old:
                v = np.repeat(v, 2 ** (new - old), axis=axis)
        return PiecewiseDyadic(levels, v)

    def integral(self):
        """Exact integral over the torus (all cells have equal measure)."""
        return complex(np.mean(self.values))

    def _common(self, other):
        levels = tuple(max(a, b) for a, b in zip(self.levels, other.levels))
        return self.refined(levels), other.refined(levels)

    def inner(self, other):
        """``<g, h> = int g conj(h)``."""
        a, b = self._common(other)
        return complex(np.mean(a.values * np.conj(b.values)))

    def __add__(self, other):
        a, b = self._common(other)
        return PiecewiseDyadic(a.levels, a.values + b.values)

    def __sub__(self, other):
        a, b = self._common(other)
        return PiecewiseDyadic(a.levels, a.values - b.values)

    def allclose(self, other, atol=1e-12):
        a, b = self._common(other)
        return bool(np.allclose(a.values, b.values, atol=atol, rtol=0.0))


def _levels(m, dim):
    if np.ndim(m) == 0:
        m = (int(m),) * dim
    m = tuple(int(v) for v in m)
    if len(m) != dim:
        raise ValueError(f"expected {dim} levels, got {len(m)}")
    if any(v < 0 for v in m):
        raise ValueError("levels must be >= 0")
    return m


def cell_average_weights(r, h, a=0.0):
    """Mean of ``e(rx)`` over ``[a, a + h)`` for integer frequencies ``r``."""
    r = np.asarray(r, dtype=float)
    rh = r * h
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (_unit(rh) - 1.0) / (2j * np.pi * np.where(rh == 0, 1.0, rh))
    w = np.where(r == 0, 1.0 + 0j, w)
    return w * _unit(r * a) if a else w


def _unit(t):
    """``exp(2 pi i t)`` with the integer part of ``t`` removed first (dyadic ``t`` stay exact)."""
    t = np.asarray(t, dtype=float)
    return np.exp(2j * np.pi * (t - np.round(t)))


def cond_exp(f, m):
    """``E_m f``: exact cell averages of ``f`` at dyadic levels ``m``."""
    m = _levels(m, f.dim)
    c = f.coeffs
    for axis, (K, mj) in enumerate(zip(f.halfdeg, m)):
        w = cell_average_weights(np.arange(-K, K + 1), 2.0**-mj)
        shape = [1] * f.dim
        shape[axis] = -1
        c = c * w.reshape(shape)
    values = sample_folded(c, f.halfdeg, tuple(2**mj for mj in m))
    return PiecewiseDyadic(m, values)


def _diff_terms(m):
    """Inclusion-exclusion ``(sign, levels)`` pairs expanding ``D_m``."""
    active = [j for j, mj in enumerate(m) if mj >= 1]
    for pattern in itertools.product((0, 1), repeat=len(active)):
        lv = list(m)
        for j, drop in zip(active, pattern):
            lv[j] -= drop
        yield (-1) ** sum(pattern), tuple(lv)


def mart_diff(f, m, _cache=None):
    """
    ``D_m f = (D_{m_1} (x) ... (x) D_{m_d}) f`` with ``D_0 = E_0``.

    Represented at levels ``m``.
    """
    m = _levels(m, f.dim)
    out = np.zeros(tuple(2**mj for mj in m), dtype=np.complex128)
    for sign, lv in _diff_terms(m):
        if _cache is not None:
            if lv not in _cache:
                _cache[lv] = cond_exp(f, lv)
            e = _cache[lv]
        else:
            e = cond_exp(f, lv)
        out += sign * e.refined(m).values
    return PiecewiseDyadic(m, out)


def default_mmax(f):
    """Truncation levels ``ceil(log2 K_j) + 4``."""
    return tuple(next_pow2_log2(K) + 4 for K in f.halfdeg)


def square_function(f, mmax=None):
    """
    Truncated dyadic square function ``(sum_{m <= mmax} |D_m f|^2)^(1/2)``.

    Evaluated at the finest levels ``mmax``.  See :func:`square_function_tail`
    for a bound on the omitted part.
    """
    mmax = default_mmax(f) if mmax is None else _levels(mmax, f.dim)
    acc = np.zeros(tuple(2**mj for mj in mmax))
    cache = {}
    for m in itertools.product(*(range(mj + 1) for mj in mmax)):
        d = mart_diff(f, m, _cache=cache)
        acc += d.refined(mmax).values.real ** 2 + d.refined(mmax).values.imag ** 2
    return PiecewiseDyadic(mmax, np.sqrt(acc))


def square_function_tail(f, mmax=None):
    """
    Pointwise bound for ``(sum |D_m f|^2)^(1/2)`` over the indices omitted by the truncation.

    Uses ``||D_{m_j} g||_inf <= 2^{1 - m_j} ||d_j g||_inf`` on the truncated
    directions and ``||D_{m_j}||_{inf -> inf} <= 2`` on the others.
    """
    mmax = default_mmax(f) if mmax is None else _levels(mmax, f.dim)
    a = np.abs(f.coeffs)
    axes = [2 * np.pi * np.abs(np.arange(-K, K + 1)) for K in f.halfdeg]
    total = 0.0
    for T in itertools.product((False, True), repeat=f.dim):
        if not any(T):
            continue
        weight = a
        factor = 1.0
        for j, (inT, mj) in enumerate(zip(T, mmax)):
            if inT:
                shape = [1] * f.dim
                shape[j] = -1
                weight = weight * axes[j].reshape(shape)
                factor *= (4.0 / 3.0) * 4.0**-mj
            else:
                factor *= 4.0 * (mj + 1)
        total += factor * float(np.sum(weight)) ** 2
    return float(np.sqrt(total))


def pd_lp_norm(g, p):
    """Exact ``L^p`` norm of a piecewise-constant function."""
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(g.values)
    top = float(a.max(initial=0.0))
    if np.isinf(p):
        return top
    if top == 0.0:
        return 0.0
    return top * float(np.mean((a / top) ** p)) ** (1.0 / p)


def pd_linf(g):
    return float(np.abs(g.values).max(initial=0.0))


# -- operator norms of E_m Psi_k and D_m Psi_k ------------------------------

class OpNorm(NamedTuple):
    value: float
    factors: tuple
    log2res: tuple


def _vec(v, dim, name):
    if np.ndim(v) == 0:
        return (int(v),) * dim
    v = tuple(int(x) for x in v)
    if len(v) != dim:
        raise ValueError(f"{name} has length {len(v)}, expected {dim}")
    return v


def _symbol_coeffs(k, s, spec):
    D = spec.degree(k)
    r = np.arange(-D, D + 1)
    return r, np.asarray(spec.symbol(k, s, r), dtype=np.complex128)


def row_kernel_E(m, k, s=0, spec=None):
    """
    One-dimensional row kernel of ``E_m Psi_k^(s)`` for the cell ``[0, 2^-m)``.

    Returned with frequencies reflected (``y -> -y``), which leaves the
    ``L^1`` norm unchanged.
    """
    spec = default_psi() if spec is None else spec
    r, kappa = _symbol_coeffs(k, s, spec)
    return TrigPoly(kappa * cell_average_weights(r, 2.0**-m))


def row_kernels_D(m, k, s=0, spec=None):
    """
    Row kernels of ``D_m Psi_k^(s)``: one per half of the parent cell.

    For ``m = 0`` this is the single kernel of ``E_0 Psi_k^(s)``.
    """
    spec = default_psi() if spec is None else spec
    if m == 0:
        return (row_kernel_E(0, k, s, spec),)
    r, kappa = _symbol_coeffs(k, s, spec)
    h = 2.0**-m
    parent = cell_average_weights(r, 2 * h)
    left = cell_average_weights(r, h) - parent
    right = cell_average_weights(r, h, a=h) - parent
    return TrigPoly(kappa * left), TrigPoly(kappa * right)


@functools.lru_cache(maxsize=4096)
def _row_norm(kind, m, k, s, oversample, spec):
    if kind == "E":
        kernels = (row_kernel_E(m, k, s, spec),)
    else:
        kernels = row_kernels_D(m, k, s, spec)
    best, res = 0.0, None
    for g in kernels:
        info = lp_norm(g, 1, oversample=oversample, full_output=True)
        if not np.any(g.coeffs):
            info = info._replace(value=0.0)
        if res is None or info.value > best:
            best, res = info.value, info.log2res
    return best, res


def _op_norm(kind, m, k, s, oversample, spec, full_output):
    dim = 1 if np.ndim(m) == 0 else len(m)
    m = _vec(m, dim, "m")
    k = _vec(k, dim, "k")
    s = _vec(0 if s is None else s, dim, "s")
    spec = default_psi() if spec is None else spec
    factors, res = [], []
    for mj, kj, sj in zip(m, k, s):
        val, L = _row_norm(kind, mj, kj, sj, oversample, spec)
        factors.append(val)
        res.append(L[0])
    value = float(np.prod(factors))
    out = OpNorm(value, tuple(factors), tuple(res))
    return out if full_output else value


def op_norm_EPsi(m, k, s=None, oversample=8, spec=None, full_output=False):
    """
    ``||E_m Psi_k^(s)||_{L^inf -> L^inf}`` on the d-torus.

    The operator is a tensor product, its row kernel at a point factorises,
    and the norm is the product of the one-dimensional kernel ``L^1`` norms.
    All rows are translates of the row for the cell at the origin.  The
    ``L^1`` norms come from an oversampled rectangle rule whose resolution is
    reported when ``full_output`` is set.
    """
    return _op_norm("E", m, k, s, oversample, spec, full_output)


def op_norm_DPsi(m, k, s=None, oversample=8, spec=None, full_output=False):
    """
    ``||D_m Psi_k^(s)||_{L^inf -> L^inf}``.

    For ``m_j >= 1`` the row depends on which half of its parent cell the
    point lies in; both halves are evaluated and the larger norm kept.
    """
    return _op_norm("D", m, k, s, oversample, spec, full_output)
