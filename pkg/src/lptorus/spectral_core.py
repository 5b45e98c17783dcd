"""
Trigonometric polynomials on the d-torus.

A :class:`TrigPoly` stores a dense table of Fourier coefficients over the
box ``prod_j [-K_j, K_j]``; the torus is identified with ``[0, 1)^d`` and the
basis functions are ``e(k.x) = exp(2 pi i k.x)``.  Sampling happens on
power-of-two grids so that grid cells line up with dyadic intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BudgetError, ResolutionError

__all__ = [
    "TrigPoly",
    "SampleGrid",
    "NormInfo",
    "tensor_product",
    "evaluate",
    "analyze",
    "evaluate_at",
    "lp_norm",
    "lp_norms",
    "grid_lp_norm",
    "linf_estimate",
    "orlicz_functional",
    "random_poly",
    "LAWS",
    "DEFAULT_BUDGET_BYTES",
    "check_budget",
    "next_pow2_log2",
]

#: Default memory cap for sampling grids (bytes).
DEFAULT_BUDGET_BYTES = 2 * 2**30

LAWS = ("complex-gaussian", "unimodular-random-phase", "random-sign-on-support")

_REAL_TOL = 1e-12


def next_pow2_log2(n):
    """Smallest L >= 0 with 2**L >= n."""
    n = int(n)
    return 0 if n <= 1 else (n - 1).bit_length()


def check_budget(shape, itemsize=16, copies=3, budget=None):
    """Raise :class:`BudgetError` if ``copies`` arrays of ``shape`` exceed the budget."""
    budget = DEFAULT_BUDGET_BYTES if budget is None else budget
    need = int(np.prod(shape, dtype=np.int64)) * itemsize * copies
    if need > budget:
        raise BudgetError(
            f"grid {tuple(shape)} needs ~{need / 2**30:.2f} GiB, budget is "
            f"{budget / 2**30:.2f} GiB"
        )


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """
    Finite Fourier series ``sum_k c_k e(k.x)`` on the d-torus.

    Parameters
    ----------
    coeffs : array_like
        Complex table of shape ``(2K_1+1, ..., 2K_d+1)``; entry ``[K + k]``
        holds the coefficient of frequency ``k``.
    real : bool, optional
        Declares the polynomial real-valued.  The conjugate symmetry
        ``c(-k) = conj(c(k))`` is checked on construction.
    """

    coeffs: np.ndarray
    real: bool = False
    halfdeg: tuple = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128, copy=True)
        if c.ndim == 0:
            c = c.reshape(1)
        if any(n % 2 == 0 for n in c.shape):
            raise ValueError(f"coefficient table must have odd extents, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "halfdeg", tuple((n - 1) // 2 for n in c.shape))
        if self.real and not self.is_conjugate_symmetric():
            raise ValueError("poly flagged real but coefficients are not conjugate symmetric")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeros(cls, halfdeg):
        halfdeg = tuple(int(k) for k in halfdeg)
        return cls(np.zeros(tuple(2 * k + 1 for k in halfdeg), dtype=np.complex128))

    @classmethod
    def constant(cls, c, dim=1):
        return cls(np.full((1,) * dim, c, dtype=np.complex128))

    @classmethod
    def exponential(cls, freq, amplitude=1.0):
        """The single character ``amplitude * e(freq.x)``."""
        freq = tuple(int(k) for k in np.atleast_1d(freq))
        K = tuple(abs(k) for k in freq)
        table = np.zeros(tuple(2 * k + 1 for k in K), dtype=np.complex128)
        table[tuple(k + kk for k, kk in zip(K, freq))] = amplitude
        return cls(table)

    @classmethod
    def from_dict(cls, terms, dim=None):
        """Build from a mapping ``{frequency tuple: coefficient}``."""
        if not terms:
            return cls.zeros((0,) * (dim or 1))
        keys = [tuple(int(v) for v in np.atleast_1d(k)) for k in terms]
        d = len(keys[0])
        K = tuple(max(abs(k[j]) for k in keys) for j in range(d))
        table = np.zeros(tuple(2 * k + 1 for k in K), dtype=np.complex128)
        for key, val in zip(keys, terms.values()):
            table[tuple(kk + k for kk, k in zip(K, key))] += val
        return cls(table)

    # -- basic accessors --------------------------------------------------
    @property
    def dim(self):
        return self.coeffs.ndim

    @property
    def shape(self):
        return self.coeffs.shape

    def freq_axes(self):
        """Per-dimension integer frequency vectors ``-K_j..K_j``."""
        return [np.arange(-k, k + 1) for k in self.halfdeg]

    def coef(self, k):
        k = tuple(int(v) for v in np.atleast_1d(k))
        if any(abs(kk) > K for kk, K in zip(k, self.halfdeg)):
            return 0j
        return complex(self.coeffs[tuple(kk + K for kk, K in zip(k, self.halfdeg))])

    def support(self, tol=0.0):
        """Frequencies with ``|c_k| > tol`` as an ``(n, d)`` integer array."""
        idx = np.argwhere(np.abs(self.coeffs) > tol)
        return idx - np.asarray(self.halfdeg)

    def is_conjugate_symmetric(self, tol=_REAL_TOL):
        c = self.coeffs
        flipped = np.conj(c[(slice(None, None, -1),) * c.ndim])
        scale = max(1.0, float(np.max(np.abs(c))) if c.size else 1.0)
        return bool(np.max(np.abs(c - flipped), initial=0.0) <= tol * scale)

    def l2norm(self):
        """Parseval: ``(sum |c_k|^2)^(1/2)``."""
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    # -- reshaping --------------------------------------------------------
    def padded(self, halfdeg):
        """Same polynomial over a larger coefficient box."""
        halfdeg = tuple(int(k) for k in halfdeg)
        if any(n < k for n, k in zip(halfdeg, self.halfdeg)):
            raise ValueError(f"cannot pad {self.halfdeg} down to {halfdeg}")
        table = np.zeros(tuple(2 * k + 1 for k in halfdeg), dtype=np.complex128)
        sl = tuple(slice(n - k, n + k + 1) for n, k in zip(halfdeg, self.halfdeg))
        table[sl] = self.coeffs
        return TrigPoly(table, real=self.real)

    def trimmed(self, tol=0.0):
        """Shrink the box to the smallest symmetric one holding the support."""
        supp = self.support(tol)
        if len(supp) == 0:
            return TrigPoly.zeros((0,) * self.dim)
        K = np.max(np.abs(supp), axis=0)
        sl = tuple(slice(Kold - k, Kold + k + 1) for Kold, k in zip(self.halfdeg, K))
        return TrigPoly(self.coeffs[sl], real=self.real)

    def with_coeffs(self, coeffs, real=None):
        return TrigPoly(coeffs, real=self.real if real is None else real)

    # -- arithmetic -------------------------------------------------------
    def _aligned(self, other):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        K = tuple(max(a, b) for a, b in zip(self.halfdeg, other.halfdeg))
        return self.padded(K).coeffs, other.padded(K).coeffs

    def __add__(self, other):
        a, b = self._aligned(other)
        return TrigPoly(a + b, real=self.real and other.real)

    def __sub__(self, other):
        a, b = self._aligned(other)
        return TrigPoly(a - b, real=self.real and other.real)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return TrigPoly(self.coeffs * scalar, real=self.real and scalar.imag == 0)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def allclose(self, other, atol=1e-12, rtol=0.0):
        a, b = self._aligned(other)
        return bool(np.allclose(a, b, atol=atol, rtol=rtol))

    def __repr__(self):
        return f"TrigPoly(dim={self.dim}, halfdeg={self.halfdeg}, real={self.real})"


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Samples ``values[s] = f(s_1/M_1, ..., s_d/M_d)`` with ``M_j = 2**log2res[j]``."""

    log2res: tuple
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        L = tuple(int(l) for l in self.log2res)
        if v.shape != tuple(2**l for l in L):
            raise ValueError(f"values shape {v.shape} does not match log2res {L}")
        object.__setattr__(self, "log2res", L)
        object.__setattr__(self, "values", v)

    @property
    def dim(self):
        return len(self.log2res)

    @property
    def shape(self):
        return self.values.shape


def _as_levels(log2res, dim):
    if np.ndim(log2res) == 0:
        return (int(log2res),) * dim
    L = tuple(int(l) for l in log2res)
    if len(L) != dim:
        raise ValueError(f"expected {dim} resolutions, got {len(L)}")
    return L


def _scatter(coeffs, halfdeg, shape):
    """Place coefficients at ``k mod M`` (summing aliases) in an FFT buffer."""
    src = np.asarray(coeffs, dtype=np.complex128)
    index = []
    for axis, (K, M) in enumerate(zip(halfdeg, shape)):
        n = 2 * K + 1
        if n > M:
            # position p holds frequency p - K; sum positions congruent mod M
            P = -(-n // M) * M
            moved = np.moveaxis(src, axis, -1)
            pad = np.zeros(moved.shape[:-1] + (P,), dtype=np.complex128)
            pad[..., :n] = moved
            summed = pad.reshape(moved.shape[:-1] + (P // M, M)).sum(axis=-2)
            src = np.moveaxis(np.roll(summed, -K, axis=-1), -1, axis)
            index.append(np.arange(M))
        else:
            index.append(np.arange(-K, K + 1) % M)
    buf = np.zeros(shape, dtype=np.complex128)
    buf[np.ix_(*index)] = src
    return buf


def sample_folded(coeffs, halfdeg, shape):
    """Values at ``s/M`` for any grid size, aliases summed (exact, no check)."""
    buf = _scatter(np.asarray(coeffs), halfdeg, shape)
    return np.fft.ifftn(buf) * buf.size


def evaluate(f, log2res, budget=None):
    """
    Sample ``f`` on the grid ``s_j / 2**L_j``.

    Raises
    ------
    ResolutionError
        If some ``M_j = 2**L_j <= 2 K_j``.
    """
    L = _as_levels(log2res, f.dim)
    shape = tuple(2**l for l in L)
    for M, K in zip(shape, f.halfdeg):
        if M <= 2 * K:
            raise ResolutionError(f"grid size {M} cannot resolve half-degree {K}")
    check_budget(shape, budget=budget)
    values = sample_folded(f.coeffs, f.halfdeg, shape)
    if f.real:
        values = values.real
    return SampleGrid(L, values)


def analyze(grid, halfdeg):
    """Fourier coefficients of the degree-``halfdeg`` interpolant of ``grid``."""
    halfdeg = _as_levels(halfdeg, grid.dim)
    for M, K in zip(grid.shape, halfdeg):
        if M <= 2 * K:
            raise ResolutionError(f"grid size {M} cannot carry half-degree {K}")
    spec = np.fft.fftn(grid.values) / grid.values.size
    index = [np.arange(-K, K + 1) % M for K, M in zip(halfdeg, grid.shape)]
    return TrigPoly(spec[np.ix_(*index)])


def evaluate_at(f, points):
    """Direct summation of ``f`` at arbitrary points, ``points`` of shape ``(n, d)``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.empty(len(pts), dtype=np.complex128)
    axes = f.freq_axes()
    for i, x in enumerate(pts):
        acc = f.coeffs
        for j in range(f.dim - 1, -1, -1):
            acc = acc @ np.exp(2j * np.pi * axes[j] * x[j])
        out[i] = acc
    return out


def tensor_product(f, g):
    """``(f (x) g)(x, y) = f(x) g(y)``; coefficients multiply, dimensions add."""
    return TrigPoly(np.multiply.outer(f.coeffs, g.coeffs), real=f.real and g.real)


class NormInfo(NamedTuple):
    value: float
    log2res: tuple
    exact: bool


def grid_lp_norm(values, p):
    """``(mean |v|^p)^(1/p)`` over grid samples, scaled to avoid overflow."""
    a = np.abs(np.asarray(values))
    if np.isinf(p):
        return float(a.max(initial=0.0))
    top = float(a.max(initial=0.0))
    if top == 0.0:
        return 0.0
    return top * float(np.mean((a / top) ** p)) ** (1.0 / p)


def _is_even_int(p):
    return float(p).is_integer() and int(p) % 2 == 0


def _quadrature_levels(f, oversample):
    return tuple(next_pow2_log2(oversample * (2 * K + 1)) for K in f.halfdeg)


def _exact_levels(f, p):
    """Power-of-two sizes ``M_j > p K_j``: the rectangle rule is then exact for |f|^p."""
    return tuple(next_pow2_log2(int(p) * K + 1) for K in f.halfdeg)


def _norm_levels(f, plist, oversample, grid_log2):
    if grid_log2 is not None:
        L = _as_levels(grid_log2, f.dim)
    elif all(_is_even_int(p) for p in plist):
        L = tuple(max(ls) for ls in zip(*(_exact_levels(f, p) for p in plist)))
    else:
        L = _quadrature_levels(f, oversample)
        if any(_is_even_int(p) for p in plist):
            ex = tuple(max(ls) for ls in zip(*(_exact_levels(f, p) for p in plist if _is_even_int(p))))
            L = tuple(max(a, b) for a, b in zip(L, ex))
    return L


def lp_norms(f, plist, oversample=8, grid_log2=None, budget=None):
    """
    ``L^p`` norms of ``f`` for several exponents from a single sampling.

    Returns a list of :class:`NormInfo`.  ``exact`` is set when ``p`` is an
    even integer and every grid size exceeds ``p K_j``; the rectangle rule is
    then exact because ``|f|^p`` is itself a trigonometric polynomial.
    """
    plist = [float(p) for p in plist]
    if any(p < 1 for p in plist):
        raise ValueError("p must be >= 1")
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    if not np.any(f.coeffs):
        return [NormInfo(0.0, (0,) * f.dim, True) for _ in plist]
    L = _norm_levels(f, plist, oversample, grid_log2)
    grid = evaluate(f, L, budget=budget)
    out = []
    for p in plist:
        exact = _is_even_int(p) and all(2**l > p * K for l, K in zip(L, f.halfdeg))
        out.append(NormInfo(grid_lp_norm(grid.values, p), L, exact))
    return out


def lp_norm(f, p, oversample=8, grid_log2=None, full_output=False, budget=None):
    """
    ``||f||_{L^p(T^d)}`` with respect to normalised Lebesgue measure.

    Even integer ``p`` is computed exactly (up to roundoff) on a grid finer
    than ``p K_j`` per dimension.  Other exponents use the rectangle rule at
    ``oversample * (2K_j + 1)`` points rounded up to a power of two, and are
    flagged approximate in the ``full_output`` record.  Passing
    ``grid_log2`` pins the grid explicitly.
    """
    info = lp_norms(f, [p], oversample=oversample, grid_log2=grid_log2, budget=budget)[0]
    return info if full_output else info.value


def _parabolic_offset(ym, y0, yp):
    den = ym - 2.0 * y0 + yp
    if den >= 0.0:
        return 0.0
    return float(np.clip(0.5 * (ym - yp) / den, -0.5, 0.5))


def _refined_peak(f, a):
    """Parabolic step from the grid maximum of ``a = |f|``, then exact evaluation."""
    idx = np.unravel_index(int(np.argmax(a)), a.shape)
    best = float(a[idx])
    x = np.empty(f.dim)
    for j, (i, M) in enumerate(zip(idx, a.shape)):
        lo = list(idx)
        hi = list(idx)
        lo[j] = (i - 1) % M
        hi[j] = (i + 1) % M
        x[j] = (i + _parabolic_offset(a[tuple(lo)], best, a[tuple(hi)])) / M
    return max(best, float(abs(evaluate_at(f, x[None, :])[0])))


def linf_estimate(f, oversample=8, budget=None):
    """
    Lower estimate of ``sup |f|``.

    Takes the maximum of ``|f|`` over an oversampled grid, moves the best
    grid point by one parabolic step per dimension and evaluates ``f``
    exactly there.  The result is a value actually attained by ``|f|``, so it
    never exceeds the true sup norm.

    The same step is repeated on the nested stride-``2^j`` subgrids down to
    oversample 2 (these are the grids of smaller oversample factors), so the
    estimate never decreases when ``oversample`` doubles.
    """
    if oversample < 2:
        raise ValueError("oversample must be >= 2")
    if not np.any(f.coeffs):
        return 0.0
    if all(K == 0 for K in f.halfdeg):
        return float(abs(f.coeffs.flat[0]))
    L = _quadrature_levels(f, oversample)
    depth = min(l - l2 for l, l2 in zip(L, _quadrature_levels(f, 2)))
    a = np.abs(evaluate(f, L, budget=budget).values)
    best = 0.0
    for j in range(max(depth, 0) + 1):
        sub = a[(slice(None, None, 2**j),) * f.dim]
        best = max(best, _refined_peak(f, sub))
    return best


def orlicz_functional(f, r, oversample=8, grid_log2=None, budget=None):
    """Rectangle-rule value of ``int |f| log^r(1 + |f|)`` over the torus."""
    if r <= 0:
        raise ValueError("r must be positive")
    if not np.any(f.coeffs):
        return 0.0
    L = _as_levels(grid_log2, f.dim) if grid_log2 is not None else _quadrature_levels(f, oversample)
    a = np.abs(evaluate(f, L, budget=budget).values)
    return float(np.mean(a * np.log1p(a) ** r))


def random_poly(dim, halfdeg, seed=None, law="complex-gaussian", real=False, support=None):
    """
    Random trigonometric polynomial.

    Parameters
    ----------
    dim : int
    halfdeg : int or sequence of int
    seed : int, SeedSequence or Generator
    law : {'complex-gaussian', 'unimodular-random-phase', 'random-sign-on-support'}
        ``complex-gaussian`` draws ``(X + iY)/sqrt(2)`` with standard normal
        ``X, Y`` (so ``E|c|^2 = 1``); ``unimodular-random-phase`` draws
        ``e^{i theta}``; ``random-sign-on-support`` draws ``+-1``.
    real : bool
        Conjugate-symmetrise the coefficients (values on ``-k`` are replaced
        by ``conj`` of those on ``k``, and ``c_0`` made real).
    support : array_like of shape (n, d), optional
        Restrict nonzero coefficients to these frequencies.  Defaults to the
        full box.
    """
    if law not in LAWS:
        raise ValueError(f"unknown law {law!r}; expected one of {LAWS}")
    rng = np.random.default_rng(seed)
    K = _as_levels(halfdeg, dim)
    shape = tuple(2 * k + 1 for k in K)
    if support is None:
        mask = np.ones(shape, dtype=bool)
    else:
        supp = np.atleast_2d(np.asarray(support, dtype=int))
        if supp.shape[1] != dim:
            raise ValueError("support points must have dimension dim")
        if np.any(np.abs(supp) > np.asarray(K)):
            raise ValueError("support exceeds the declared half-degree")
        mask = np.zeros(shape, dtype=bool)
        mask[tuple((supp + np.asarray(K)).T)] = True
    n = int(mask.sum())
    if law == "complex-gaussian":
        vals = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    elif law == "unimodular-random-phase":
        vals = np.exp(2j * np.pi * rng.random(n))
    else:
        vals = rng.choice(np.array([-1.0, 1.0]), size=n).astype(np.complex128)
    table = np.zeros(shape, dtype=np.complex128)
    table[mask] = vals
    if real:
        flipped = np.conj(table[(slice(None, None, -1),) * dim])
        # keep the lexicographically positive half, mirror it onto the other
        pos = np.zeros(shape, dtype=bool)
        flat = np.arange(table.size).reshape(shape)
        pos[flat > table.size // 2] = True
        table = np.where(pos, table, flipped)
        centre = tuple(K)
        table[centre] = table[centre].real
    return TrigPoly(table, real=real)
