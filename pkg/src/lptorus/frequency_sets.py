"""
Block geometry of Z^d: the bands ``+-{2^n - 1, ..., 2^(n+1) - 2}``, the block
count ``D_E``, Oberlin block sums, multipliers and thin-set functionals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .spectral_core import TrigPoly

__all__ = [
    "JBand",
    "band_of",
    "band_keys",
    "FreqSet",
    "MultiplierSymbol",
    "inverse_sqrt_orthant",
    "d_e_count",
    "OberlinResult",
    "oberlin_block_sums",
    "oberlin_sup",
    "multiplier_apply",
    "weighted_l2",
    "zygmund_lhs",
    "dominant_set",
    "lacunary_product",
    "sidon_sum",
]


@dataclass(frozen=True, order=True)
class JBand:
    """
    ``{2^n - 1, ..., 2^(n+1) - 2}`` for ``sign = +1``; its mirror image for ``sign = -1``.

    Both generation-0 bands are ``{0}``.
    """

    sign: int
    n: int

    def __post_init__(self):
        if self.sign not in (1, -1) or self.n < 0:
            raise ValueError(f"invalid band sign={self.sign} n={self.n}")

    @property
    def lo(self):
        return 2**self.n - 1 if self.sign > 0 else -(2 ** (self.n + 1)) + 2

    @property
    def hi(self):
        return 2 ** (self.n + 1) - 2 if self.sign > 0 else -(2**self.n) + 1

    def __len__(self):
        return 2**self.n

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def members(self):
        return range(self.lo, self.hi + 1)


def band_of(x):
    """The band holding integer ``x``; 0 is assigned to the positive ``{0}`` band."""
    x = int(x)
    if x >= 0:
        return JBand(1, (x + 1).bit_length() - 1)
    return JBand(-1, (1 - x).bit_length() - 1)


def band_keys(points):
    """
    Signed generations ``+-(n + 1)`` per coordinate (0 for the ``{0}`` band).

    Two frequencies lie in a common band product exactly when their keys agree.
    """
    p = np.asarray(points, dtype=np.int64)
    mag = np.abs(p) + 1
    gen = np.floor(np.log2(mag)).astype(np.int64)
    # correct float rounding near powers of two
    gen = np.where(2 ** (gen + 1) <= mag, gen + 1, gen)
    gen = np.where(2**gen > mag, gen - 1, gen)
    return np.where(gen == 0, 0, np.sign(p) * (gen + 1))


class FreqSet:
    """Finite set of frequencies in Z^d, stored as a sorted ``(n, d)`` array."""

    def __init__(self, points, dim=None):
        arr = np.asarray(points, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, dim or 1)
        arr = np.atleast_2d(arr)
        if arr.ndim != 2:
            raise ValueError("points must be a sequence of integer vectors")
        if arr.shape[0] > 0:
            arr = np.unique(arr, axis=0)
        self.points = arr
        self.points.setflags(write=False)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return (tuple(int(v) for v in p) for p in self.points)

    def __contains__(self, k):
        k = np.asarray(k, dtype=np.int64)
        return bool(np.any(np.all(self.points == k, axis=1)))

    def __eq__(self, other):
        return isinstance(other, FreqSet) and np.array_equal(self.points, other.points)

    def __repr__(self):
        return f"FreqSet(dim={self.dim}, n={len(self)})"

    def union(self, other):
        return FreqSet(np.vstack([self.points, other.points]))

    def issubset(self, other):
        return all(p in other for p in self)

    def shifted(self, offset):
        return FreqSet(self.points + np.asarray(offset, dtype=np.int64))

    def halfdeg(self):
        return tuple(int(v) for v in np.max(np.abs(self.points), axis=0))

    def dumps(self):
        """Newline-delimited, comma-separated integer tuples."""
        return "".join(",".join(str(int(v)) for v in p) + "\n" for p in self.points)

    @classmethod
    def loads(cls, text):
        rows = [line.strip() for line in text.splitlines()]
        rows = [r for r in rows if r and not r.startswith("#")]
        if not rows:
            raise ValueError("no points in frequency-set text")
        return cls([[int(v) for v in r.split(",")] for r in rows])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class MultiplierSymbol:
    """
    A symbol ``m: Z^d -> C``.

    ``rule`` maps an integer array of shape ``(..., d)`` to values of shape
    ``(...)``.  When ``factors`` is given the symbol is declared to be the
    product ``prod_j factors[j](k_j)``; block sums then factorise.
    """

    dim: int
    rule: Callable
    factors: Optional[tuple] = None
    support_bound: Optional[tuple] = None

    def __call__(self, k):
        k = np.asarray(k, dtype=np.int64)
        return np.asarray(self.rule(k), dtype=np.complex128)

    @classmethod
    def product(cls, *factors, support_bound=None):
        factors = tuple(factors)

        def rule(k):
            out = np.ones(k.shape[:-1], dtype=np.complex128)
            for j, g in enumerate(factors):
                out = out * np.asarray(g(k[..., j]))
            return out

        return cls(len(factors), rule, factors, support_bound)

    @classmethod
    def constant(cls, c, dim):
        return cls.product(*([lambda r: np.full(np.shape(r), c, dtype=np.complex128)] * dim))

    @classmethod
    def indicator(cls, E):
        keys = {tuple(p) for p in E}

        def rule(k):
            flat = k.reshape(-1, E.dim)
            vals = np.fromiter((tuple(int(v) for v in row) in keys for row in flat), dtype=float, count=len(flat))
            return vals.reshape(k.shape[:-1])

        return cls(E.dim, rule, None, E.halfdeg())

    def on_grid(self, halfdeg):
        axes = [np.arange(-K, K + 1) for K in halfdeg]
        if self.factors is not None:
            out = np.ones(tuple(len(a) for a in axes), dtype=np.complex128)
            for j, (g, ax) in enumerate(zip(self.factors, axes)):
                shape = [1] * self.dim
                shape[j] = -1
                out = out * np.asarray(g(ax), dtype=np.complex128).reshape(shape)
            return out
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return self(grid)


def _inv_sqrt_positive(r):
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(r > 0, 1.0 / np.sqrt(np.where(r > 0, r, 1.0)), 0.0)


def inverse_sqrt_orthant(dim):
    """``m(k) = 1/sqrt(k_1 ... k_d)`` on the open positive orthant, 0 elsewhere."""
    return MultiplierSymbol.product(*([_inv_sqrt_positive] * dim))


def d_e_count(E):
    """``D_E``: the largest number of points of ``E`` in one band product."""
    if len(E) == 0:
        raise ValueError("D_E is undefined for the empty set")
    keys = band_keys(E.points)
    _, counts = np.unique(keys, axis=0, return_counts=True)
    return int(counts.max())


class OberlinResult(NamedTuple):
    value: float
    argmax: tuple
    nmax: int
    factorized: bool


def oberlin_block_sums(g, nmax):
    """
    One-dimensional block sums ``B(N) = sum_{N <= |k| <= 2N} |g(k)|^2`` for ``N = 0..nmax``.

    ``g`` is a vectorised function of integer frequencies.
    """
    n = np.arange(0, 2 * nmax + 1)
    a = np.abs(np.asarray(g(n), dtype=np.complex128)) ** 2
    a[1:] += np.abs(np.asarray(g(-n[1:]), dtype=np.complex128)) ** 2
    prefix = np.concatenate([[0.0], np.cumsum(a)])
    N = np.arange(nmax + 1)
    return prefix[2 * N + 1] - prefix[N]


def _block_sums_dense(m, nmax):
    """All d-dimensional block sums by brute force over ``|k_j| <= 2 nmax``."""
    d = m.dim
    table = np.abs(m.on_grid((2 * nmax,) * d)) ** 2
    # fold +-k onto |k|
    for axis in range(d):
        table = np.moveaxis(table, axis, 0)
        pos = table[2 * nmax :].copy()
        pos[1:] += table[: 2 * nmax][::-1]
        table = np.moveaxis(pos, 0, axis)
    prefix = table
    for axis in range(d):
        prefix = np.cumsum(prefix, axis=axis)
        pad = [(0, 0)] * d
        pad[axis] = (1, 0)
        prefix = np.pad(prefix, pad)
    N = np.arange(nmax + 1)
    out = np.zeros((nmax + 1,) * d)
    for corner in np.ndindex(*(2,) * d):
        idx = []
        sign = 1
        for j, c in enumerate(corner):
            if c:
                idx.append(2 * N + 1)
            else:
                idx.append(N)
                sign = -sign
        shapes = [np.reshape(ix, [-1 if a == j else 1 for a in range(d)]) for j, ix in enumerate(idx)]
        out += sign * prefix[tuple(np.broadcast_arrays(*shapes))]
    return out


def oberlin_sup(m, nmax=2**20, factorize=None):
    """
    ``max_{0 <= N_j <= nmax} sum_{N_j <= |k_j| <= 2 N_j} |m(k)|^2``.

    A truncated scan, hence a lower bound for the full supremum; it is
    nondecreasing in ``nmax``.  Product symbols are handled per dimension
    (``factorized`` is set in the result); other symbols are summed by brute
    force, which is only feasible for modest ``nmax``.
    """
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    factorize = m.factors is not None if factorize is None else factorize
    if factorize:
        if m.factors is None:
            raise ValueError("symbol does not declare product structure")
        value, arg = 1.0, []
        for g in m.factors:
            b = oberlin_block_sums(g, nmax)
            i = int(np.argmax(b))
            value *= float(b[i])
            arg.append(i)
        return OberlinResult(value, tuple(arg), nmax, True)
    sums = _block_sums_dense(m, nmax)
    i = np.unravel_index(int(np.argmax(sums)), sums.shape)
    return OberlinResult(float(sums[i]), tuple(int(v) for v in i), nmax, False)


def multiplier_apply(m, f):
    """Coefficientwise product ``m(k) c_k``."""
    if m.dim != f.dim:
        raise ValueError("dimension mismatch")
    return TrigPoly(f.coeffs * m.on_grid(f.halfdeg))


def weighted_l2(m, f):
    """``(sum_k |m(k) c_k|^2)^(1/2)``."""
    return multiplier_apply(m, f).l2norm()


def _coeffs_on(f, E):
    K = np.asarray(f.halfdeg)
    pts = E.points
    inside = np.all(np.abs(pts) <= K, axis=1)
    vals = np.zeros(len(pts), dtype=np.complex128)
    vals[inside] = f.coeffs[tuple((pts[inside] + K).T)]
    return vals


def zygmund_lhs(f, E):
    """``(sum_{k in E} |c_k|^2)^(1/2)``."""
    return float(np.sqrt(np.sum(np.abs(_coeffs_on(f, E)) ** 2)))


def dominant_set(f):
    """
    One frequency of largest ``|c_k|`` per band product meeting the support of ``f``.

    Ties go to the lexicographically smallest frequency.
    """
    supp = f.support()
    if len(supp) == 0:
        return FreqSet(np.zeros((0, f.dim), dtype=np.int64))
    mags = np.abs(f.coeffs[tuple((supp + np.asarray(f.halfdeg)).T)])
    keys = band_keys(supp)
    # sort by band key, then descending magnitude, then frequency
    order = np.lexsort(tuple(supp.T[::-1]) + (-mags,) + tuple(keys.T[::-1]))
    k_sorted = keys[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = np.any(k_sorted[1:] != k_sorted[:-1], axis=1)
    return FreqSet(supp[order[first]])


def lacunary_product(base, count, dim):
    """``{(base^a_1, ..., base^a_d): 0 <= a_j < count}``."""
    if base < 2:
        raise ValueError("base must be >= 2")
    powers = base ** np.arange(count, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([powers] * dim), indexing="ij"), axis=-1)
    return FreqSet(grid.reshape(-1, dim))


def sidon_sum(f, Lam):
    """``sum_{k in Lam} |c_k|``."""
    return float(np.sum(np.abs(_coeffs_on(f, Lam))))
