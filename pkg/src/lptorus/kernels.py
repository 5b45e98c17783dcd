"""
Smooth dyadic cutoffs and the classical summability kernels.

The cutoff ``eta`` equals 1 on ``[-1, 1]``, vanishes outside ``(-2, 2)`` and
falls off across ``1 < |xi| < 2`` through the normalised primitive of the
bump ``t -> exp(-1/(t(1-t)))``.  Everything else is built from it:

* ``phi(xi) = eta(xi) - eta(2 xi)``, ``phi_k(xi) = phi(2^-k xi)``, ``phi_0 = eta``;
* ``delta(xi) = eta(xi/2)``;
* ``psi(xi) = delta(xi) - delta(8 xi)``, ``psi_k(xi) = psi(2^-k xi)``, ``psi_0 = delta``;
* ``psi^(s)(xi) = (2 pi i xi)^s psi(xi)`` for ``s`` in ``{-1, 0, 1}``.

With the inner dilation 8, ``psi`` is identically 1 on ``1/2 <= |xi| <= 2``
so that ``psi_k phi_k = phi_k`` holds exactly.
"""

from __future__ import annotations

import functools
import threading

import numpy as np

from .spectral_core import TrigPoly

__all__ = [
    "BumpSpec",
    "PsiSpec",
    "default_bump",
    "default_psi",
    "eta_eval",
    "phi_eval",
    "psi_eval",
    "fejer_poly",
    "vallee_poussin_poly",
    "synthesize_kernel",
]

_LATTICE_LOG2 = 16
_GL_NODES = 64


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0.0) & (t < 1.0)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


def _bump_primitive(u):
    """``int_0^u exp(-1/(t(1-t))) dt`` by Gauss-Legendre on ``[0, u]`` (vectorised)."""
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    u = np.asarray(u, dtype=float)[..., None]
    return np.sum(w * _bump(0.5 * (x + 1.0) * u), axis=-1) * u[..., 0] * 0.5


class BumpSpec:
    """
    The cutoff ``eta`` and the smooth Littlewood-Paley symbols ``phi_k``.

    The transition ``G(u)`` (``eta(1 + u) = 1 - G(u)``) is tabulated on a
    ``2^-16`` lattice and interpolated by cubic Hermite polynomials using the
    exact derivative, which keeps the error well below ``1e-12``.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._table = None

    def _cache(self):
        if self._table is None:
            with self._lock:
                if self._table is None:
                    n = 2**_LATTICE_LOG2
                    u = np.arange(n + 1) / n
                    primitive = _bump_primitive(u)
                    total = primitive[-1]
                    self._table = (primitive / total, _bump(u) / total)
        return self._table

    def transition(self, u):
        """Normalised primitive ``G(u)``, 0 at ``u <= 0`` and 1 at ``u >= 1``."""
        G, dG = self._cache()
        u = np.asarray(u, dtype=float)
        n = 2**_LATTICE_LOG2
        out = np.where(u >= 1.0, 1.0, 0.0)
        mid = (u > 0.0) & (u < 1.0)
        s = u[mid] * n
        i = np.minimum(np.floor(s).astype(np.int64), n - 1)
        t = s - i
        h = 1.0 / n
        t2, t3 = t * t, t * t * t
        val = (
            (2 * t3 - 3 * t2 + 1) * G[i]
            + (t3 - 2 * t2 + t) * h * dG[i]
            + (-2 * t3 + 3 * t2) * G[i + 1]
            + (t3 - t2) * h * dG[i + 1]
        )
        out[mid] = np.clip(val, 0.0, 1.0)
        return out

    def eta(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        out = 1.0 - self.transition(a - 1.0)
        return out if out.ndim else float(out)

    def phi(self, k, xi):
        """``phi_k(xi)``; ``phi_0 = eta``."""
        xi = np.asarray(xi, dtype=float)
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0:
            return self.eta(xi)
        x = np.ldexp(xi, -k)
        return self.eta(x) - self.eta(2.0 * x)

    def base(self, k, xi):
        return self.phi(k, xi)

    def symbol(self, k, s, xi):
        return _with_derivative_factor(self.phi(k, xi), k, s, xi)

    def degree(self, k):
        """Largest integer frequency where ``phi_k`` can be nonzero."""
        return 2 ** (k + 1) - 1


class PsiSpec:
    """
    The symbols ``delta``, ``psi_k`` and ``psi_k^(s)`` derived from a :class:`BumpSpec`.

    Parameters
    ----------
    bump : BumpSpec, optional
    inner_dilation : float
        ``psi(xi) = delta(xi) - delta(inner_dilation * xi)``.  The default 8
        makes ``psi`` equal to 1 on the whole support of ``phi``.
    """

    def __init__(self, bump=None, inner_dilation=8.0):
        self.bump = bump if bump is not None else default_bump()
        self.inner_dilation = float(inner_dilation)

    def delta(self, xi):
        return self.bump.eta(np.asarray(xi, dtype=float) * 0.5)

    def psi(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.delta(xi) - self.delta(self.inner_dilation * xi)

    def base(self, k, xi):
        """``psi_k(xi)``, with ``psi_0 = delta``."""
        if k < 0:
            raise ValueError("k must be >= 0")
        xi = np.asarray(xi, dtype=float)
        if k == 0:
            return self.delta(xi)
        return self.psi(np.ldexp(xi, -k))

    def symbol(self, k, s, xi):
        """``psi^(s)(2^-k xi)``; the ``s = -1`` value at ``xi = 0`` is taken as 0."""
        return _with_derivative_factor(self.base(k, xi), k, s, xi)

    def degree(self, k):
        return 2 ** (k + 2) - 1


def _with_derivative_factor(base, k, s, xi):
    if s not in (-1, 0, 1):
        raise ValueError(f"s must be -1, 0 or 1, got {s}")
    base = np.asarray(base, dtype=float)
    if s == 0:
        out = base.astype(np.complex128)
    else:
        w = 2j * np.pi * np.ldexp(np.asarray(xi, dtype=float), -k)
        if s == 1:
            out = w * base
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(w == 0, 0.0, base / np.where(w == 0, 1.0, w))
    return out if out.ndim else complex(out)


@functools.lru_cache(maxsize=None)
def default_bump():
    """Process-wide canonical :class:`BumpSpec`."""
    return BumpSpec()


@functools.lru_cache(maxsize=None)
def default_psi():
    """Process-wide canonical :class:`PsiSpec` (inner dilation 8)."""
    return PsiSpec(default_bump())


def eta_eval(xi):
    return default_bump().eta(xi)


def phi_eval(k, xi):
    return default_bump().phi(k, xi)


def psi_eval(k, s, xi):
    return default_psi().symbol(k, s, xi)


def fejer_poly(n):
    """Fejer kernel ``K_n``: coefficients ``1 - |j|/(n+1)`` for ``|j| <= n``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    j = np.arange(-n, n + 1)
    return TrigPoly(1.0 - np.abs(j) / (n + 1.0), real=True)


def vallee_poussin_poly(N):
    """de la Vallee Poussin kernel ``V_{2^N} = 2 K_{2^{N+1}-1} - K_{2^N-1}``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    return 2.0 * fejer_poly(2 ** (N + 1) - 1) - fejer_poly(2**N - 1)


def synthesize_kernel(k, s=0, spec=None):
    """
    The periodic kernel ``sum_r sigma(r) e(rx)`` of a compactly supported symbol.

    ``spec`` is a :class:`PsiSpec` (default) giving ``psi_k^(s)``, or a
    :class:`BumpSpec` giving ``(2 pi i 2^-k r)^s phi_k(r)``.
    """
    spec = default_psi() if spec is None else spec
    D = spec.degree(k)
    r = np.arange(-D, D + 1)
    c = np.asarray(spec.symbol(k, s, r))
    # even base symbol times (2 pi i xi)^s: coefficients are conjugate symmetric
    return TrigPoly(c, real=True).trimmed()
