import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lptorus import TrigPoly, random_poly
from lptorus.frequency_sets import d_e_count, dominant_set, lacunary_product
from lptorus.kernels import default_bump, synthesize_kernel
from lptorus.projections import (
    index_range,
    projection_indices,
    projection_linf_table,
    psi_operator,
    rough_band,
    rough_project,
    smooth_project,
    sq_sum_inf,
)
from lptorus.spectral_core import lp_norm

polys = st.builds(
    lambda d, K, seed: random_poly(d, K, seed=seed),
    st.integers(1, 2),
    st.integers(0, 40),
    st.integers(0, 2**31),
)


def reconstruct(f, project):
    total = TrigPoly.zeros(f.halfdeg)
    for k in projection_indices(f):
        total = total + project(f, k)
    return total


def test_index_range():
    assert list(index_range(0)) == [0]
    assert list(index_range(1)) == [0, 1]
    assert list(index_range(64)) == list(range(8))


def test_constant_projections():
    c = TrigPoly.constant(3.0, dim=2)
    assert smooth_project(c, (0, 0)).coef((0, 0)) == 3.0
    assert not np.any(smooth_project(c, (1, 0)).coeffs)
    assert not np.any(psi_operator(c, (2, 1)).coeffs)


def test_single_frequency_lands_in_one_smooth_band():
    f = TrigPoly.exponential((32,))
    weights = {k: smooth_project(f, k).coef((32,)) for k in index_range(32)}
    assert weights[5] == 1.0
    assert all(w == 0 for k, w in weights.items() if k != 5)


def test_rough_band_example():
    f = TrigPoly.exponential((3,))
    hits = [k for k in index_range(3) if np.any(rough_project(f, k).coeffs)]
    assert hits == [2]
    assert list(np.flatnonzero(rough_band(2, np.arange(-4, 5)))) == [1, 2, 6, 7]


@pytest.mark.parametrize("seed", range(10))
@pytest.mark.parametrize("d,K", [(1, 256), (2, 40), (2, (7, 130))])
def test_smooth_reconstruction(seed, d, K):
    f = random_poly(d, K, seed=seed)
    err = (reconstruct(f, smooth_project) - f).l2norm() / f.l2norm()
    assert err < 1e-10


@settings(max_examples=30, deadline=None)
@given(polys)
def test_rough_reconstruction_exact(f):
    np.testing.assert_array_equal(reconstruct(f, rough_project).coeffs, f.coeffs)


@settings(max_examples=20, deadline=None)
@given(polys)
def test_rough_projections_disjoint(f):
    idx = list(projection_indices(f))
    for k, kp in itertools.combinations(idx[:12], 2):
        assert not np.any(rough_project(rough_project(f, k), kp).coeffs)


@settings(max_examples=20, deadline=None)
@given(polys)
def test_smooth_almost_orthogonal(f):
    for k, kp in itertools.product(projection_indices(f), repeat=2):
        if max(abs(a - b) for a, b in zip(k, kp)) >= 2:
            assert not np.any(smooth_project(smooth_project(f, k), kp).coeffs)


@settings(max_examples=20, deadline=None)
@given(polys)
def test_bessel_bound(f):
    total = sum(smooth_project(f, k).l2norm() ** 2 for k in projection_indices(f))
    assert total <= 2**f.dim * f.l2norm() ** 2 + 1e-12


@pytest.mark.parametrize("k", range(0, 11))
def test_psi_reproduces_smooth_projection(k):
    f = random_poly(1, 2 ** (k + 1) + 3, seed=k)
    g = smooth_project(f, k)
    assert np.max(np.abs(psi_operator(g, k).coeffs - g.coeffs)) < 1e-12


def test_psi_reproduces_smooth_projection_2d():
    f = random_poly(2, 40, seed=3)
    for k in [(0, 3), (2, 2), (5, 1)]:
        g = smooth_project(f, k)
        assert np.max(np.abs(psi_operator(g, k).coeffs - g.coeffs)) < 1e-12


def test_derivative_pair_reproduces_psi_squared():
    f = random_poly(1, 40, seed=5)
    k = 4
    lhs = psi_operator(psi_operator(f, k, 1), k, -1)
    rhs = psi_operator(psi_operator(f, k, 0), k, 0)
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-13


def test_sq_sum_examples():
    assert sq_sum_inf(TrigPoly.constant(-2.0, dim=2)) == pytest.approx(2.0)
    e = TrigPoly.exponential((1, 1))
    assert sq_sum_inf(e, "rough") == pytest.approx(1.0)
    table = projection_linf_table(e, "rough")
    assert [k for k, v in table.items() if v] == [(1, 1)]
    with pytest.raises(ValueError):
        sq_sum_inf(e, "sharp")


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("d", [1, 2])
def test_rough_smooth_comparability(seed, d):
    # Delta~_k = Delta~_k sum_{m: |m_j - k_j| <= 1} Delta_m and ||Delta~_k||_{inf->inf} <= A^d
    A = max(lp_norm(synthesize_kernel(k, 0, default_bump()), 1) for k in range(9))
    f = random_poly(d, 48, seed=seed)
    rough = sq_sum_inf(f, "rough")
    smooth = sq_sum_inf(f, "smooth")
    # the rough terms are lower estimates; 1% covers their bias
    assert smooth <= A**d * 3**d * rough * 1.01
    assert rough <= 2**d * smooth * 3**d


@pytest.mark.parametrize("seed", range(5))
def test_dominant_set_polys_have_bounded_square_sum(seed):
    E = lacunary_product(2, 8, 2)
    f = random_poly(2, 128, seed=seed, law="random-sign-on-support", support=E.points)
    Ef = dominant_set(f)
    assert d_e_count(Ef) == 1
    g = TrigPoly(np.where(_mask(f, Ef), f.coeffs, 0))
    assert sq_sum_inf(g, "smooth") <= 6.0 * g.l2norm()


def _mask(f, E):
    m = np.zeros(f.shape, dtype=bool)
    m[tuple((E.points + np.asarray(f.halfdeg)).T)] = True
    return m
