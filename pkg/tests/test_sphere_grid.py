"""Grid calculus: quadrature exactness, derivative accuracy, pole crossing."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlmass.sphere_grid import SphereGrid, fd_weights


@pytest.fixture(scope="module")
def grid():
    return SphereGrid(16, 32)


def test_fd_weights_differentiate_polynomials_exactly():
    x = np.array([-1.3, -0.4, 0.1, 0.5, 2.0])
    w = fd_weights(x, 0.3, 2)
    for p in range(5):
        vals = x**p
        assert w[0] @ vals == pytest.approx(0.3**p, abs=1e-12)
        assert w[1] @ vals == pytest.approx(p * 0.3 ** max(p - 1, 0), abs=1e-11)
        d2 = p * (p - 1) * 0.3 ** max(p - 2, 0)
        assert w[2] @ vals == pytest.approx(d2, abs=1e-10)


def test_quadrature_normalization(grid):
    ones = np.ones(grid.weights.shape)
    assert grid.integrate(ones) == pytest.approx(4 * np.pi, rel=1e-13)
    assert grid.integrate(grid.cos_theta * ones) == pytest.approx(0.0, abs=1e-12)
    assert grid.integrate(grid.cos_theta**2 * ones) == pytest.approx(
        4 * np.pi / 3, rel=1e-12)
    f = 0.5 * (3 * grid.cos_theta**2 - 1) * ones
    assert grid.integrate(f**2) == pytest.approx(4 * np.pi / 5, rel=1e-10)
    # odd in phi
    assert grid.integrate(np.sin(grid.theta)[:, None] * np.cos(grid.phi)[None, :]
                          ) == pytest.approx(0.0, abs=1e-12)


def test_harmonic_mean_zero_band(grid):
    # quadrature exactness band: all harmonics up to n_theta - 2 integrate to zero
    for ell in range(1, grid.n_theta - 1):
        for m in (0, 1, min(ell, 3), ell):
            if abs(m) > ell:
                continue
            assert grid.integrate(grid.real_harmonic(ell, m)) == pytest.approx(
                0.0, abs=1e-10), (ell, m)


def test_harmonic_orthonormality(grid):
    pairs = [(2, 2), (3, 1), (4, -2), (1, 0)]
    for i, (l1, m1) in enumerate(pairs):
        y1 = grid.real_harmonic(l1, m1)
        for l2, m2 in pairs[i:]:
            y2 = grid.real_harmonic(l2, m2)
            expect = 1.0 if (l1, m1) == (l2, m2) else 0.0
            assert grid.integrate(y1 * y2) == pytest.approx(expect, abs=1e-10)


def test_constant_derivatives_vanish(grid):
    c = np.full(grid.weights.shape, 2.7)
    assert np.abs(grid.d_theta(c)).max() < 1e-12
    assert np.abs(grid.d_phi(c)).max() < 1e-13
    for h in grid.hessian(c):
        assert np.abs(h).max() < 1e-11


def test_laplacian_eigenfunctions_accuracy(grid):
    f = grid.cos_theta * np.ones(grid.weights.shape)
    assert np.abs(grid.laplacian(f) + 2 * f).max() < 1e-6
    y22 = grid.real_harmonic(2, 2)
    assert np.abs(grid.laplacian(y22) + 6 * y22).max() < 1e-4


@pytest.mark.parametrize("ell,m", [(2, 2), (3, 1), (4, -3), (4, 0)])
def test_laplacian_convergence_order(ell, m):
    errs = []
    for nt, nphi in [(12, 24), (24, 48)]:
        g = SphereGrid(nt, nphi)
        y = g.real_harmonic(ell, m)
        errs.append(np.abs(g.laplacian(y) + ell * (ell + 1) * y).max())
    order = np.log2(errs[0] / errs[1])
    assert order >= 3.5, (ell, m, errs, order)


def test_integration_by_parts_order():
    orders = []
    errs = []
    for nt, nphi in [(12, 24), (24, 48)]:
        g = SphereGrid(nt, nphi)
        f = g.real_harmonic(3, 2) + 0.5 * g.real_harmonic(1, 0)
        h = np.exp(g.cos_theta * np.ones(g.weights.shape)) \
            + 0.2 * g.real_harmonic(4, -1)
        errs.append(abs(g.integrate(f * g.laplacian(h)) -
                        g.integrate(h * g.laplacian(f))))
    order = np.log2(errs[0] / errs[1])
    assert order >= 3.0, (errs, order)


def test_pole_crossing_smoothness():
    # a smooth function expressed in Cartesian components is differentiated
    # accurately through the pole rows
    g = SphereGrid(24, 48)
    th, ph = g.theta[:, None], g.phi[None, :]
    x = np.sin(th) * np.cos(ph)
    z = np.cos(th) * np.ones_like(ph)
    f = np.exp(z) + x * z
    f_t_exact = -np.sin(th) * np.exp(z) + np.cos(th) * np.cos(ph) * z - x * np.sin(th)
    assert np.abs(g.d_theta(f) - f_t_exact).max() < 5e-5


def test_polar_filter_properties(grid):
    ones = np.ones(grid.weights.shape)
    assert np.array_equal(grid.polar_filter(ones), ones)
    y22 = grid.real_harmonic(2, 2)
    assert np.abs(grid.polar_filter(y22) - y22).max() < 1e-13
    # idempotent
    f = y22 + 0.3 * grid.real_harmonic(4, 3)
    once = grid.polar_filter(f)
    assert np.abs(grid.polar_filter(once) - once).max() < 1e-14
    # high azimuthal mode is removed near the pole, kept at the equator
    hi = np.cos(12 * grid.phi)[None, :] * np.ones(grid.weights.shape)
    filt = grid.polar_filter(hi)
    assert np.abs(filt[0]).max() < 1e-13          # pole row: k=12 > k_cut
    mid = grid.n_theta // 2
    assert np.abs(filt[mid] - hi[mid]).max() < 1e-13


def test_build_validation():
    with pytest.raises(ValueError):
        SphereGrid(6, 32)
    with pytest.raises(ValueError):
        SphereGrid(16, 33)
    with pytest.raises(ValueError):
        SphereGrid(16, 8)


def test_integrate_rejects_nan(grid):
    f = np.ones(grid.weights.shape)
    f[3, 5] = np.nan
    with pytest.raises(ValueError):
        grid.integrate(f)


def test_integrate_deterministic(grid):
    rng = np.random.default_rng(7)
    f = rng.standard_normal(grid.weights.shape)
    assert grid.integrate(f) == grid.integrate(f.copy())


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_integrate_linearity(a, b):
    g = SphereGrid(8, 16)
    f1 = g.real_harmonic(2, 1)
    f2 = g.cos_theta * np.ones(g.weights.shape)
    lhs = g.integrate(a * f1 + b * f2)
    rhs = a * g.integrate(f1) + b * g.integrate(f2)
    assert lhs == pytest.approx(rhs, abs=1e-10)
