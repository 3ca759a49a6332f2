"""Extension-lapse tests: initialization, fixed points, the rotationally
symmetric ODE reduction, frozen-geometry stepping, and error handling."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from qlmass.background import Background
from qlmass.oracle import w_ode_rhs
from qlmass.shi_tam import (
    ExtensionError,
    ExtensionState,
    initial_w,
    mass_aspect,
    mass_aspect_stats,
    mhat_from_boundary,
    monotonicity_integrand,
    step_w,
    w_rhs,
)
from qlmass.sphere_grid import SphereGrid
from qlmass.surface import RadialGraph, assemble


@pytest.fixture(scope="module")
def grid():
    return SphereGrid(16, 32)


@pytest.fixture(scope="module")
def bg():
    return Background(n=2, m=1.0)


def round_geom(grid, bg, R):
    return assemble(RadialGraph(grid, bg, np.full((grid.n_theta, grid.n_phi), R)))


def test_initial_w_round(grid, bg):
    """h = 0.9 H_m gives w_0 = 1/0.9 exactly."""
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    w0 = initial_w(geom, 0.9 * H_m)
    assert np.abs(w0 - 1.0 / 0.9).max() < 1e-12


def test_initial_w_validation(grid, bg):
    geom = round_geom(grid, bg, 4.0)
    with pytest.raises(ExtensionError):
        initial_w(geom, -0.1)
    with pytest.raises(ExtensionError):
        initial_w(geom, np.nan)


def test_w_one_is_fixed_point(grid, bg):
    """w = 1 (extension equals the background) is an exact equilibrium."""
    geom = round_geom(grid, bg, 4.0)
    w = np.ones_like(geom.rho)
    assert np.abs(w_rhs(geom, w)).max() < 1e-11
    assert np.abs(step_w(geom, w, 1e-3) - 1.0).max() < 1e-14


def test_round_rhs_matches_symmetric_ode(grid, bg):
    """On a round sphere with constant w the PDE collapses to the scalar ODE
    dw/dt = -(n-1)(w^3 - w) / (2 n N^2)."""
    R = 4.0
    geom = round_geom(grid, bg, R)
    for w_val in (0.8, 1.0 / 0.9, 1.5):
        w = np.full_like(geom.rho, w_val)
        rhs = w_rhs(geom, w)
        assert np.abs(rhs - w_ode_rhs(w_val, R, 1.0)).max() < 1e-9


def test_step_w_matches_scalar_integration(grid, bg):
    """Frozen-geometry RK4 for constant w tracks the scalar ODE solution."""
    R, w0 = 4.0, 1.0 / 0.9
    geom = round_geom(grid, bg, R)
    w = np.full_like(geom.rho, w0)
    dt, steps = 2e-3, 50
    for _ in range(steps):
        w = step_w(geom, w, dt)
    sol = solve_ivp(
        lambda t, y: w_ode_rhs(y[0], R, 1.0), (0.0, dt * steps), [w0],
        rtol=1e-12, atol=1e-14,
    )
    assert np.abs(w - sol.y[0, -1]).max() < 1e-9


def test_w_rhs_rejects_nonpositive(grid, bg):
    geom = round_geom(grid, bg, 4.0)
    bad = np.ones_like(geom.rho)
    bad[0, 0] = -0.5
    with pytest.raises(ExtensionError):
        w_rhs(geom, bad)


def test_mass_aspect_round(grid, bg):
    """rho = 8, m = 1, mhat = 1.5: mass aspect (mhat - m)/N^2 = 2/3."""
    geom = round_geom(grid, bg, 8.0)
    N2 = 1.0 - 2.0 / 8.0
    w = np.full_like(geom.rho, np.sqrt(N2 / (1.0 - 3.0 / 8.0)))
    ma = mass_aspect(geom, w)
    assert np.abs(ma - (1.5 - 1.0) / N2).max() < 1e-12
    lo, hi, mean = mass_aspect_stats(geom, w)
    assert lo == pytest.approx(hi, rel=1e-12)
    assert mean == pytest.approx(2.0 / 3.0 / 0.75 * 0.75, rel=1e-12)


def test_monotonicity_integrand_nonnegative(grid, bg):
    """The 2-convex round leaf has H dN/dnu + N sigma_2 > 0, so the integrand
    is pointwise nonnegative for any positive w."""
    geom = round_geom(grid, bg, 4.0)
    for w_val in (0.7, 1.0, 1.0 / 0.9, 2.0):
        w = np.full_like(geom.rho, w_val)
        assert np.min(monotonicity_integrand(geom, w)) >= 0.0
    # and vanishes identically at the fixed point
    assert np.abs(monotonicity_integrand(geom, np.ones_like(geom.rho))).max() == 0.0


def test_extension_state(grid, bg):
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    state = ExtensionState(t=0.0, geom=geom, w=initial_w(geom, 0.9 * H_m))
    assert np.abs(state.H_eta - 0.9 * H_m).max() < 1e-13
    nxt = state.step(1e-3)
    assert nxt.t == pytest.approx(1e-3)
    # relaxation toward w = 1 from above
    assert np.all(nxt.w < state.w)
    assert np.all(nxt.w > 1.0)


def test_mhat_from_boundary():
    H_m = 2.0 * np.sqrt(0.5) / 4.0
    assert mhat_from_boundary(4.0, 1.0, 0.9 * H_m) == pytest.approx(1.19, abs=1e-14)
    # matching the background exactly returns the background mass
    assert mhat_from_boundary(4.0, 1.0, H_m) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ExtensionError):
        mhat_from_boundary(4.0, 1.0, -1.0)
    with pytest.raises(ExtensionError):
        mhat_from_boundary(1.0, 1.0, 0.5)  # inside the horizon
    # h -> 0 drives mhat toward R/2 from below but never past the horizon bound
    assert mhat_from_boundary(4.0, 1.0, 1e-3 * H_m) < 2.0
