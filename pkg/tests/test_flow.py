"""Flow engine tests: exact round solutions, RK4 order, stability bound,
adaptive stepping, perturbation decay, and typed failure statuses."""

import numpy as np
import pytest

from qlmass.background import Background
from qlmass.flow import (
    FlowConfig,
    FlowError,
    evolve,
    fit_decay,
    stable_dt,
    step,
)
from qlmass.sphere_grid import SphereGrid
from qlmass.surface import RadialGraph, assemble


@pytest.fixture(scope="module")
def grid():
    return SphereGrid(16, 32)


@pytest.fixture(scope="module")
def bg():
    return Background(n=2, m=1.0)


def round_graph(grid, bg, R):
    return RadialGraph(grid, bg, np.full((grid.n_theta, grid.n_phi), R))


def perturbed_graph(grid, bg, R=4.0, amp=0.05):
    rho = R * (1.0 + amp * grid.real_harmonic(2, 2))
    return RadialGraph(grid, bg, rho)


def test_rk4_single_step_round(grid, bg):
    """Round data reduces the flow to the linear ODE rho' = rho / n, so one
    RK4 step at the full stability bound is exact to roundoff."""
    graph = round_graph(grid, bg, 4.0)
    geom = assemble(graph)
    dt = stable_dt(geom, safety=1.0)
    out = step(graph, dt, geom=geom)
    assert np.abs(out.rho - 4.0 * np.exp(dt / 2.0)).max() < 1e-12


def test_step_rejects_unstable_dt(grid, bg):
    graph = round_graph(grid, bg, 4.0)
    bound = stable_dt(assemble(graph), safety=1.0)
    with pytest.raises(FlowError, match="use dt <="):
        step(graph, 2.0 * bound)


def test_round_flow_matches_exponential(grid, bg):
    """rho(t) = R0 e^{t/n} exactly for round data; check t = 2."""
    traj = evolve(round_graph(grid, bg, 4.0), FlowConfig(t_final=2.0, dt_safety=0.5))
    assert traj.status == "completed"
    exact = 4.0 * np.exp(1.0)
    assert np.abs(traj.final_graph.rho - exact).max() / exact < 1e-6
    # area grows monotonically along the expanding flow
    areas = traj.series("area")
    assert np.all(np.diff(areas) > 0)


def test_euclidean_round_flow(grid):
    """m = 0 background: the same exponential with N = 1."""
    bg0 = Background(n=2, m=0.0)
    traj = evolve(round_graph(grid, bg0, 1.0), FlowConfig(t_final=1.0, dt_safety=0.5))
    assert traj.status == "completed"
    assert np.abs(traj.final_graph.rho - np.exp(0.5)).max() < 1e-7


def test_perturbed_flow_rounds_out(grid, bg):
    """Star-shaped perturbations decay: the surface becomes rounder and stays
    within the C^0 envelope of the exact round solution."""
    traj = evolve(perturbed_graph(grid, bg), FlowConfig(t_final=2.0, output_stride=10))
    assert traj.status == "completed"
    # gradient never blows up
    assert max(traj.series("max_grad_varphi_sq")) < 2.0
    # anisotropy defect shrinks (gtilde measures the graph tilt)
    g_def = traj.series("gtilde_defect")
    assert g_def[-1] < 0.1 * g_def[0]
    # C^0 envelope: rho_min / rho_max stay within the exact round envelopes
    t = traj.times
    lo, hi = traj.series("rho_min"), traj.series("rho_max")
    r_lo, r_hi = lo[0] * np.exp(t / 2.0), hi[0] * np.exp(t / 2.0)
    assert np.all(lo >= r_lo * (1 - 1e-10))
    assert np.all(hi <= r_hi * (1 + 1e-10))


def test_lost_convexity_status(grid, bg):
    """A convexity floor above the actual sigma_2 triggers a typed abort."""
    cfg = FlowConfig(t_final=1.0, convexity_floor=10.0)
    traj = evolve(round_graph(grid, bg, 4.0), cfg)
    assert traj.status == "lost_convexity"
    assert "sigma" in traj.message


def test_max_steps_status(grid, bg):
    traj = evolve(round_graph(grid, bg, 4.0), FlowConfig(t_final=1.0, max_steps=2))
    assert traj.status == "max_steps"


def test_fit_decay(grid, bg):
    traj = evolve(perturbed_graph(grid, bg), FlowConfig(t_final=2.0, output_stride=5))
    fit = fit_decay(traj, "gtilde_defect")
    assert fit.status == "ok"
    assert fit.alpha > 0
    # round data: gtilde defect sits at roundoff, so the fit reports a floor
    round_traj = evolve(round_graph(grid, bg, 4.0), FlowConfig(t_final=1.0))
    assert fit_decay(round_traj, "gtilde_defect").status == "at_floor"


def test_stable_dt_scales_with_resolution(bg):
    """Latitude spacing governs the bound: doubling resolution quarters dt."""
    dts = []
    for nt in (16, 32):
        g = SphereGrid(nt, 2 * nt)
        dts.append(stable_dt(assemble(round_graph(g, bg, 4.0)), safety=1.0))
    ratio = dts[0] / dts[1]
    assert 3.0 < ratio < 5.5


def test_stable_dt_with_lapse(grid, bg):
    """Coupling the lapse ratio can only shrink the admissible step."""
    geom = assemble(round_graph(grid, bg, 4.0))
    w = np.full_like(geom.rho, 1.2)
    assert stable_dt(geom, w=w) <= stable_dt(geom)


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(k=3)
    with pytest.raises(ValueError):
        FlowConfig(t_final=-1.0)
