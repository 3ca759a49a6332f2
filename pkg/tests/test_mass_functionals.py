"""Mass functional tests: the round energy curve Phi(m), horizon comparison
term, quasi-local energy of round boundary data, and m0 extraction."""

import numpy as np
import pytest

from qlmass.background import Background
from qlmass.flow import FlowConfig, Snapshot, Trajectory, evolve
from qlmass.mass import (
    MassError,
    build_mass_report,
    extract_m0,
    horizon_term,
    inequality_margin,
    quasilocal_energy,
    round_phi_curve,
    weighted_brown_york,
)
from qlmass.oracle import mass_aspect_exact, round_flow
from qlmass.shi_tam import initial_w
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


def test_phi_curve_frozen():
    """R = 2, h = 0.8: h_bar = 0.8, minimizer at N(m*) = h_bar, m* = 0.36."""
    curve = round_phi_curve(2.0, 0.8)
    assert curve.h_bar == pytest.approx(0.8, rel=1e-15)
    assert curve.m_star == pytest.approx(0.36, abs=1e-12)
    assert curve.lapse_at_m_star == pytest.approx(0.8, abs=1e-12)
    assert curve.phi_min == pytest.approx(2.0 - 0.36 - 0.8 * 2.0 * 0.8, abs=1e-12)
    # the polished minimizer beats every sampled point
    assert curve.phi_min <= curve.phi.min() + 1e-15
    # stationarity at machine precision
    dphi = -1.0 + curve.h_bar / np.sqrt(1.0 - curve.m_star)
    assert abs(dphi) < 1e-12


def test_phi_curve_validation():
    with pytest.raises(MassError):
        round_phi_curve(2.0, 1.1)   # h_bar >= 1
    with pytest.raises(MassError):
        round_phi_curve(2.0, 0.0)


def test_horizon_term_schwarzschild():
    """The Schwarzschild horizon (rho_h = 2m) reproduces its own mass."""
    area = 4 * np.pi * 2.0**2
    assert horizon_term(area) == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(MassError):
        horizon_term(-1.0)


def test_quasilocal_energy_round(grid, bg):
    """R = 4, h = 0.9 H_m: E = m + 0.1 N H_m |S| / (2 omega_2) = 1.2."""
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    E = quasilocal_energy(geom, 0.9 * H_m)
    assert E == pytest.approx(1.2, rel=1e-12)
    # matching h = H_m returns the background mass itself
    assert quasilocal_energy(geom, H_m) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(MassError):
        quasilocal_energy(geom, -0.1)


def test_inequality_margin(grid, bg):
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    area_h = 4 * np.pi * 2.0**2
    assert inequality_margin(geom, 0.9 * H_m, area_h) == pytest.approx(0.2, rel=1e-10)


def test_weighted_brown_york_round(grid, bg):
    """Q on the seed leaf with w_0 = 1/0.9 matches the closed form."""
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    w0 = initial_w(geom, 0.9 * H_m)
    assert weighted_brown_york(geom, w0) == pytest.approx(5.026548245743675, rel=1e-12)


def _synthetic_trajectory(t_final=6.0, num=121, m=1.0, mhat=1.19):
    """Closed-form coupled trajectory with the exact symmetric mass aspect."""
    snaps = []
    for i, t in enumerate(np.linspace(0.0, t_final, num)):
        rho = float(round_flow(4.0, t))
        ma = float(mass_aspect_exact(rho, m, mhat))
        snaps.append(Snapshot(
            t=float(t), step=i, rho_min=rho, rho_max=rho,
            area=4 * np.pi * rho**2, Q=np.nan,
            m_aspect_min=ma, m_aspect_max=ma,
            roundness_defect=0.0, gtilde_defect=0.0, min_sigma2=1.0,
            max_grad_varphi_sq=0.0, audit_defect=0.0, m_aspect_mean=ma,
        ))
    return Trajectory(snapshots=snaps, status="completed", message="",
                      config=FlowConfig(t_final=t_final), final_graph=None,
                      final_w=None, wall_time=0.0)


def test_extract_m0_synthetic():
    """On the exact symmetric trajectory the tail average recovers mhat - m to
    the 2m/rho bias of the finite final radius."""
    traj = _synthetic_trajectory(t_final=11.0)
    m0, spread, _ = extract_m0(traj)
    assert m0 == pytest.approx(0.19, abs=2e-3)
    assert spread < 5e-3
    # short runs are rejected rather than silently biased
    with pytest.raises(MassError, match="e\\^2"):
        extract_m0(_synthetic_trajectory(t_final=1.0))


def test_extract_m0_requires_lapse(grid, bg):
    traj = evolve(
        RadialGraph(grid, bg, np.full((16, 32), 4.0)), FlowConfig(t_final=0.2)
    )
    with pytest.raises(MassError, match="lapse"):
        extract_m0(traj)


def test_build_mass_report(grid, bg):
    """Short coupled round run: monotone, audited, no m0 (run too short)."""
    geom = round_geom(grid, bg, 4.0)
    H_m = 2.0 * bg.lapse(4.0) / 4.0
    h = 0.9 * H_m
    graph = RadialGraph(grid, bg, np.full((16, 32), 4.0))
    traj = evolve(graph, FlowConfig(t_final=0.5, output_stride=5),
                  w0=initial_w(geom, h))
    rep = build_mass_report(traj, geom, h, horizon_area=4 * np.pi * 4.0)
    assert rep.monotone_ok and rep.audit_ok
    assert rep.m0_estimate is None
    assert rep.quasilocal_energy == pytest.approx(1.2, rel=1e-10)
    assert rep.horizon_term == pytest.approx(1.0, rel=1e-14)
    assert rep.inequality_margin == pytest.approx(0.2, rel=1e-9)
    assert rep.q_series[0, 1] == pytest.approx(5.026548245743675, rel=1e-10)
