"""Large-sphere limit tests: frozen closed-form values, Richardson limits,
convergence exponents, and degenerate-input handling."""

import numpy as np
import pytest

from qlmass.asymptotics import (
    AsymptoticsError,
    RadialAFMetric,
    quasilocal_energy_at,
    quasilocal_limit_curve,
    sphere_data,
    volume_deficit_curve,
)

MU, M = 2.0, 1.0  # ADM mass of the ambient metric, comparison mass


@pytest.fixture(scope="module")
def metric():
    return RadialAFMetric.constant(MU)


def test_sphere_data_frozen(metric):
    A, H, N_t, H_m = sphere_data(metric, 100.0, M)
    assert A == pytest.approx(4 * np.pi * 100.0**2, rel=1e-15)
    assert H == pytest.approx(0.02 * np.sqrt(1.0 - 0.04), rel=1e-15)
    assert N_t == pytest.approx(np.sqrt(0.98), rel=1e-15)
    assert H_m == pytest.approx(0.02 * np.sqrt(0.98), rel=1e-15)


def test_energy_closed_form(metric):
    """E(rho) = m + rho N_m (N_m - N_mu); frozen at rho = 100."""
    rho = 100.0
    Nm = np.sqrt(1.0 - 2 * M / rho)
    Nmu = np.sqrt(1.0 - 2 * MU / rho)
    expected = M + rho * Nm * (Nm - Nmu)
    E = quasilocal_energy_at(metric, rho, M)
    assert E == pytest.approx(expected, rel=1e-14)
    assert E == pytest.approx(2.0051548, abs=5e-7)


def test_self_comparison_is_exact(metric):
    """Comparing Schwarzschild(mu) against itself returns mu at every radius."""
    for rho in (10.0, 100.0, 1e4):
        assert quasilocal_energy_at(metric, rho, MU) == pytest.approx(MU, rel=1e-11)


def test_energy_limit_curve(metric):
    rho = np.geomspace(1e2, 1e4, 9)
    curve = quasilocal_limit_curve(metric, M, rho)
    # raw value converges at rate 1/rho ...
    assert abs(curve.value[-1] - MU) < 1e-3
    assert curve.exponent == pytest.approx(1.0, abs=0.05)
    # ... and the two-point Richardson step removes that term
    assert abs(curve.limit - MU) < 1e-6


def test_volume_deficit_curve(metric):
    rho = np.geomspace(1e2, 1e4, 7)
    curve = volume_deficit_curve(metric, M, rho)
    assert curve.target == pytest.approx(MU - M, rel=1e-15)
    # normalized deficit approaches ADM - m within 1 percent at the last radius
    assert abs(curve.value[-1] - curve.target) < 0.01 * abs(curve.target)
    # deficit is positive: the heavier metric holds more volume
    assert np.all(curve.value > 0)


def test_radial_factor_validation():
    metric = RadialAFMetric.constant(MU)
    with pytest.raises(AsymptoticsError):
        metric.radial_factor_sq(1.0)  # inside the mu-horizon
    with pytest.raises(AsymptoticsError):
        sphere_data(metric, 0.5 * metric.rho_min, M)
    with pytest.raises(AsymptoticsError):
        sphere_data(metric, 8.0, 100.0)  # comparison sphere inside m-horizon
    with pytest.raises(AsymptoticsError):
        quasilocal_limit_curve(metric, M, [100.0])


def test_nonconstant_profile():
    """A profile mu(rho) = mu_infty - 1/rho still converges to the ADM mass."""
    mu = lambda rho: MU - 1.0 / rho
    metric = RadialAFMetric(mass_profile=mu, adm_mass=MU, rho_min=8.0)
    curve = quasilocal_limit_curve(metric, M, np.geomspace(1e3, 1e5, 7))
    assert abs(curve.limit - MU) < 1e-5
