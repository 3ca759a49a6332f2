"""Mass quantities: the weighted functional Q, extracted mass m0, quasi-local
energy, horizon comparison term, and the round-sphere energy curve Phi(m).

Conventions: Q(t) = integral of N sigma_1 (1 - 1/w) over Sigma_t; the
quasi-local energy of round boundary data (R, h) is m + (1/(n omega_n))
integral of N (H_m - h); the Hawking-type comparison term for a horizon of
area |S| is (1/2) (|S| / omega_n)^{(n-1)/n}.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .background import unit_sphere_area
from .shi_tam import mass_aspect


class MassError(ValueError):
    pass


def weighted_brown_york(geom, w):
    """Q = integral of N sigma_1 (1 - 1/w) over the surface."""
    return geom.integrate(geom.N * geom.sigma1 * (1.0 - 1.0 / np.asarray(w, dtype=float)))


def quasilocal_energy(geom, h_boundary):
    """m + (1/(n omega_n)) integral of N (sigma_1 - h) dsigma at the seed surface."""
    h = np.broadcast_to(np.asarray(h_boundary, dtype=float), geom.rho.shape)
    if np.any(h <= 0.0):
        raise MassError("boundary mean curvature must be positive")
    n, m = geom.bg.n, geom.bg.m
    return m + geom.integrate(geom.N * (geom.sigma1 - h)) / (n * unit_sphere_area(n))


def horizon_term(horizon_area, n=2):
    """(1/2) (|Sigma_h| / omega_n)^{(n-1)/n}; equals m for the Schwarzschild horizon."""
    if horizon_area <= 0.0:
        raise MassError("horizon area must be positive")
    return 0.5 * (horizon_area / unit_sphere_area(n)) ** ((n - 1) / n)


def inequality_margin(geom, h_boundary, horizon_area):
    """Main-inequality margin: quasi-local energy minus the horizon term."""
    return quasilocal_energy(geom, h_boundary) - horizon_term(horizon_area, geom.bg.n)


def extract_m0(traj, tail_span=0.5, min_samples=5):
    """Extracted mass from the tail of a coupled trajectory.

    m0 = average over the final `tail_span` time window of the area-weighted
    mean mass aspect; spread = max - min of the pointwise mass aspect over the
    window (nodes and times).  Requires the run to have expanded by >= e^2 in
    minimum radius.  A secondary estimate from the w-expansion
    w ~ 1 + m0 rho^{1-n} is returned for cross-checking."""
    snaps = [s for s in traj.snapshots if not np.isnan(s.m_aspect_mean)]
    if not snaps:
        raise MassError("trajectory carries no lapse ratio; cannot extract m0")
    growth = snaps[-1].rho_min / snaps[0].rho_min
    if growth < np.e**2:
        raise MassError(
            f"trajectory expanded by only {growth:.3g} < e^2; integrate further "
            "before extracting m0"
        )
    t1 = snaps[-1].t
    window = [s for s in snaps if s.t >= t1 - tail_span]
    if len(window) < min_samples:
        raise MassError(f"tail window holds {len(window)} samples < {min_samples}")
    m0 = float(np.mean([s.m_aspect_mean for s in window]))
    spread = float(
        max(s.m_aspect_max for s in window) - min(s.m_aspect_min for s in window)
    )

    m0_secondary = np.nan
    if traj.final_w is not None:
        # w = 1 + m0 rho^{1-n} + higher order, averaged on the final leaf
        from .surface import assemble

        geom = assemble(traj.final_graph)
        n = geom.bg.n
        m0_secondary = (
            geom.integrate((traj.final_w - 1.0) * geom.rho ** (n - 1)) / geom.area
        )
    return m0, spread, float(m0_secondary)


@dataclass
class MassReport:
    q_series: np.ndarray          # shape (num_snapshots, 2): columns (t, Q)
    q_derivative_audit: np.ndarray
    m0_estimate: tuple | None     # (value, spread, secondary) or None
    quasilocal_energy: float
    horizon_term: float | None
    inequality_margin: float | None
    monotone_ok: bool
    audit_ok: bool
    eps_mono: float
    max_audit_defect: float


def build_mass_report(traj, geom0, h_boundary, horizon_area=None,
                      mono_tol=1e-6, audit_tol=0.02, m0_kwargs=None):
    """Assemble the MassReport for a coupled trajectory seeded at geom0."""
    t = traj.times
    Q = traj.series("Q")
    audits = traj.series("audit_defect")
    q_scale = abs(Q[0]) if np.isfinite(Q[0]) else 1.0
    eps = float(np.max(np.diff(Q))) if len(Q) > 1 else 0.0
    monotone_ok = eps <= mono_tol * max(q_scale, 1e-300)
    max_audit = float(np.max(audits)) if len(audits) else 0.0

    m0_est = None
    try:
        m0_est = extract_m0(traj, **(m0_kwargs or {}))
    except MassError:
        pass

    qle = quasilocal_energy(geom0, h_boundary)
    hterm = margin = None
    if horizon_area is not None:
        hterm = horizon_term(horizon_area, geom0.bg.n)
        margin = qle - hterm

    return MassReport(
        q_series=np.stack([t, Q], axis=1),
        q_derivative_audit=audits,
        m0_estimate=m0_est,
        quasilocal_energy=qle,
        horizon_term=hterm,
        inequality_margin=margin,
        monotone_ok=bool(monotone_ok),
        audit_ok=bool(max_audit <= audit_tol),
        eps_mono=eps,
        max_audit_defect=max_audit,
    )


@dataclass
class PhiCurve:
    m: np.ndarray
    phi: np.ndarray
    m_star: float
    phi_min: float
    h_bar: float
    lapse_at_m_star: float


def round_phi_curve(R, h_mean, num_samples=513):
    """Round-boundary energy curve Phi(m) = R - m - h_bar R sqrt(1 - 2m/R).

    h_mean is the constant boundary mean-curvature value h; the paper's
    normalized mean is h_bar = h_mean R / 2, constrained to (0, 1).  The
    minimizer satisfies N(m*) = h_bar, i.e. m* = R (1 - h_bar^2) / 2; n = 2.
    Returns the sampled curve on m in (0, R/2) plus the golden-section minimum."""
    h_bar = 0.5 * h_mean * R
    if not 0.0 < h_bar < 1.0:
        raise MassError(
            f"need 0 < h_mean * R < 2 for a nondegenerate curve, got h_bar={h_bar}"
        )

    def phi(m):
        return R - m - h_bar * R * np.sqrt(1.0 - 2.0 * m / R)

    ms = np.linspace(0.0, 0.5 * R, num_samples)
    res = minimize_scalar(phi, bounds=(0.0, 0.5 * R), method="bounded",
                          options={"xatol": 1e-10})
    # polish: the minimizer is flat to O(delta^2), so refine via the stationarity
    # condition phi'(m) = -1 + h_bar / N(m) = 0 (monotone on the bracket)
    dphi = lambda m: -1.0 + h_bar / np.sqrt(1.0 - 2.0 * m / R)
    hi = 0.5 * R * (1.0 - 1e-14)
    m_star = float(brentq(dphi, 0.0, hi, xtol=1e-15, rtol=8.9e-16))
    if not np.isfinite(m_star):
        m_star = float(res.x)
    return PhiCurve(
        m=ms, phi=phi(ms), m_star=m_star, phi_min=float(phi(m_star)),
        h_bar=h_bar, lapse_at_m_star=float(np.sqrt(1.0 - 2.0 * m_star / R)),
    )
