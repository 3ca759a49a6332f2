"""Inverse curvature flow engine, optionally coupled to the extension lapse.

Evolves star-shaped graphs by d rho / dt = N v / F where F is the normalized
curvature quotient (F = n sigma_k C(n,k-1) / (sigma_{k-1} C(n,k))); round
spheres satisfy rho(t) = rho(0) e^{t/n} exactly.  The lapse ratio w rides along
on the same RK4 stages with stage-consistent geometry.

Explicit stepping with an adaptive step size computed from per-node symbol
bounds of both parabolic operators; right-hand sides pass through the grid's
polar azimuthal filter so the pole cells do not set the CFL limit.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import shi_tam
from .surface import RadialGraph, SurfaceError, assemble, convexity_report, speed_function

RK4_REAL_AXIS = 2.5      # conservative real-axis stability extent for RK4
THETA_SYMBOL = 6.5       # max symbol of the 7-point second-derivative stencil / h^2


class FlowError(RuntimeError):
    pass


@dataclass
class FlowConfig:
    k: int = 2
    t_final: float = 3.0
    dt_safety: float = 0.25
    output_stride: int = 20
    convexity_floor: float = 1e-10
    audit_floor: float = 1e-10
    max_steps: int = 2_000_000
    store_fields: bool = False

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError(f"flow exponent k must be 1 or 2, got {self.k}")
        if self.t_final <= 0 or self.dt_safety <= 0 or self.output_stride < 1:
            raise ValueError("t_final, dt_safety must be positive; output_stride >= 1")


@dataclass
class Snapshot:
    t: float
    step: int
    rho_min: float
    rho_max: float
    area: float
    Q: float
    m_aspect_min: float
    m_aspect_max: float
    roundness_defect: float
    gtilde_defect: float
    min_sigma2: float
    max_grad_varphi_sq: float
    audit_defect: float
    m_aspect_mean: float = np.nan
    q_rate: float = np.nan           # quadrature of the Prop.-2.2 RHS (= dQ/dt)
    min_sigma1: float = np.nan
    w_max_dev: float = np.nan        # max |w - 1|
    rho: np.ndarray | None = None
    w: np.ndarray | None = None

    CSV_COLUMNS = (
        "t", "rho_min", "rho_max", "area", "Q", "m_aspect_min", "m_aspect_max",
        "roundness_defect", "gtilde_defect", "min_sigma2", "max_grad_varphi_sq",
        "audit_defect",
    )


@dataclass
class Trajectory:
    snapshots: list
    status: str          # "completed" | "lost_convexity" | "lapse_failure" | "max_steps"
    message: str
    config: FlowConfig
    final_graph: RadialGraph
    final_w: np.ndarray | None
    wall_time: float

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    def series(self, name):
        return np.array([getattr(s, name) for s in self.snapshots])


def rho_rhs(geom, k=2, convexity_floor=0.0):
    """Graph velocity N v / F of the inverse curvature flow."""
    if np.min(geom.sigma1) <= convexity_floor or (
        k == 2 and np.min(geom.sigma2) <= convexity_floor
    ):
        raise SurfaceError(
            f"lost k-convexity: min sigma_1 = {np.min(geom.sigma1):.3g}, "
            f"min sigma_2 = {np.min(geom.sigma2):.3g}"
        )
    return geom.N * geom.v / speed_function(geom, k)


def stable_dt(geom, w=None, k=2, safety=0.25):
    """Largest stable explicit step from per-node parabolic symbol bounds.

    Flow diffusivity: F'-eigenvalue-weighted tilde-sigma^{ij} / (F rho)^2;
    lapse diffusivity: (w^2 f / H) g^{ij}.  Azimuthal symbols use the filtered
    cutoff k_cut(theta), latitude symbols the local Gauss-Legendre spacing."""
    grid = geom.grid
    F = speed_function(geom, k)
    if k == 2:
        s1, s2 = geom.sigma1, geom.sigma2
        disc = np.sqrt(np.maximum(s1 * s1 - 4.0 * s2, 0.0))
        kappa_max = 0.5 * (s1 + disc)
        dF = 4.0 * kappa_max**2 / s1**2    # max eigenvalue of dF/dh
    else:
        dF = 1.0
    coef = dF / (F * geom.rho) ** 2
    if w is not None:
        coef_w = np.asarray(w) ** 2 / (F * geom.sigma1 * geom.rho**2)
        coef = np.maximum(coef, coef_w)
    # tilde-sigma^{theta theta} <= 1; tilde-sigma^{phi phi} <= 1/sin^2 included in ratio
    sin_t = grid.sin_theta[:, 0]
    lam = coef * (
        THETA_SYMBOL / grid.h_theta[:, None] ** 2
        + (grid.k_cut[:, None] / sin_t[:, None]) ** 2
    )
    return float(safety * RK4_REAL_AXIS / np.max(lam))


def step(graph, dt, k=2, apply_filter=True, geom=None):
    """One RK4 step of the flow alone (no lapse coupling).

    Rejects steps beyond the explicit stability bound with a suggested dt."""
    geom = geom if geom is not None else assemble(graph)
    bound = stable_dt(geom, None, k, safety=1.0)
    if dt > bound:
        raise FlowError(
            f"dt={dt:.3e} exceeds the explicit stability bound; use dt <= {bound:.3e}"
        )
    cfg = FlowConfig(k=k, t_final=dt)
    rho, _ = _rk4_step(graph, None, dt, cfg, apply_filter, geom0=geom)
    return replace(graph, rho=rho)


def _rk4_step(graph, w, dt, cfg, apply_filter=True, geom0=None):
    grid = graph.grid
    filt = grid.polar_filter if apply_filter else (lambda x: x)

    def rhs(rho_s, w_s, geom_s=None):
        if geom_s is None:
            geom_s = assemble(replace(graph, rho=rho_s))
        drho = filt(rho_rhs(geom_s, cfg.k, cfg.convexity_floor))
        if w_s is None:
            return drho, None
        st = shi_tam.stage_fields(geom_s, cfg.k)
        return drho, filt(shi_tam.w_rhs(geom_s, w_s, st, cfg.k, drho=drho))

    rho = graph.rho
    k1r, k1w = rhs(rho, w, geom0)
    k2r, k2w = rhs(rho + 0.5 * dt * k1r, None if w is None else w + 0.5 * dt * k1w)
    k3r, k3w = rhs(rho + 0.5 * dt * k2r, None if w is None else w + 0.5 * dt * k2w)
    k4r, k4w = rhs(rho + dt * k3r, None if w is None else w + dt * k3w)
    rho_new = rho + (dt / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    w_new = None
    if w is not None:
        w_new = w + (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    return rho_new, w_new


def _snapshot(geom, w, t, step_idx, cfg, prev, q_scale):
    rep = convexity_report(geom)
    if w is not None:
        Q = geom.integrate(geom.N * geom.sigma1 * (1.0 - 1.0 / w))
        ma_min, ma_max, ma_mean = shi_tam.mass_aspect_stats(geom, w)
        q_rate = -geom.integrate(shi_tam.monotonicity_integrand(geom, w, cfg.k))
        w_dev = float(np.max(np.abs(w - 1.0)))
    else:
        Q = ma_min = ma_max = ma_mean = q_rate = w_dev = np.nan

    audit = 0.0
    if prev is not None and w is not None and not np.isnan(prev.q_rate):
        dqdt = (Q - prev.Q) / (t - prev.t)
        rhs_mid = 0.5 * (q_rate + prev.q_rate)
        floor = cfg.audit_floor * max(1.0, q_scale)
        audit = abs(dqdt - rhs_mid) / max(abs(rhs_mid), abs(dqdt), floor)

    return Snapshot(
        t=t, step=step_idx,
        rho_min=float(np.min(geom.rho)), rho_max=float(np.max(geom.rho)),
        area=geom.area, Q=Q,
        m_aspect_min=ma_min, m_aspect_max=ma_max,
        roundness_defect=rep["roundness_defect"], gtilde_defect=rep["gtilde_defect"],
        min_sigma2=rep["min_sigma2"], max_grad_varphi_sq=rep["max_grad_varphi_sq"],
        audit_defect=audit, m_aspect_mean=ma_mean, q_rate=q_rate,
        min_sigma1=rep["min_sigma1"], w_max_dev=w_dev,
        rho=geom.rho.copy() if cfg.store_fields else None,
        w=None if w is None or not cfg.store_fields else w.copy(),
    )


def evolve(graph, config, w0=None):
    """Run the flow (optionally coupled to the lapse ratio) to t_final.

    Returns a Trajectory; on loss of convexity or lapse failure the trajectory
    carries the snapshots up to the failure with a typed status instead of
    raising."""
    cfg = config
    grid = graph.grid
    rho = grid.polar_filter(graph.rho)
    w = None if w0 is None else grid.polar_filter(np.asarray(w0, dtype=float))
    graph = replace(graph, rho=rho)

    t0 = time.perf_counter()
    snapshots = []
    status, message = "completed", ""
    t, step_idx = 0.0, 0
    geom = assemble(graph)
    snap = _snapshot(geom, w, t, 0, cfg, None, 0.0)
    q_scale = abs(snap.Q) if w is not None and np.isfinite(snap.Q) else 1.0
    snapshots.append(snap)

    try:
        while t < cfg.t_final - 1e-14:
            if step_idx >= cfg.max_steps:
                status, message = "max_steps", f"exceeded {cfg.max_steps} steps"
                break
            dt = min(stable_dt(geom, w, cfg.k, cfg.dt_safety), cfg.t_final - t)
            rho, w = _rk4_step(graph, w, dt, cfg, geom0=geom)
            graph = replace(graph, rho=rho)
            geom = assemble(graph)
            t += dt
            step_idx += 1
            if step_idx % cfg.output_stride == 0 or t >= cfg.t_final - 1e-14:
                snapshots.append(
                    _snapshot(geom, w, t, step_idx, cfg, snapshots[-1], q_scale)
                )
    except SurfaceError as err:
        status, message = "lost_convexity", f"t={t:.6g}: {err}"
    except shi_tam.ExtensionError as err:
        status, message = "lapse_failure", f"t={t:.6g}: {err}"

    return Trajectory(
        snapshots=snapshots, status=status, message=message, config=cfg,
        final_graph=graph, final_w=w, wall_time=time.perf_counter() - t0,
    )


@dataclass
class DecayFit:
    C: float
    alpha: float
    residual: float
    status: str  # "ok" | "at_floor" | "insufficient"


def fit_decay(traj, name, floor=1e-13, tail_fraction=0.5):
    """Least-squares exponential fit diag(t) ~ C exp(-alpha t) over the tail.

    Uses snapshots in the trailing `tail_fraction` of the time interval whose
    values exceed `floor`; status 'at_floor' when the diagnostic has collapsed
    to roundoff before the tail window."""
    t = traj.times
    y = traj.series(name)
    t_cut = t[0] + (1.0 - tail_fraction) * (t[-1] - t[0])
    sel = (t >= t_cut) & (y > floor)
    if np.count_nonzero(y[t >= t_cut] > floor) < 5:
        return DecayFit(C=np.nan, alpha=np.nan, residual=np.nan,
                        status="at_floor" if np.all(y[t >= t_cut] <= floor) else "insufficient")
    ts, ys = t[sel], np.log(y[sel])
    A = np.stack([np.ones_like(ts), -ts], axis=1)
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - ys) ** 2)))
    return DecayFit(C=float(np.exp(coef[0])), alpha=float(coef[1]),
                    residual=resid, status="ok")
