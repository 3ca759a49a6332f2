"""Scalar-flat warped extension along a foliation: the lapse ratio w.

Along an expanding foliation with speed function F (lapse f = 1/F), the
extension metric eta^2 dt^2 + g_t is scalar-flat with the ambient background iff
the lapse ratio w = eta / f satisfies the parabolic equation

    dw/dt = (w^2/H) (f Lap_g w + 2 <grad w, grad f>_g)
            - ((f R - 2 Lap_g f) / (2 H)) (w^3 - w),

with H = sigma_1 the background mean curvature of Sigma_t and R its intrinsic
scalar curvature.  w == 1 is an exact fixed point (the extension is the
background itself); the extension mean curvature is H_eta = H / w, and the mass
aspect (1/2) rho^{n-1} (1 - w^{-2}) carries the extracted mass at infinity.
"""

from dataclasses import dataclass

import numpy as np

from .surface import (
    SurfaceError,
    speed_function,
    surface_gradient_inner,
    surface_laplacian,
)


class ExtensionError(ValueError):
    """Lapse ratio left the admissible regime (w <= 0, H <= 0, bad boundary data)."""


def initial_w(geom, h_boundary):
    """Initial lapse ratio w_0 = sigma_1 / h from prescribed boundary mean curvature.

    h_boundary is the positive mean-curvature function the extension must match
    on the seed surface (H_eta = h there)."""
    h = np.asarray(h_boundary, dtype=float)
    if h.shape != geom.rho.shape:
        h = np.broadcast_to(h, geom.rho.shape).copy()
    if not np.all(np.isfinite(h)) or np.any(h <= 0.0):
        raise ExtensionError("boundary mean curvature must be finite and positive")
    if np.any(geom.sigma1 <= 0.0):
        raise ExtensionError("seed surface must have positive mean curvature")
    return geom.sigma1 / h


def mass_aspect(geom, w):
    """Pointwise mass aspect (1/2) rho^{n-1} (1 - w^{-2})."""
    n = geom.bg.n
    return 0.5 * geom.rho ** (n - 1) * (1.0 - 1.0 / np.asarray(w, dtype=float) ** 2)


def mass_aspect_stats(geom, w):
    """(min, max, area-weighted mean) of the mass aspect."""
    ma = mass_aspect(geom, w)
    return float(np.min(ma)), float(np.max(ma)), geom.integrate(ma) / geom.area


@dataclass
class ExtensionState:
    """Flow leaf + lapse ratio bundle (convenience view over (geom, w))."""

    t: float
    geom: object
    w: np.ndarray

    @property
    def H_eta(self):
        """Extension mean curvature sigma_1 / w."""
        return self.geom.sigma1 / self.w

    @property
    def mass_aspect(self):
        return mass_aspect(self.geom, self.w)

    def step(self, dt, k=2):
        return ExtensionState(t=self.t + dt, geom=self.geom,
                              w=step_w(self.geom, self.w, dt, k))


@dataclass
class StageFields:
    """Geometry-only coefficients of the w equation, reusable across w stages."""

    f: np.ndarray
    grad_f: tuple
    lap_f: np.ndarray
    source: np.ndarray  # (f R - 2 Lap f) / (2 H)


def stage_fields(geom, k=2):
    F = speed_function(geom, k)
    if np.any(geom.sigma1 <= 0.0):
        raise ExtensionError("sigma_1 <= 0 on the surface; w equation degenerates")
    f = 1.0 / F
    grad_f = geom.grid.gradient(f)
    lap_f = surface_laplacian(geom, f, grad=grad_f)
    source = (f * geom.scalar_curvature - 2.0 * lap_f) / (2.0 * geom.sigma1)
    return StageFields(f=f, grad_f=grad_f, lap_f=lap_f, source=source)


def w_rhs(geom, w, stage=None, k=2, drho=None):
    """Right-hand side of the lapse-ratio equation.

    The parabolic equation for w is stated along normal flow lines.  When the
    surface is evolved as a graph at fixed angular coordinates (drho given),
    grid points drift tangentially relative to the normal flow by
    T = drho d_rho - f nu, and the grid-frame time derivative picks up the
    advection term <T, grad w>_g = drho (rho / N) g^{ij} varphi_i w_j.  The
    term vanishes on round surfaces and on frozen geometry (drho=None)."""
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise ExtensionError("lapse ratio w must stay finite and positive")
    st = stage if stage is not None else stage_fields(geom, k)
    grad_w = geom.grid.gradient(w)
    lap_w = surface_laplacian(geom, w, grad=grad_w)
    inner = surface_gradient_inner(geom, grad_w, st.grad_f)
    H = geom.sigma1
    rhs = (w**2 / H) * (st.f * lap_w + 2.0 * inner) - st.source * (w**3 - w)
    if drho is not None:
        advect = surface_gradient_inner(geom, geom.varphi_grad, grad_w)
        rhs = rhs + drho * (geom.rho / geom.N) * advect
    return rhs


def step_w(geom, w, dt, k=2, apply_filter=True):
    """One RK4 step of w on frozen surface geometry (unit tests / split stepping)."""
    st = stage_fields(geom, k)
    filt = geom.grid.polar_filter if apply_filter else (lambda x: x)
    k1 = filt(w_rhs(geom, w, st, k))
    k2 = filt(w_rhs(geom, w + 0.5 * dt * k1, st, k))
    k3 = filt(w_rhs(geom, w + 0.5 * dt * k2, st, k))
    k4 = filt(w_rhs(geom, w + dt * k3, st, k))
    return w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def monotonicity_integrand(geom, w, k=2):
    """Integrand of -dQ/dt: eta^{-1}(eta - f)^2 [H dN/dnu + N sigma_2] with
    eta = f w, i.e. f (w-1)^2 / w * [H dN/dnu + N sigma_2]."""
    st_f = 1.0 / speed_function(geom, k)
    return (
        st_f
        * (w - 1.0) ** 2
        / w
        * (geom.sigma1 * geom.dN_dnu + geom.N * geom.sigma2)
    )


def mhat_from_boundary(R, m, h_value, n=2):
    """Schwarzschild mass whose round sphere of area radius R has mean curvature
    h_value when matched through w_0 = H_m / h: mhat = (R^{n-1}/2)(1 - N^2/w_0^2).

    Requires the resulting extension to stay sub-horizon at the seed sphere
    (mhat < R^{n-1}/2)."""
    if h_value <= 0.0:
        raise ExtensionError("boundary mean curvature must be positive")
    N2 = 1.0 - 2.0 * m * R ** (1 - n)
    if N2 <= 0.0:
        raise ExtensionError("seed sphere is not outside the horizon")
    H_m = n * np.sqrt(N2) / R
    w0 = H_m / h_value
    mhat = 0.5 * R ** (n - 1) * (1.0 - N2 / w0**2)
    if mhat >= 0.5 * R ** (n - 1):
        raise ExtensionError(
            f"boundary data h={h_value} puts the matched mass mhat={mhat:.6g} at or "
            f"inside its own horizon at R={R}"
        )
    return float(mhat)
