"""Geometry of star-shaped surfaces rho = rho(theta, phi) in the slice.

The graph is handled through the conformal variable varphi with
d varphi = d rho / (rho N(rho)), in which the induced metric takes the form
g_ij = rho^2 (varphi_i varphi_j + sigma_ij) and the shape operator is

    h^i_j = ( N delta^i_j - tilde-sigma^{ik} varphi_{;kj} ) / (rho v),

with v^2 = 1 + |grad varphi|^2_sigma and tilde-sigma^{ik} = sigma^{ik} -
varphi^i varphi^k / v^2.  All index gymnastics below are explicit 2x2
components in the (theta, phi) chart; n = 2.
"""

from dataclasses import dataclass

import numpy as np

from .background import Background
from .sphere_grid import SphereGrid


class SurfaceError(ValueError):
    """Surface leaves the admissible regime (horizon, star-shape, convexity)."""


@dataclass
class RadialGraph:
    """Star-shaped surface given by a radius field on the grid."""

    grid: SphereGrid
    bg: Background
    rho: np.ndarray
    smoothness_bound: float = 2.0

    def __post_init__(self):
        if self.bg.n != 2:
            raise SurfaceError("grid surfaces are 2-dimensional; background must have n=2")
        self.rho = np.asarray(self.rho, dtype=float)
        if self.rho.shape != self.grid.weights.shape:
            raise SurfaceError(f"rho has shape {self.rho.shape}, grid expects {self.grid.weights.shape}")
        if not np.all(np.isfinite(self.rho)):
            raise SurfaceError("non-finite radius values")
        if np.min(self.rho) <= self.bg.horizon_radius:
            raise SurfaceError(
                f"surface dips to rho={np.min(self.rho):.6g}, at or inside the "
                f"horizon rho_h={self.bg.horizon_radius:.6g}"
            )


@dataclass
class SurfaceGeometry:
    """Assembled pointwise geometry of a radial graph (all (n_theta, n_phi) arrays)."""

    graph: RadialGraph
    rho: np.ndarray
    N: np.ndarray                 # background lapse on the surface
    dN_dnu: np.ndarray            # normal derivative of the lapse
    varphi_grad: tuple            # (varphi_theta, varphi_phi), covariant
    grad_varphi_sq: np.ndarray    # |grad varphi|^2_sigma
    v: np.ndarray
    u: np.ndarray                 # support function rho / v
    shape_op: tuple               # (S^t_t, S^t_p, S^p_t, S^p_p)
    sigma1: np.ndarray
    sigma2: np.ndarray
    g_cov: tuple                  # (g_tt, g_tp, g_pp)
    g_inv: tuple                  # (g^tt, g^tp, g^pp)
    area_element: np.ndarray      # sqrt(det g) / sin(theta) = rho^2 v
    ric_nu: np.ndarray            # ambient Ric(nu, nu)
    scalar_curvature: np.ndarray  # intrinsic R = 2 (sigma2 - Ric(nu,nu))
    area: float

    @property
    def grid(self):
        return self.graph.grid

    @property
    def bg(self):
        return self.graph.bg

    def integrate(self, f):
        """Integral over the surface against its area measure."""
        return self.grid.integrate(f * self.area_element)


def assemble(graph):
    """Compute the full first/second fundamental form data of a radial graph."""
    grid, bg, rho = graph.grid, graph.bg, graph.rho

    rho_t, rho_p = grid.gradient(rho)
    rho_hess = grid.hessian(rho, grad=(rho_t, rho_p))
    N = bg.lapse(rho)
    A, Ap = bg.varphi_weight(rho)

    # conformal variable: first derivatives and covariant Hessian on S^2
    p_t, p_p = A * rho_t, A * rho_p
    p_tt = A * rho_hess[0] + Ap * rho_t * rho_t
    p_tp = A * rho_hess[1] + Ap * rho_t * rho_p
    p_pp = A * rho_hess[2] + Ap * rho_p * rho_p

    sin2 = grid.sin_sq
    p_T, p_P = p_t, p_p * grid.inv_sin_sq   # raised components
    grad_sq = p_t * p_T + p_p * p_P
    v = np.sqrt(1.0 + grad_sq)
    v2 = v * v

    if np.max(grad_sq) > graph.smoothness_bound**2:
        raise SurfaceError(
            f"graph gradient |grad varphi| = {np.sqrt(np.max(grad_sq)):.4g} exceeds "
            f"the star-shape smoothness bound {graph.smoothness_bound}"
        )

    # tilde-sigma^{ik} = sigma^{ik} - varphi^i varphi^k / v^2
    s_TT = 1.0 - p_T * p_T / v2
    s_TP = -p_T * p_P / v2
    s_PP = grid.inv_sin_sq - p_P * p_P / v2

    c = 1.0 / (rho * v)
    S_tt = c * (N - (s_TT * p_tt + s_TP * p_tp))
    S_tp = c * (-(s_TT * p_tp + s_TP * p_pp))
    S_pt = c * (-(s_TP * p_tt + s_PP * p_tp))
    S_pp = c * (N - (s_TP * p_tp + s_PP * p_pp))

    sigma1 = S_tt + S_pp
    sigma2 = S_tt * S_pp - S_tp * S_pt

    g_tt = rho**2 * (p_t * p_t + 1.0)
    g_tp = rho**2 * (p_t * p_p)
    g_pp = rho**2 * (p_p * p_p + sin2)
    det_g = g_tt * g_pp - g_tp * g_tp
    if np.any(g_tt <= 0.0) or np.any(det_g <= 0.0):
        raise SurfaceError("induced metric is not positive definite")
    # g^{ij} = rho^{-2} tilde-sigma^{ij}
    gi = 1.0 / rho**2
    g_inv = (gi * s_TT, gi * s_TP, gi * s_PP)

    u = rho / v
    dN_dnu = bg.lapse_radial_derivative(rho) / v if bg.m else np.zeros_like(rho)
    ric_nu = (
        bg.ricci_normal(rho, v) if bg.m else np.zeros_like(rho)
    )
    scalar_curvature = 2.0 * (sigma2 - ric_nu)
    area_element = rho**2 * v

    geom = SurfaceGeometry(
        graph=graph,
        rho=rho,
        N=N,
        dN_dnu=dN_dnu,
        varphi_grad=(p_t, p_p),
        grad_varphi_sq=grad_sq,
        v=v,
        u=u,
        shape_op=(S_tt, S_tp, S_pt, S_pp),
        sigma1=sigma1,
        sigma2=sigma2,
        g_cov=(g_tt, g_tp, g_pp),
        g_inv=g_inv,
        area_element=area_element,
        ric_nu=ric_nu,
        scalar_curvature=scalar_curvature,
        area=grid.integrate(area_element),
    )
    return geom


def speed_function(geom, k=2):
    """Normalized curvature quotient F_k = n C(n,k-1)/C(n,k) * sigma_k/sigma_{k-1}.

    For n = 2: F_1 = sigma_1 and F_2 = 4 sigma_2 / sigma_1 (= 2H for round
    spheres ... both normalize to F_k = n N / rho on round spheres)."""
    if k == 1:
        return geom.sigma1
    if k == 2:
        if np.any(geom.sigma1 <= 0.0):
            raise SurfaceError("sigma_1 <= 0: surface left the k-convex cone")
        return 4.0 * geom.sigma2 / geom.sigma1
    raise ValueError(f"k must be 1 or 2 for n = 2 surfaces, got k={k}")


def convexity_report(geom):
    """Pointwise convexity/roundness diagnostics used by the flow monitors."""
    S_tt, S_tp, S_pt, S_pp = geom.shape_op
    rho = geom.rho
    sin_t = geom.grid.sin_theta
    # deviation of rho * h^i_j from the identity (zero exactly on round spheres)
    roundness = np.maximum.reduce([
        np.abs(rho * S_tt - 1.0),
        np.abs(rho * S_pp - 1.0),
        np.abs(rho * S_tp) / sin_t,          # weight off-diagonals to frame components
        np.abs(rho * S_pt) * sin_t,
    ])
    g_tt, g_tp, g_pp = geom.g_cov
    gtilde = np.maximum.reduce([
        np.abs(g_tt / rho**2 - 1.0),
        np.abs(g_tp / rho**2) / sin_t,
        np.abs(g_pp / (rho**2 * sin_t**2) - 1.0),
    ])
    min_s1 = float(np.min(geom.sigma1))
    min_s2 = float(np.min(geom.sigma2))
    max_grad = float(np.max(geom.grad_varphi_sq))
    return {
        "min_sigma1": min_s1,
        "min_sigma2": min_s2,
        "is_2_convex": min_s1 > 0.0 and min_s2 > 0.0,
        "roundness_defect": float(np.max(roundness)),
        "gtilde_defect": float(np.max(gtilde)),
        "max_grad_varphi_sq": max_grad,
        # graph-gradient smallness condition under which the normal Ricci
        # term keeps its favorable sign: |grad varphi|^2 <= n
        "ric_condition_ok": max_grad <= geom.bg.n,
    }


def surface_laplacian(geom, f, grad=None):
    """Laplace-Beltrami of a scalar on the surface, in divergence form.

    div = (1/J) d_i (J g^{ij} f_j) with J = sqrt(det g)/sin(theta) weighted by
    sin(theta); the theta-flux density is mirror-even across the poles because
    the sin(theta) Jacobian and the covector component both flip sign."""
    grid = geom.grid
    f_t, f_p = grad if grad is not None else grid.gradient(f)
    g_TT, g_TP, g_PP = geom.g_inv
    J = geom.area_element * grid.sin_theta
    V_t = J * (g_TT * f_t + g_TP * f_p)
    V_p = J * (g_TP * f_t + g_PP * f_p)
    return (grid.d_theta(V_t, parity=1) + grid.d_phi(V_p)) / J


def surface_gradient_inner(geom, grad_a, grad_b):
    """<grad a, grad b>_g from covariant chart components."""
    a_t, a_p = grad_a
    b_t, b_p = grad_b
    g_TT, g_TP, g_PP = geom.g_inv
    return g_TT * a_t * b_t + g_TP * (a_t * b_p + a_p * b_t) + g_PP * a_p * b_p


def minkowski_residual(geom):
    """First weighted Minkowski identity: integral of (n N - sigma_1 u) dmu.

    Zero in the continuum for any closed graph; its quadrature value measures
    discretization error."""
    n = geom.bg.n
    return geom.integrate(n * geom.N - geom.sigma1 * geom.u)


def second_minkowski_residual(geom):
    """Second weighted Minkowski identity in integrated (Codazzi/IBP) form.

    Continuum identity: integral of Ric(nu, grad Phi) dmu equals
    integral of (sigma_1 N - 2 sigma_2 u) dmu, where Phi is the ambient
    potential with grad Phi = rho grad r.  The ambient side has the closed form
    Ric(nu, grad Phi) = -m (n-1)(n+1) rho^{-n} |grad varphi|^2 / v^3, so the
    difference of the two quadratures is a genuine O(h^p) residual (and is
    identically zero for round spheres)."""
    bg = geom.bg
    n, m = bg.n, bg.m
    lhs = geom.integrate(
        -m * (n - 1) * (n + 1) * geom.rho ** (-n) * geom.grad_varphi_sq / geom.v**3
    )
    rhs = geom.integrate(geom.sigma1 * geom.N - 2.0 * geom.sigma2 * geom.u)
    return lhs - rhs


def support_identity_residual(geom):
    """Max norm of grad_i u - g^{kl} h_{ik} Phi_{;l} over the grid.

    The support function u = rho/v satisfies grad u = h(grad Phi, .) on any
    graph; Phi_{;l} = rho rho_l / N in chart components.  Returns the largest
    sigma-norm of the defect covector."""
    grid = geom.grid
    u_t, u_p = grid.gradient(geom.u)
    rho_t, rho_p = grid.gradient(geom.rho)
    Phi_t = geom.rho * rho_t / geom.N
    Phi_p = geom.rho * rho_p / geom.N
    S_tt, S_tp, S_pt, S_pp = geom.shape_op
    # h_{ik} g^{kl} Phi_l = S^l_i Phi_l (shape operator transpose acting on the covector)
    r_t = u_t - (S_tt * Phi_t + S_pt * Phi_p)
    r_p = u_p - (S_tp * Phi_t + S_pp * Phi_p)
    norm_sq = r_t**2 + (r_p / grid.sin_theta) ** 2
    return float(np.sqrt(np.max(norm_sq)))


def intrinsic_gauss_curvature(geom):
    """Gauss curvature of the induced metric via the Brioschi formula.

    Independent of the shape operator: uses only finite differences of the
    metric components (E, F, G) = (g_tt, g_tp, g_pp), whose pole parities under
    the mirror map are (even, odd, even).  Serves as a cross-check oracle for
    scalar_curvature = 2K and for Gauss-Bonnet."""
    grid = geom.grid
    E, F, G = geom.g_cov
    Et, Ep = grid.d_theta(E, 1), grid.d_phi(E)
    Ft, Fp = grid.d_theta(F, -1), grid.d_phi(F)
    Gt, Gp = grid.d_theta(G, 1), grid.d_phi(G)
    Epp = grid.d2_phi(E)
    Gtt = grid.d2_theta(G, 1)
    Ftp = grid.d_phi(grid.d_theta(F, -1))
    M1 = (
        (-0.5 * Epp + Ftp - 0.5 * Gtt) * (E * G - F * F)
        + np.linalg.det(
            np.stack(
                [
                    np.stack([np.zeros_like(E), 0.5 * Et, Ft - 0.5 * Ep], axis=-1),
                    np.stack([Fp - 0.5 * Gt, E, F], axis=-1),
                    np.stack([0.5 * Gp, F, G], axis=-1),
                ],
                axis=-2,
            )
        )
        - np.linalg.det(
            np.stack(
                [
                    np.stack([np.zeros_like(E), 0.5 * Ep, 0.5 * Gt], axis=-1),
                    np.stack([0.5 * Ep, E, F], axis=-1),
                    np.stack([0.5 * Gt, F, G], axis=-1),
                ],
                axis=-2,
            )
        )
    )
    return M1 / (E * G - F * F) ** 2
