"""Pseudospectral-quality finite differences on S^2.

Latitude x longitude grid: Gauss-Legendre nodes in cos(theta) (so quadrature of
polynomials in cos(theta) is exact and the pole is never a node) crossed with an
equispaced periodic longitude grid.  Derivatives use 7-point stencils: Fornberg
weights per latitude row on the non-uniform colatitudes, classical 6th-order
centered differences in longitude.

Stencils near the poles reach across via the smooth-sphere identification
(theta, phi) ~ (-theta, phi + pi): ghost rows are the source rows rolled by half
a period, times a parity sign (+1 for scalars, -1 for theta-odd densities).

A latitude-dependent azimuthal spectral cutoff (`polar_filter`) keeps the
effective longitudinal resolution proportional to sin(theta); explicit time
steppers apply it to right-hand sides so the CFL bound is set by the latitude
spacing, not by the pole cells.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import sph_harm_y

STENCIL_HALF_WIDTH = 3

# 6th-order centered first/second derivative coefficients, offsets -3..3.
_D1_COEF = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_D2_COEF = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0


def fd_weights(x, x0, max_order):
    """Fornberg weights for derivatives 0..max_order at x0 from nodes x."""
    x = np.asarray(x, dtype=float)
    n = x.size
    w = np.zeros((max_order + 1, n))
    c1 = 1.0
    c4 = x[0] - x0
    w[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, max_order)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1] - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = (c4 * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w


@dataclass
class SphereGrid:
    """Gauss-Legendre x equispaced grid on the unit 2-sphere with calculus ops.

    Fields are (n_theta, n_phi) arrays, latitude-major, theta ascending from
    the north pole, phi in [0, 2 pi).
    """

    n_theta: int
    n_phi: int
    filter_min_mode: int = 4
    filter_fraction: float = 1.0

    theta: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        G = STENCIL_HALF_WIDTH
        if self.n_theta < 2 * G + 2:
            raise ValueError(f"n_theta must be >= {2 * G + 2}, got {self.n_theta}")
        if self.n_phi < 16 or self.n_phi % 2:
            raise ValueError(f"n_phi must be even and >= 16, got {self.n_phi}")

        x, w_gl = leggauss(self.n_theta)
        self.theta = np.arccos(x)[::-1].copy()  # ascending colatitude
        self.phi = 2.0 * np.pi * np.arange(self.n_phi) / self.n_phi
        h_phi = 2.0 * np.pi / self.n_phi
        # dsigma weights on the unit sphere (sum = 4 pi exactly up to roundoff)
        self.weights = np.outer(w_gl[::-1], np.full(self.n_phi, h_phi))

        self.sin_theta = np.sin(self.theta)[:, None]
        self.cos_theta = np.cos(self.theta)[:, None]
        self.cot_theta = self.cos_theta / self.sin_theta
        self.sin_sq = self.sin_theta**2
        self.inv_sin_sq = 1.0 / self.sin_sq
        self.h_phi = h_phi

        # extended colatitude line across both poles, for Fornberg rows
        th = self.theta
        th_ext = np.concatenate([-th[G - 1 :: -1], th, 2.0 * np.pi - th[::-1][:G]])
        # banded-dense application matrices: derivative = M @ extended_field
        M1 = np.zeros((self.n_theta, self.n_theta + 2 * G))
        M2 = np.zeros((self.n_theta, self.n_theta + 2 * G))
        for i in range(self.n_theta):
            w = fd_weights(th_ext[i : i + 2 * G + 1], th[i], 2)
            M1[i, i : i + 2 * G + 1] = w[1]
            M2[i, i : i + 2 * G + 1] = w[2]
        self._M1, self._M2 = M1, M2

        # circulant longitude derivative matrices: derivative = field @ D.T
        D1 = np.zeros((self.n_phi, self.n_phi))
        D2 = np.zeros((self.n_phi, self.n_phi))
        idx = np.arange(self.n_phi)
        for s, (c1, c2) in enumerate(zip(_D1_COEF, _D2_COEF), start=-3):
            D1[idx, (idx + s) % self.n_phi] += c1 / h_phi
            D2[idx, (idx + s) % self.n_phi] += c2 / h_phi**2
        self._D1T, self._D2T = D1.T.copy(), D2.T.copy()

        # local latitude spacing and azimuthal cutoff, for CFL estimates/filtering
        self.h_theta = np.gradient(self.theta)
        k_max = self.n_phi // 2
        k_cut = np.ceil(self.filter_fraction * k_max * self.sin_theta[:, 0])
        self.k_cut = np.clip(k_cut.astype(int), self.filter_min_mode, k_max)
        self._filter_mask = (
            np.arange(k_max + 1)[None, :] <= self.k_cut[:, None]
        ).astype(float)

    # -- extension across the poles ------------------------------------------

    def _extend(self, f, parity):
        """Append G ghost rows beyond each pole via (theta, phi) ~ (-theta, phi+pi)."""
        G = STENCIL_HALF_WIDTH
        half = self.n_phi // 2
        top = parity * np.roll(f[G - 1 :: -1, :], half, axis=1)
        bot = parity * np.roll(f[: self.n_theta - G - 1 : -1, :], half, axis=1)
        return np.concatenate([top, f, bot], axis=0)

    # -- partial derivatives ---------------------------------------------------

    def d_theta(self, f, parity=1):
        return self._M1 @ self._extend(np.asarray(f, dtype=float), parity)

    def d2_theta(self, f, parity=1):
        return self._M2 @ self._extend(np.asarray(f, dtype=float), parity)

    def d_phi(self, f):
        return np.asarray(f, dtype=float) @ self._D1T

    def d2_phi(self, f):
        return np.asarray(f, dtype=float) @ self._D2T

    # -- unit-sphere calculus ---------------------------------------------------

    def gradient(self, f):
        """Covariant components (f_theta, f_phi) of d f on S^2."""
        return self.d_theta(f), self.d_phi(f)

    def hessian(self, f, grad=None):
        """Covariant Hessian components (f;tt, f;tp, f;pp) on the unit sphere.

        Christoffels of the round metric: Gamma^t_pp = -sin cos,
        Gamma^p_tp = cot; so f;tp = f_tp - cot * f_p and
        f;pp = f_pp + sin cos * f_t.
        """
        f_t, f_p = grad if grad is not None else self.gradient(f)
        f_tt = self.d2_theta(f)
        f_tp = self.d_phi(f_t)
        f_pp = self.d2_phi(f)
        return (
            f_tt,
            f_tp - self.cot_theta * f_p,
            f_pp + self.sin_theta * self.cos_theta * f_t,
        )

    def laplacian(self, f):
        """Laplace-Beltrami on the unit round sphere."""
        return (
            self.d2_theta(f)
            + self.cot_theta * self.d_theta(f)
            + self.d2_phi(f) * self.inv_sin_sq
        )

    def integrate(self, f):
        """Quadrature of f over S^2 against dsigma, latitude-major summation."""
        f = np.asarray(f, dtype=float)
        if not np.all(np.isfinite(f)):
            raise ValueError("non-finite values in quadrature integrand")
        return float((self.weights * f).sum(axis=1).sum(axis=0))

    def polar_filter(self, f):
        """Zero azimuthal Fourier modes above k_cut(theta) = O(n_phi sin theta)."""
        spec = np.fft.rfft(f, axis=1)
        return np.fft.irfft(spec * self._filter_mask, n=self.n_phi, axis=1)

    def real_harmonic(self, ell, m):
        """Real orthonormal spherical harmonic sampled on the grid.

        Convention: Y_{ell,0} = Y_ell^0; for m > 0 sqrt(2) (-1)^m Re Y_ell^m,
        for m < 0 sqrt(2) (-1)^m Im Y_ell^{|m|}.  E.g. Y_{2,2} =
        (1/4) sqrt(15/pi) sin^2(theta) cos(2 phi).
        """
        th = self.theta[:, None] + 0.0 * self.phi[None, :]
        ph = self.phi[None, :] + 0.0 * self.theta[:, None]
        if m == 0:
            return sph_harm_y(ell, 0, th, ph).real
        y = sph_harm_y(ell, abs(m), th, ph)
        val = y.real if m > 0 else y.imag
        return np.sqrt(2.0) * (-1.0) ** abs(m) * val
