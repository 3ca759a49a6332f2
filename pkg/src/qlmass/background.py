"""Closed-form geometry of the spatial Schwarzschild slice.

The (n+1)-dimensional time-symmetric Schwarzschild slice of mass m >= 0 is
described in the area-radius coordinate rho: the metric is

    g = N(rho)^{-2} drho^2 + rho^2 sigma,      N(rho) = sqrt(1 - 2 m rho^{1-n}),

with sigma the round metric on S^n.  N is the radial lapse (= phi' in the
geodesic parametrization rho = phi(r)).  Everything here is a pure closed form;
m = 0 gives flat Euclidean space, in which case the slice extends to rho = 0.
"""

from dataclasses import dataclass
from math import gamma, pi

import numpy as np


class HorizonError(ValueError):
    """Radius at or inside the horizon where the slice coordinates degenerate."""


def unit_sphere_area(n):
    """Area omega_n of the unit n-sphere (omega_2 = 4 pi)."""
    return 2.0 * pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0)


@dataclass(frozen=True)
class Background:
    """Spatial Schwarzschild slice of dimension n+1 and mass m >= 0."""

    n: int = 2
    m: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension n must be >= 2, got n={self.n}")
        if self.m < 0:
            raise ValueError(f"mass must be nonnegative, got m={self.m}")

    @property
    def horizon_radius(self):
        """Area radius of the horizon, (2m)^{1/(n-1)}; 0.0 in the Euclidean case."""
        if self.m == 0.0:
            return 0.0
        return (2.0 * self.m) ** (1.0 / (self.n - 1))

    def _check_radius(self, rho):
        rho = np.asarray(rho, dtype=float)
        if np.any(rho <= self.horizon_radius) or (self.m == 0.0 and np.any(rho <= 0.0)):
            raise HorizonError(
                f"radius must exceed the horizon radius {self.horizon_radius}"
            )
        return rho

    def lapse(self, rho):
        """N(rho) = sqrt(1 - 2 m rho^{1-n}).  Radial unit speed: drho/dr = N."""
        rho = self._check_radius(rho)
        return np.sqrt(1.0 - 2.0 * self.m * rho ** (1 - self.n))

    def lapse_radial_derivative(self, rho):
        """phi''(r) = m (n-1) rho^{-n}, the second geodesic derivative of rho."""
        rho = self._check_radius(rho)
        return self.m * (self.n - 1) * rho ** (-self.n)

    def dN_drho(self, rho):
        """dN/drho = m (n-1) rho^{-n} / N (equals phi'' / N)."""
        return self.lapse_radial_derivative(rho) / self.lapse(rho)

    def ambient_curvature(self, rho):
        """Coefficients of the ambient Ricci tensor in the (r, S^n) splitting.

        Returns (c_sphere, c_radial) with Ric = c_sphere * sigma + c_radial * dr^2:
        c_sphere = m (n-1) rho^{1-n}  (coefficient of the unit-sphere metric),
        c_radial = -m n (n-1) rho^{-1-n}.
        """
        rho = self._check_radius(rho)
        c_sphere = self.m * (self.n - 1) * rho ** (1 - self.n)
        c_radial = -self.m * self.n * (self.n - 1) * rho ** (-1 - self.n)
        return c_sphere, c_radial

    def ricci_normal(self, rho, v):
        """Ric(nu, nu) for the graph normal with gradient factor v >= 1.

        Ric(nu,nu) = m (n-1) rho^{-1-n} (1 - (n+1) v^{-2}); for round spheres
        (v = 1) this reduces to the radial coefficient -m n (n-1) rho^{-1-n}.
        """
        rho = self._check_radius(rho)
        v = np.asarray(v, dtype=float)
        return self.m * (self.n - 1) * rho ** (-1 - self.n) * (1.0 - (self.n + 1) / v**2)

    def varphi_weight(self, rho):
        """Weight A(rho) = 1/(rho N) with derivative A'(rho), so that the
        conformal graph variable varphi satisfies d varphi = A d rho."""
        rho = self._check_radius(rho)
        N = self.lapse(rho)
        A = 1.0 / (rho * N)
        dN = self.dN_drho(rho)
        Ap = -(N + rho * dN) / (rho * N) ** 2
        return A, Ap

    def round_mean_curvature(self, rho):
        """Mean curvature H_m(rho) = n N(rho) / rho of the round sphere of area
        radius rho."""
        return self.n * self.lapse(rho) / rho
