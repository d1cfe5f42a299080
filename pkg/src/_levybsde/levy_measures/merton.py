import math
import warnings
from typing import ClassVar, Literal

import numpy as np
from pydantic import Field
from scipy import integrate, special

from _levybsde.levy_measures.base import LevyModel, Moment

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _pdf(z: float) -> float:
    if math.isinf(z):
        return 0.0
    return math.exp(-0.5 * z * z) / SQRT_2PI


def _z_pdf(z: float) -> float:
    if math.isinf(z):
        return 0.0
    return z * _pdf(z)


class MertonJump(LevyModel):
    """Finite Lévy measure lam * N(mu, sigma^2)."""

    kind: Literal["merton"] = "merton"
    intensity: float = Field(1.0, gt=0)
    mu: float = 0.0
    sigma: float = Field(1.0, gt=0)

    label: ClassVar[str] = "merton"
    beta_star_formula: ClassVar[str] = "0"
    parameter_ranges: ClassVar[str] = "intensity>0, mu real, sigma>0"

    def bg_index(self) -> float:
        return 0.0

    @property
    def finite_activity(self) -> bool:
        return True

    def total_mass(self) -> float:
        return self.intensity

    def _z(self, x: float) -> float:
        return (x - self.mu) / self.sigma

    def _truncated(self, a: float, b: float, order: int) -> float:
        """int_a^b x^order N(mu, sigma^2)(dx) for order 0, 1, 2."""
        za, zb = self._z(a), self._z(b)
        mass = special.ndtr(zb) - special.ndtr(za)
        if order == 0:
            return mass
        spread = _pdf(za) - _pdf(zb)
        if order == 1:
            return self.mu * mass + self.sigma * spread
        return (
            (self.mu**2 + self.sigma**2) * mass
            + 2.0 * self.mu * self.sigma * spread
            + self.sigma**2 * (_z_pdf(za) - _z_pdf(zb))
        )

    def tail_mass(self, eps: float) -> float:
        upper = special.ndtr(-self._z(eps))
        lower = special.ndtr(self._z(-eps))
        return self.intensity * (upper + lower)

    def partial_moment(self, p: float, eps: float) -> Moment:
        if p == 0:
            return self.intensity * self._truncated(-eps, eps, 0)
        if p == 1:
            return self.intensity * (
                self._truncated(0.0, eps, 1) - self._truncated(-eps, 0.0, 1)
            )
        if p == 2:
            return self.intensity * self._truncated(-eps, eps, 2)

        def integrand(x):
            return abs(x) ** p * _pdf(self._z(x)) / self.sigma

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            left, _ = integrate.quad(integrand, -eps, 0.0, epsabs=1e-13, epsrel=1e-12)
            right, _ = integrate.quad(integrand, 0.0, eps, epsabs=1e-13, epsrel=1e-12)
        return self.intensity * (left + right)

    def compensator_mean(self, eps: float) -> float:
        if eps == 0:
            return self.intensity * self.mu
        return self.intensity * (
            self._truncated(eps, math.inf, 1) + self._truncated(-math.inf, -eps, 1)
        )

    def abs_moment(self, beta: float) -> Moment:
        if beta == 1:
            folded = self.sigma * math.sqrt(2.0 / math.pi) * math.exp(
                -0.5 * (self.mu / self.sigma) ** 2
            ) + self.mu * (1.0 - 2.0 * special.ndtr(-self.mu / self.sigma))
            return self.intensity * folded
        if beta == 2:
            return self.intensity * (self.mu**2 + self.sigma**2)

        def integrand(x):
            return abs(x) ** beta * _pdf(self._z(x)) / self.sigma

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            left, _ = integrate.quad(integrand, -math.inf, 0.0, epsrel=1e-12)
            right, _ = integrate.quad(integrand, 0.0, math.inf, epsrel=1e-12)
        return self.intensity * (left + right)

    def large_jump_second_moment(self) -> float:
        return self.intensity * (
            self._truncated(1.0, math.inf, 2) + self._truncated(-math.inf, -1.0, 2)
        )

    def quantile(self, u: np.ndarray, eps: float) -> np.ndarray:
        """Exact inverse of the normal law conditioned on |x| >= eps."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lower = special.ndtr(self._z(-eps))
        upper = special.ndtr(-self._z(eps))
        v = u * (lower + upper)
        from_below = self.mu + self.sigma * special.ndtri(np.minimum(v, lower))
        from_above = self.mu - self.sigma * special.ndtri(
            np.clip(lower + upper - v, np.finfo(float).tiny, upper)
        )
        return np.where(v < lower, from_below, from_above)
