import logging
import math
from typing import ClassVar, Literal

import numpy as np
from pydantic import Field, model_validator

from _levybsde import constants
from _levybsde.levy_measures.base import DIVERGENT, DomainError, LevyModel, Moment
from _levybsde.levy_measures.quadrature import (
    integrate_log_panels,
    tempered_power_moment,
)
from _levybsde.levy_measures.sampling import build_table, split_by_side, table_cache

logger = logging.getLogger(__name__)


class TemperedPowerLaw(LevyModel):
    """Density c_plus x^(-1-alpha) e^(-lam_plus x) on x > 0, mirrored with the minus parameters."""

    @property
    def sides(self):
        """((c, alpha, lam, sign), ...) for the positive then the negative half line."""
        raise NotImplementedError

    def bg_index(self) -> float:
        return max(0.0, self.tail_alpha)

    @property
    def tail_alpha(self) -> float:
        return self.sides[0][1]

    @property
    def finite_activity(self) -> bool:
        active = [side for side in self.sides if side[0] > 0]
        return all(alpha < 0 for _, alpha, _, _ in active)

    def total_mass(self) -> float:
        if not self.finite_activity:
            raise DomainError(f"{self.label} has infinite activity")
        return sum(
            c * lam**alpha * math.gamma(-alpha)
            for c, alpha, lam, _ in self.sides
            if c > 0
        )

    def _side_tail(self, c, alpha, lam, eps):
        if c == 0:
            return 0.0

        def density(x):
            return c * x ** (-1.0 - alpha) * math.exp(-lam * x)

        value, _ = integrate_log_panels(density, eps, math.inf)
        return value

    def tail_mass(self, eps: float) -> float:
        return sum(self._side_tail(c, alpha, lam, eps) for c, alpha, lam, _ in self.sides)

    def partial_moment(self, p: float, eps: float) -> Moment:
        total = 0.0
        for c, alpha, lam, _ in self.sides:
            if c == 0:
                continue
            if p <= alpha:
                return DIVERGENT
            total += tempered_power_moment(c, alpha, lam, p, eps)
        return total

    def _side_first_moment(self, c, alpha, lam, eps):
        if c == 0:
            return 0.0
        if eps == 0:
            # finite activity only: alpha < 0
            return c * lam ** (alpha - 1.0) * math.gamma(1.0 - alpha)

        def density(x):
            return c * x ** (-alpha) * math.exp(-lam * x)

        value, _ = integrate_log_panels(density, eps, math.inf)
        return value

    def compensator_mean(self, eps: float) -> float:
        return sum(
            sign * self._side_first_moment(c, alpha, lam, eps)
            for c, alpha, lam, sign in self.sides
        )

    def abs_moment(self, beta: float) -> Moment:
        head = self.partial_moment(beta, 1.0)
        if head is DIVERGENT:
            return DIVERGENT
        tail = 0.0
        for c, alpha, lam, _ in self.sides:
            if c == 0:
                continue

            def density(x, c=c, alpha=alpha, lam=lam):
                return c * x ** (beta - 1.0 - alpha) * math.exp(-lam * x)

            value, _ = integrate_log_panels(density, 1.0, math.inf)
            tail += value
        return head + tail

    def large_jump_second_moment(self) -> float:
        total = 0.0
        for c, alpha, lam, _ in self.sides:
            if c == 0:
                continue

            def density(x, c=c, alpha=alpha, lam=lam):
                return c * x ** (1.0 - alpha) * math.exp(-lam * x)

            value, _ = integrate_log_panels(density, 1.0, math.inf)
            total += value
        return total

    def _table_bounds(self, alpha, lam, eps, c):
        hi = eps + constants.INVERSE_CDF_TAIL_DECAY / lam
        if eps > 0:
            return eps, max(hi, 2.0 * eps)
        # finite activity from the origin: cut where the head carries 1e-12 of the mass
        side_mass = c * lam**alpha * math.gamma(-alpha)
        lo = (1e-12 * side_mass * -alpha / c) ** (1.0 / -alpha)
        return max(lo, 1e-300), hi

    def side_table(self, index: int, eps: float):
        c, alpha, lam, _ = self.sides[index]

        def factory():
            lo, hi = self._table_bounds(alpha, lam, eps, c)

            def density(x):
                return c * x ** (-1.0 - alpha) * np.exp(-lam * x)

            return build_table(density, lo, hi)

        return table_cache.get((self, eps, index), factory)

    def quantile(self, u: np.ndarray, eps: float) -> np.ndarray:
        masses = [
            self.side_table(i, eps).mass if side[0] > 0 else 0.0
            for i, side in enumerate(self.sides)
        ]
        positive_share = masses[0] / (masses[0] + masses[1])
        positive, rescaled = split_by_side(u, positive_share)
        out = np.empty_like(rescaled)
        if masses[0] > 0:
            out[positive] = self.side_table(0, eps)(rescaled[positive])
        if masses[1] > 0:
            out[~positive] = -self.side_table(1, eps)(rescaled[~positive])
        return out


def _check_square_integrable(c, lam, side):
    if c > 0 and lam <= 0:
        raise ValueError(
            f"{side} side: c > 0 requires exponential tempering lam > 0 for square integrability"
        )


class CGMY(TemperedPowerLaw):
    kind: Literal["cgmy"] = "cgmy"
    C: float = Field(1.0, gt=0)
    G: float = Field(5.0, gt=0)
    M: float = Field(5.0, gt=0)
    Y: float = Field(0.5, lt=2)

    label: ClassVar[str] = "cgmy"
    beta_star_formula: ClassVar[str] = "max(0, Y)"
    parameter_ranges: ClassVar[str] = "C>0, G>0, M>0, Y<2"

    @property
    def sides(self):
        return ((self.C, self.Y, self.M, 1.0), (self.C, self.Y, self.G, -1.0))


class StableLikeTail(TemperedPowerLaw):
    kind: Literal["stable_like"] = "stable_like"
    c_plus: float = Field(1.0, ge=0)
    c_minus: float = Field(1.0, ge=0)
    alpha: float = Field(1.0, ge=0, lt=2)
    lam_plus: float = Field(1.0, ge=0)
    lam_minus: float = Field(1.0, ge=0)

    label: ClassVar[str] = "stable-like"
    beta_star_formula: ClassVar[str] = "alpha"
    parameter_ranges: ClassVar[str] = "c+,c->=0, 0<=alpha<2, lam+-> 0 where c+->0"

    @model_validator(mode="after")
    def check_tempering(self):
        _check_square_integrable(self.c_plus, self.lam_plus, "positive")
        _check_square_integrable(self.c_minus, self.lam_minus, "negative")
        if self.c_plus == 0 and self.c_minus == 0:
            raise ValueError("at least one of c_plus, c_minus must be positive")
        return self

    @property
    def sides(self):
        return (
            (self.c_plus, self.alpha, self.lam_plus, 1.0),
            (self.c_minus, self.alpha, self.lam_minus, -1.0),
        )


class GeneralizedHyperbolic(TemperedPowerLaw):
    """Small-jump asymptotic delta / (pi x^2) of the generalized hyperbolic measure."""

    kind: Literal["gh"] = "gh"
    alpha: float = Field(3.0, gt=0)
    beta: float = 0.0
    delta: float = Field(1.0, gt=0)

    label: ClassVar[str] = "gh"
    beta_star_formula: ClassVar[str] = "1"
    parameter_ranges: ClassVar[str] = "alpha>|beta|, delta>0"

    @model_validator(mode="after")
    def check_skew(self):
        if abs(self.beta) >= self.alpha:
            raise ValueError("generalized hyperbolic requires |beta| < alpha")
        return self

    @property
    def sides(self):
        c = self.delta / math.pi
        return ((c, 1.0, self.alpha - self.beta, 1.0), (c, 1.0, self.alpha + self.beta, -1.0))


class Meixner(TemperedPowerLaw):
    """Small-jump asymptotic d a / (pi x^2) of the Meixner measure."""

    kind: Literal["meixner"] = "meixner"
    a: float = Field(1.0, gt=0)
    b: float = Field(0.0, gt=-math.pi, lt=math.pi)
    d: float = Field(1.0, gt=0)

    label: ClassVar[str] = "meixner"
    beta_star_formula: ClassVar[str] = "1"
    parameter_ranges: ClassVar[str] = "a>0, -pi<b<pi, d>0"

    @property
    def sides(self):
        c = self.d * self.a / math.pi
        return (
            (c, 1.0, (math.pi - self.b) / self.a, 1.0),
            (c, 1.0, (math.pi + self.b) / self.a, -1.0),
        )
