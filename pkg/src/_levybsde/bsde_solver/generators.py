"""Generators f(t, y, u(.)) of the approximating BSDE.

A generator splits into an exactly integrated, state independent source
and a reaction term f_r(t, y, U) evaluated by the time stepping. U holds
u(t, x + z_q) - u(t, x) for the nodes z_q of a :class:`JumpRule`.
"""

import dataclasses
import math
from typing import Annotated, Any, Callable, ClassVar, Literal, Optional, Union

import numpy as np
from pydantic import Field

from _levybsde.bsde_solver.exceptions import SolverConfigurationError
from _levybsde.levy_measures import LevyModel, is_divergent, partial_moment, tail_mass
from levybsde import schema


@dataclasses.dataclass(frozen=True)
class JumpRule:
    """Quadrature nodes and weights against nu restricted to a level; weights sum to its mass."""

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def empty(cls):
        return cls(nodes=np.zeros(0), weights=np.zeros(0))

    @property
    def mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def first_moment(self) -> float:
        return float(np.dot(self.weights, self.nodes))

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """sum_q w_q values[q] for values of shape (nodes, points)."""
        if len(self.nodes) == 0:
            return np.zeros(values.shape[1:])
        return self.weights @ values


# phi functions of the integral generator


class AffinePhi(schema.Base):
    kind: Literal["affine"] = "affine"
    a: float = 0.0
    b: float = 0.0
    c: float = 1.0

    def __call__(self, y, z):
        return self.a + self.b * y + self.c * z

    @property
    def lipschitz(self) -> float:
        return max(abs(self.b), abs(self.c))

    @property
    def growth(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c))


class LiquidationPhi(schema.Base):
    """w (1 - lam / (w^(q-1) + lam^(q-1))^(p-1)) on w = y + z >= 0, zero below.

    p and q are Hölder conjugates; the slope in w stays in [0, 1).
    """

    kind: Literal["liquidation"] = "liquidation"
    lam: float = Field(1.0, gt=0)
    p: float = Field(2.0, gt=1)

    @property
    def q(self) -> float:
        return self.p / (self.p - 1.0)

    def __call__(self, y, z):
        w = np.maximum(np.asarray(y + z, dtype=float), 0.0)
        damping = self.lam / (w ** (self.q - 1.0) + self.lam ** (self.q - 1.0)) ** (
            self.p - 1.0
        )
        return w * (1.0 - damping)

    @property
    def lipschitz(self) -> float:
        return 1.0

    @property
    def growth(self) -> float:
        return 1.0


PhiSpec = Annotated[Union[AffinePhi, LiquidationPhi], Field(discriminator="kind")]


# generators


class Generator(schema.Base):
    kind: str

    @property
    def uses_jumps(self) -> bool:
        return False

    @property
    def is_zero(self) -> bool:
        return False

    def check_model(self, model: LevyModel):
        pass

    def lipschitz_constant(self, model: LevyModel) -> float:
        raise NotImplementedError

    def source_rate(self, t: float, T: float) -> float:
        return 0.0

    def source_integral(self, t0: float, t1: float, T: float) -> float:
        return 0.0

    def reaction(
        self, t: float, y: np.ndarray, U: Optional[np.ndarray], jumps: JumpRule, T: float
    ) -> np.ndarray:
        raise NotImplementedError


class ZeroGenerator(Generator):
    kind: Literal["zero"] = "zero"

    @property
    def is_zero(self) -> bool:
        return True

    def lipschitz_constant(self, model):
        return 0.0

    def reaction(self, t, y, U, jumps, T):
        return np.zeros_like(y)


class LinearGenerator(Generator):
    """f(t, y, u) = a y + b."""

    kind: Literal["linear"] = "linear"
    a: float = 0.0
    b: float = 0.0

    def lipschitz_constant(self, model):
        return abs(self.a)

    def reaction(self, t, y, U, jumps, T):
        return self.a * y + self.b


def delta_weight(z: np.ndarray, beta_bar: float) -> np.ndarray:
    return np.minimum(1.0, np.abs(z) ** beta_bar)


class IntegralGenerator(Generator):
    """f(t, y, u) = int Phi(y, u(x)) delta(x) nu^n(dx) with delta(x) = 1 ^ |x|^beta_bar."""

    kind: Literal["integral"] = "integral"
    phi: PhiSpec = AffinePhi()
    beta_bar: float = Field(1.5, gt=0)

    @property
    def uses_jumps(self) -> bool:
        return True

    def check_model(self, model):
        if self.beta_bar <= model.bg_index():
            raise SolverConfigurationError(
                f"integral generator needs beta_bar > beta* = {model.bg_index()}, got {self.beta_bar}"
            )

    def delta_moments(self, model: LevyModel):
        """(int delta dnu, int delta^2 dnu); atoms at |x| = 1 are counted on both sides."""
        large = tail_mass(model, 1.0)
        first = partial_moment(model, self.beta_bar, 1.0)
        second = partial_moment(model, 2.0 * self.beta_bar, 1.0)
        if is_divergent(first) or is_divergent(second):
            raise SolverConfigurationError(
                f"int 1 ^ |x|^{self.beta_bar} nu(dx) diverges for {model!r}"
            )
        return first + large, second + large

    def lipschitz_constant(self, model):
        first, second = self.delta_moments(model)
        return self.phi.lipschitz * max(first, math.sqrt(second))

    def reaction(self, t, y, U, jumps, T):
        if len(jumps.nodes) == 0:
            return np.zeros_like(y)
        weights = jumps.weights * delta_weight(jumps.nodes, self.beta_bar)
        return weights @ self.phi(y[None, :], U)


def weierstrass(t, T: float, alpha: float, terms: int):
    """sum_k 2^(-alpha k) cos(pi 2^k t / T), alpha-Hölder on [0, T] and no better."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(terms):
        # reduce the phase mod 2 before scaling by pi
        total = total + 2.0 ** (-alpha * k) * np.cos(math.pi * np.mod(2.0**k * t / T, 2.0))
    return total


def weierstrass_antiderivative(t, T: float, alpha: float, terms: int):
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for k in range(terms):
        frequency = math.pi * 2.0**k / T
        total = total + 2.0 ** (-alpha * k) * np.sin(
            math.pi * np.mod(2.0**k * t / T, 2.0)
        ) / frequency
    return total


class HolderGenerator(Generator):
    """f(t, y, u) = kappa W_alpha(t) + a y with a Weierstrass-type W_alpha."""

    kind: Literal["holder"] = "holder"
    kappa: float = 1.0
    alpha: float = Field(0.5, gt=0, le=1)
    a: float = 0.0
    terms: int = Field(30, ge=1, le=52)

    def lipschitz_constant(self, model):
        return abs(self.a)

    def source_rate(self, t, T):
        return self.kappa * float(weierstrass(t, T, self.alpha, self.terms))

    def source_integral(self, t0, t1, T):
        values = weierstrass_antiderivative(np.array([t0, t1]), T, self.alpha, self.terms)
        return self.kappa * float(values[1] - values[0])

    def reaction(self, t, y, U, jumps, T):
        return self.a * y


class TimeDiscretizedGenerator(Generator):
    """f^n(t, y, u) = f(t_i, y, u) for t in [t_i, t_i+1), t_i = i T / m."""

    kind: Literal["time_discretized"] = "time_discretized"
    inner: "GeneratorSpec" = Field(default_factory=lambda: HolderGenerator())
    # None means m = n, filled in by the rate experiments per level
    steps: Optional[int] = Field(None, ge=1)

    @property
    def uses_jumps(self) -> bool:
        return self.inner.uses_jumps

    @property
    def is_zero(self) -> bool:
        return self.inner.is_zero

    def check_model(self, model):
        self.inner.check_model(model)

    def lipschitz_constant(self, model):
        return self.inner.lipschitz_constant(model)

    def _steps(self) -> int:
        if self.steps is None:
            raise SolverConfigurationError(
                "time_discretized generator has no steps; set steps or run it inside a rate experiment"
            )
        return self.steps

    def frozen(self, t: float, T: float) -> float:
        m = self._steps()
        return T / m * math.floor(t * m / T + 1e-12)

    def source_rate(self, t, T):
        return self.inner.source_rate(self.frozen(t, T), T)

    def source_integral(self, t0, t1, T):
        m = self._steps()
        width = T / m
        first = math.floor(t0 / width + 1e-12)
        total = 0.0
        k = first
        while k * width < t1 - 1e-15:
            lo, hi = max(t0, k * width), min(t1, (k + 1) * width)
            if hi > lo:
                total += self.inner.source_rate(k * width, T) * (hi - lo)
            k += 1
        return total

    def reaction(self, t, y, U, jumps, T):
        return self.inner.reaction(self.frozen(t, T), y, U, jumps, T)


GeneratorSpec = Annotated[
    Union[
        ZeroGenerator,
        LinearGenerator,
        IntegralGenerator,
        HolderGenerator,
        TimeDiscretizedGenerator,
    ],
    Field(discriminator="kind"),
]

TimeDiscretizedGenerator.model_rebuild()


@dataclasses.dataclass(frozen=True)
class CustomGenerator:
    """Programmatic generator: ``func(t, y, U, jumps)`` with a declared Lipschitz constant."""

    func: Callable[[float, np.ndarray, Optional[np.ndarray], JumpRule], np.ndarray]
    lipschitz: float
    jumps_needed: bool = False
    kind: ClassVar[str] = "custom"

    def __post_init__(self):
        if self.lipschitz < 0:
            raise SolverConfigurationError("declared Lipschitz constant must be >= 0")

    @property
    def uses_jumps(self) -> bool:
        return self.jumps_needed

    @property
    def is_zero(self) -> bool:
        return False

    def check_model(self, model):
        pass

    def lipschitz_constant(self, model):
        return self.lipschitz

    def source_rate(self, t, T):
        return 0.0

    def source_integral(self, t0, t1, T):
        return 0.0

    def reaction(self, t, y, U, jumps, T):
        return np.asarray(self.func(t, y, U, jumps), dtype=float)


AnyGenerator = Union[
    ZeroGenerator,
    LinearGenerator,
    IntegralGenerator,
    HolderGenerator,
    TimeDiscretizedGenerator,
    CustomGenerator,
]


def with_steps(generator: Any, steps: int):
    """Copy of ``generator`` whose time discretization (if any, and unset) uses ``steps``."""
    if isinstance(generator, TimeDiscretizedGenerator) and generator.steps is None:
        return generator.model_copy(update={"steps": steps})
    return generator


def undiscretized(generator: Any):
    """The generator a time discretization approximates."""
    if isinstance(generator, TimeDiscretizedGenerator):
        return undiscretized(generator.inner)
    return generator
