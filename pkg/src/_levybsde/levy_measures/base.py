import abc
import dataclasses
import logging
from typing import ClassVar, Dict, Union

import numpy as np
from pydantic import ConfigDict

from levybsde import schema

logger = logging.getLogger(__name__)


class DomainError(ValueError):
    """An operation was called outside the domain where it is defined."""


class Divergent:
    """Tag for an infinite partial moment.

    Not a float. Arithmetic with it raises ``TypeError``.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"

    def __str__(self):
        return "divergent"

    def __reduce__(self):
        return (Divergent, ())


DIVERGENT = Divergent()

Moment = Union[float, Divergent]


def is_divergent(value) -> bool:
    return value is DIVERGENT


@dataclasses.dataclass(frozen=True)
class TailMoments:
    epsilon: float
    lambda_eps: float
    m_p: Dict[float, Moment]
    mean_jump: float


class LevyModel(schema.Base, abc.ABC):
    """A scalar Lévy measure together with its analytic Blumenthal-Getoor index.

    Subclasses are frozen pydantic models, hashable, so that per-(model, eps)
    tables can be cached. Methods assume their arguments were validated by
    the module level operations in :mod:`_levybsde.levy_measures`.
    """

    model_config = ConfigDict(frozen=True)

    label: ClassVar[str] = ""
    beta_star_formula: ClassVar[str] = ""
    parameter_ranges: ClassVar[str] = ""

    @abc.abstractmethod
    def bg_index(self) -> float:
        ...

    @property
    @abc.abstractmethod
    def finite_activity(self) -> bool:
        ...

    @abc.abstractmethod
    def total_mass(self) -> float:
        """nu(R) for finite-activity models."""

    @abc.abstractmethod
    def tail_mass(self, eps: float) -> float:
        ...

    @abc.abstractmethod
    def partial_moment(self, p: float, eps: float) -> Moment:
        ...

    @abc.abstractmethod
    def compensator_mean(self, eps: float) -> float:
        """Signed first moment over {|x| >= eps}; eps == 0 only for finite activity."""

    @abc.abstractmethod
    def abs_moment(self, beta: float) -> Moment:
        """Integral of |x|**beta over the whole line."""

    @abc.abstractmethod
    def large_jump_second_moment(self) -> float:
        """Integral of x**2 over {|x| >= 1}; finite for every admissible model."""

    @abc.abstractmethod
    def quantile(self, u: np.ndarray, eps: float) -> np.ndarray:
        """Map uniforms on [0, 1) to draws from nu restricted to {|x| >= eps}, normalized."""

    def restricted_mass(self, eps: float) -> float:
        if eps == 0:
            return self.total_mass()
        return self.tail_mass(eps)

    def quadrature(self, eps: float, nodes: int):
        """Equal-weight quantile nodes of the restricted law; weights sum to its mass."""
        mass = self.restricted_mass(eps)
        if mass == 0:
            return np.zeros(0), np.zeros(0)
        u = (np.arange(nodes) + 0.5) / nodes
        return self.quantile(u, eps), np.full(nodes, mass / nodes)
