import dataclasses
import logging
from typing import Any

from _levybsde.bsde_solver.exceptions import SolverConfigurationError
from _levybsde.bsde_solver.terminals import check_lipschitz
from _levybsde.levy_measures import DomainError, LevyModel, restricted_mass

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class BSDEProblem:
    """Y_t = g(X^n_T) + int_t^T f(s, Y_s, U_s) ds - int_t^T int U_s(x) N~^n(ds, dx).

    ``eps`` is the level of the driving process and of the jump integral
    inside an integral generator; eps == 0 means the full measure and is
    only allowed for finite-activity models.
    """

    model: LevyModel
    eps: float
    generator: Any
    terminal: Any
    T: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise DomainError(f"horizon must be positive, got T={self.T}")
        restricted_mass(self.model, self.eps)
        self.generator.check_model(self.model)
        if self.generator.lipschitz_constant(self.model) < 0:
            raise SolverConfigurationError("generator Lipschitz constant must be >= 0")
        check_lipschitz(self.terminal)

    @property
    def lipschitz(self) -> float:
        return self.generator.lipschitz_constant(self.model)

    def at_level(self, eps: float, generator: Any = None) -> "BSDEProblem":
        return dataclasses.replace(
            self, eps=eps, generator=self.generator if generator is None else generator
        )
