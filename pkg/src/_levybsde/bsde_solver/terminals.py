import dataclasses
from typing import Annotated, Callable, ClassVar, Literal, Union

import numpy as np
from pydantic import Field

from _levybsde import constants, streams
from _levybsde.bsde_solver.exceptions import SolverConfigurationError
from levybsde import schema


class Terminal(schema.Base):
    kind: str

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    def __call__(self, x):
        raise NotImplementedError


class IdentityTerminal(Terminal):
    kind: Literal["identity"] = "identity"

    @property
    def lipschitz(self):
        return 1.0

    def __call__(self, x):
        return np.asarray(x, dtype=float).copy()


class ConstantTerminal(Terminal):
    kind: Literal["constant"] = "constant"
    value: float = 1.0

    @property
    def lipschitz(self):
        return 0.0

    def __call__(self, x):
        return np.full(np.shape(x), self.value, dtype=float)


class CappedAbsTerminal(Terminal):
    """g(x) = min(|x|, cap)."""

    kind: Literal["capped_abs"] = "capped_abs"
    cap: float = Field(2.0, gt=0)

    @property
    def lipschitz(self):
        return 1.0

    def __call__(self, x):
        return np.minimum(np.abs(np.asarray(x, dtype=float)), self.cap)


class CallTerminal(Terminal):
    kind: Literal["call"] = "call"
    strike: float = 0.0

    @property
    def lipschitz(self):
        return 1.0

    def __call__(self, x):
        return np.maximum(np.asarray(x, dtype=float) - self.strike, 0.0)


TerminalSpec = Annotated[
    Union[IdentityTerminal, ConstantTerminal, CappedAbsTerminal, CallTerminal],
    Field(discriminator="kind"),
]


@dataclasses.dataclass(frozen=True)
class CustomTerminal:
    func: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    kind: ClassVar[str] = "custom"

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def check_lipschitz(terminal, seed: int = 0, pairs: int = 4096, spread: float = 10.0):
    """Spot check |g(x) - g(y)| <= L_g |x - y| on random pairs."""
    if terminal.lipschitz < 0:
        raise SolverConfigurationError("terminal Lipschitz constant must be >= 0")
    rng = streams.path_generator(seed, constants.STREAM_LIPSCHITZ, 0)
    x = rng.uniform(-spread, spread, pairs)
    # half the pairs are close together to catch steep local slopes
    near = np.arange(pairs) % 2 == 0
    h = np.where(
        near, rng.uniform(-1e-3, 1e-3, pairs), rng.uniform(-spread, spread, pairs)
    )
    y = x + h
    jump = np.abs(terminal(x) - terminal(y))
    allowed = terminal.lipschitz * np.abs(x - y) * (1.0 + 1e-9) + 1e-12
    worst = int(np.argmax(jump - allowed))
    if jump[worst] > allowed[worst]:
        raise SolverConfigurationError(
            f"terminal {terminal.kind} violates its Lipschitz constant {terminal.lipschitz} "
            f"between x={x[worst]:.6g} and y={y[worst]:.6g}"
        )
