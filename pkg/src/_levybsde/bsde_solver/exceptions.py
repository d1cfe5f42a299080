class SolverConfigurationError(ValueError):
    """A problem or solver setting violates a precondition of the scheme."""


class PicardDivergenceError(RuntimeError):
    """The per-step fixed point iteration did not reach its tolerance."""
