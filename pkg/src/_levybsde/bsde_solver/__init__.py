"""Markovian grid and least-squares Monte Carlo solvers for the approximating BSDEs."""

from _levybsde.bsde_solver.exceptions import (
    PicardDivergenceError,
    SolverConfigurationError,
)
from _levybsde.bsde_solver.generators import (
    AffinePhi,
    AnyGenerator,
    CustomGenerator,
    GeneratorSpec,
    HolderGenerator,
    IntegralGenerator,
    JumpRule,
    LinearGenerator,
    LiquidationPhi,
    TimeDiscretizedGenerator,
    ZeroGenerator,
    undiscretized,
    with_steps,
)
from _levybsde.bsde_solver.grid import (
    GridSolverSettings,
    Solution,
    SolverDiagnostics,
    SpaceGridSpec,
    solve_markovian_grid,
)
from _levybsde.bsde_solver.lsmc import LSMCResult, LSMCSettings, solve_lsmc
from _levybsde.bsde_solver.oracles import (
    closed_form_linear_generator,
    closed_form_zero_generator,
    generator_gap_cn,
    source_gap,
)
from _levybsde.bsde_solver.problem import BSDEProblem
from _levybsde.bsde_solver.terminals import (
    CallTerminal,
    CappedAbsTerminal,
    ConstantTerminal,
    CustomTerminal,
    IdentityTerminal,
    TerminalSpec,
)

__all__ = [
    "AffinePhi",
    "AnyGenerator",
    "BSDEProblem",
    "CallTerminal",
    "CappedAbsTerminal",
    "ConstantTerminal",
    "CustomGenerator",
    "CustomTerminal",
    "GeneratorSpec",
    "GridSolverSettings",
    "HolderGenerator",
    "IdentityTerminal",
    "IntegralGenerator",
    "JumpRule",
    "LSMCResult",
    "LSMCSettings",
    "LinearGenerator",
    "LiquidationPhi",
    "PicardDivergenceError",
    "Solution",
    "SolverConfigurationError",
    "SolverDiagnostics",
    "SpaceGridSpec",
    "TerminalSpec",
    "TimeDiscretizedGenerator",
    "ZeroGenerator",
    "closed_form_linear_generator",
    "closed_form_zero_generator",
    "generator_gap_cn",
    "solve_lsmc",
    "solve_markovian_grid",
    "source_gap",
    "undiscretized",
    "with_steps",
]
