"""Exact compound Poisson levels coupled by thinning one Poisson random measure."""

from _levybsde.path_sim.dump import dump_path, read_path_dump, write_path_dump
from _levybsde.path_sim.independence import (
    IndependenceReport,
    first_jump_independence_test,
    independence_statistics,
)
from _levybsde.path_sim.paths import (
    CoupledPaths,
    CouplingError,
    JumpPath,
    coupled_grid_values,
    coupled_sup_errors,
    evaluate,
    level_drift,
    level_grid_values,
    level_mass,
    simulate_coupled,
    simulate_reference,
    sup_distance,
    sup_of_removed,
    terminal_values,
    thin_to_level,
    values_on_grid,
)

__all__ = [
    "CoupledPaths",
    "CouplingError",
    "IndependenceReport",
    "JumpPath",
    "coupled_grid_values",
    "coupled_sup_errors",
    "dump_path",
    "evaluate",
    "first_jump_independence_test",
    "independence_statistics",
    "level_drift",
    "level_grid_values",
    "level_mass",
    "read_path_dump",
    "simulate_coupled",
    "simulate_reference",
    "sup_distance",
    "sup_of_removed",
    "terminal_values",
    "thin_to_level",
    "values_on_grid",
    "write_path_dump",
]
