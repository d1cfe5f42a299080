"""Grid and regression solvers against Monte Carlo and closed forms on one level."""

import logging
import math
from typing import List, Type

import numpy as np
import pandas as pd
from pydantic import Field

from _levybsde import constants
from _levybsde.bsde_solver import (
    BSDEProblem,
    CappedAbsTerminal,
    GridSolverSettings,
    IdentityTerminal,
    LinearGenerator,
    LSMCSettings,
    TerminalSpec,
    ZeroGenerator,
    closed_form_linear_generator,
    closed_form_zero_generator,
    solve_lsmc,
    solve_markovian_grid,
)
from _levybsde.experiments.common import ModelInputs
from _levybsde.path_sim import terminal_values
from levybsde.hookspecs import Check, ExperimentOutcome, LevyExperiment, hookimpl

logger = logging.getLogger(__name__)


class InputSchema(ModelInputs):
    eps: float = Field(1.0 / 16, ge=0)
    x0: float = 0.0
    terminal: TerminalSpec = CappedAbsTerminal()
    linear: LinearGenerator = LinearGenerator(a=0.5, b=1.0)
    solver: GridSolverSettings = GridSolverSettings()
    lsmc: LSMCSettings = LSMCSettings()
    oracle_samples: int = Field(1_000_000, ge=100)
    grid_tolerance: float = Field(0.005, ge=0)
    linear_tolerance: float = Field(0.01, ge=0)
    lsmc_tolerance: float = Field(0.02, ge=0)


def _row(name, value, reference, se, tolerance):
    return {
        "check": name,
        "value": value,
        "reference": reference,
        "se": se,
        "tolerance": tolerance,
        "passed": abs(value - reference) <= tolerance,
    }


class SolverCheckExperiment(LevyExperiment):
    name = "solver-check"
    priority = 90
    help = "Grid solver against Monte Carlo and the linear closed form, and against least-squares Monte Carlo."

    input_schema = InputSchema

    def _problem(self, generator, terminal) -> BSDEProblem:
        config = self.config
        return BSDEProblem(
            model=config.model,
            eps=config.eps,
            generator=generator,
            terminal=terminal,
            T=config.T,
            x0=config.x0,
        )

    def _grid_value(self, problem: BSDEProblem) -> float:
        solution = solve_markovian_grid(problem, self.config.solver, self.config.seed, self.workers)
        return float(solution.u(0, problem.x0))

    def run(self) -> ExperimentOutcome:
        config = self.config
        seed, workers, samples = config.seed, self.workers, config.oracle_samples
        rows = []

        zero = self._problem(ZeroGenerator(), config.terminal)
        zero_grid = self._grid_value(zero)
        mc, mc_se = closed_form_zero_generator(zero, samples=samples, seed=seed, workers=workers)
        rows.append(
            _row(
                "zero generator vs Monte Carlo",
                zero_grid,
                mc,
                mc_se,
                4.0 * mc_se + config.grid_tolerance * abs(mc),
            )
        )

        linear = self._problem(config.linear, config.terminal)
        linear_grid = self._grid_value(linear)
        closed, closed_se = closed_form_linear_generator(
            linear, samples=samples, seed=seed, workers=workers
        )
        rows.append(
            _row(
                "linear generator vs closed form",
                linear_grid,
                closed,
                closed_se,
                config.linear_tolerance * abs(closed) + 4.0 * closed_se,
            )
        )

        lsmc = solve_lsmc(linear, config.lsmc, seed, workers)
        lsmc_se = lsmc.se if math.isfinite(lsmc.se) else 0.0
        rows.append(
            _row(
                "least-squares Monte Carlo vs grid",
                lsmc.y0,
                linear_grid,
                lsmc_se,
                config.lsmc_tolerance * abs(linear_grid) + 3.0 * lsmc_se,
            )
        )
        if lsmc.fallbacks:
            logger.warning(f"least-squares Monte Carlo lowered the degree at {len(lsmc.fallbacks)} steps")

        # under the zero generator |Y_0(g1) - Y_0(g2)| <= E[|g1 - g2|^2 (x0 + X^n_T)]^1/2
        identity = self._problem(ZeroGenerator(), IdentityTerminal())
        identity_grid = self._grid_value(identity)
        increments = config.x0 + terminal_values(
            config.model, config.eps, config.T, samples, seed, constants.STREAM_ORACLE, workers
        )
        spread = float(
            np.sqrt(np.mean((config.terminal(increments) - identity.terminal(increments)) ** 2))
        )
        gap = abs(zero_grid - identity_grid)
        slack = config.grid_tolerance * (abs(zero_grid) + abs(identity_grid))
        rows.append(
            {
                "check": "stability in the terminal condition",
                "value": gap,
                "reference": spread,
                "se": 0.0,
                "tolerance": slack,
                "passed": gap <= spread + slack,
            }
        )

        return ExperimentOutcome(
            tables={"solver-check": pd.DataFrame(rows)},
            checks=[
                Check(
                    name=row["check"],
                    passed=bool(row["passed"]),
                    detail=f"{row['value']:.6g} vs {row['reference']:.6g}, tolerance {row['tolerance']:.3g}",
                )
                for row in rows
            ],
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [SolverCheckExperiment]
