from typing import List, Optional, Type

import numpy as np
from pydantic import Field

from _levybsde.levy_measures import Atomic, AtomicRule, LevyModelSpec
from _levybsde.rates import (
    check_bg_boundary_examples,
    check_optimality_divergence,
    run_process_rate,
)
from levybsde import schema
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl


class SandwichSettings(schema.Base):
    # 0 skips the empirical sandwich
    paths: int = Field(10_000, ge=0)
    levels: List[int] = [2, 4, 8, 16, 32, 64]
    eps_ref: float = Field(1.0 / 1024, gt=0)


class InputSchema(schema.Base):
    model: LevyModelSpec = Atomic(rule=AtomicRule.harmonic)
    T: float = Field(1.0, gt=0)
    n_max: int = Field(10_000, ge=2)
    # None tests half of beta*
    beta_below: Optional[float] = Field(None, ge=0)
    divergence_max: int = Field(10_000, ge=8)
    divergence_points: int = Field(48, ge=4)
    sandwich: SandwichSettings = SandwichSettings()


def divergence_levels(n_max: int, points: int) -> List[int]:
    return [int(n) for n in np.unique(np.geomspace(2, n_max, points).round().astype(int))]


class BoundaryExperiment(LevyExperiment):
    name = "boundary"
    priority = 60
    help = "Analytic m2 brackets at beta = beta*, the divergence below beta* and the harmonic n^-1/2 sandwich."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        brackets = check_bg_boundary_examples(config.n_max)
        beta_below = config.beta_below
        if beta_below is None:
            beta_below = config.model.bg_index() / 2.0
        divergence = check_optimality_divergence(
            config.model,
            beta_below,
            divergence_levels(config.divergence_max, config.divergence_points),
        )
        outcome = ExperimentOutcome(
            tables={
                "boundary": brackets.table,
                "boundary-divergence": divergence.to_frame(),
            },
            checks=brackets.checks + [divergence.check],
        )

        sandwich = config.sandwich
        if sandwich.paths > 0:
            # the errors are distances to the eps_ref level, so the bias bound is not enforced
            report = run_process_rate(
                Atomic(rule=AtomicRule.harmonic),
                sandwich.levels,
                sandwich.eps_ref,
                sandwich.paths,
                config.T,
                beta=1.5,
                seed=config.seed,
                workers=self.workers,
                sandwich=True,
                enforce_bias=False,
            )
            outcome.tables["boundary-sandwich"] = report.to_frame()
            outcome.checks.extend(
                check for check in report.checks if check.name == "n^-1/2 sandwich"
            )
            outcome.plots.append(
                report.plot("boundary-sandwich.svg", "harmonic atoms at beta = beta* = 1")
            )
        return outcome


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [BoundaryExperiment]
