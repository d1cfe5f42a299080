from typing import List, Type

import pandas as pd
from pydantic import Field

from _levybsde.rates import appendix_random_walk_gap
from levybsde import schema
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl


class InputSchema(schema.Base):
    T: float = Field(1.0, gt=0)
    k_n: List[int] = Field([1_000, 1_000_000], min_length=1)
    paths: int = Field(100_000, ge=10_000)


class AppendixExperiment(LevyExperiment):
    name = "appendix"
    priority = 70
    help = "E sup|N - S_n| for a Poisson process against its cell-count random walk; no decay in k_n."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        reports = [
            appendix_random_walk_gap(config.T, k_n, config.paths, config.seed, self.workers)
            for k_n in config.k_n
        ]
        return ExperimentOutcome(
            tables={"appendix": pd.DataFrame([report.row() for report in reports])},
            checks=[report.check for report in reports],
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [AppendixExperiment]
