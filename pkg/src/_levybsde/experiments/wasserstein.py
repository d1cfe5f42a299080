import logging
from typing import List, Type

import pandas as pd
from pydantic import Field

from _levybsde.experiments.common import ModelInputs
from _levybsde.rates import wasserstein_bounds
from _levybsde.utils import timer
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl

logger = logging.getLogger(__name__)


class InputSchema(ModelInputs):
    levels: List[int] = Field([2, 8, 32], min_length=1)
    eps_ref: float = Field(1e-4, ge=0)


class WassersteinExperiment(LevyExperiment):
    name = "wasserstein"
    priority = 50
    help = "Analytic lower bound c_T m2(1/(2n))^1/2 against the coupling upper bound per level."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        reports = []
        with timer(logger, f"wasserstein bounds at levels {config.levels}"):
            for n in config.levels:
                reports.append(
                    wasserstein_bounds(
                        config.model,
                        n,
                        config.eps_ref,
                        config.paths,
                        config.T,
                        seed=config.seed,
                        workers=self.workers,
                    )
                )
        frame = pd.DataFrame([report.row() for report in reports])
        if reports[0].bracket is not None:
            frame["bracket_low"] = [report.bracket[0] for report in reports]
            frame["bracket_high"] = [report.bracket[1] for report in reports]
        return ExperimentOutcome(
            tables={"wasserstein": frame},
            checks=[check for report in reports for check in report.checks],
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [WassersteinExperiment]
