import dataclasses
from typing import List, Type

import pandas as pd
from pydantic import Field

from _levybsde import constants, streams
from _levybsde.experiments.common import ModelInputs
from _levybsde.path_sim import dump_path, first_jump_independence_test, simulate_reference
from levybsde.hookspecs import Check, ExperimentOutcome, LevyExperiment, hookimpl

P_VALUE_FLOOR = 1e-3


class InputSchema(ModelInputs):
    eps: float = Field(0.1, gt=0)
    paths: int = Field(100_000, ge=constants.INDEPENDENCE_MIN_PATHS)
    # binary dumps of the first reference paths at eps
    dump_paths: int = Field(0, ge=0)


class IndependenceExperiment(LevyExperiment):
    name = "independence"
    priority = 80
    help = "Chi-square test that the first jump time and the first jump size are independent."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        report = first_jump_independence_test(
            config.model, config.eps, config.T, config.paths, config.seed, self.workers
        )
        check = Check(
            name="first jump time independent of its size",
            passed=report.degenerate or report.p_value > P_VALUE_FLOOR,
            detail=(
                "jump sizes take a single value"
                if report.degenerate
                else f"p = {report.p_value:.4g} on {report.samples} pairs"
            ),
        )
        files = {}
        for i in range(config.dump_paths):
            rng = streams.path_generator(config.seed, constants.STREAM_PATHS, i)
            path = simulate_reference(config.model, config.eps, config.T, rng)
            files[f"paths/path-{i:05d}.bin"] = dump_path(path)
        return ExperimentOutcome(
            tables={"independence": pd.DataFrame([dataclasses.asdict(report)])},
            checks=[check],
            files=files,
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [IndependenceExperiment]
