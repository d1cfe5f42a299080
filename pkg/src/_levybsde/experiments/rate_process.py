from typing import List, Type

from pydantic import Field

from _levybsde.experiments.common import LevelInputs, summary_frame
from _levybsde.rates import default_beta, run_process_rate
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl


class InputSchema(LevelInputs):
    slope_tolerance: float = Field(0.12, gt=0)
    sandwich: bool = False
    enforce_bias: bool = True


class RateProcessExperiment(LevyExperiment):
    name = "rate-process"
    priority = 20
    help = "L2 sup distance between the process and its compound Poisson levels, with a log-log rate fit."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        beta = config.beta if config.beta is not None else default_beta(config.model)
        report = run_process_rate(
            config.model,
            config.levels,
            config.eps_ref,
            config.paths,
            config.T,
            beta,
            seed=config.seed,
            workers=self.workers,
            slope_tolerance=config.slope_tolerance,
            sandwich=config.sandwich,
            enforce_bias=config.enforce_bias,
        )
        return ExperimentOutcome(
            tables={
                "rate-process": report.to_frame(),
                "rate-process-summary": summary_frame(report.summary()),
            },
            checks=list(report.checks),
            plots=[
                report.plot(
                    "rate-process.svg",
                    f"sup-distance of {config.model.label} levels",
                )
            ],
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [RateProcessExperiment]
