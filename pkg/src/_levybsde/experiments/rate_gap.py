from typing import List, Type

from _levybsde.bsde_solver import (
    GeneratorSpec,
    HolderGenerator,
    TimeDiscretizedGenerator,
)
from _levybsde.experiments.rate_bsde import BSDEInputs, bsde_outcome, template_problem
from _levybsde.rates import run_generator_gap_rate
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl


class InputSchema(BSDEInputs):
    generator: GeneratorSpec = TimeDiscretizedGenerator(inner=HolderGenerator(alpha=0.1))
    refinement: bool = False


class RateGapExperiment(LevyExperiment):
    name = "rate-gap"
    priority = 40
    help = "Y errors of an approximated generator against the two-term bound C_beta sqrt(T) n^-(1-beta/2) + c_n."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        result = run_generator_gap_rate(
            template_problem(config),
            config.levels,
            config.eps_ref,
            settings=config.solver,
            paths=config.paths,
            beta=config.beta,
            seed=config.seed,
            workers=self.workers,
            slope_tolerance=config.slope_tolerance,
            u_slope_tolerance=config.u_slope_tolerance,
            refinement=config.refinement,
        )
        return bsde_outcome(self.name, result, config)


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [RateGapExperiment]
