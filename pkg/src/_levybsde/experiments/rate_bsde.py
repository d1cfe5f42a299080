from typing import List, Type

from pydantic import Field

from _levybsde.bsde_solver import (
    BSDEProblem,
    CappedAbsTerminal,
    GeneratorSpec,
    GridSolverSettings,
    TerminalSpec,
    ZeroGenerator,
)
from _levybsde.experiments.common import LevelInputs, summary_frame
from _levybsde.rates import BSDERateResult, run_bsde_rate
from levybsde.hookspecs import ExperimentOutcome, LevyExperiment, hookimpl


class BSDEInputs(LevelInputs):
    levels: List[int] = [2, 4, 8, 16, 32]
    eps_ref: float = Field(1.0 / 256, ge=0)
    x0: float = 0.0
    generator: GeneratorSpec = ZeroGenerator()
    terminal: TerminalSpec = CappedAbsTerminal()
    solver: GridSolverSettings = GridSolverSettings()
    slope_tolerance: float = Field(0.15, gt=0)
    u_slope_tolerance: float = Field(0.2, gt=0)
    refinement: bool = True


def template_problem(config) -> BSDEProblem:
    return BSDEProblem(
        model=config.model,
        eps=config.eps_ref,
        generator=config.generator,
        terminal=config.terminal,
        T=config.T,
        x0=config.x0,
    )


def bsde_outcome(name: str, result: BSDERateResult, config) -> ExperimentOutcome:
    summary = {f"y_{key}": value for key, value in result.y.summary().items()}
    summary.update({f"u_{key}": value for key, value in result.u.summary().items()})
    if result.refinement_delta is not None:
        summary["grid_refinement_delta"] = result.refinement_delta
    label = config.model.label
    return ExperimentOutcome(
        tables={
            f"{name}-y": result.y.to_frame(),
            f"{name}-u": result.u.to_frame(),
            f"{name}-apriori": result.apriori,
            f"{name}-summary": summary_frame(summary),
        },
        checks=result.checks,
        plots=[
            result.y.plot(f"{name}-y.svg", f"Y error, {config.generator.kind} generator on {label}"),
            result.u.plot(f"{name}-u.svg", f"U error, {config.generator.kind} generator on {label}"),
        ],
    )


class RateBSDEExperiment(LevyExperiment):
    name = "rate-bsde"
    priority = 30
    help = "Y and U errors of the level-n BSDEs against a fine reference level."

    input_schema = BSDEInputs

    def run(self) -> ExperimentOutcome:
        config = self.config
        result = run_bsde_rate(
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
    return [RateBSDEExperiment]
