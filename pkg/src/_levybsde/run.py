import logging
import pathlib
from typing import Iterable, Optional, Type

import pydantic
from rich import print
from rich.table import Table

from _levybsde.bsde_solver import PicardDivergenceError, SolverConfigurationError
from _levybsde.config import ConfigurationError, build_configuration, config_hash
from _levybsde.levy_measures import MODEL_PRESETS, DomainError
from _levybsde.rates import ExperimentPreconditionError
from _levybsde.render import render_outcome, verify_outputs, write_outputs
from _levybsde.utils import timer
from levybsde import hookspecs

logger = logging.getLogger(__name__)

EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

CONFIG_ERRORS = (
    ConfigurationError,
    pydantic.ValidationError,
    FileNotFoundError,
    DomainError,
    SolverConfigurationError,
    ExperimentPreconditionError,
)


def model_preset(name: Optional[str]):
    if name is None:
        return None
    if name not in MODEL_PRESETS:
        known = ", ".join(MODEL_PRESETS)
        raise ConfigurationError(f"unknown model preset {name!r}, expected one of: {known}")
    return MODEL_PRESETS[name].model_dump(mode="json")


def load_experiment_config(
    experiment: Type[hookspecs.LevyExperiment],
    config_filename: Optional[pathlib.Path] = None,
    model: Optional[str] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
):
    from levybsde.plugins import levybsde_plugin_manager

    return build_configuration(
        levybsde_plugin_manager.config_schema_for(experiment.name),
        defaults=experiment.default_config(),
        config_filename=config_filename,
        model_preset=model_preset(model),
        overrides=overrides,
        seed=seed,
    )


def print_checks(outcome: hookspecs.ExperimentOutcome):
    table = Table(title="Checks")
    table.add_column("check", justify="left")
    table.add_column("result", justify="left", no_wrap=True)
    table.add_column("detail", justify="left")
    for check in outcome.checks:
        table.add_row(
            check.name,
            "pass" if check.passed else "FAIL",
            check.detail,
            style=None if check.passed else "red",
        )
    print(table)


def run_experiment(
    experiment: Type[hookspecs.LevyExperiment],
    output_directory: pathlib.Path,
    config_filename: Optional[pathlib.Path] = None,
    model: Optional[str] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    plot: bool = False,
    verify: bool = False,
    workers: Optional[int] = None,
) -> int:
    """Configure, run, render and write (or verify) one experiment; returns the exit code."""
    try:
        config = load_experiment_config(experiment, config_filename, model, overrides, seed)
        with timer(logger, f"experiment {experiment.name}"):
            outcome = experiment(config, workers=workers).run()
    except CONFIG_ERRORS as e:
        print(f"[bold red]ERROR configuring {experiment.name}[/bold red]")
        print(str(e))
        required = getattr(e, "required_eps_ref", None)
        if required is not None:
            print(f"required eps_ref <= {required:.4g}")
        return EXIT_CONFIG_ERROR
    except PicardDivergenceError as e:
        print(f"[bold red]ERROR solver failed in {experiment.name}[/bold red]: {e}")
        return EXIT_CHECK_FAILED

    contents = render_outcome(outcome, experiment.name, config, plot=plot)
    print_checks(outcome)

    if verify:
        mismatches = verify_outputs(output_directory, contents, config_hash(config))
        if mismatches:
            table = Table("file", "mismatch", title="Verification failed", style="red")
            for filename, reason in mismatches:
                table.add_row(filename, reason)
            print(table)
            return EXIT_CHECK_FAILED
        print("[bold purple]Outputs match the configuration.[/bold purple]")
    else:
        write_outputs(output_directory, contents)

    if not outcome.passed:
        return EXIT_CHECK_FAILED
    return 0
