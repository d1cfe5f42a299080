import pathlib
import typing

import typer

from _levybsde.run import run_experiment
from _levybsde.utils import configure_logging
from levybsde.hookspecs import LevyExperiment, hookimpl


def experiment_command(experiment: typing.Type[LevyExperiment]):
    def command(
        config_filename: typing.Optional[pathlib.Path] = typer.Option(
            None,
            "-c",
            "--config",
            help="experiment configuration file (JSON or YAML)",
        ),
        model: typing.Optional[str] = typer.Option(
            None,
            "--model",
            help="built-in model preset, see `levybsde models`",
        ),
        overrides: typing.List[str] = typer.Option(
            [],
            "--set",
            help="override a configuration value, e.g. --set model.Y=0.8",
        ),
        seed: typing.Optional[int] = typer.Option(
            None,
            "--seed",
            min=0,
            help="master seed of all random streams",
        ),
        output_directory: pathlib.Path = typer.Option(
            "./",
            "-o",
            "--out",
            help="output directory",
        ),
        plot: bool = typer.Option(
            False,
            "--plot",
            help="also write log-log SVG plots of the rate tables",
        ),
        verify: bool = typer.Option(
            False,
            "--verify",
            help="recompute and compare against the files in the output directory without writing",
        ),
        verbose: bool = typer.Option(False, "-v", "--verbose", help="log at INFO level"),
    ):
        configure_logging(verbose)
        code = run_experiment(
            experiment,
            output_directory,
            config_filename=config_filename,
            model=model,
            overrides=overrides,
            seed=seed,
            plot=plot,
            verify=verify,
        )
        if code:
            raise typer.Exit(code)

    command.__doc__ = experiment.help
    return command


@hookimpl
def levybsde_subcommand(cli: typer.Typer):
    from levybsde.plugins import levybsde_plugin_manager

    for experiment in reversed(levybsde_plugin_manager.ordered_experiments):
        cli.command(name=experiment.name, rich_help_panel="Experiments")(
            experiment_command(experiment)
        )
