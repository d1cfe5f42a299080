import pathlib

import typer
from rich import print

from _levybsde.config import config_hash
from _levybsde.run import CONFIG_ERRORS, EXIT_CONFIG_ERROR, load_experiment_config
from levybsde.hookspecs import hookimpl


@hookimpl
def levybsde_subcommand(cli: typer.Typer):
    @cli.command(rich_help_panel="Additional Commands")
    def validate(
        config_filename: pathlib.Path = typer.Option(
            ...,
            "--config",
            "-c",
            help="experiment configuration file path, please pass in as -c/--config flag",
        ),
        experiment: str = typer.Option(
            ...,
            "--experiment",
            "-e",
            help="name of the experiment the configuration is meant for",
        ),
    ):
        """
        Validate that a configuration file is acceptable for an experiment, without running it.
        """
        from levybsde.plugins import levybsde_plugin_manager

        try:
            experiment_cls = levybsde_plugin_manager.get_experiment(experiment)
        except KeyError as e:
            print(f"[bold red]ERROR[/bold red] {e.args[0]}")
            raise typer.Exit(EXIT_CONFIG_ERROR)

        try:
            config = load_experiment_config(experiment_cls, config_filename)
        except CONFIG_ERRORS as e:
            print(
                f"[bold red]ERROR validating configuration {config_filename.absolute()}[/bold red]"
            )
            print(str(e))
            raise typer.Exit(EXIT_CONFIG_ERROR)
        print(
            f"[bold purple]Successfully validated configuration.[/bold purple] config_hash: {config_hash(config)}"
        )
