import json

import rich
import typer
from rich.table import Table

from _levybsde.levy_measures import MODEL_PRESETS
from levybsde.hookspecs import hookimpl


@hookimpl
def levybsde_subcommand(cli: typer.Typer):
    @cli.command()
    def models():
        """
        List the built-in Lévy models with their Blumenthal-Getoor index and parameter ranges.
        """
        table = Table(title="Built-in models")
        table.add_column("preset", justify="left", no_wrap=True)
        table.add_column("kind", justify="left", no_wrap=True)
        table.add_column("beta_star", justify="left")
        table.add_column("activity", justify="left", no_wrap=True)
        table.add_column("parameter ranges", justify="left")
        table.add_column("defaults", justify="left")

        for name, model in MODEL_PRESETS.items():
            parameters = model.model_dump(mode="json", exclude={"kind"})
            table.add_row(
                name,
                model.kind,
                f"beta_star = {model.beta_star_formula} = {model.bg_index():g}",
                "finite" if model.finite_activity else "infinite",
                model.parameter_ranges,
                json.dumps(parameters, sort_keys=True),
            )

        rich.print(table)
