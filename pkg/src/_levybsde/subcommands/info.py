import collections

import rich
import typer
from rich.table import Table

from _levybsde.version import __version__
from levybsde.hookspecs import hookimpl


@hookimpl
def levybsde_subcommand(cli: typer.Typer):
    EXTERNAL_PLUGIN_STYLE = "cyan"

    @cli.command()
    def info(ctx: typer.Context):
        """
        Display information about installed levybsde plugins and experiments.
        """
        from levybsde.plugins import levybsde_plugin_manager

        rich.print(f"levybsde version: {__version__}")

        external_plugins = levybsde_plugin_manager.get_external_plugins()

        hooks = collections.defaultdict(list)
        for plugin in levybsde_plugin_manager.plugin_manager.get_plugins():
            for hook in levybsde_plugin_manager.plugin_manager.get_hookcallers(plugin):
                hooks[hook.name].append(plugin.__name__)

        table = Table(title="Hooks")
        table.add_column("hook", justify="left", no_wrap=True)
        table.add_column("module", justify="left", no_wrap=True)

        for hook_name, modules in hooks.items():
            for module in modules:
                style = EXTERNAL_PLUGIN_STYLE if module in external_plugins else None
                table.add_row(hook_name, module, style=style)

        rich.print(table)

        table = Table(title="Experiments")
        table.add_column("name")
        table.add_column("priority")
        table.add_column("module")
        for experiment in levybsde_plugin_manager.ordered_experiments:
            style = (
                EXTERNAL_PLUGIN_STYLE
                if experiment.__module__ in external_plugins
                else None
            )
            table.add_row(
                experiment.name,
                str(experiment.priority),
                f"{experiment.__module__}.{experiment.__name__}",
                style=style,
            )

        rich.print(table)
