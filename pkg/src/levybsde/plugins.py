import itertools
import os
import sys
import typing
from importlib import import_module
from importlib.util import module_from_spec, spec_from_file_location
from pathlib import Path

import pluggy

from levybsde import hookspecs, schema

DEFAULT_SUBCOMMAND_PLUGINS = [
    # subcommands
    "_levybsde.subcommands.info",
    "_levybsde.subcommands.models",
    "_levybsde.subcommands.experiments",
    "_levybsde.subcommands.validate",
]

DEFAULT_EXPERIMENT_PLUGINS = [
    # experiments
    "_levybsde.experiments.analyze",
    "_levybsde.experiments.rate_process",
    "_levybsde.experiments.rate_bsde",
    "_levybsde.experiments.rate_gap",
    "_levybsde.experiments.wasserstein",
    "_levybsde.experiments.boundary",
    "_levybsde.experiments.appendix",
    "_levybsde.experiments.independence",
    "_levybsde.experiments.solver_check",
]


class LevyBSDEPluginManager:
    plugin_manager = pluggy.PluginManager("levybsde")

    def __init__(self) -> None:
        self.plugin_manager.add_hookspecs(hookspecs)

        if not hasattr(sys, "_called_from_test"):
            # Only load plugins if not running tests
            self.plugin_manager.load_setuptools_entrypoints("levybsde")

        self.load_plugins(DEFAULT_EXPERIMENT_PLUGINS)
        self.load_plugins(DEFAULT_SUBCOMMAND_PLUGINS)

    def load_plugins(self, plugins: typing.List[str]):
        def _import_module_from_filename(plugin: str):
            module_name = f"_levybsde.experiments._files.{plugin.replace(os.sep, '.')}"
            spec = spec_from_file_location(module_name, plugin)
            if spec is None:
                raise ImportError(f"Can not find {plugin!r} plugin.")
            if spec.loader is None:
                raise ImportError(f"Can not load {plugin!r} plugin.")
            module = module_from_spec(spec)
            sys.modules[module_name] = module
            spec.loader.exec_module(module)
            return module

        for plugin in plugins:
            if plugin.endswith(".py"):
                mod = _import_module_from_filename(plugin)
            else:
                mod = import_module(plugin)

            try:
                self.plugin_manager.register(mod, plugin)
            except ValueError:
                # Plugin already registered
                pass

    def get_available_experiments(self):
        experiments = itertools.chain.from_iterable(
            self.plugin_manager.hook.levybsde_experiment()
        )

        # order experiments by priority
        sorted_experiments = sorted(experiments, key=lambda e: e.priority)

        # filter out duplicate experiments with same name (keep highest priority)
        visited_names = set()
        filtered_experiments = []
        for experiment in reversed(sorted_experiments):
            if experiment.name in visited_names:
                continue
            filtered_experiments.insert(0, experiment)
            visited_names.add(experiment.name)

        return filtered_experiments

    @property
    def ordered_experiments(self):
        return self.get_available_experiments()

    def get_experiment(self, name: str) -> typing.Type[hookspecs.LevyExperiment]:
        for experiment in self.ordered_experiments:
            if experiment.name == name:
                return experiment
        known = ", ".join(e.name for e in self.ordered_experiments)
        raise KeyError(f"unknown experiment {name!r}, expected one of: {known}")

    def config_schema_for(self, name: str):
        experiment = self.get_experiment(name)
        classes = [schema.Main]
        if experiment.input_schema is not None:
            classes.append(experiment.input_schema)
        return type("ConfigSchema", tuple(classes[::-1]), {})

    def read_config(self, config_path: typing.Union[str, Path], experiment: str, **kwargs):
        if isinstance(config_path, str):
            config_path = Path(config_path)

        if not config_path.exists():
            raise FileNotFoundError(f"Config file {config_path} not found")

        from _levybsde.config import read_configuration

        return read_configuration(
            config_path,
            self.config_schema_for(experiment),
            defaults=self.get_experiment(experiment).default_config(),
            **kwargs,
        )

    def get_external_plugins(self):
        external_plugins = []
        all_plugins = DEFAULT_SUBCOMMAND_PLUGINS + DEFAULT_EXPERIMENT_PLUGINS
        for plugin in self.plugin_manager.get_plugins():
            if plugin.__name__ not in all_plugins:
                external_plugins.append(plugin.__name__)
        return external_plugins


levybsde_plugin_manager = LevyBSDEPluginManager()
