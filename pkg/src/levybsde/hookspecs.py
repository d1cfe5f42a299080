import dataclasses
from typing import Any, Dict, List, Optional, Type, Union

import pandas as pd
import pydantic
import typer
from pluggy import HookimplMarker, HookspecMarker

from levybsde import schema

hookspec = HookspecMarker("levybsde")
hookimpl = HookimplMarker("levybsde")


@dataclasses.dataclass(frozen=True)
class Check:
    """One acceptance assertion evaluated inside an experiment."""

    name: str
    passed: bool
    detail: str = ""


@dataclasses.dataclass(frozen=True)
class LogLogPlot:
    """A rate table drawn on log2-log2 axes with the theoretical bound as reference."""

    filename: str
    title: str
    levels: List[float]
    errors: List[float]
    ses: List[float]
    bound: List[float]
    theory_slope: float
    fitted_slope: float


@dataclasses.dataclass
class ExperimentOutcome:
    tables: Dict[str, pd.DataFrame] = dataclasses.field(default_factory=dict)
    checks: List[Check] = dataclasses.field(default_factory=list)
    plots: List[LogLogPlot] = dataclasses.field(default_factory=list)
    # raw artifacts such as binary path dumps, keyed by relative filename
    files: Dict[str, Union[str, bytes]] = dataclasses.field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class LevyExperiment:
    name: str = None
    priority: int = None
    help: str = ""

    input_schema: Type[pydantic.BaseModel] = None

    def __init__(self, config: schema.Main, workers: Optional[int] = None):
        self.config = config
        self.workers = workers

    @classmethod
    def default_config(cls) -> Dict[str, Any]:
        """Values layered below the configuration file."""
        return {}

    def run(self) -> ExperimentOutcome:
        raise NotImplementedError


@hookspec
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    """Registers experiments in levybsde"""


@hookspec
def levybsde_subcommand(cli: typer.Typer):
    """Register Typer subcommand in levybsde"""
