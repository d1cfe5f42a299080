import os
from pathlib import Path

import pytest
from typer.testing import CliRunner

from _levybsde.bsde_solver import GridSolverSettings, SpaceGridSpec
from _levybsde.cli import create_cli
from _levybsde.constants import CONFIG_ENV_KEYWORD
from _levybsde.levy_measures.sampling import table_cache
from tests.tests_unit.utils import CGMY_HALF, HARMONIC, LOGHARMONIC, MERTON


@pytest.fixture
def config_path():
    return Path(__file__).parent / "cli_validate"


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    """No LEVY_BSDE* variables from the calling shell."""
    for name in list(os.environ):
        if name.startswith(CONFIG_ENV_KEYWORD):
            monkeypatch.delenv(name)


@pytest.fixture(scope="session")
def cli():
    return create_cli()


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cgmy():
    return CGMY_HALF


@pytest.fixture
def merton():
    return MERTON


@pytest.fixture
def harmonic():
    return HARMONIC


@pytest.fixture
def logharmonic():
    return LOGHARMONIC


@pytest.fixture(
    params=["cgmy", "merton", "harmonic"],
)
def any_model(request):
    return {"cgmy": CGMY_HALF, "merton": MERTON, "harmonic": HARMONIC}[request.param]


@pytest.fixture
def small_solver():
    """Grid settings small enough for a unit test, fine enough for 1% accuracy."""
    return GridSolverSettings(
        steps=16,
        quadrature_nodes=128,
        space=SpaceGridSpec(nodes=257, samples=2_000),
    )


@pytest.fixture
def fresh_tables():
    table_cache.clear()
    yield table_cache
    table_cache.clear()
