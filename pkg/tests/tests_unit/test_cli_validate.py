import re
import shutil
from pathlib import Path
from typing import Any, List

import pytest
from typer.testing import CliRunner

from _levybsde.cli import create_cli
from _levybsde.utils import yaml
from _levybsde.version import __version__

TEST_DATA_DIR = Path(__file__).resolve().parent / "cli_validate"

runner = CliRunner()


def _update_yaml_file(file_path: Path, key: str, value: Any):
    """Utility function to update a yaml file with a new key/value pair."""
    with open(file_path, "r") as f:
        yaml_data = yaml.load(f)

    yaml_data[key] = value

    with open(file_path, "w") as f:
        yaml.dump(yaml_data, f)


def _experiment(config_yaml: str) -> str:
    # rate-process.happy.optional-description.yaml
    return config_yaml.split(".")[0]


@pytest.mark.parametrize(
    "args, exit_code, content",
    [
        # --help
        (["--help"], 0, ["Usage:"]),
        (["-h"], 0, ["Usage:"]),
        # error, missing args
        ([], 2, ["Missing option"]),
        (["--config"], 2, ["requires an argument"]),
        (["-c"], 2, ["requires an argument"]),
        (["-c", "levybsde-config.yaml"], 2, ["Missing option"]),
        (["--experiment"], 2, ["requires an argument"]),
    ],
)
def test_cli_validate_stdout(args: List[str], exit_code: int, content: List[str]):
    app = create_cli()
    result = runner.invoke(app, ["validate"] + args)
    assert result.exit_code == exit_code
    for c in content:
        assert c in result.stdout


def generate_test_data_test_cli_validate_happy_path():
    """
    Search the cli_validate folder for happy path test cases
    and add them to the parameterized list of inputs for
    test_cli_validate_happy_path
    """

    test_data = []
    for f in sorted(TEST_DATA_DIR.iterdir()):
        if f.is_file() and re.match(
            r"^[\w-]*\.happy.*\.yaml$", f.name
        ):  # experiment.happy.optional-description.yaml
            test_data.append((f.name))
    keys = [
        "config_yaml",
    ]
    return {"keys": keys, "test_data": test_data}


def test_cli_validate_happy_path(config_yaml: str, tmp_path):
    test_file = TEST_DATA_DIR / config_yaml
    assert test_file.exists() is True

    temp_test_file = shutil.copy(test_file, tmp_path)

    # update the copied test file with the current version if necessary
    _update_yaml_file(temp_test_file, "levybsde_version", __version__)

    app = create_cli()
    result = runner.invoke(
        app,
        ["validate", "--config", temp_test_file, "--experiment", _experiment(config_yaml)],
    )
    assert not result.exception
    assert 0 == result.exit_code
    assert "Successfully validated configuration" in result.stdout
    assert re.search(r"config_hash: [0-9a-f]{16}", result.stdout)


def test_cli_validate_unknown_experiment(config_path):
    app = create_cli()
    result = runner.invoke(
        app,
        ["validate", "-c", config_path / "analyze.happy.yaml", "-e", "rate-everything"],
    )
    assert 2 == result.exit_code
    assert "unknown experiment" in result.stdout


def test_cli_validate_missing_file(tmp_path):
    app = create_cli()
    result = runner.invoke(
        app, ["validate", "-c", tmp_path / "missing.yaml", "-e", "analyze"]
    )
    assert 2 == result.exit_code
    assert "ERROR validating configuration" in result.stdout


def test_cli_validate_from_env(tmp_path):
    tmp_file = tmp_path / "rate-process.yaml"
    tmp_file.write_text("model:\n  kind: cgmy\nlevels: [2, 4, 8]\n")

    app = create_cli()
    valid_result = runner.invoke(
        app,
        ["validate", "--config", tmp_file, "--experiment", "rate-process"],
        env={"LEVY_BSDE__model__Y": "0.8"},
    )
    assert 0 == valid_result.exit_code
    assert "Successfully validated configuration" in valid_result.stdout

    invalid_result = runner.invoke(
        app,
        ["validate", "--config", tmp_file, "--experiment", "rate-process"],
        env={"LEVY_BSDE__paths": "1"},
    )
    assert 2 == invalid_result.exit_code
    assert invalid_result.exception
    assert "greater than or equal to 2" in invalid_result.stdout

    blocked_result = runner.invoke(
        app,
        ["validate", "--config", tmp_file, "--experiment", "rate-process"],
        env={"LEVY_BSDE__model__Y": "2.5"},
    )
    assert 2 == blocked_result.exit_code


def generate_test_data_test_cli_validate_error():
    """
    Search the cli_validate folder for unhappy path test cases
    and add them to the parameterized list of inputs for
    test_cli_validate_error. Optionally parse an expected
    error message from the file name to assert is present
    in the validate output
    """

    test_data = []
    for f in sorted(TEST_DATA_DIR.iterdir()):
        if f.is_file():
            m = re.match(r"^[\w-]*\.error\.([\w-]*)\.yaml$", f.name) or re.match(
                r"^[\w-]*\.error\.([\w-]*)\.[\w-]*\.yaml$", f.name
            )  # experiment.error.assert-message.optional-description.yaml
            if m:
                test_data.append((f.name, m.groups()[0]))
            elif re.match(r"^[\w-]*\.error\.yaml$", f.name):  # experiment.error.yaml
                test_data.append((f.name, None))
    keys = [
        "config_yaml",
        "expected_message",
    ]
    return {"keys": keys, "test_data": test_data}


def test_cli_validate_error(config_yaml: str, expected_message: str):
    test_file = TEST_DATA_DIR / config_yaml
    assert test_file.exists() is True

    app = create_cli()
    result = runner.invoke(
        app, ["validate", "--config", test_file, "--experiment", _experiment(config_yaml)]
    )

    assert result.exception
    assert 2 == result.exit_code
    assert "ERROR validating configuration" in result.stdout
    if expected_message:
        # since this will usually come from a parsed filename, assume spacing/hyphenation/case is optional
        assert (expected_message in result.stdout.lower()) or (
            expected_message.replace("-", " ").replace("_", " ")
            in result.stdout.lower()
        )


def pytest_generate_tests(metafunc):
    """
    Dynamically generate test data parameters for test functions by looking for
    and executing an associated generate_test_data_{function_name} if one exists.
    """

    try:
        td = eval(f"generate_test_data_{metafunc.function.__name__}")()
        metafunc.parametrize(",".join(td["keys"]), td["test_data"])
    except Exception:
        # expected when a generate_test_data_ function doesn't exist
        pass
