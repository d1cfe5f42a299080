import subprocess

import pytest

from _levybsde.path_sim import read_path_dump
from _levybsde.version import __version__


@pytest.mark.parametrize(
    "command",
    (
        ["levybsde", "--help"],
        ["levybsde", "info", "--help"],
        ["levybsde", "models", "--help"],
        ["levybsde", "validate", "--help"],
        ["levybsde", "rate-process", "--help"],
    ),
)
def test_levybsde_subcommand(command):
    process = subprocess.Popen(command, stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    output, err = process.communicate()

    assert process.returncode == 0
    assert output
    assert not err


@pytest.mark.parametrize("args", [["-V"], ["--version"]])
def test_version(cli, runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 0
    assert __version__ in result.stdout


def test_help_lists_experiments(cli, runner):
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("analyze", "rate-process", "rate-bsde", "boundary", "solver-check"):
        assert name in result.stdout


def test_models(cli, runner):
    result = runner.invoke(cli, ["models"])
    assert result.exit_code == 0
    assert "atomic-harmonic" in result.stdout


def test_info(cli, runner):
    result = runner.invoke(cli, ["info"])
    assert result.exit_code == 0
    assert "Experiments" in result.stdout
    assert "rate-process" in result.stdout


def test_unknown_model_preset(cli, runner, tmp_path):
    result = runner.invoke(cli, ["analyze", "--model", "nope", "-o", tmp_path])
    assert result.exit_code == 2
    assert "unknown model preset" in result.stdout
    assert not list(tmp_path.iterdir())


def test_analyze_write_then_verify(cli, runner, tmp_path):
    result = runner.invoke(cli, ["analyze", "--model", "atomic-harmonic", "-o", tmp_path])
    assert result.exit_code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == [
        "analyze-c-beta.csv",
        "analyze-summary.csv",
        "analyze.csv",
    ]
    text = (tmp_path / "analyze.csv").read_text()
    assert text.startswith(f"# levybsde_version: {__version__}\n# experiment: analyze\n")

    result = runner.invoke(
        cli, ["analyze", "--model", "atomic-harmonic", "-o", tmp_path, "--verify"]
    )
    assert result.exit_code == 0
    assert "Outputs match" in result.stdout

    result = runner.invoke(
        cli,
        ["analyze", "--model", "atomic-harmonic", "-o", tmp_path, "--verify", "--seed", "3"],
    )
    assert result.exit_code == 1
    assert "Verification failed" in result.stdout


def test_invalid_override_is_a_config_error(cli, runner, tmp_path):
    result = runner.invoke(cli, ["rate-process", "--set", "levels=[2, 4]", "-o", tmp_path])
    assert result.exit_code == 2
    assert "at least 3 levels" in result.stdout


def test_reference_precondition(cli, runner, tmp_path):
    result = runner.invoke(
        cli,
        [
            "rate-process",
            "--model",
            "cgmy",
            "--set",
            "eps_ref=0.1",
            "--set",
            "levels=[2, 4, 8]",
            "-o",
            tmp_path,
        ],
    )
    assert result.exit_code == 2
    assert "required eps_ref" in result.stdout


def test_failed_check_exit_code(cli, runner, tmp_path):
    result = runner.invoke(
        cli,
        [
            "rate-process",
            "--model",
            "merton",
            "--set",
            "eps_ref=0",
            "--set",
            "levels=[2, 4, 8]",
            "--set",
            "paths=200",
            "--set",
            "slope_tolerance=0.000000001",
            "-o",
            tmp_path,
            "--plot",
        ],
    )
    assert result.exit_code == 1
    assert "FAIL" in result.stdout
    # outputs are still written when a check fails
    assert (tmp_path / "rate-process.csv").is_file()
    assert (tmp_path / "rate-process.svg").read_text().startswith("<svg")


def test_independence_dumps_paths(cli, runner, tmp_path):
    result = runner.invoke(
        cli,
        [
            "independence",
            "--set",
            "model={kind: atomic, rule: explicit, atoms: [[0.5, 2.0]]}",
            "--set",
            "paths=10000",
            "--set",
            "dump_paths=2",
            "-o",
            tmp_path,
        ],
    )
    assert result.exit_code == 0
    for i in range(2):
        times, sizes = read_path_dump(tmp_path / "paths" / f"path-{i:05d}.bin")
        assert len(times) == len(sizes)
        assert set(sizes) <= {0.5}
