import json
import re

import pydantic
import pytest

from _levybsde.config import (
    ConfigurationError,
    apply_overrides,
    build_configuration,
    config_hash,
    load_document,
    read_configuration,
    set_config_from_environment_variables,
    set_nested_attribute,
    write_configuration,
)
from _levybsde.levy_measures import CGMY, MertonJump
from levybsde import schema
from levybsde.plugins import levybsde_plugin_manager


@pytest.fixture
def rate_process_schema():
    return levybsde_plugin_manager.config_schema_for("rate-process")


@pytest.fixture
def rate_process_file(tmp_path):
    filename = tmp_path / "rate-process.yaml"
    filename.write_text(
        "model:\n"
        "  kind: cgmy\n"
        "  Y: 0.5\n"
        "paths: 50\n"
        "levels: [2, 4, 8]\n"
    )
    return filename


def test_set_nested_attribute():
    data = {"a": {"b": [1, {"c": 2}]}}
    set_nested_attribute(data, ["a", "b", "1", "c"], 3)
    assert data == {"a": {"b": [1, {"c": 3}]}}

    set_nested_attribute(data, ["x", "y"], 4)
    assert data["x"] == {"y": 4}


def test_set_config_from_environment_variables(monkeypatch):
    monkeypatch.setenv("LEVY_BSDE__model__Y", "0.8")
    monkeypatch.setenv("LEVY_BSDE__levels", "[2, 4, 8]")
    config = set_config_from_environment_variables({"model": {"kind": "cgmy"}})
    assert config == {"model": {"kind": "cgmy", "Y": 0.8}, "levels": [2, 4, 8]}


def test_set_config_from_environment_variables_error(monkeypatch):
    monkeypatch.setenv("LEVY_BSDE__levels__0__x", "1")
    with pytest.raises(ConfigurationError, match="LEVY_BSDE__levels__0__x"):
        set_config_from_environment_variables({"levels": [2, 4, 8]})


@pytest.mark.parametrize("override", ["paths", "=3", "levels.x=1"])
def test_apply_overrides_errors(override):
    with pytest.raises(ConfigurationError):
        apply_overrides({"levels": [2, 4, 8]}, [override])


def test_apply_overrides_in_order():
    config = apply_overrides({}, ["paths=10", "model.kind=merton", "paths=20"])
    assert config == {"paths": 20, "model": {"kind": "merton"}}


def test_build_configuration_layers(monkeypatch, rate_process_file, rate_process_schema):
    config = build_configuration(rate_process_schema, config_filename=rate_process_file)
    assert config.paths == 50
    assert config.levels == [2, 4, 8]
    assert config.model == CGMY(Y=0.5)

    config = build_configuration(
        rate_process_schema,
        config_filename=rate_process_file,
        overrides=["paths=60", "model.Y=0.7"],
    )
    assert config.paths == 60
    assert config.model.Y == 0.7

    monkeypatch.setenv("LEVY_BSDE__paths", "70")
    config = build_configuration(
        rate_process_schema,
        config_filename=rate_process_file,
        overrides=["paths=60"],
        seed=5,
    )
    assert config.paths == 70
    assert config.seed == 5

    config = build_configuration(
        rate_process_schema,
        config_filename=rate_process_file,
        read_environment=False,
    )
    assert config.paths == 50


def test_preset_of_another_kind_replaces_model(rate_process_file, rate_process_schema):
    preset = MertonJump().model_dump(mode="json")
    config = build_configuration(
        rate_process_schema, config_filename=rate_process_file, model_preset=preset
    )
    assert config.model == MertonJump()


def test_unknown_field_is_rejected(rate_process_schema):
    with pytest.raises(pydantic.ValidationError):
        build_configuration(rate_process_schema, overrides=["walltime=3"])


def test_load_document_errors(tmp_path):
    with pytest.raises(ConfigurationError, match="does not exist"):
        load_document(tmp_path / "missing.yaml")

    filename = tmp_path / "list.yaml"
    filename.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError, match="mapping"):
        load_document(filename)

    filename = tmp_path / "empty.yaml"
    filename.write_text("")
    assert load_document(filename) == {}


def test_config_hash(rate_process_schema):
    config = build_configuration(rate_process_schema)
    value = config_hash(config)
    assert re.fullmatch(r"[0-9a-f]{16}", value)
    assert config_hash(build_configuration(rate_process_schema)) == value
    assert config_hash(build_configuration(rate_process_schema, seed=1)) != value


@pytest.mark.parametrize("suffix", [".json", ".yaml"])
def test_write_then_read_configuration(tmp_path, rate_process_schema, suffix):
    config = build_configuration(rate_process_schema, overrides=["paths=123"])
    filename = tmp_path / f"config{suffix}"
    write_configuration(filename, config)
    if suffix == ".json":
        assert json.loads(filename.read_text())["paths"] == 123

    assert read_configuration(filename, rate_process_schema) == config


def test_version_must_match():
    with pytest.raises(pydantic.ValidationError, match="not an accepted version"):
        schema.Main(levybsde_version="0.0.1")
    assert schema.is_version_accepted(schema.Main().levybsde_version)
    assert not schema.is_version_accepted("")
