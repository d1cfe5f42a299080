import copy
import hashlib
import json
import logging
import os
import pathlib
import re
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

import pydantic

from _levybsde import constants
from _levybsde.utils import deep_merge, parse_override_value, yaml

logger = logging.getLogger(__name__)


class ConfigurationError(ValueError):
    """A configuration document or override could not be applied or validated."""


def set_nested_attribute(data: Any, attrs: List[str], value: Any):
    """Takes an arbitrary set of attributes and accesses the deep
    nested object config to set value

    Missing intermediate mappings are created, so overrides may introduce
    sections that the base document leaves at their defaults.
    """

    def _get_attr(d: Any, attr: str):
        if isinstance(d, list) and re.fullmatch(r"\d+", attr):
            return d[int(attr)]
        elif isinstance(d, dict):
            return d.setdefault(attr, {})
        elif hasattr(d, "__getitem__"):
            return d[attr]
        else:
            return getattr(d, attr)

    def _set_attr(d: Any, attr: str, value: Any):
        if isinstance(d, list) and re.fullmatch(r"\d+", attr):
            d[int(attr)] = value
        elif hasattr(d, "__getitem__"):
            d[attr] = value
        else:
            setattr(d, attr, value)

    data_pos = data
    for attr in attrs[:-1]:
        data_pos = _get_attr(data_pos, attr)
    _set_attr(data_pos, attrs[-1], value)


def set_config_from_environment_variables(
    config: Dict[str, Any],
    keyword: str = constants.CONFIG_ENV_KEYWORD,
    separator: str = "__",
):
    """Setting levybsde configuration values from environment variables

    For example `LEVY_BSDE__model__Y=0.8` would set `model.Y = 0.8`
    """
    overrides = sorted(_ for _ in os.environ if _.startswith(keyword + separator))
    for name in overrides:
        attrs = name[len(keyword + separator) :].split(separator)
        try:
            set_nested_attribute(config, attrs, parse_override_value(os.environ[name]))
        except Exception as e:
            raise ConfigurationError(
                f"the provided environment variable {name} causes the following error: {e}"
            ) from e
    return config


def apply_overrides(config: Dict[str, Any], overrides: Iterable[str]):
    """Apply `a.b=value` assignments from the command line, in order."""
    for override in overrides:
        key, sep, value = override.partition("=")
        if not sep or not key:
            raise ConfigurationError(
                f"override {override!r} is not of the form section.key=value"
            )
        try:
            set_nested_attribute(config, key.split("."), parse_override_value(value))
        except Exception as e:
            raise ConfigurationError(f"override {override!r} failed: {e}") from e
    return config


def load_document(config_filename: pathlib.Path) -> Dict[str, Any]:
    filename = pathlib.Path(config_filename)
    if not filename.is_file():
        raise ConfigurationError(
            f"passed in configuration filename={config_filename} does not exist"
        )

    # JSON is a YAML 1.2 subset, both go through the same loader
    with filename.open() as f:
        document = yaml.load(f)
    if document is None:
        return {}
    if not isinstance(document, Mapping):
        raise ConfigurationError(f"{config_filename} must hold a mapping at the top level")
    return json.loads(json.dumps(document))


def build_configuration(
    config_schema: pydantic.BaseModel,
    defaults: Optional[Dict[str, Any]] = None,
    config_filename: Optional[pathlib.Path] = None,
    model_preset: Optional[Dict[str, Any]] = None,
    overrides: Iterable[str] = (),
    seed: Optional[int] = None,
    read_environment: bool = True,
):
    """Layer defaults, file, preset, overrides, environment and seed, then validate."""
    layers = [defaults or {}]
    if config_filename is not None:
        layers.append(load_document(config_filename))
    if model_preset is not None:
        layers.append({"model": model_preset})
    config_dict = copy.deepcopy(deep_merge({}, *layers))

    apply_overrides(config_dict, overrides)
    if read_environment:
        set_config_from_environment_variables(config_dict)
    if seed is not None:
        config_dict["seed"] = seed

    return config_schema(**config_dict)


def read_configuration(
    config_filename: pathlib.Path,
    config_schema: pydantic.BaseModel,
    read_environment: bool = True,
    defaults: Optional[Dict[str, Any]] = None,
):
    """Read a levybsde configuration from disk and apply validation"""
    return build_configuration(
        config_schema,
        defaults=defaults,
        config_filename=config_filename,
        read_environment=read_environment,
    )


def write_configuration(
    config_filename: pathlib.Path,
    config: Union[pydantic.BaseModel, Dict],
    mode: str = "w",
):
    """Write a levybsde configuration file to disk, JSON or YAML by suffix"""
    config_filename = pathlib.Path(config_filename)
    if isinstance(config, pydantic.BaseModel):
        config = config.model_dump(mode="json")
    with config_filename.open(mode) as f:
        if config_filename.suffix == ".json":
            json.dump(config, f, indent=2, sort_keys=True)
            f.write("\n")
        else:
            yaml.dump(config, f)


def canonical_json(config: pydantic.BaseModel) -> str:
    return json.dumps(
        config.model_dump(mode="json"), sort_keys=True, separators=(",", ":")
    )


def config_hash(config: pydantic.BaseModel) -> str:
    """First 16 hex digits of the sha256 of the canonical JSON of ``config``."""
    return hashlib.sha256(canonical_json(config).encode("utf8")).hexdigest()[:16]
