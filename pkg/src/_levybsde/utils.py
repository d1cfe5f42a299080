import contextlib
import functools
import json
import logging
import os
import time
from typing import Any, Optional

from rich.logging import RichHandler
from ruamel.yaml import YAML

from _levybsde import constants

# Create a ruamel object with our favored config, for universal use
yaml = YAML()
yaml.preserve_quotes = True
yaml.default_flow_style = False


@contextlib.contextmanager
def timer(logger, prefix):
    start_time = time.time()
    yield
    logger.info(f"{prefix} took {time.time() - start_time:.3f} [s]")


def configure_logging(verbose: bool = False):
    """Route log records through rich, WARNING by default and INFO when verbose."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(show_path=False, rich_tracebacks=False)],
        force=True,
    )


def worker_count(requested: Optional[int] = None) -> int:
    """Number of worker threads, capped by the LEVY_BSDE_THREADS environment variable."""
    count = requested or os.cpu_count() or 1
    cap = os.getenv(constants.THREADS_ENV_VAR)
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            logging.getLogger(__name__).warning(
                f"ignoring non-integer {constants.THREADS_ENV_VAR}={cap!r}"
            )
    return max(1, count)


def parse_override_value(value: str) -> Any:
    """Interpret a command line or environment override as a YAML scalar or flow collection."""
    if value.strip() == "":
        return value
    # plain python types, not ruamel round-trip scalars
    return json.loads(json.dumps(yaml.load(value)))


def deep_merge(*args):
    """Deep merge multiple dictionaries, later values winning.

    Unlike list concatenation in a generic merge, lists here are replaced
    wholesale: a `levels` list in a config file must not be appended to the
    experiment's default levels.

    >>> deep_merge({"a": {"b": 1, "c": [1]}}, {"a": {"c": [2]}})
    {'a': {'b': 1, 'c': [2]}}
    """
    if len(args) == 0:
        return {}
    elif len(args) == 1:
        return args[0]
    elif len(args) > 2:
        return functools.reduce(deep_merge, args, {})
    else:  # length 2
        d1, d2 = args

    if isinstance(d1, dict) and isinstance(d2, dict):
        # a changed discriminator replaces the whole section
        if "kind" in d1 and "kind" in d2 and d1["kind"] != d2["kind"]:
            return dict(d2)
        d3 = {}
        for key in tuple(d1.keys()) + tuple(d2.keys()):
            if key in d3:
                continue
            if key in d1 and key in d2:
                d3[key] = deep_merge(d1[key], d2[key])
            elif key in d1:
                d3[key] = d1[key]
            else:
                d3[key] = d2[key]
        return d3
    return d2
