import hashlib
import io
import math
import pathlib
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd
from jinja2 import Environment, FileSystemLoader
from rich import print
from rich.table import Table

from _levybsde.config import config_hash
from _levybsde.levy_measures import is_divergent
from _levybsde.version import __version__
from levybsde import hookspecs, schema

TEMPLATE_DIRECTORY = pathlib.Path(__file__).parent / "template"
PLOT_TEMPLATE = "loglog.svg.j2"
FLOAT_FORMAT = "%.12g"

Contents = Dict[pathlib.Path, Union[str, bytes]]


def format_cell(value):
    if is_divergent(value):
        return "divergent"
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return value


def csv_text(frame: pd.DataFrame, header: Dict[str, str]) -> str:
    """A `#` comment block followed by the frame as CSV with %.12g floats."""
    frame = frame.copy()
    for column in frame.columns:
        if frame[column].dtype == object:
            frame[column] = frame[column].map(format_cell)
    stream = io.StringIO()
    for key, value in header.items():
        stream.write(f"# {key}: {value}\n")
    frame.to_csv(stream, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return stream.getvalue()


def _ticks(lo: float, hi: float, scale) -> List[Dict[str, str]]:
    return [
        {"position": round(scale(v), 2), "label": str(v)}
        for v in range(math.floor(lo), math.ceil(hi) + 1)
    ]


def plot_svg(plot: hookspecs.LogLogPlot, width: int = 640, height: int = 440) -> str:
    """Self-contained log2-log2 SVG of errors with SE bars and the bound curve."""
    left, right, top, bottom = 64, width - 20, 40, height - 48
    x = np.log2(plot.levels)
    errors = np.asarray(plot.errors, dtype=float)
    ses = np.asarray(plot.ses, dtype=float)
    y = np.log2(errors)
    y_bound = np.log2(plot.bound)
    low = np.log2(np.where(errors - ses > 0, errors - ses, errors))
    high = np.log2(errors + ses)

    x_lo, x_hi = math.floor(x.min()), math.ceil(x.max())
    if x_hi == x_lo:
        x_hi += 1
    y_lo = math.floor(min(low.min(), y_bound.min()))
    y_hi = math.ceil(max(high.max(), y_bound.max()))
    if y_hi == y_lo:
        y_hi += 1

    def sx(v):
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left)

    def sy(v):
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top)

    def polyline(xs, ys):
        return " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))

    env = Environment(loader=FileSystemLoader(TEMPLATE_DIRECTORY), autoescape=False)
    template = env.get_template(PLOT_TEMPLATE)
    return template.render(
        width=width,
        height=height,
        left=left,
        right=right,
        top=top,
        bottom=bottom,
        title=plot.title,
        x_ticks=_ticks(x_lo, x_hi, sx),
        y_ticks=_ticks(y_lo, y_hi, sy),
        bound_points=polyline(x, y_bound),
        error_points=polyline(x, y),
        points=[{"x": f"{sx(a):.2f}", "y": f"{sy(b):.2f}"} for a, b in zip(x, y)],
        error_bars=[
            {"x": f"{sx(a):.2f}", "low": f"{sy(lo):.2f}", "high": f"{sy(hi):.2f}"}
            for a, lo, hi in zip(x, low, high)
        ],
        fitted_slope=f"{plot.fitted_slope:.3f}",
        theory_slope=f"{plot.theory_slope:.3f}",
    )


def render_outcome(
    outcome: hookspecs.ExperimentOutcome,
    experiment: str,
    config: schema.Main,
    plot: bool = False,
) -> Contents:
    """Filename to content mapping for everything an experiment run writes."""
    header = {
        "levybsde_version": __version__,
        "experiment": experiment,
        "config_hash": config_hash(config),
        "seed": str(config.seed),
    }
    contents: Contents = {}
    for name, frame in outcome.tables.items():
        contents[pathlib.Path(f"{name}.csv")] = csv_text(frame, header)
    if plot:
        for figure in outcome.plots:
            contents[pathlib.Path(figure.filename)] = plot_svg(figure)
    for name, payload in outcome.files.items():
        contents[pathlib.Path(name)] = payload
    return contents


def _digest(content: Union[str, bytes]) -> str:
    if isinstance(content, str):
        content = content.encode("utf8")
    return hashlib.sha256(content).hexdigest()


def hash_file(file_path: pathlib.Path):
    """Get the hex digest of the given file."""
    with open(file_path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()


def inspect_files(output_directory: pathlib.Path, contents: Contents):
    """Split the rendered files into new, updated and unchanged relative to the output directory."""
    new, updated, unchanged = set(), set(), set()
    for filename, content in contents.items():
        target = output_directory / filename
        if not target.is_file():
            new.add(filename)
        elif hash_file(target) != _digest(content):
            updated.add(filename)
        else:
            unchanged.add(filename)
    return new, updated, unchanged


def write_outputs(output_directory: pathlib.Path, contents: Contents):
    output_directory = pathlib.Path(output_directory).resolve()
    output_directory.mkdir(exist_ok=True, parents=True)

    new, updated, unchanged = inspect_files(output_directory, contents)
    for title, filenames in (
        ("The following files will be created:", new),
        ("The following files will be updated:", updated),
        ("The following files are unchanged:", unchanged),
    ):
        if filenames:
            table = Table(title, style="deep_sky_blue1")
            for filename in sorted(map(str, filenames)):
                table.add_row(filename, style="green")
            print(table)

    for filename in new | updated:
        output_filename = output_directory / filename
        output_filename.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(contents[filename], str):
            with open(output_filename, "w", encoding="utf8", newline="\n") as f:
                f.write(contents[filename])
        else:
            with open(output_filename, "wb") as f:
                f.write(contents[filename])


def embedded_config_hash(text: str):
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line[1:].partition(":")
        if key.strip() == "config_hash":
            return value.strip()
    return None


def verify_outputs(
    output_directory: pathlib.Path, contents: Contents, expected_hash: str
) -> List[Tuple[str, str]]:
    """Compare rendered contents with the files on disk without writing; returns (file, reason) mismatches."""
    output_directory = pathlib.Path(output_directory)
    mismatches = []
    for filename, content in sorted(contents.items(), key=lambda item: str(item[0])):
        target = output_directory / filename
        if not target.is_file():
            mismatches.append((str(filename), "missing"))
            continue
        if filename.suffix == ".csv":
            found = embedded_config_hash(target.read_text(encoding="utf8"))
            if found != expected_hash:
                mismatches.append(
                    (str(filename), f"config hash {found} does not match {expected_hash}")
                )
                continue
        if hash_file(target) != _digest(content):
            mismatches.append((str(filename), "content differs"))
    return mismatches
