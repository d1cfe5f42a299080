from typing import List, Optional, Type

import numpy as np
import pandas as pd
from pydantic import Field

from _levybsde.experiments.common import ModelInputs, summary_frame
from _levybsde.levy_measures import (
    bg_index,
    c_beta,
    compensator_mean,
    is_divergent,
    partial_moment,
    tail_mass,
)
from _levybsde.rates import default_beta
from levybsde.hookspecs import Check, ExperimentOutcome, LevyExperiment, hookimpl


class InputSchema(ModelInputs):
    # radii of the sweep are 1/n
    levels: List[int] = Field(default_factory=lambda: list(range(2, 11)))
    exponents: List[float] = [2.0]
    # None evaluates C_beta at the default beta only
    betas: Optional[List[float]] = None


def sweep(model, levels, exponents) -> pd.DataFrame:
    rows = []
    for n in levels:
        eps = 1.0 / n
        row = {
            "n": n,
            "eps": eps,
            "tail_mass": tail_mass(model, eps),
            "compensator_mean": compensator_mean(model, eps),
        }
        for p in exponents:
            row[f"m{p:g}"] = partial_moment(model, p, eps)
        rows.append(row)
    return pd.DataFrame(rows)


def monotone_check(frame: pd.DataFrame, exponents) -> Check:
    """Shrinking the radius adds mass and removes moment."""
    order = frame.sort_values("eps", ascending=False)
    problems = []
    if np.any(np.diff(order["tail_mass"].to_numpy()) < 0):
        problems.append("tail_mass")
    for p in exponents:
        column = order[f"m{p:g}"]
        if any(is_divergent(v) for v in column):
            continue
        if np.any(np.diff(column.to_numpy(dtype=float)) > 0):
            problems.append(f"m{p:g}")
    return Check(
        name="monotone in the radius",
        passed=not problems,
        detail="ok" if not problems else f"not monotone: {', '.join(problems)}",
    )


class AnalyzeExperiment(LevyExperiment):
    name = "analyze"
    priority = 10
    help = "Tail masses, partial moments and C_beta of a Lévy measure over a radius sweep."

    input_schema = InputSchema

    def run(self) -> ExperimentOutcome:
        config = self.config
        model = config.model
        betas = config.betas if config.betas is not None else [default_beta(model)]
        frame = sweep(model, config.levels, config.exponents)
        c_betas = pd.DataFrame({"beta": betas, "c_beta": [c_beta(model, b) for b in betas]})
        summary = {
            "model": model.label,
            "beta_star": bg_index(model),
            "finite_activity": model.finite_activity,
        }
        return ExperimentOutcome(
            tables={
                "analyze": frame,
                "analyze-c-beta": c_betas,
                "analyze-summary": summary_frame(summary),
            },
            checks=[monotone_check(frame, config.exponents)],
        )


@hookimpl
def levybsde_experiment() -> List[Type[LevyExperiment]]:
    return [AnalyzeExperiment]
