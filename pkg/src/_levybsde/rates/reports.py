import dataclasses
import math
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from _levybsde.rates.fit import SlopeFit
from levybsde.hookspecs import Check, LogLogPlot


class ExperimentPreconditionError(ValueError):
    """An experiment was asked to run where its estimate would be meaningless."""

    def __init__(self, message: str, required_eps_ref: Optional[float] = None):
        super().__init__(message)
        self.required_eps_ref = required_eps_ref


@dataclasses.dataclass(frozen=True, eq=False)
class RateReport:
    """Per-level errors against a theoretical rate n^-(1 - beta/2)."""

    name: str
    levels: Tuple[int, ...]
    errors: np.ndarray
    ses: np.ndarray
    paths: int
    beta: float
    theory_slope: float
    theory_slope_star: float
    bound: np.ndarray
    reference_bias_bound: float
    fit: SlopeFit
    predicted_slope: float
    asymptotic_slope: float
    checks: Tuple[Check, ...] = ()
    columns: Dict[str, Any] = dataclasses.field(default_factory=dict)
    notes: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def fitted_slope(self) -> float:
        return self.fit.slope

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "n": list(self.levels),
                "error": self.errors,
                "se": self.ses,
                "bound": self.bound,
                "theory_slope": self.theory_slope,
            }
        )
        for key, values in self.columns.items():
            frame[key] = values
        return frame

    def summary(self) -> Dict[str, Any]:
        summary = {
            "paths": self.paths,
            "beta": self.beta,
            "fitted_slope": self.fit.slope,
            "slope_ci": f"[{self.fit.ci_low:.6g}, {self.fit.ci_high:.6g}]",
            "predicted_slope": self.predicted_slope,
            "asymptotic_slope": self.asymptotic_slope,
            "theory_slope_at_beta_star": self.theory_slope_star,
            "reference_bias_bound": self.reference_bias_bound,
        }
        summary.update(self.notes)
        return summary

    def plot(self, filename: str, title: str) -> LogLogPlot:
        return LogLogPlot(
            filename=filename,
            title=title,
            levels=[float(n) for n in self.levels],
            errors=[float(e) for e in self.errors],
            ses=[float(s) for s in self.ses],
            bound=[float(b) for b in self.bound],
            theory_slope=self.theory_slope,
            fitted_slope=self.fit.slope,
        )


def rms_with_se(squares: np.ndarray):
    """sqrt(mean) per column of per-path squared errors, with a delta-method SE."""
    squares = np.asarray(squares, dtype=float)
    mean = np.mean(squares, axis=0)
    if len(squares) > 1:
        se_mean = np.std(squares, axis=0, ddof=1) / math.sqrt(len(squares))
    else:
        se_mean = np.zeros_like(mean)
    errors = np.sqrt(mean)
    ses = np.divide(se_mean, 2.0 * errors, out=np.zeros_like(mean), where=errors > 0)
    return errors, ses


def slope_check(
    name: str,
    fitted: float,
    asymptotic: float,
    theory: float,
    predicted: float,
    tolerance: float,
) -> Check:
    """Pass when the finest levels follow the theory or the full range follows the analytic profile."""
    asymptotic_ok = abs(asymptotic - theory) <= tolerance
    profile_ok = abs(fitted - predicted) <= tolerance
    return Check(
        name=name,
        passed=bool(asymptotic_ok or profile_ok),
        detail=(
            f"fitted {fitted:.4f} vs predicted {predicted:.4f}, "
            f"asymptotic {asymptotic:.4f} vs theory {theory:.4f}, tolerance {tolerance:g}"
        ),
    )
