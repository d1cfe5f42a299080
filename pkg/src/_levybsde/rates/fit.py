import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from _levybsde import constants, streams
from _levybsde.levy_measures import DomainError


@dataclasses.dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    ci_low: float
    ci_high: float


def _weighted_line(x, y, w):
    total = np.sum(w)
    x_mean = np.sum(w * x) / total
    y_mean = np.sum(w * y) / total
    dx = x - x_mean
    slope = np.sum(w * dx * (y - y_mean)) / np.sum(w * dx * dx)
    return float(slope), float(y_mean - slope * x_mean)


def _log_weights(errors, ses):
    """1 / var(log2 error) by the delta method; equal weights without usable SEs."""
    if ses is None:
        return np.ones_like(errors)
    ses = np.asarray(ses, dtype=float)
    if ses.shape != errors.shape or not np.all(np.isfinite(ses)) or np.any(ses <= 0):
        return np.ones_like(errors)
    sigma = ses / (errors * math.log(2.0))
    return 1.0 / sigma**2


def fit_loglog_slope(
    levels: Sequence[float],
    errors: Sequence[float],
    ses: Optional[Sequence[float]] = None,
    squares: Optional[np.ndarray] = None,
    resamples: int = constants.BOOTSTRAP_RESAMPLES,
    seed: int = 0,
) -> SlopeFit:
    """Weighted least squares of log2(error) on log2(n) with a bootstrap CI.

    ``squares`` holds per-path squared errors of shape (paths, levels) with
    error = sqrt(mean(squares)); the CI then resamples paths. Without it the
    errors are perturbed by their SEs on the log scale.
    """
    levels = np.asarray(levels, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(levels) < 3:
        raise DomainError(f"slope fit needs at least 3 levels, got {len(levels)}")
    if levels.shape != errors.shape:
        raise DomainError("levels and errors differ in length")
    if np.any(np.diff(levels) <= 0) or np.any(levels <= 0):
        raise DomainError("levels must be positive and strictly increasing")
    if not np.all(np.isfinite(errors)) or np.any(errors <= 0):
        raise DomainError("errors must be finite and positive")

    x = np.log2(levels)
    weights = _log_weights(errors, ses)
    slope, intercept = _weighted_line(x, np.log2(errors), weights)

    rng = streams.path_generator(seed, constants.STREAM_BOOTSTRAP, len(levels))
    replicas = []
    if squares is not None:
        squares = np.asarray(squares, dtype=float)
        for _ in range(resamples):
            rows = rng.integers(0, len(squares), len(squares))
            sample = np.sqrt(np.mean(squares[rows], axis=0))
            if np.all(sample > 0):
                replicas.append(_weighted_line(x, np.log2(sample), weights)[0])
    elif ses is not None and np.all(np.isfinite(ses)):
        spread = np.asarray(ses, dtype=float) / errors
        for _ in range(resamples):
            noise = rng.standard_normal(len(errors)) * spread
            shifted = np.log2(errors) + noise / math.log(2.0)
            replicas.append(_weighted_line(x, shifted, weights)[0])
    if replicas:
        ci_low, ci_high = np.percentile(replicas, [2.5, 97.5])
    else:
        ci_low = ci_high = slope
    return SlopeFit(
        slope=slope, intercept=intercept, ci_low=float(ci_low), ci_high=float(ci_high)
    )


def finest_slope(levels, errors, ses=None, count: int = 3) -> float:
    """Slope over the finest ``count`` levels only."""
    return fit_loglog_slope(
        levels[-count:], errors[-count:], None if ses is None else ses[-count:], resamples=0
    ).slope
