"""L2 sup-distance rates between a Lévy process and its compound Poisson levels."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from _levybsde import constants
from _levybsde.levy_measures import (
    DomainError,
    LevyModel,
    bg_index,
    c_beta,
    is_divergent,
    partial_moment,
)
from _levybsde.path_sim import coupled_sup_errors
from _levybsde.rates.fit import finest_slope, fit_loglog_slope
from _levybsde.rates.reports import (
    ExperimentPreconditionError,
    RateReport,
    rms_with_se,
    slope_check,
)
from _levybsde.utils import timer
from levybsde.hookspecs import Check

logger = logging.getLogger(__name__)


def removed_second_moment(model: LevyModel, eps: float) -> float:
    """int_{|x| < eps} x^2 nu(dx); jumps of magnitude exactly eps are kept by the level."""
    if eps == 0:
        return 0.0
    value = partial_moment(model, 2.0, float(np.nextafter(eps, 0.0)))
    if is_divergent(value):
        raise DomainError(f"second moment of {model!r} diverges near the origin")
    return value


def process_profile(model: LevyModel, levels: Sequence[int], eps_ref: float, T: float):
    """sqrt(T (m2(1/n) - m2(eps_ref))): the L2 distance at time T between level n and the reference."""
    below_ref = removed_second_moment(model, eps_ref)
    return np.array(
        [
            math.sqrt(max(T * (removed_second_moment(model, 1.0 / n) - below_ref), 0.0))
            for n in levels
        ]
    )


def reference_bias_bound(model: LevyModel, eps_ref: float, T: float) -> float:
    """Doob bound 2 sqrt(T m2(eps_ref)) on the sup distance between X and the reference level."""
    if eps_ref == 0:
        return 0.0
    return 2.0 * math.sqrt(T * partial_moment(model, 2.0, eps_ref))


def _bias_ok(model, eps_ref, eps_finest, T) -> bool:
    finest = T * (removed_second_moment(model, eps_finest) - removed_second_moment(model, eps_ref))
    return reference_bias_bound(model, eps_ref, T) <= constants.BIAS_FRACTION * math.sqrt(
        max(finest, 0.0)
    )


def required_eps_ref(model: LevyModel, eps_finest: float, T: float) -> float:
    """Largest eps_ref (to bisection accuracy) whose bias bound stays within BIAS_FRACTION."""
    if model.finite_activity:
        return 0.0
    lo, hi = math.log(1e-14), math.log(eps_finest)
    if not _bias_ok(model, math.exp(lo), eps_finest, T):
        return math.exp(lo)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _bias_ok(model, math.exp(mid), eps_finest, T):
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


def check_reference(model: LevyModel, levels: Sequence[int], eps_ref: float, T: float):
    finest = 1.0 / max(levels)
    if eps_ref >= finest:
        raise ExperimentPreconditionError(
            f"eps_ref={eps_ref:g} must lie below the finest level radius {finest:g}"
        )
    if not _bias_ok(model, eps_ref, finest, T):
        required = required_eps_ref(model, finest, T)
        raise ExperimentPreconditionError(
            f"reference bias bound {reference_bias_bound(model, eps_ref, T):.4g} exceeds "
            f"{constants.BIAS_FRACTION:.0%} of the finest-level error; "
            f"rerun with eps_ref <= {required:.4g}",
            required_eps_ref=required,
        )


def check_levels(levels: Sequence[int]):
    if len(levels) < 3:
        raise DomainError(f"rate experiments need at least 3 levels, got {list(levels)}")
    if any(n < 1 for n in levels) or any(a >= b for a, b in zip(levels, levels[1:])):
        raise DomainError(f"levels must be positive and strictly increasing, got {list(levels)}")


def sandwich_check(levels, errors, ses, profile) -> Check:
    """c / sqrt(n) <= error <= C / sqrt(n) with level-independent c and C.

    c is the smallest sqrt(n)-scaled terminal L2 distance, C twice the largest
    (Doob's maximal inequality).
    """
    scale = np.sqrt(np.asarray(levels, dtype=float))
    c_low = float(np.min(profile * scale))
    c_high = 2.0 * float(np.max(profile * scale))
    lower_ok = np.all(errors >= c_low / scale - 3.0 * ses)
    upper_ok = np.all(errors <= c_high / scale + 3.0 * ses)
    ratios = errors * scale
    return Check(
        name="n^-1/2 sandwich",
        passed=bool(lower_ok and upper_ok),
        detail=(
            f"sqrt(n) * error in [{ratios.min():.4g}, {ratios.max():.4g}], "
            f"constants c={c_low:.4g}, C={c_high:.4g}"
        ),
    )


def run_process_rate(
    model: LevyModel,
    levels: Sequence[int],
    eps_ref: float,
    paths: int,
    T: float,
    beta: float,
    seed: int = 0,
    workers: Optional[int] = None,
    slope_tolerance: float = 0.12,
    sandwich: bool = False,
    enforce_bias: bool = True,
) -> RateReport:
    """sqrt(E sup_t |X_t - X^n_t|^2) per level from exact coupled sup distances.

    With ``enforce_bias`` off the reference only has to lie below the finest
    level; the errors are then distances to the reference level, which is
    what the sandwich check compares against.
    """
    check_levels(levels)
    if T <= 0:
        raise DomainError(f"horizon must be positive, got T={T}")
    constant = c_beta(model, beta)
    if enforce_bias:
        check_reference(model, levels, eps_ref, T)
    elif eps_ref >= 1.0 / max(levels):
        raise ExperimentPreconditionError(
            f"eps_ref={eps_ref:g} must lie below the finest level radius {1.0 / max(levels):g}"
        )

    radii = [1.0 / n for n in levels]
    with timer(logger, f"process rate over {len(levels)} levels, {paths} paths"):
        sups = coupled_sup_errors(model, eps_ref, radii, T, paths, seed, workers)
    squares = sups**2
    errors, ses = rms_with_se(squares)
    levels_array = np.asarray(levels, dtype=float)
    exponent = 1.0 - beta / 2.0
    bound = constant * math.sqrt(T) * levels_array ** (-exponent)
    bias = reference_bias_bound(model, eps_ref, T)
    profile = process_profile(model, levels, eps_ref, T)

    fit = fit_loglog_slope(levels, errors, ses, squares=squares, seed=seed)
    predicted = fit_loglog_slope(levels, profile, resamples=0).slope
    asymptotic = finest_slope(levels, errors, ses)
    theory = -exponent
    theory_star = -(1.0 - bg_index(model) / 2.0)

    slack = errors - (bound + 3.0 * ses + bias)
    checks = [
        Check(
            name="bound domination",
            passed=bool(np.all(slack <= 0)),
            detail=f"largest excess over C_beta sqrt(T) n^-{exponent:.4g} + 3 SE + bias: {slack.max():.4g}",
        ),
        slope_check("process slope", fit.slope, asymptotic, theory_star, predicted, slope_tolerance),
    ]
    if sandwich:
        checks.append(sandwich_check(levels, errors, ses, profile))

    return RateReport(
        name="process",
        levels=tuple(int(n) for n in levels),
        errors=errors,
        ses=ses,
        paths=paths,
        beta=beta,
        theory_slope=theory,
        theory_slope_star=theory_star,
        bound=bound,
        reference_bias_bound=bias,
        fit=fit,
        predicted_slope=predicted,
        asymptotic_slope=asymptotic,
        checks=tuple(checks),
        columns={"predicted": profile},
        notes={"eps_ref": eps_ref, "T": T},
    )
