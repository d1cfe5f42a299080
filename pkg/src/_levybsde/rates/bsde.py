"""Y and U rates of the approximating BSDEs on coupled paths."""

import dataclasses
import logging
import math
from typing import Any, Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from _levybsde import constants
from _levybsde.bsde_solver import (
    BSDEProblem,
    GridSolverSettings,
    IntegralGenerator,
    JumpRule,
    Solution,
    TimeDiscretizedGenerator,
    generator_gap_cn,
    solve_markovian_grid,
    source_gap,
    undiscretized,
    with_steps,
)
from _levybsde.levy_measures import DomainError, bg_index, c_beta, jump_quadrature
from _levybsde.path_sim import coupled_grid_values
from _levybsde.rates.fit import finest_slope, fit_loglog_slope
from _levybsde.rates.process import check_levels, process_profile
from _levybsde.rates.reports import (
    ExperimentPreconditionError,
    RateReport,
    rms_with_se,
    slope_check,
)
from _levybsde.utils import timer
from levybsde.hookspecs import Check

logger = logging.getLogger(__name__)

APRIORI_RATIO_LIMIT = 2.0


@dataclasses.dataclass(frozen=True, eq=False)
class BSDERateResult:
    y: RateReport
    u: RateReport
    apriori: pd.DataFrame
    refinement_delta: Optional[float]
    solutions: List[Solution]
    reference: Solution

    @property
    def checks(self) -> List[Check]:
        return list(self.y.checks) + list(self.u.checks) + [self.apriori_check]

    @property
    def apriori_check(self) -> Check:
        profile = self.apriori["profile"].to_numpy()
        ratio = float(profile.max() / profile.min()) if profile.min() > 0 else 1.0
        return Check(
            name="a-priori bound",
            passed=bool(ratio <= APRIORI_RATIO_LIMIT or profile.max() == 0),
            detail=f"max/min of (sup_t E|Y^n_t|^2)^1/2 across levels is {ratio:.4g}",
        )


@dataclasses.dataclass(frozen=True)
class _CoupledErrors:
    y_squares: np.ndarray
    u_squares: np.ndarray
    apriori: np.ndarray


def apriori_profile(solutions: Sequence[Solution], samples: Sequence[np.ndarray]) -> np.ndarray:
    """(sup_t E|Y^n_t|^2)^1/2 per level, with Y^n_t = u^n(t, X^n_t) on sampled paths of shape (paths, K+1)."""
    profile = []
    for solution, X in zip(solutions, samples):
        second = [np.mean(solution.u(i, X[:, i]) ** 2) for i in range(X.shape[1])]
        profile.append(math.sqrt(max(second)))
    return np.array(profile)


def _coupled_errors(
    problem: BSDEProblem,
    reference: Solution,
    solutions: Sequence[Solution],
    levels: Sequence[int],
    eps_ref: float,
    paths: int,
    seed: int,
    workers: Optional[int],
) -> _CoupledErrors:
    model, T = problem.model, problem.T
    times = reference.times
    radii = [1.0 / n for n in levels]
    X_ref, X_levels = coupled_grid_values(
        model, eps_ref, radii, T, times, paths, seed, workers
    )
    X_ref = X_ref + problem.x0
    X_levels = X_levels + problem.x0

    nodes, weights = jump_quadrature(model, eps_ref, constants.U_NORM_QUADRATURE_NODES)
    rule = JumpRule(nodes=nodes, weights=weights)
    dt = np.diff(times)

    Y_ref = np.column_stack([reference.u(i, X_ref[:, i]) for i in range(len(times))])
    y_squares = np.empty((paths, len(levels)))
    u_squares = np.zeros((paths, len(levels)))
    for k, solution in enumerate(solutions):
        X = X_levels[k]
        Y = np.column_stack([solution.u(i, X[:, i]) for i in range(len(times))])
        y_squares[:, k] = np.max(np.abs(Y - Y_ref), axis=1) ** 2
        # left-point rule in time for int_0^T int |U^n - U^ref|^2 nu(dx) dt
        for i in range(len(times) - 1):
            gap = solution.U(i, X[None, :, i], rule.nodes[:, None]) - reference.U(
                i, X_ref[None, :, i], rule.nodes[:, None]
            )
            u_squares[:, k] += dt[i] * rule.integrate(gap**2)

    apriori = apriori_profile(
        list(solutions) + [reference], [X_levels[k] for k in range(len(levels))] + [X_ref]
    )
    return _CoupledErrors(y_squares=y_squares, u_squares=u_squares, apriori=apriori)


def _report(
    name: str,
    levels,
    squares,
    beta,
    model,
    T,
    eps_ref,
    profile,
    slope_tolerance,
    seed,
    columns=None,
    notes=None,
    bound=None,
    theory_star=None,
) -> RateReport:
    errors, ses = rms_with_se(squares)
    if np.any(errors <= 0):
        raise ExperimentPreconditionError(
            f"{name} errors vanish at some level; the levels do not differ from the reference"
        )
    levels_array = np.asarray(levels, dtype=float)
    exponent = 1.0 - beta / 2.0
    if bound is None:
        bound = c_beta(model, beta) * math.sqrt(T) * levels_array ** (-exponent)
    if theory_star is None:
        theory_star = -(1.0 - bg_index(model) / 2.0)
    fit = fit_loglog_slope(levels, errors, ses, squares=squares, seed=seed)
    predicted = fit_loglog_slope(levels, profile, resamples=0).slope
    asymptotic = finest_slope(levels, errors, ses)
    return RateReport(
        name=name,
        levels=tuple(int(n) for n in levels),
        errors=errors,
        ses=ses,
        paths=len(squares),
        beta=beta,
        theory_slope=-exponent,
        theory_slope_star=theory_star,
        bound=bound,
        reference_bias_bound=0.0,
        fit=fit,
        predicted_slope=predicted,
        asymptotic_slope=asymptotic,
        checks=(
            slope_check(f"{name} slope", fit.slope, asymptotic, theory_star, predicted, slope_tolerance),
        ),
        columns=dict(columns or {}, predicted=profile),
        notes=dict(notes or {}, eps_ref=eps_ref, T=T),
    )


def _solve_all(
    problem: BSDEProblem,
    levels: Sequence[int],
    eps_ref: float,
    settings: GridSolverSettings,
    seed: int,
    workers: Optional[int],
    level_generator: Callable[[int], Any],
    reference_generator: Any,
):
    reference = solve_markovian_grid(
        problem.at_level(eps_ref, reference_generator), settings, seed, workers
    )
    solutions = [
        solve_markovian_grid(
            problem.at_level(1.0 / n, level_generator(n)), settings, seed, workers
        )
        for n in levels
    ]
    return reference, solutions


def _run(
    problem: BSDEProblem,
    levels: Sequence[int],
    eps_ref: float,
    settings: GridSolverSettings,
    paths: int,
    beta: float,
    seed: int,
    workers: Optional[int],
    slope_tolerance: float,
    u_slope_tolerance: float,
    refinement: bool,
    level_generator: Callable[[int], Any],
    reference_generator: Any,
    y_columns=None,
    y_bound=None,
    y_theory_star=None,
    y_profile=None,
) -> BSDERateResult:
    check_levels(levels)
    if eps_ref >= 1.0 / max(levels):
        raise ExperimentPreconditionError(
            f"eps_ref={eps_ref:g} must lie below the finest level radius {1.0 / max(levels):g}"
        )
    model, T = problem.model, problem.T

    with timer(logger, f"bsde rate over {len(levels)} levels, {paths} paths"):
        reference, solutions = _solve_all(
            problem, levels, eps_ref, settings, seed, workers, level_generator, reference_generator
        )
        coupled = _coupled_errors(
            problem, reference, solutions, levels, eps_ref, paths, seed, workers
        )

    delta = None
    if refinement:
        finer = settings.model_copy(update={"steps": 2 * settings.steps})
        finest = levels[-1]
        fine_reference, fine_solutions = _solve_all(
            problem, [finest], eps_ref, finer, seed, workers, level_generator, reference_generator
        )
        refined = _coupled_errors(
            problem, fine_reference, fine_solutions, [finest], eps_ref, paths, seed, workers
        )
        delta = abs(
            math.sqrt(np.mean(refined.y_squares[:, 0]))
            - math.sqrt(np.mean(coupled.y_squares[:, -1]))
        )

    profile = process_profile(model, levels, eps_ref, T)
    warnings = sorted({w for s in solutions + [reference] for w in s.diagnostics.warnings})
    notes = {"steps": settings.steps}
    if warnings:
        notes["solver_warnings"] = " | ".join(warnings)
    y_notes = dict(notes)
    if delta is not None:
        y_notes["grid_refinement_delta"] = delta

    y = _report(
        "bsde-y",
        levels,
        coupled.y_squares,
        beta,
        model,
        T,
        eps_ref,
        profile if y_profile is None else y_profile,
        slope_tolerance,
        seed,
        columns=y_columns,
        notes=y_notes,
        bound=y_bound,
        theory_star=y_theory_star,
    )
    u = _report(
        "bsde-u",
        levels,
        coupled.u_squares,
        beta,
        model,
        T,
        eps_ref,
        profile,
        u_slope_tolerance,
        seed,
        notes=notes,
    )
    apriori = pd.DataFrame(
        {
            "n": [str(n) for n in levels] + ["reference"],
            "profile": coupled.apriori,
        }
    )
    return BSDERateResult(
        y=y,
        u=u,
        apriori=apriori,
        refinement_delta=delta,
        solutions=solutions,
        reference=reference,
    )


def run_bsde_rate(
    problem: BSDEProblem,
    levels: Sequence[int],
    eps_ref: float,
    settings: GridSolverSettings = GridSolverSettings(),
    paths: int = constants.DEFAULT_PATHS,
    beta: Optional[float] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    slope_tolerance: float = 0.15,
    u_slope_tolerance: float = 0.2,
    refinement: bool = True,
) -> BSDERateResult:
    """Y and U errors of the level-n BSDEs against the eps_ref BSDE on coupled paths.

    ``problem`` is a template; its ``eps`` is replaced per level. A
    time-discretized generator without steps uses m = n at level n and the
    undiscretized generator at the reference.
    """
    beta = default_beta(problem.model) if beta is None else beta
    generator = problem.generator
    return _run(
        problem,
        levels,
        eps_ref,
        settings,
        paths,
        beta,
        seed,
        workers,
        slope_tolerance,
        u_slope_tolerance,
        refinement,
        level_generator=lambda n: with_steps(generator, n),
        reference_generator=undiscretized(generator),
    )


def run_generator_gap_rate(
    problem: BSDEProblem,
    levels: Sequence[int],
    eps_ref: float,
    settings: GridSolverSettings = GridSolverSettings(),
    paths: int = constants.DEFAULT_PATHS,
    beta: Optional[float] = None,
    seed: int = 0,
    workers: Optional[int] = None,
    slope_tolerance: float = 0.15,
    u_slope_tolerance: float = 0.2,
    refinement: bool = False,
) -> BSDERateResult:
    """Y errors against the two-term bound C_beta sqrt(T) n^-(1 - beta/2) + c_n.

    The Y report lists both terms per level and which of them dominates.
    """
    generator = problem.generator
    if not isinstance(generator, (IntegralGenerator, TimeDiscretizedGenerator)):
        raise DomainError(
            f"generator gap experiments need an integral or time_discretized generator, got {generator.kind}"
        )
    model, T = problem.model, problem.T
    beta = default_beta(model) if beta is None else beta
    levels_array = np.asarray(levels, dtype=float)
    exponent = 1.0 - beta / 2.0
    process_term = c_beta(model, beta) * math.sqrt(T) * levels_array ** (-exponent)
    gap_term = np.array([generator_gap_cn(model, generator, n, T) for n in levels])
    dominant = np.where(gap_term > process_term, "gap", "process")

    profile = process_profile(model, levels, eps_ref, T)
    if isinstance(generator, TimeDiscretizedGenerator):
        gap_effect = np.array([source_gap(generator, n, T) for n in levels])
    else:
        gap_effect = T * gap_term
    predicted_profile = profile + gap_effect

    theory_star = -(1.0 - bg_index(model) / 2.0)
    if np.all(gap_term > 0):
        theory_star = max(theory_star, fit_loglog_slope(levels, gap_term, resamples=0).slope)

    return _run(
        problem,
        levels,
        eps_ref,
        settings,
        paths,
        beta,
        seed,
        workers,
        slope_tolerance,
        u_slope_tolerance,
        refinement,
        level_generator=lambda n: with_steps(generator, n),
        reference_generator=undiscretized(generator),
        y_columns={"process_term": process_term, "c_n": gap_term, "dominant": dominant},
        y_bound=process_term + gap_term,
        y_theory_star=theory_star,
        y_profile=predicted_profile,
    )


def default_beta(model) -> float:
    """A beta strictly inside (beta*, 2), a quarter above beta* where that fits."""
    beta_star = bg_index(model)
    return min(beta_star + 0.25, 0.5 * (beta_star + 2.0))
