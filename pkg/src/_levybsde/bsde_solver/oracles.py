"""Closed forms and analytic generator gaps used to check the solvers."""

import math
from typing import Any, Optional

import numpy as np

from _levybsde import constants, streams
from _levybsde.bsde_solver.exceptions import SolverConfigurationError
from _levybsde.bsde_solver.generators import (
    HolderGenerator,
    IntegralGenerator,
    LinearGenerator,
    TimeDiscretizedGenerator,
    undiscretized,
)
from _levybsde.bsde_solver.problem import BSDEProblem
from _levybsde.levy_measures import DomainError, LevyModel, partial_moment
from _levybsde.path_sim import terminal_values


def _terminal_mean(problem, x, samples, seed, workers):
    x = problem.x0 if x is None else x
    increments = terminal_values(
        problem.model, problem.eps, problem.T, samples, seed, constants.STREAM_ORACLE, workers
    )
    return streams.mean_and_se(problem.terminal(x + increments))


def closed_form_zero_generator(
    problem: BSDEProblem,
    x: Optional[float] = None,
    samples: int = constants.DEFAULT_PATHS,
    seed: int = 0,
    workers: Optional[int] = None,
):
    """u(0, x) = E[g(x + X^n_T)] by Monte Carlo, with its standard error."""
    if not problem.generator.is_zero:
        raise SolverConfigurationError(
            f"closed form needs the zero generator, got {problem.generator.kind}"
        )
    return _terminal_mean(problem, x, samples, seed, workers)


def closed_form_linear_generator(
    problem: BSDEProblem,
    x: Optional[float] = None,
    samples: int = constants.DEFAULT_PATHS,
    seed: int = 0,
    workers: Optional[int] = None,
):
    """u(0, x) = e^(aT) E[g(x + X^n_T)] + b (e^(aT) - 1) / a for f = a y + b."""
    generator = problem.generator
    if not isinstance(generator, LinearGenerator):
        raise SolverConfigurationError(
            f"closed form needs a linear generator, got {generator.kind}"
        )
    mean, se = _terminal_mean(problem, x, samples, seed, workers)
    growth = math.exp(generator.a * problem.T)
    if generator.a == 0:
        offset = generator.b * problem.T
    else:
        offset = generator.b * (growth - 1.0) / generator.a
    return growth * mean + offset, growth * se


def generator_gap_cn(model: LevyModel, generator: Any, n: int, T: float = 1.0) -> float:
    """sup |f - f^n| rate c_n for the generator families with a known gap.

    Integral generators restricted to |x| >= 1/n miss
    max(m_beta_bar(1/n), m_2beta_bar(1/n)^(1/2)); a time discretization on m
    steps of an alpha-Hölder source misses (T/m)^alpha, and nothing when the
    wrapped generator does not depend on time.
    """
    if n < 1:
        raise SolverConfigurationError(f"level must be >= 1, got n={n}")
    if isinstance(generator, IntegralGenerator):
        generator.check_model(model)
        eps = 1.0 / n
        return max(
            partial_moment(model, generator.beta_bar, eps),
            math.sqrt(partial_moment(model, 2.0 * generator.beta_bar, eps)),
        )
    if isinstance(generator, TimeDiscretizedGenerator):
        steps = generator.steps or n
        inner = undiscretized(generator)
        if isinstance(inner, HolderGenerator):
            return (T / steps) ** inner.alpha
        return 0.0
    raise DomainError(f"no generator gap is defined for kind {generator.kind}")


def source_gap(generator: Any, n: int, T: float = 1.0) -> float:
    """|int_0^T (s - s^n)(t) dt| between a time-discretized source and the source it freezes."""
    if not isinstance(generator, TimeDiscretizedGenerator):
        return 0.0
    level = generator if generator.steps else generator.model_copy(update={"steps": n})
    exact = undiscretized(generator).source_integral(0.0, T, T)
    return float(np.abs(exact - level.source_integral(0.0, T, T)))
