"""Least-squares Monte Carlo for the approximating BSDE.

Conditional expectations E[. | X_t_i] are projections onto polynomials in the
standardized state. The implicit part of the theta-scheme is solved path by
path with Picard iteration; a generator that reads U is fed the increments of
the current regression polynomial.
"""

import dataclasses
import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial
from pydantic import Field

from _levybsde import constants, streams
from _levybsde.bsde_solver.exceptions import PicardDivergenceError
from _levybsde.bsde_solver.generators import JumpRule
from _levybsde.bsde_solver.problem import BSDEProblem
from _levybsde.levy_measures import jump_quadrature
from _levybsde.path_sim import level_grid_values, level_mass
from _levybsde.utils import timer
from levybsde import schema

logger = logging.getLogger(__name__)


class LSMCSettings(schema.Base):
    steps: int = Field(64, ge=1)
    paths: int = Field(10_000, ge=constants.LSMC_MIN_PATHS)
    degree: int = Field(4, ge=0, le=constants.LSMC_MAX_DEGREE)
    theta: float = Field(0.5, ge=0, le=1)
    bootstrap: int = Field(32, ge=0)
    quadrature_nodes: int = Field(64, ge=1)


@dataclasses.dataclass(frozen=True)
class Regression:
    center: float
    scale: float
    coefficients: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return polynomial.polyval((np.asarray(x) - self.center) / self.scale, self.coefficients)


def fit_regression(x: np.ndarray, target: np.ndarray, degree: int):
    """Least squares polynomial fit, lowering the degree while the Gram matrix is ill conditioned.

    Returns the fit and the degree actually used.
    """
    center = float(np.mean(x))
    scale = float(np.std(x))
    if scale == 0:
        return Regression(center, 1.0, np.array([float(np.mean(target))])), 0
    z = (x - center) / scale
    for used in range(degree, -1, -1):
        features = polynomial.polyvander(z, used)
        gram = features.T @ features
        if np.linalg.cond(gram) > constants.LSMC_CONDITION_LIMIT:
            continue
        try:
            factor = scipy.linalg.cho_factor(gram)
        except np.linalg.LinAlgError:
            continue
        coefficients = scipy.linalg.cho_solve(factor, features.T @ target)
        return Regression(center, scale, coefficients), used
    return Regression(center, scale, np.array([float(np.mean(target))])), 0


@dataclasses.dataclass(frozen=True)
class LSMCResult:
    y0: float
    se: float
    degrees: Tuple[int, ...]
    residuals: Tuple[float, ...]
    fallbacks: Tuple[Tuple[int, int, int], ...]
    regressions: Tuple[Regression, ...]
    picard_iterations: Tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class _Pass:
    y0: float
    degrees: List[int]
    residuals: List[float]
    fallbacks: List[Tuple[int, int, int]]
    regressions: List[Regression]
    iterations: List[int]


def _backward_pass(
    X: np.ndarray, problem: BSDEProblem, settings: LSMCSettings, jumps: JumpRule
) -> _Pass:
    generator, terminal, T = problem.generator, problem.terminal, problem.T
    steps, theta = settings.steps, settings.theta
    dt = T / steps
    times = np.linspace(0.0, T, steps + 1)
    active = not generator.is_zero
    shifts = jumps.nodes[:, None]

    def increments(func, x):
        return func(x[None, :] + shifts) - func(x)[None, :]

    Y = terminal(X[:, steps])
    explicit = None
    if active and theta < 1:
        U = increments(terminal, X[:, steps]) if generator.uses_jumps else None
        explicit = generator.reaction(T, Y, U, jumps, T)

    degrees, residuals, fallbacks, regressions, iterations = [], [], [], [], []
    for i in reversed(range(steps)):
        x = X[:, i]
        target = Y if explicit is None else Y + (1.0 - theta) * dt * explicit
        regression, used = fit_regression(x, target, settings.degree)
        if used < settings.degree and np.std(x) > 0:
            fallbacks.append((i, settings.degree, used))
        fitted = regression(x)
        residuals.append(float(np.sqrt(np.mean((target - fitted) ** 2))))
        source = generator.source_integral(times[i], times[i + 1], T)
        base = fitted + source

        y, current, count = base, regression, 0
        if active and theta > 0:
            while True:
                count += 1
                U = None
                if generator.uses_jumps:
                    U = increments(current, x)
                update = base + theta * dt * generator.reaction(times[i], y, U, jumps, T)
                change = float(np.max(np.abs(update - y)))
                y = update
                if generator.uses_jumps:
                    current, _ = fit_regression(x, y, used)
                if change <= constants.PICARD_TOLERANCE:
                    break
                if count >= constants.PICARD_MAX_ITERATIONS:
                    raise PicardDivergenceError(
                        f"pathwise Picard iteration at t={times[i]:.6g} stalled at {change:.3e}"
                    )
        if active and theta < 1:
            U = None
            if generator.uses_jumps:
                current, _ = fit_regression(x, y, used)
                U = increments(current, x)
            explicit = generator.reaction(times[i], y, U, jumps, T)

        Y = y
        degrees.append(used)
        regressions.append(regression)
        iterations.append(count)

    return _Pass(
        y0=float(np.mean(Y)),
        degrees=degrees[::-1],
        residuals=residuals[::-1],
        fallbacks=fallbacks[::-1],
        regressions=regressions[::-1],
        iterations=iterations[::-1],
    )


def solve_lsmc(
    problem: BSDEProblem,
    settings: LSMCSettings = LSMCSettings(),
    seed: int = 0,
    workers: Optional[int] = None,
) -> LSMCResult:
    """Y_0 at x0 with a full-path bootstrap standard error."""
    model, eps = problem.model, problem.eps
    times = np.linspace(0.0, problem.T, settings.steps + 1)
    if problem.generator.uses_jumps and level_mass(model, eps) > 0:
        jumps = JumpRule(*jump_quadrature(model, eps, settings.quadrature_nodes))
    else:
        jumps = JumpRule.empty()

    with timer(logger, f"lsmc eps={eps:g} paths={settings.paths}"):
        X = problem.x0 + level_grid_values(
            model, eps, problem.T, times, settings.paths, seed, constants.STREAM_LSMC, workers
        )
        main = _backward_pass(X, problem, settings, jumps)
        replicas = []
        for b in range(settings.bootstrap):
            rng = streams.path_generator(seed, constants.STREAM_BOOTSTRAP, b)
            rows = rng.integers(0, settings.paths, settings.paths)
            replicas.append(_backward_pass(X[rows], problem, settings, jumps).y0)

    se = float(np.std(replicas, ddof=1)) if len(replicas) > 1 else float("nan")
    for step, requested, used in main.fallbacks:
        logger.info(f"lsmc step {step}: degree {requested} ill conditioned, used {used}")
    return LSMCResult(
        y0=main.y0,
        se=se,
        degrees=tuple(main.degrees),
        residuals=tuple(main.residuals),
        fallbacks=tuple(main.fallbacks),
        regressions=tuple(main.regressions),
        picard_iterations=tuple(main.iterations),
    )
