"""Backward grid scheme for Markovian BSDEs driven by a compound Poisson level.

Values are stored in drift-free coordinates v(t, g) = u(t, g - d (T - t)), so
a backward step only averages over the compound Poisson increment:

    v_i = M (v_i+1 + (1 - theta) dt f_i+1) + S_i + theta dt f_r(t_i, v_i, U_i)

M is the Poisson(Lambda dt) mixture of powers of the jump interpolation
operator, S_i the exact integral of the generator's source over the step and
f_r its reaction term, solved for by Picard iteration.
"""

import dataclasses
import logging
import math
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import Field
from scipy import stats

from _levybsde import constants
from _levybsde.bsde_solver.exceptions import (
    PicardDivergenceError,
    SolverConfigurationError,
)
from _levybsde.bsde_solver.generators import JumpRule
from _levybsde.bsde_solver.problem import BSDEProblem
from _levybsde.levy_measures import compensator_mean, jump_quadrature
from _levybsde.path_sim import level_mass, terminal_values
from _levybsde.utils import timer
from levybsde import schema

logger = logging.getLogger(__name__)


class SpaceGridSpec(schema.Base):
    nodes: int = Field(513, ge=3)
    # None sizes the grid from simulated quantiles of X^n_T
    half_width: Optional[float] = Field(None, gt=0)
    quantile: float = Field(constants.SPACE_GRID_QUANTILE, gt=0, lt=0.5)
    samples: int = Field(constants.SPACE_GRID_SAMPLES, ge=100)
    min_half_width: float = Field(1.0, gt=0)


class GridSolverSettings(schema.Base):
    steps: int = Field(64, ge=1)
    theta: float = Field(1.0, ge=0, le=1)
    quadrature_nodes: int = Field(constants.JUMP_QUADRATURE_NODES, ge=1)
    space: SpaceGridSpec = SpaceGridSpec()


def interpolation_stencil(grid: np.ndarray, points: np.ndarray):
    """Lower neighbour index and weight of ``points`` on a uniform ``grid``, extrapolating linearly."""
    h = grid[1] - grid[0]
    position = (points - grid[0]) / h
    lower = np.clip(np.floor(position), 0, len(grid) - 2).astype(np.int64)
    return lower, position - lower


def interpolate(grid: np.ndarray, values: np.ndarray, points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    lower, weight = interpolation_stencil(grid, points)
    return values[lower] * (1.0 - weight) + values[lower + 1] * weight


@dataclasses.dataclass(frozen=True)
class ShiftOperator:
    """values -> values(g_j + z_q) for every grid node g_j and jump node z_q."""

    lower: np.ndarray
    weight: np.ndarray

    @classmethod
    def build(cls, grid: np.ndarray, jumps: JumpRule):
        lower, weight = interpolation_stencil(
            grid, grid[None, :] + jumps.nodes[:, None]
        )
        return cls(lower=lower, weight=weight)

    def __call__(self, values: np.ndarray) -> np.ndarray:
        return values[self.lower] * (1.0 - self.weight) + values[self.lower + 1] * self.weight


def poisson_weights(rate: float) -> np.ndarray:
    """Poisson(rate) probabilities truncated where the tail drops below POISSON_TAIL, renormalized."""
    if rate == 0:
        return np.ones(1)
    top = int(stats.poisson.isf(constants.POISSON_TAIL, rate)) + 1
    weights = stats.poisson.pmf(np.arange(top + 1), rate)
    return weights / weights.sum()


@dataclasses.dataclass(frozen=True)
class SpaceGrid:
    nodes: np.ndarray
    outside_mass: float
    warnings: Tuple[str, ...] = ()


def build_space_grid(
    problem: BSDEProblem,
    spec: SpaceGridSpec,
    seed: int,
    workers: Optional[int] = None,
) -> SpaceGrid:
    """Uniform grid around x0 covering the simulated spread of X^n_T."""
    samples = terminal_values(
        problem.model,
        problem.eps,
        problem.T,
        spec.samples,
        seed,
        constants.STREAM_SPACE_GRID,
        workers,
    )
    if spec.half_width is None:
        lo, hi = np.quantile(samples, [spec.quantile, 1.0 - spec.quantile])
        # the drift-free coordinate starts at x0 + d T
        drift_span = abs(compensator_mean(problem.model, problem.eps)) * problem.T
        half = max(abs(lo), abs(hi), drift_span, spec.min_half_width)
    else:
        half = spec.half_width
    outside = float(np.mean(np.abs(samples) > half))
    warnings = []
    if outside > constants.SPACE_GRID_MASS_WARNING:
        message = (
            f"space grid [x0 - {half:.4g}, x0 + {half:.4g}] misses {outside:.2e} "
            f"of the terminal law (threshold {constants.SPACE_GRID_MASS_WARNING:g})"
        )
        logger.warning(message)
        warnings.append(message)
    nodes = np.linspace(problem.x0 - half, problem.x0 + half, spec.nodes)
    return SpaceGrid(nodes=nodes, outside_mass=outside, warnings=tuple(warnings))


@dataclasses.dataclass(frozen=True)
class SolverDiagnostics:
    picard_iterations: Tuple[int, ...]
    poisson_terms: int
    quadrature_drift_error: float
    outside_mass: float
    curvature: float
    contraction: float
    warnings: Tuple[str, ...] = ()


@dataclasses.dataclass(frozen=True, eq=False)
class Solution:
    """u(t_i, x) on a time grid, tabulated in drift-free coordinates."""

    times: np.ndarray
    grid: np.ndarray
    table: np.ndarray
    drift: float
    T: float
    diagnostics: SolverDiagnostics

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    def nodes(self, i: int) -> np.ndarray:
        """Space points x at which row i of the table holds u(t_i, x)."""
        return self.grid - self.drift * (self.T - self.times[i])

    def u(self, i: int, x) -> np.ndarray:
        return interpolate(
            self.grid, self.table[i], np.asarray(x) + self.drift * (self.T - self.times[i])
        )

    def U(self, i: int, x, z) -> np.ndarray:
        """u(t_i, x + z) - u(t_i, x), broadcasting x against z."""
        x = np.asarray(x, dtype=float)
        return self.u(i, x + np.asarray(z, dtype=float)) - self.u(i, x)

    def to_frame(self) -> pd.DataFrame:
        rows = len(self.times)
        return pd.DataFrame(
            {
                "t": np.repeat(self.times, len(self.grid)),
                "x": np.concatenate([self.nodes(i) for i in range(rows)]),
                "u": self.table.reshape(-1),
            }
        )


def contraction_factor(problem: BSDEProblem, steps: int) -> float:
    """dt L_f (1 + sqrt(Lambda)); the Picard step contracts when it stays below 1/2."""
    mass = level_mass(problem.model, problem.eps)
    return problem.T / steps * problem.lipschitz * (1.0 + math.sqrt(mass))


def solve_markovian_grid(
    problem: BSDEProblem,
    settings: GridSolverSettings = GridSolverSettings(),
    seed: int = 0,
    workers: Optional[int] = None,
) -> Solution:
    model, eps, T = problem.model, problem.eps, problem.T
    generator = problem.generator
    steps, theta = settings.steps, settings.theta
    dt = T / steps

    contraction = contraction_factor(problem, steps)
    if theta > 0 and contraction >= constants.CONTRACTION_MARGIN:
        raise SolverConfigurationError(
            f"dt L_f (1 + sqrt(Lambda)) = {contraction:.4g} >= {constants.CONTRACTION_MARGIN}; "
            f"increase the number of time steps above {steps}"
        )

    mass = level_mass(model, eps)
    if mass > 0:
        jumps = JumpRule(*jump_quadrature(model, eps, settings.quadrature_nodes))
    else:
        jumps = JumpRule.empty()
    # compensating with the rule's own first moment keeps u(t, x) = x exact for g(x) = x
    drift = -jumps.first_moment
    drift_error = abs(jumps.first_moment - compensator_mean(model, eps))

    with timer(logger, f"grid solve eps={eps:g} K={steps}"):
        space = build_space_grid(problem, settings.space, seed, workers)
        grid = space.nodes
        shift = ShiftOperator.build(grid, jumps)
        probabilities = poisson_weights(mass * dt)
        transition = jumps.weights / mass if mass > 0 else jumps.weights

        def expectation(values):
            total = probabilities[0] * values
            term = values
            for p in probabilities[1:]:
                term = transition @ shift(term)
                total = total + p * term
            return total

        active = not generator.is_zero

        def reaction(t, y):
            U = shift(y) - y[None, :] if generator.uses_jumps else None
            return generator.reaction(t, y, U, jumps, T)

        times = np.linspace(0.0, T, steps + 1)
        table = np.empty((steps + 1, len(grid)))
        table[steps] = problem.terminal(grid)
        explicit = reaction(T, table[steps]) if active and theta < 1 else None
        iterations: List[int] = []

        for i in reversed(range(steps)):
            carried = table[i + 1]
            if explicit is not None:
                carried = carried + (1.0 - theta) * dt * explicit
            base = expectation(carried) + generator.source_integral(
                times[i], times[i + 1], T
            )
            y = base
            count = 0
            if active and theta > 0:
                while True:
                    count += 1
                    update = base + theta * dt * reaction(times[i], y)
                    change = float(np.max(np.abs(update - y)))
                    y = update
                    if change <= constants.PICARD_TOLERANCE:
                        break
                    if count >= constants.PICARD_MAX_ITERATIONS:
                        raise PicardDivergenceError(
                            f"Picard iteration at t={times[i]:.6g} stalled at change {change:.3e} "
                            f"after {count} iterations"
                        )
            iterations.append(count)
            table[i] = y
            if active and theta < 1:
                explicit = reaction(times[i], y)

    h = grid[1] - grid[0]
    curvature = float(np.max(np.abs(np.diff(table[0], 2)))) / h**2 if len(grid) > 2 else 0.0
    diagnostics = SolverDiagnostics(
        picard_iterations=tuple(reversed(iterations)),
        poisson_terms=len(probabilities),
        quadrature_drift_error=drift_error,
        outside_mass=space.outside_mass,
        curvature=curvature,
        contraction=contraction,
        warnings=space.warnings,
    )
    return Solution(
        times=times, grid=grid, table=table, drift=drift, T=T, diagnostics=diagnostics
    )
