import dataclasses
import functools
import logging
from typing import List, Optional, Sequence

import numpy as np

from _levybsde import constants, streams
from _levybsde.levy_measures import (
    DomainError,
    LevyModel,
    compensator_mean,
    restricted_mass,
    sample_restricted_many,
)

logger = logging.getLogger(__name__)


class CouplingError(ValueError):
    """Two paths were not obtained from one another by thinning."""


@functools.lru_cache(maxsize=1024)
def level_mass(model: LevyModel, eps: float) -> float:
    return restricted_mass(model, eps)


@functools.lru_cache(maxsize=1024)
def level_drift(model: LevyModel, eps: float) -> float:
    """Compensator slope -int_{|x| >= eps} x nu(dx) that keeps the level a martingale."""
    return -compensator_mean(model, eps)


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class JumpPath:
    """A compensated compound Poisson path on [0, T] keeping the jumps with |J| >= eps."""

    model: LevyModel
    T: float
    eps: float
    times: np.ndarray
    sizes: np.ndarray
    drift: float

    def __post_init__(self):
        object.__setattr__(self, "times", _frozen(self.times))
        object.__setattr__(self, "sizes", _frozen(self.sizes))

    def __len__(self):
        return len(self.times)

    def __eq__(self, other):
        if not isinstance(other, JumpPath):
            return NotImplemented
        return (
            self.model == other.model
            and self.T == other.T
            and self.eps == other.eps
            and self.drift == other.drift
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.sizes, other.sizes)
        )

    __hash__ = None

    @property
    def terminal_value(self) -> float:
        return float(np.sum(self.sizes) + self.drift * self.T)


@dataclasses.dataclass(frozen=True)
class CoupledPaths:
    reference: JumpPath
    levels: List[JumpPath]


def simulate_reference(
    model: LevyModel, eps_ref: float, T: float, rng: np.random.Generator
) -> JumpPath:
    """Exact simulation of the level eps_ref: Poisson count, sorted uniform times, restricted sizes.

    eps_ref == 0 is accepted for finite-activity models and keeps every jump.
    """
    if T <= 0:
        raise DomainError(f"horizon must be positive, got T={T}")
    mass = level_mass(model, eps_ref)
    count = int(rng.poisson(mass * T)) if mass > 0 else 0
    # T * (1 - u) lies in (0, T]
    times = np.sort(T * (1.0 - rng.random(count)))
    sizes = sample_restricted_many(model, eps_ref, count, rng) if count else np.zeros(0)
    return JumpPath(
        model=model,
        T=T,
        eps=eps_ref,
        times=times,
        sizes=sizes,
        drift=level_drift(model, eps_ref),
    )


def thin_to_level(ref: JumpPath, eps: float) -> JumpPath:
    """Keep exactly the jumps of ``ref`` with |J| >= eps; the drift is recomputed."""
    if eps < ref.eps:
        raise DomainError(f"cannot thin a level at eps={ref.eps} down to eps={eps}")
    if eps == ref.eps:
        return ref
    keep = np.abs(ref.sizes) >= eps
    return JumpPath(
        model=ref.model,
        T=ref.T,
        eps=eps,
        times=ref.times[keep],
        sizes=ref.sizes[keep],
        drift=level_drift(ref.model, eps),
    )


def simulate_coupled(
    model: LevyModel,
    eps_ref: float,
    radii: Sequence[float],
    T: float,
    rng: np.random.Generator,
) -> CoupledPaths:
    """One reference path and its thinnings at ``radii`` (each >= eps_ref)."""
    reference = simulate_reference(model, eps_ref, T, rng)
    return CoupledPaths(
        reference=reference, levels=[thin_to_level(reference, eps) for eps in radii]
    )


def evaluate(path: JumpPath, t: float) -> float:
    """X^n_t = sum_{t_j <= t} J_j + drift * t."""
    if not 0 <= t <= path.T:
        raise DomainError(f"t={t} outside [0, {path.T}]")
    k = int(np.searchsorted(path.times, t, side="right"))
    return float(np.sum(path.sizes[:k]) + path.drift * t)


def _removed_mask(ref: JumpPath, coarse: JumpPath) -> np.ndarray:
    if coarse.model != ref.model:
        raise CouplingError(
            f"level of {coarse.model!r} is not a thinning of a path of {ref.model!r}"
        )
    if coarse.eps < ref.eps or coarse.T != ref.T:
        raise CouplingError(
            f"level eps={coarse.eps} on [0, {coarse.T}] is not a thinning of eps={ref.eps} on [0, {ref.T}]"
        )
    positions = np.searchsorted(ref.times, coarse.times)
    inside = positions < len(ref.times)
    if not np.all(inside):
        raise CouplingError("coarse level has a jump after the last reference jump")
    if not (
        np.array_equal(ref.times[positions], coarse.times)
        and np.array_equal(ref.sizes[positions], coarse.sizes)
    ):
        raise CouplingError("coarse level has a jump absent from the reference")
    removed = np.ones(len(ref.times), dtype=bool)
    removed[positions] = False
    return removed


def sup_of_removed(
    times: np.ndarray, sizes: np.ndarray, drift_gap: float, T: float
) -> float:
    """Exact sup over [0, T] of |sum_{t_j <= t} J_j + drift_gap * t| for sorted ``times``.

    The difference is linear between epochs, so the sup is attained at an
    endpoint or at a left or right limit of one of the epochs.
    """
    if len(times) == 0:
        return abs(drift_gap) * T
    partial = np.cumsum(sizes)
    right = partial + drift_gap * times
    left = right - sizes
    ends = max(0.0, abs(partial[-1] + drift_gap * T))
    return float(max(ends, np.max(np.abs(right)), np.max(np.abs(left))))


def sup_distance(ref: JumpPath, coarse: JumpPath) -> float:
    """Exact sup_t |X_t - X^n_t| for a coarse level obtained from ``ref`` by thinning."""
    removed = _removed_mask(ref, coarse)
    return sup_of_removed(
        ref.times[removed], ref.sizes[removed], ref.drift - coarse.drift, ref.T
    )


def coupled_sup_errors(
    model: LevyModel,
    eps_ref: float,
    radii: Sequence[float],
    T: float,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
    stream: int = constants.STREAM_PATHS,
) -> np.ndarray:
    """Array (paths, levels) of exact sup distances between the reference and each thinning."""
    radii = [float(eps) for eps in radii]
    if any(eps < eps_ref for eps in radii):
        raise DomainError(f"every radius must be >= eps_ref={eps_ref}")
    ref_drift = level_drift(model, eps_ref)
    gaps = [ref_drift - level_drift(model, eps) for eps in radii]

    def one_path(index, rng):
        reference = simulate_reference(model, eps_ref, T, rng)
        magnitudes = np.abs(reference.sizes)
        return [
            sup_of_removed(
                reference.times[magnitudes < eps],
                reference.sizes[magnitudes < eps],
                gap,
                T,
            )
            for eps, gap in zip(radii, gaps)
        ]

    rows = streams.map_paths(one_path, paths, seed, stream, workers)
    return np.array(rows, dtype=float).reshape(paths, len(radii))


def terminal_values(
    model: LevyModel,
    eps: float,
    T: float,
    paths: int,
    seed: int,
    stream: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """X^n_T for ``paths`` independent paths at level ``eps``."""

    def one_path(index, rng):
        return simulate_reference(model, eps, T, rng).terminal_value

    return np.array(streams.map_paths(one_path, paths, seed, stream, workers))


def values_on_grid(path: JumpPath, grid: np.ndarray) -> np.ndarray:
    """X^n at every point of a sorted time grid inside [0, T]."""
    grid = np.asarray(grid, dtype=float)
    if len(grid) and (grid[0] < 0 or grid[-1] > path.T):
        raise DomainError(f"time grid leaves [0, {path.T}]")
    partial = np.concatenate([[0.0], np.cumsum(path.sizes)])
    k = np.searchsorted(path.times, grid, side="right")
    return partial[k] + path.drift * grid


def coupled_grid_values(
    model: LevyModel,
    eps_ref: float,
    radii: Sequence[float],
    T: float,
    grid: np.ndarray,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
    stream: int = constants.STREAM_PATHS,
):
    """Reference and thinned levels sampled on a time grid.

    Returns ``(reference, levels)`` with shapes (paths, len(grid)) and
    (len(radii), paths, len(grid)). Path i uses the same stream as in
    :func:`coupled_sup_errors`, so both see the same Poisson random measure.
    """

    def one_path(index, rng):
        coupled = simulate_coupled(model, eps_ref, radii, T, rng)
        return values_on_grid(coupled.reference, grid), [
            values_on_grid(level, grid) for level in coupled.levels
        ]

    rows = streams.map_paths(one_path, paths, seed, stream, workers)
    reference = np.array([row[0] for row in rows]).reshape(paths, len(grid))
    levels = np.array([row[1] for row in rows]).reshape(paths, len(radii), len(grid))
    return reference, np.transpose(levels, (1, 0, 2))


def level_grid_values(
    model: LevyModel,
    eps: float,
    T: float,
    grid: np.ndarray,
    paths: int,
    seed: int,
    stream: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """(paths, len(grid)) samples of independent level paths on a time grid."""

    def one_path(index, rng):
        return values_on_grid(simulate_reference(model, eps, T, rng), grid)

    rows = streams.map_paths(one_path, paths, seed, stream, workers)
    return np.array(rows, dtype=float).reshape(paths, len(grid))
