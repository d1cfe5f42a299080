import dataclasses
import logging
from typing import Optional

import numpy as np
from scipy import stats

from _levybsde import constants, streams
from _levybsde.levy_measures import DomainError, LevyModel
from _levybsde.path_sim.paths import level_mass, simulate_reference

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class IndependenceReport:
    samples: int
    statistic: float
    dof: int
    p_value: float
    rank_correlation: float
    degenerate: bool


def quantile_bins(values: np.ndarray, bins: int) -> np.ndarray:
    """Bin index in [0, bins) from empirical quantile edges; ties share a bin."""
    edges = np.quantile(values, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    return np.searchsorted(edges, values, side="right")


def independence_statistics(
    times: np.ndarray, magnitudes: np.ndarray, bins: int = constants.INDEPENDENCE_BINS
) -> IndependenceReport:
    rows = quantile_bins(times, bins)
    cols = quantile_bins(magnitudes, bins)
    table = np.zeros((bins, bins))
    np.add.at(table, (rows, cols), 1.0)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]

    constant = np.ptp(times) == 0 or np.ptp(magnitudes) == 0
    if constant or min(table.shape) < 2:
        return IndependenceReport(
            samples=len(times),
            statistic=0.0,
            dof=0,
            p_value=1.0,
            rank_correlation=0.0,
            degenerate=True,
        )

    chi2 = stats.chi2_contingency(table)
    rho = stats.spearmanr(times, magnitudes)
    return IndependenceReport(
        samples=len(times),
        statistic=float(chi2[0]),
        dof=int(chi2[2]),
        p_value=float(chi2[1]),
        rank_correlation=float(rho[0]),
        degenerate=False,
    )


def first_jump_independence_test(
    model: LevyModel,
    eps: float,
    T: float,
    paths: int,
    seed: int,
    workers: Optional[int] = None,
) -> IndependenceReport:
    """Chi-square and rank tests of the first jump time against the first jump magnitude.

    Paths without a jump in [0, T] carry no pair and are skipped.
    """
    if paths < constants.INDEPENDENCE_MIN_PATHS:
        raise DomainError(
            f"the independence test needs at least {constants.INDEPENDENCE_MIN_PATHS} paths, got {paths}"
        )
    if level_mass(model, eps) == 0:
        raise DomainError(f"{model!r} has no jumps with |x| >= {eps}")

    def first_jump(index, rng):
        path = simulate_reference(model, eps, T, rng)
        if len(path) == 0:
            return None
        return path.times[0], abs(path.sizes[0])

    pairs = [
        pair
        for pair in streams.map_paths(
            first_jump, paths, seed, constants.STREAM_INDEPENDENCE, workers
        )
        if pair is not None
    ]
    if not pairs:
        raise DomainError(f"no path among {paths} jumped before T={T}")
    times, magnitudes = (np.array(column) for column in zip(*pairs))
    report = independence_statistics(times, magnitudes)
    logger.info(
        f"first-jump independence on {report.samples} pairs: chi2={report.statistic:.3f}, p={report.p_value:.4f}, rho={report.rank_correlation:.4f}"
    )
    return report
