"""Lower bounds, boundary cases at beta = beta*, and the random-walk gap."""

import dataclasses
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from _levybsde import constants, streams
from _levybsde.levy_measures import (
    Atomic,
    AtomicRule,
    DomainError,
    LevyModel,
    bg_index,
    is_divergent,
    partial_moment,
)
from _levybsde.levy_measures.atomic import logharmonic_atom
from _levybsde.path_sim import coupled_sup_errors
from _levybsde.rates.reports import ExperimentPreconditionError, rms_with_se
from levybsde.hookspecs import Check

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class LowerBoundReport:
    n: int
    m2_half: float
    c_T: float
    lower: float
    coupled_upper: float
    upper_se: float
    bracket: Optional[Tuple[float, float]] = None
    checks: Tuple[Check, ...] = ()

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def row(self):
        return {
            "n": self.n,
            "lower": self.lower,
            "upper": self.coupled_upper,
            "c_T": self.c_T,
            "m2_half": self.m2_half,
            "se": self.upper_se,
        }


def first_jump_probability_root(model: LevyModel, T: float) -> float:
    """c_T = P(tau <= T)^(1/2): one for infinite activity, sqrt(1 - exp(-nu(R) T)) otherwise."""
    if not model.finite_activity:
        return 1.0
    return math.sqrt(-math.expm1(-model.total_mass() * T))


def wasserstein_bounds(
    model: LevyModel,
    n: int,
    eps_ref: float,
    paths: int,
    T: float,
    seed: int = 0,
    workers: Optional[int] = None,
) -> LowerBoundReport:
    """Analytic lower bound c_T m2(1/(2n))^(1/2) against the coupling upper bound at level n."""
    if n < 1:
        raise DomainError(f"level must be >= 1, got n={n}")
    if eps_ref >= 1.0 / n:
        raise ExperimentPreconditionError(
            f"eps_ref={eps_ref:g} must lie below the level radius {1.0 / n:g}"
        )
    m2_half = partial_moment(model, 2.0, 1.0 / (2 * n))
    if is_divergent(m2_half):
        raise DomainError(f"second moment of {model!r} diverges near the origin")
    c_T = first_jump_probability_root(model, T)
    lower = c_T * math.sqrt(m2_half)

    sups = coupled_sup_errors(model, eps_ref, [1.0 / n], T, paths, seed, workers)
    upper, se = rms_with_se(sups**2)
    upper, se = float(upper[0]), float(se[0])
    checks = [
        Check(
            name=f"lower <= upper at n={n}",
            passed=lower <= upper + 3.0 * se,
            detail=f"lower {lower:.6g}, coupled upper {upper:.6g} (SE {se:.2g})",
        )
    ]

    bracket = None
    if isinstance(model, Atomic) and model.rule == AtomicRule.harmonic:
        # m2(1/(2n)) = sum_{i >= 2n} i^-2 lies in [1/(2n), 1/(2n - 1)]
        bracket = (c_T / math.sqrt(2 * n), c_T / math.sqrt(2 * n - 1))
        tol = constants.BRACKET_TOLERANCE
        checks.append(
            Check(
                name=f"harmonic lower-bound bracket at n={n}",
                passed=bracket[0] - tol <= lower <= bracket[1] + tol,
                detail=f"{lower:.12g} in [{bracket[0]:.12g}, {bracket[1]:.12g}]",
            )
        )
    return LowerBoundReport(
        n=n,
        m2_half=m2_half,
        c_T=c_T,
        lower=lower,
        coupled_upper=upper,
        upper_se=se,
        bracket=bracket,
        checks=tuple(checks),
    )


@dataclasses.dataclass(frozen=True, eq=False)
class DivergenceReport:
    beta: float
    levels: np.ndarray
    values: np.ndarray
    running_max: np.ndarray
    check: Check

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"n": self.levels, "value": self.values, "running_max": self.running_max}
        )


def check_optimality_divergence(
    model: LevyModel, beta_below: float, levels: Sequence[int]
) -> DivergenceReport:
    """n^(2 - beta) m2(1/(2n)) over the levels for a beta below beta*.

    Only a finite range can be tested: the running max has to grow overall
    and still grow over the last quarter of the levels. That is weaker than
    the limsup being infinite.
    """
    beta_star = bg_index(model)
    if not 0 <= beta_below < beta_star:
        raise DomainError(f"beta_below must lie in [0, beta*={beta_star}), got {beta_below}")
    levels = np.asarray(sorted(set(int(n) for n in levels)))
    if len(levels) < 4 or levels[0] < 1:
        raise DomainError("divergence check needs at least 4 distinct positive levels")

    moments = []
    for n in levels:
        value = partial_moment(model, 2.0, 1.0 / (2 * n))
        if is_divergent(value):
            raise DomainError(f"second moment of {model!r} diverges near the origin")
        moments.append(value)
    values = levels.astype(float) ** (2.0 - beta_below) * np.array(moments)
    running = np.maximum.accumulate(values)
    tail = max(1, len(levels) // 4)
    grows = running[-1] > running[0] and running[-1] > running[-tail - 1]
    return DivergenceReport(
        beta=beta_below,
        levels=levels,
        values=values,
        running_max=running,
        check=Check(
            name=f"n^(2-beta) m2(1/(2n)) unbounded, beta={beta_below:g}",
            passed=bool(grows),
            detail=(
                f"running max {running[0]:.4g} at n={levels[0]} -> {running[-1]:.4g} at "
                f"n={levels[-1]}, {running[-tail - 1]:.4g} a quarter of the levels earlier"
            ),
        ),
    )


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryReport:
    table: pd.DataFrame

    @property
    def passed(self) -> bool:
        return bool(self.table["passed"].all())

    @property
    def checks(self):
        checks = []
        for rule, rows in self.table.groupby("rule", sort=False):
            failed = rows[~rows["passed"]]
            checks.append(
                Check(
                    name=f"{rule} m2 bracket",
                    passed=failed.empty,
                    detail=(
                        f"{len(rows)} levels checked"
                        if failed.empty
                        else f"fails at n={failed['n'].tolist()[:5]}"
                    ),
                )
            )
        return checks


def check_bg_boundary_examples(n_max: int) -> BoundaryReport:
    """Analytic brackets of m2 for the two atomic measures with beta* = 1.

    harmonic: 1/n <= m2(1/n) <= 1/(n - 1).
    logharmonic, at the radius of the n-th atom x_n = sqrt(log n)/n where
    m2(x_n) = sum_{i >= n} log(i)/i^2: log(n)/n <= m2 <= 2 log(n)/n for n >= 4.
    The upper bound fails below n = 4, where the integral comparison
    (log(n) + 1)/n + log(n)/n^2 is checked instead.
    """
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    n = np.arange(2, n_max + 1)
    nf = n.astype(float)
    tol = constants.BRACKET_TOLERANCE

    harmonic = Atomic(rule=AtomicRule.harmonic)
    h_values = harmonic.partial_moments_many(2.0, 1.0 / nf)
    h_lower, h_upper = 1.0 / nf, 1.0 / (nf - 1.0)

    logharmonic = Atomic(rule=AtomicRule.logharmonic)
    l_values = logharmonic.partial_moments_many(2.0, logharmonic_atom(nf))
    log_n = np.log(nf)
    l_lower = log_n / nf
    l_upper = np.where(n >= 4, 2.0 * log_n / nf, (log_n + 1.0) / nf + log_n / nf**2)

    frames = []
    for rule, values, lower, upper in (
        ("harmonic", h_values, h_lower, h_upper),
        ("logharmonic", l_values, l_lower, l_upper),
    ):
        frames.append(
            pd.DataFrame(
                {
                    "rule": rule,
                    "n": n,
                    "value": values,
                    "lower": lower,
                    "upper": upper,
                    "passed": (values >= lower - tol) & (values <= upper + tol),
                }
            )
        )
    return BoundaryReport(table=pd.concat(frames, ignore_index=True))


@dataclasses.dataclass(frozen=True)
class AppendixReport:
    T: float
    k_n: int
    paths: int
    estimate: float
    se: float
    bound: float

    @property
    def check(self) -> Check:
        return Check(
            name=f"E sup|N - S_n| >= (1 - e^-T)/2 at k_n={self.k_n}",
            passed=self.estimate >= self.bound - 3.0 * self.se,
            detail=f"estimate {self.estimate:.6g} (SE {self.se:.2g}), bound {self.bound:.6g}",
        )

    def row(self):
        return {
            "T": self.T,
            "k_n": self.k_n,
            "paths": self.paths,
            "estimate": self.estimate,
            "se": self.se,
            "bound": self.bound,
        }


def poisson_walk_sup(times: np.ndarray, k_n: int, T: float) -> float:
    """sup_t |N(t) - S_n(t)| for one Poisson path given its sorted jump times.

    S_n gains one at the right end i/k_n of every cell ((i-1)/k_n, i/k_n]
    holding a jump of N, so the difference only moves at jump epochs and
    at those cell ends.
    """
    if len(times) == 0:
        return 0.0
    cells = np.unique(np.ceil(times * k_n))
    ends = cells / k_n
    ends = ends[ends <= T]
    moments = np.concatenate([times, ends])
    steps = np.concatenate([np.ones(len(times)), -np.ones(len(ends))])
    order = np.argsort(moments, kind="stable")
    moments, level = moments[order], np.cumsum(steps[order])
    # read the value after every event sharing a time has been applied
    settled = np.concatenate([moments[1:] != moments[:-1], [True]])
    return float(np.max(np.abs(level[settled])))


def appendix_random_walk_gap(
    T: float,
    k_n: int,
    paths: int,
    seed: int = 0,
    workers: Optional[int] = None,
) -> AppendixReport:
    """E sup_t |N(t) - S_n(t)| for a rate-one Poisson process and its cell-count walk."""
    if T <= 0:
        raise DomainError(f"horizon must be positive, got T={T}")
    if k_n < 1:
        raise DomainError(f"k_n must be >= 1, got {k_n}")
    if paths < 10_000:
        raise DomainError(f"the random-walk gap needs at least 10^4 paths, got {paths}")

    def one_path(index, rng):
        count = int(rng.poisson(T))
        times = np.sort(T * (1.0 - rng.random(count)))
        return poisson_walk_sup(times, k_n, T)

    sups = streams.map_paths(one_path, paths, seed, constants.STREAM_APPENDIX, workers)
    estimate, se = streams.mean_and_se(sups)
    return AppendixReport(
        T=T,
        k_n=k_n,
        paths=paths,
        estimate=estimate,
        se=se,
        bound=-math.expm1(-T) / 2.0,
    )
