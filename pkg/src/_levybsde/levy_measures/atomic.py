"""Purely atomic Lévy measures.

The two infinite rules sit exactly at Blumenthal-Getoor index one:

* harmonic: atoms 1/i with unit weight, i >= 1
* logharmonic: atoms sqrt(log i)/i with unit weight, i >= 2

and ``explicit`` holds a finite list of (position, weight) pairs. An atom
sitting exactly at the radius belongs to both the tail {|x| >= eps} and the
partial-moment region {|x| <= eps}.
"""

import enum
import logging
import math
from typing import ClassVar, Literal, Tuple

import numpy as np
from pydantic import Field, model_validator
from scipy import special

from _levybsde import constants
from _levybsde.levy_measures.base import DIVERGENT, DomainError, LevyModel, Moment

logger = logging.getLogger(__name__)


class AtomicRule(str, enum.Enum):
    harmonic = "harmonic"
    logharmonic = "logharmonic"
    explicit = "explicit"


def logharmonic_atom(i):
    return np.sqrt(np.log(i)) / i


def _logharmonic_terms(p: float, start: int, stop: int) -> np.ndarray:
    i = np.arange(start, stop, dtype=float)
    return np.log(i) ** (p / 2.0) * i ** (-p)


def _logharmonic_remainder(p: float, start: float) -> float:
    """Euler-Maclaurin tail sum_{i >= start} (log i)^(p/2) i^(-p), p > 1.

    The integral has the closed form Gamma(a+1, (p-1) log K) / (p-1)^(a+1)
    with a = p/2; two correction terms bring the error to O(K^(-p-3)).
    """
    a = p / 2.0
    log_k = math.log(start)
    integral = (
        special.gammaincc(a + 1.0, (p - 1.0) * log_k)
        * special.gamma(a + 1.0)
        / (p - 1.0) ** (a + 1.0)
    )
    value = log_k**a * start ** (-p)
    slope = start ** (-p - 1.0) * log_k ** (a - 1.0) * (a - p * log_k)
    return integral + value / 2.0 - slope / 12.0


def _logharmonic_window(p: float, first: int) -> int:
    """Explicit terms before switching to the remainder formula."""
    window = 4096
    # the Euler-Maclaurin error bound shrinks like K^(-p-3); grow K until it is negligible
    while (first + window) ** (-p - 3.0) * 10.0 > constants.ATOMIC_RESIDUAL_TOLERANCE * max(
        first ** (1.0 - p), 1e-300
    ):
        window *= 4
        if window > 1 << 24:
            break
    return window


class Atomic(LevyModel):
    kind: Literal["atomic"] = "atomic"
    rule: AtomicRule = AtomicRule.harmonic
    atoms: Tuple[Tuple[float, float], ...] = Field(default=())

    beta_star_formula: ClassVar[str] = "1"
    parameter_ranges: ClassVar[str] = "no parameters"

    @model_validator(mode="after")
    def check_atoms(self):
        if self.rule != AtomicRule.explicit:
            if self.atoms:
                raise ValueError(f"rule={self.rule.value} takes no explicit atoms")
            return self
        if not self.atoms:
            raise ValueError("rule=explicit needs at least one atom")
        magnitudes = [abs(x) for x, _ in self.atoms]
        if any(m == 0 for m in magnitudes):
            raise ValueError("atoms must sit away from the origin")
        if any(w <= 0 for _, w in self.atoms):
            raise ValueError("atomic weights must be positive")
        if any(a <= b for a, b in zip(magnitudes, magnitudes[1:])):
            raise ValueError("atoms must be strictly decreasing in magnitude")
        return self

    @property
    def label(self) -> str:
        return f"atomic-{self.rule.value}"

    def bg_index(self) -> float:
        return 0.0 if self.rule == AtomicRule.explicit else 1.0

    @property
    def finite_activity(self) -> bool:
        return self.rule == AtomicRule.explicit

    def total_mass(self) -> float:
        if not self.finite_activity:
            raise DomainError(f"{self.label} has infinite activity")
        return float(sum(w for _, w in self.atoms))

    def _explicit_arrays(self):
        positions = np.array([x for x, _ in self.atoms], dtype=float)
        weights = np.array([w for _, w in self.atoms], dtype=float)
        return positions, weights

    # counting

    def count_at_least(self, eps: float) -> int:
        """Number of atoms with |x| >= eps (for the infinite rules, x_i >= eps)."""
        if self.rule == AtomicRule.harmonic:
            k = int(math.floor(1.0 / eps))
            while 1.0 / (k + 1) >= eps:
                k += 1
            while k >= 1 and 1.0 / k < eps:
                k -= 1
            return k
        if self.rule == AtomicRule.logharmonic:
            if logharmonic_atom(2) < eps:
                return 0
            lo, hi = 2, 4
            while logharmonic_atom(hi) >= eps:
                lo, hi = hi, hi * 2
            # invariant: atom(lo) >= eps > atom(hi)
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if logharmonic_atom(mid) >= eps:
                    lo = mid
                else:
                    hi = mid
            return lo - 1
        positions, _ = self._explicit_arrays()
        return int(np.count_nonzero(np.abs(positions) >= eps))

    def first_index_at_most(self, eps: float) -> int:
        """Smallest i whose atom satisfies x_i <= eps (infinite rules)."""
        if self.rule == AtomicRule.harmonic:
            m = max(1, int(math.ceil(1.0 / eps)))
            while m > 1 and 1.0 / (m - 1) <= eps:
                m -= 1
            while 1.0 / m > eps:
                m += 1
            return m
        first = self.count_at_least(eps) + 2
        # an atom exactly at eps was counted above but also belongs here
        if first > 2 and logharmonic_atom(first - 1) <= eps:
            first -= 1
        return first

    # measure functionals

    def tail_mass(self, eps: float) -> float:
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            return float(weights[np.abs(positions) >= eps].sum())
        return float(self.count_at_least(eps))

    def partial_moment(self, p: float, eps: float) -> Moment:
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            inside = np.abs(positions) <= eps
            return float(np.sum(weights[inside] * np.abs(positions[inside]) ** p))
        if p <= 1.0:
            return DIVERGENT
        return float(self.partial_moments_many(p, np.array([eps]))[0])

    def partial_moments_many(self, p: float, radii: np.ndarray) -> np.ndarray:
        """Vectorized partial moments for the infinite rules, p > 1."""
        firsts = np.array([self.first_index_at_most(float(eps)) for eps in radii])
        if self.rule == AtomicRule.harmonic:
            return special.zeta(p, firsts.astype(float))

        start = int(firsts.min())
        stop = int(firsts.max()) + _logharmonic_window(p, start)
        terms = _logharmonic_terms(p, start, stop)
        # suffix sums of the explicit window, accumulated from the small end
        suffix = np.cumsum(terms[::-1])[::-1]
        remainder = _logharmonic_remainder(p, float(stop))
        return suffix[firsts - start] + remainder

    def compensator_mean(self, eps: float) -> float:
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            if eps == 0:
                return float(np.sum(weights * positions))
            outside = np.abs(positions) >= eps
            return float(np.sum(weights[outside] * positions[outside]))
        count = self.count_at_least(eps)
        if self.rule == AtomicRule.harmonic:
            return float(special.digamma(count + 1.0) + np.euler_gamma) if count else 0.0
        if count == 0:
            return 0.0
        return float(np.sum(logharmonic_atom(np.arange(2, count + 2, dtype=float))))

    def abs_moment(self, beta: float) -> Moment:
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            return float(np.sum(weights * np.abs(positions) ** beta))
        if beta <= 1.0:
            return DIVERGENT
        if self.rule == AtomicRule.harmonic:
            return float(special.zeta(beta, 1.0))
        stop = 2 + _logharmonic_window(beta, 2)
        return float(
            np.sum(_logharmonic_terms(beta, 2, stop))
            + _logharmonic_remainder(beta, float(stop))
        )

    def large_jump_second_moment(self) -> float:
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            outside = np.abs(positions) >= 1.0
            return float(np.sum(weights[outside] * positions[outside] ** 2))
        # harmonic has its first atom at 1, logharmonic atoms are all below 1
        return 1.0 if self.rule == AtomicRule.harmonic else 0.0

    # sampling

    def support(self, eps: float):
        """Positions and weights of the atoms with |x| >= eps."""
        if self.rule == AtomicRule.explicit:
            positions, weights = self._explicit_arrays()
            if eps == 0:
                return positions, weights
            outside = np.abs(positions) >= eps
            return positions[outside], weights[outside]
        count = self.count_at_least(eps)
        i = np.arange(count, dtype=float)
        if self.rule == AtomicRule.harmonic:
            return 1.0 / (i + 1.0), np.ones(count)
        return logharmonic_atom(i + 2.0), np.ones(count)

    def quantile(self, u: np.ndarray, eps: float) -> np.ndarray:
        u = np.atleast_1d(np.asarray(u, dtype=float))
        if self.rule != AtomicRule.explicit:
            count = self.count_at_least(eps)
            index = np.minimum((u * count).astype(np.int64), count - 1).astype(float)
            if self.rule == AtomicRule.harmonic:
                return 1.0 / (index + 1.0)
            return logharmonic_atom(index + 2.0)
        positions, weights = self.support(eps)
        cumulative = np.cumsum(weights)
        index = np.searchsorted(cumulative, u * cumulative[-1], side="right")
        return positions[np.minimum(index, len(positions) - 1)]

    def quadrature(self, eps: float, nodes: int):
        if self.finite_activity or self.count_at_least(eps) <= nodes:
            return self.support(eps)
        return super().quadrature(eps, nodes)
