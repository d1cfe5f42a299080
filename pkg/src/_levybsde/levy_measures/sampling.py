"""Tabulated inverse CDFs for densities on a half line.

A table covers [lo, hi] with log-spaced nodes, stores the normalized
cumulative mass at each node and inverts it with a monotone (PCHIP)
interpolant in log(x). Tables are cached per (model, eps); the cache takes a
lock only on insertion, lookups of finished tables are lock free.
"""

import dataclasses
import logging
import threading
from typing import Callable, Dict, Hashable

import numpy as np
from scipy.interpolate import PchipInterpolator

from _levybsde import constants
from _levybsde.levy_measures.quadrature import gauss_legendre_panel_masses

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class InverseCDFTable:
    lo: float
    hi: float
    mass: float
    cdf: np.ndarray
    log_nodes: np.ndarray
    interpolant: PchipInterpolator

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.clip(u, self.cdf[0], self.cdf[-1])
        return np.exp(self.interpolant(u))


def build_table(
    density: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    nodes: int = constants.INVERSE_CDF_NODES,
) -> InverseCDFTable:
    grid = np.geomspace(lo, hi, nodes)
    masses = gauss_legendre_panel_masses(density, grid)
    cumulative = np.concatenate([[0.0], np.cumsum(masses)])
    total = cumulative[-1]
    cdf = cumulative / total

    # far-tail panels can underflow relative to the total
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    log_nodes = np.log(grid[keep])
    cdf = cdf[keep]
    return InverseCDFTable(
        lo=lo,
        hi=hi,
        mass=total,
        cdf=cdf,
        log_nodes=log_nodes,
        interpolant=PchipInterpolator(cdf, log_nodes),
    )


class TableCache:
    def __init__(self):
        self._tables: Dict[Hashable, InverseCDFTable] = {}
        self._lock = threading.Lock()

    def get(self, key: Hashable, factory: Callable[[], InverseCDFTable]):
        table = self._tables.get(key)
        if table is not None:
            return table
        with self._lock:
            table = self._tables.get(key)
            if table is None:
                logger.debug(f"building inverse CDF table for {key}")
                table = factory()
                self._tables[key] = table
        return table

    def clear(self):
        with self._lock:
            self._tables.clear()

    def __len__(self):
        return len(self._tables)


table_cache = TableCache()


def split_by_side(u: np.ndarray, positive_share: float):
    """Route one uniform per draw to a side, rescaling it to a fresh uniform on that side."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    positive = u < positive_share
    rescaled = np.where(
        positive,
        u / positive_share if positive_share > 0 else 0.0,
        (u - positive_share) / (1.0 - positive_share) if positive_share < 1 else 0.0,
    )
    return positive, rescaled
