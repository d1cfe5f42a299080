"""Quadrature for power-law singular integrands on the half line.

Integrands of the form c * x**(k) * exp(-lam * x) blow up or vanish like a
power at the origin and decay exponentially at infinity. They are integrated
in the variable s = log(x) over panels a fraction of a decade wide, which
keeps every panel smooth enough for Gauss-Kronrod at 1e-10.
"""

import logging
import math
import warnings
from typing import Callable, Tuple

import numpy as np
from scipy import integrate

from _levybsde import constants

logger = logging.getLogger(__name__)


def log_panel_breakpoints(a: float, b: float, panels_per_decade: int) -> np.ndarray:
    decades = math.log10(b / a)
    panels = max(1, int(math.ceil(decades * panels_per_decade)))
    return np.geomspace(a, b, panels + 1)


def _quad(func, a, b, tolerance):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            func, a, b, epsabs=tolerance, epsrel=1e-12, limit=200
        )
    return value, abserr


def integrate_log_panels(
    func: Callable[[float], float],
    a: float,
    b: float,
    tolerance: float = constants.QUADRATURE_TOLERANCE,
    panels_per_decade: int = constants.PANELS_PER_DECADE,
) -> Tuple[float, float]:
    """Integrate ``func`` over [a, b] with 0 < a < b <= inf.

    Finite stretches are integrated panel by panel in log(x); an infinite
    upper limit gets one final Gauss-Kronrod call on [max(a, 1), inf).
    Returns the value and the accumulated error estimate.
    """
    if not 0 < a < b:
        raise ValueError(f"expected 0 < a < b, got a={a}, b={b}")

    def in_log(s):
        x = math.exp(s)
        return func(x) * x

    finite_end = b if math.isfinite(b) else max(a, 1.0)
    total, error = 0.0, 0.0
    if finite_end > a:
        edges = log_panel_breakpoints(a, finite_end, panels_per_decade)
        budget = tolerance / len(edges)
        for lo, hi in zip(edges[:-1], edges[1:]):
            value, abserr = _quad(in_log, math.log(lo), math.log(hi), budget)
            total += value
            error += abserr
    if not math.isfinite(b):
        value, abserr = _quad(func, finite_end, math.inf, tolerance / 2)
        total += value
        error += abserr

    if error > 10 * tolerance:
        logger.warning(
            f"quadrature error estimate {error:.3e} above tolerance {tolerance:.1e} on [{a}, {b}]"
        )
    return total, error


def power_law_head(c: float, q: float, lam: float, eps: float) -> float:
    """Leading terms of c * int_0^eps x**(q - 1) exp(-lam x) dx for small eps, q > 0."""
    return c * (eps**q / q - lam * eps ** (q + 1) / (q + 1))


def tempered_power_moment(
    c: float,
    alpha: float,
    lam: float,
    p: float,
    eps: float,
    eps_min: float = constants.QUADRATURE_EPS_MIN,
) -> float:
    """c * int_0^eps x**(p - 1 - alpha) exp(-lam x) dx, requiring p > alpha.

    Below ``eps_min`` the analytic head is used, above it log panels.
    """
    q = p - alpha
    if c == 0:
        return 0.0
    if eps <= eps_min:
        return power_law_head(c, q, lam, eps)

    def density(x):
        return c * x ** (q - 1) * math.exp(-lam * x)

    body, _ = integrate_log_panels(density, eps_min, eps)
    return power_law_head(c, q, lam, eps_min) + body


def gauss_legendre_panel_masses(
    density: Callable[[np.ndarray], np.ndarray], nodes: np.ndarray, order: int = 8
) -> np.ndarray:
    """Mass of ``density`` on every [nodes[k], nodes[k+1]], integrated in log(x).

    Vectorized counterpart of :func:`integrate_log_panels` used to build
    sampling tables on thousands of panels at once.
    """
    s = np.log(nodes)
    abscissae, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(s)
    mid = 0.5 * (s[1:] + s[:-1])
    points = mid[:, None] + half[:, None] * abscissae[None, :]
    x = np.exp(points)
    return half * np.sum(weights[None, :] * density(x) * x, axis=1)
