"""Lévy measures: tail masses, partial moments, Blumenthal-Getoor indices and restricted sampling.

Every operation here is a pure function of its arguments plus, for the
samplers, an explicit ``numpy.random.Generator``. The only shared state is the
inverse-CDF table cache in :mod:`_levybsde.levy_measures.sampling`.
"""

import logging
import math
from typing import Annotated, Dict, Iterable, Union

import numpy as np
from pydantic import Field

from _levybsde.levy_measures.atomic import Atomic, AtomicRule
from _levybsde.levy_measures.base import (
    DIVERGENT,
    Divergent,
    DomainError,
    LevyModel,
    Moment,
    TailMoments,
    is_divergent,
)
from _levybsde.levy_measures.merton import MertonJump
from _levybsde.levy_measures.tempered import (
    CGMY,
    GeneralizedHyperbolic,
    Meixner,
    StableLikeTail,
    TemperedPowerLaw,
)

logger = logging.getLogger(__name__)

LevyModelSpec = Annotated[
    Union[CGMY, MertonJump, StableLikeTail, GeneralizedHyperbolic, Meixner, Atomic],
    Field(discriminator="kind"),
]

MODEL_PRESETS: Dict[str, LevyModel] = {
    "cgmy": CGMY(C=1.0, G=5.0, M=5.0, Y=0.5),
    "merton": MertonJump(intensity=1.0, mu=0.0, sigma=1.0),
    "stable-like": StableLikeTail(),
    "gh": GeneralizedHyperbolic(),
    "meixner": Meixner(),
    "atomic-harmonic": Atomic(rule=AtomicRule.harmonic),
    "atomic-logharmonic": Atomic(rule=AtomicRule.logharmonic),
}

__all__ = [
    "Atomic",
    "AtomicRule",
    "CGMY",
    "DIVERGENT",
    "Divergent",
    "DomainError",
    "GeneralizedHyperbolic",
    "LevyModel",
    "LevyModelSpec",
    "MODEL_PRESETS",
    "Meixner",
    "MertonJump",
    "StableLikeTail",
    "TailMoments",
    "TemperedPowerLaw",
    "bg_index",
    "c_beta",
    "compensator_mean",
    "is_divergent",
    "jump_quadrature",
    "partial_moment",
    "restricted_mass",
    "sample_restricted",
    "sample_restricted_many",
    "tail_mass",
    "tail_moments",
]


def _check_radius(eps: float, allow_zero_for: LevyModel = None):
    if not math.isfinite(eps):
        raise DomainError(f"truncation radius must be finite, got {eps}")
    if eps > 0:
        return
    if eps == 0 and allow_zero_for is not None and allow_zero_for.finite_activity:
        return
    raise DomainError(f"truncation radius must be positive, got {eps}")


def tail_mass(model: LevyModel, eps: float) -> float:
    """Lambda(eps) = nu({|x| >= eps})."""
    _check_radius(eps)
    return float(model.tail_mass(eps))


def restricted_mass(model: LevyModel, eps: float) -> float:
    """Lambda(eps), extended to eps == 0 (total mass) for finite-activity models."""
    _check_radius(eps, allow_zero_for=model)
    return float(model.restricted_mass(eps))


def partial_moment(model: LevyModel, p: float, eps: float) -> Moment:
    """m_p(eps) = int_{|x| <= eps} |x|^p nu(dx), or ``DIVERGENT``."""
    _check_radius(eps)
    if p < 0:
        raise DomainError(f"moment order must be nonnegative, got p={p}")
    return model.partial_moment(p, eps)


def bg_index(model: LevyModel) -> float:
    return model.bg_index()


def c_beta(model: LevyModel, beta: float) -> float:
    """C_beta = 2 (int |x|^beta nu(dx))^(1/2) for beta strictly between beta* and 2."""
    beta_star = model.bg_index()
    if not beta_star < beta < 2:
        raise DomainError(
            f"c_beta needs beta in (beta*={beta_star}, 2), got beta={beta}"
        )
    moment = model.abs_moment(beta)
    if is_divergent(moment) or not math.isfinite(moment):
        raise DomainError(f"int |x|^{beta} nu(dx) is not finite for {model!r}")
    return 2.0 * math.sqrt(moment)


def compensator_mean(model: LevyModel, eps: float) -> float:
    """Signed int_{|x| >= eps} x nu(dx); eps == 0 allowed for finite activity."""
    _check_radius(eps, allow_zero_for=model)
    return float(model.compensator_mean(eps))


def sample_restricted_many(
    model: LevyModel, eps: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` independent draws from nu restricted to {|x| >= eps}, normalized."""
    if restricted_mass(model, eps) == 0:
        raise DomainError(f"{model!r} has no mass on |x| >= {eps}")
    if size == 0:
        return np.zeros(0)
    return model.quantile(rng.random(size), eps)


def sample_restricted(model: LevyModel, eps: float, rng: np.random.Generator) -> float:
    return float(sample_restricted_many(model, eps, 1, rng)[0])


def tail_moments(
    model: LevyModel, eps: float, exponents: Iterable[float] = (2.0,)
) -> TailMoments:
    _check_radius(eps)
    return TailMoments(
        epsilon=eps,
        lambda_eps=tail_mass(model, eps),
        m_p={float(p): partial_moment(model, p, eps) for p in exponents},
        mean_jump=compensator_mean(model, eps),
    )


def jump_quadrature(model: LevyModel, eps: float, nodes: int):
    """Nodes and weights for integrals against nu restricted to {|x| >= eps}.

    Weights sum to the restricted mass. Finite atomic supports are returned
    exactly; everything else uses equal-weight quantile midpoints.
    """
    _check_radius(eps, allow_zero_for=model)
    sizes, weights = model.quadrature(eps, nodes)
    return np.asarray(sizes, dtype=float), np.asarray(weights, dtype=float)
