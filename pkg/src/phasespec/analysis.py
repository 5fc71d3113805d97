"""Eigenvalue sensitivities and a spectral-radius lower bound."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import phase as ph
from .errors import ClassificationError, DomainError, SingularSensitivity
from .params import Classification, ParameterSet

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class SensitivityRow:
    lam: float
    partials: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "partials": list(self.partials)}


def sensitivity(p: ParameterSet, lam: float) -> SensitivityRow:
    """d lambda / d a_i for a simple real eigenvalue above 1/4.

    Implicit differentiation of the phase equation gives

        d lambda/d a_i = 2 (4 lambda - 1)/(4 lambda - 1 + a_i^2)
                         / (1/(2 lambda) + 4 sum_j a_j/(4 lambda - 1 + a_j^2)).

    The bracketed sum is proportional to the phase slope, so it vanishes at a
    multiple root; within SINGULAR_TOL of zero the row is refused.
    """
    if not lam > 0.25:
        raise DomainError(f"sensitivity needs lambda > 1/4, got {lam}")
    a = p.as_array()
    w = 4.0 * lam - 1.0
    denom = 1.0 / (2.0 * lam) + 4.0 * float(np.sum(a / (w + a * a)))
    if abs(denom) <= SINGULAR_TOL:
        raise SingularSensitivity(f"phase slope vanishes at lambda = {lam} (near-multiple root)")
    partials = 2.0 * w / (w + a * a) / denom
    return SensitivityRow(float(lam), tuple(float(v) for v in partials))


def radius_lower_bound(p: ParameterSet) -> float:
    """One Newton step on the k = 1 phase equation from x0 = sum (a_i + 1)^2 / 4.

    Defined for strictly positive parameters, where the phase is decreasing
    and convex in lambda, so the tangent at x0 crosses zero no later than the
    largest eigenvalue does.
    """
    if p.classification is not Classification.ALL_POSITIVE:
        raise ClassificationError("radius_lower_bound needs strictly positive parameters")
    a = p.as_array()
    x0 = float(np.sum((a + 1.0) ** 2)) / 4.0
    f = ph.phase(p, x0) - ph.target(1)
    df = ph.phase_derivative(p, x0)
    return x0 - f / df
