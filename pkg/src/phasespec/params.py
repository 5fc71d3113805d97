"""Parameter sets and the triangular-product matrix family built from them."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyParameterList, NonFiniteParameter


class Classification(enum.Enum):
    ALL_POSITIVE = "AllPositive"
    # Never produced by classify(): any zero wins and yields HAS_ZEROS.
    ALL_NONNEGATIVE = "AllNonnegative"
    MIXED = "Mixed"
    HAS_ZEROS = "HasZeros"


def classify(alphas: Sequence[float]) -> Classification:
    if any(a == 0.0 for a in alphas):
        return Classification.HAS_ZEROS
    if all(a > 0.0 for a in alphas):
        return Classification.ALL_POSITIVE
    return Classification.MIXED


@dataclass(frozen=True)
class ParameterSet:
    """Ordered real parameters alpha_1..alpha_n.

    ``n == 0`` is allowed only for the residue left after deflation; the
    public constructor :func:`validate_params` rejects empty input.
    """

    alphas: tuple[float, ...]
    classification: Classification = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) + 0.0 for a in self.alphas))
        object.__setattr__(self, "classification", classify(self.alphas))

    @property
    def n(self) -> int:
        return len(self.alphas)

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def as_array(self) -> np.ndarray:
        return np.array(self.alphas, dtype=float)

    def without(self, indices: Iterable[int]) -> ParameterSet:
        drop = set(indices)
        return ParameterSet(tuple(a for i, a in enumerate(self.alphas) if i not in drop))

    def negated(self) -> ParameterSet:
        return ParameterSet(tuple(-a for a in self.alphas))

    def grouped(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct values and their counts; phase sums only depend on these."""
        values, counts = np.unique(self.as_array(), return_counts=True)
        return values, counts.astype(float)


def validate_params(raw: Iterable[float]) -> ParameterSet:
    values = [float(r) for r in raw]
    if not values:
        raise EmptyParameterList("at least one parameter is required")
    for i, v in enumerate(values):
        if not math.isfinite(v):
            raise NonFiniteParameter(i)
    return ParameterSet(tuple(values))


@dataclass(frozen=True)
class StructuredMatrix:
    dense: np.ndarray
    upper: np.ndarray
    lower: np.ndarray

    @property
    def n(self) -> int:
        return self.dense.shape[0]


def triangular_factors(p: ParameterSet) -> tuple[np.ndarray, np.ndarray]:
    a = p.as_array()
    n = a.size
    diag = np.diag((a + 1.0) / 2.0)
    # Row i of the upper factor carries alpha_j in every column j > i;
    # column j of the lower factor carries alpha_j in every row i > j.
    by_column = np.broadcast_to(a, (n, n))
    upper = diag + np.triu(by_column, k=1)
    lower = diag + np.tril(by_column, k=-1)
    return upper, lower


def build_jn(p: ParameterSet) -> StructuredMatrix:
    upper, lower = triangular_factors(p)
    dense = upper @ lower
    for m in (dense, upper, lower):
        m.setflags(write=False)
    return StructuredMatrix(dense=dense, upper=upper, lower=lower)


def factored_product(p: ParameterSet) -> np.ndarray:
    """(L1 - D_beta) D_alpha (L1^T - D_beta) D_alpha; requires every alpha != 0."""
    a = p.as_array()
    n = a.size
    beta = (a - 1.0) / (2.0 * a)
    ones_upper = np.triu(np.ones((n, n)))
    d_alpha = np.diag(a)
    d_beta = np.diag(beta)
    return (ones_upper - d_beta) @ d_alpha @ (ones_upper.T - d_beta) @ d_alpha
