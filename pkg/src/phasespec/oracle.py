"""Brute-force reference implementations for tests.

Nothing in the solving pipeline imports this module.  The point is to have
checks that share no code with the recursions and the product form: a dense
determinant by hand-written elimination, polynomial interpolation through
it, and the coefficient recursions redone in exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charpoly import Polynomial
from .errors import ConditioningError, ZeroParameter
from .params import ParameterSet, StructuredMatrix

MAX_INTERP_N = 16
MAX_EXACT_N = 8


@dataclass(frozen=True)
class OracleConfig:
    """``sample_count`` of None means degree + 1 nodes (plain interpolation)."""

    sample_count: int | None = None
    pivot_tol: float = 0.0

    def nodes_for(self, degree: int) -> int:
        count = degree + 1 if self.sample_count is None else self.sample_count
        if count < degree + 1:
            raise ValueError(f"need at least {degree + 1} samples, got {count}")
        return count


def _eliminate(a: list, pivot_tol: float):
    """Determinant of the square list-of-rows ``a`` (modified in place)."""
    n = len(a)
    det = 1
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[piv][col]) <= pivot_tol:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pivot = a[col][col]
        det *= pivot
        for r in range(col + 1, n):
            factor = a[r][col] / pivot
            if factor != 0:
                row, src = a[r], a[col]
                for c in range(col + 1, n):
                    row[c] -= factor * src[c]
    return det


def _det_exact(m: StructuredMatrix, x: Fraction, pivot_tol: float) -> Fraction:
    entries = [[Fraction(float(v)) for v in row] for row in m.dense]
    a = [[(x if i == j else 0) - entries[i][j] for j in range(m.n)] for i in range(m.n)]
    return Fraction(_eliminate(a, pivot_tol))


def det_at(m: StructuredMatrix, x: complex, cfg: OracleConfig = OracleConfig()) -> float | complex:
    """det(xI - J) by Gaussian elimination with partial pivoting.

    For real x the elimination runs over Fractions on the float entries of
    ``m.dense``, so the only rounding is the final conversion.  Complex x
    goes through plain complex floating point.  A pivot at or below
    ``cfg.pivot_tol`` in magnitude means the determinant is zero.
    """
    if isinstance(x, complex) or np.iscomplexobj(x):
        a = [[(x if i == j else 0.0) - m.dense[i, j] for j in range(m.n)] for i in range(m.n)]
        return complex(_eliminate(a, cfg.pivot_tol))
    return float(_det_exact(m, Fraction(float(x)), cfg.pivot_tol))


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(b)
    rows = [list(r) + [v] for r, v in zip(a, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col] / rows[col][col]
                rows[r] = [u - f * v for u, v in zip(rows[r], rows[col])]
    return [rows[i][n] / rows[i][i] for i in range(n)]


def charpoly_by_interpolation(m: StructuredMatrix, cfg: OracleConfig = OracleConfig()) -> Polynomial:
    """Monic det(xI - J) through exact determinant samples at Chebyshev nodes.

    Nodes are the float Chebyshev points on [-1, 1], taken as exact
    rationals.  Elimination and the fit (least squares through the normal
    equations when there are extra samples) both stay in Fractions, so the
    result is the characteristic polynomial of the float matrix ``m.dense``
    rounded once.  A float version of this loses about 1e-7 relative on
    small coefficients that come out of cancellation.
    """
    n = m.n
    if n > MAX_INTERP_N:
        raise ConditioningError(f"interpolation oracle is limited to n <= {MAX_INTERP_N}, got {n}")
    count = cfg.nodes_for(n)
    xs = [Fraction(float(x)) for x in np.cos((2 * np.arange(count) + 1) * np.pi / (2 * count))]
    ys = [_det_exact(m, x, cfg.pivot_tol) for x in xs]
    vander = [[x**k for k in range(n + 1)] for x in xs]
    if count == n + 1:
        coeffs = _solve_exact(vander, ys)
    else:
        gram = [[sum(row[i] * row[j] for row in vander) for j in range(n + 1)] for i in range(n + 1)]
        rhs = [sum(row[i] * y for row, y in zip(vander, ys)) for i in range(n + 1)]
        coeffs = _solve_exact(gram, rhs)
    if coeffs[n] == 0:
        raise ConditioningError("interpolated leading coefficient vanished")
    return Polynomial(tuple(float(c / coeffs[n]) for c in coeffs))


@dataclass(frozen=True)
class RationalPolynomial:
    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_float(self) -> Polynomial:
        return Polynomial(tuple(float(c) for c in self.coeffs))


def _mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    size = max(len(a), len(b))
    a = a + [Fraction(0)] * (size - len(a))
    b = b + [Fraction(0)] * (size - len(b))
    return [x - y for x, y in zip(a, b)]


def _trim(c: list[Fraction]) -> list[Fraction]:
    while len(c) > 1 and c[-1] == 0:
        c = c[:-1]
    return c


def _exact_p(a: list[Fraction]) -> list[Fraction]:
    prev2 = [Fraction(1)]
    prev1 = [-(a[0] + 1) ** 2 / (4 * a[0]), 1 / a[0]]
    for k in range(1, len(a)):
        cur, last = a[k], a[k - 1]
        gamma = [-1 - (cur - 1) ** 2 / (4 * cur) - (last - 1) ** 2 / (4 * last), 1 / cur + 1 / last]
        delta = [(last - 1) ** 2 / (4 * last) - (last - 1) / 2, -1 / last]
        prev2, prev1 = prev1, _sub(_mul(gamma, prev1), _mul(_mul(delta, delta), prev2))
    return _trim(prev1)


def _exact_r(a: list[Fraction]) -> list[Fraction]:
    prev2 = [Fraction(1)]
    prev1 = [-(a[0] + 1) ** 2 / 4, Fraction(1)]
    for k in range(1, len(a)):
        cur, last = a[k], a[k - 1]
        c = [(-1 - cur * last) * (cur + last) / (4 * last), 4 * (cur + last) / (4 * last)]
        sq = [last * last - 1, Fraction(4)]
        d = [v * cur / (16 * last) for v in _mul(sq, sq)]
        prev2, prev1 = prev1, _sub(_mul(c, prev1), _mul(d, prev2))
    return _trim(prev1)


def exact_charpoly_small(p, max_n: int = MAX_EXACT_N) -> RationalPolynomial:
    """Monic characteristic polynomial in exact arithmetic.

    ``p`` is a ParameterSet or any sequence of ints/Fractions/floats (floats
    convert exactly).  Both recursions run over Fractions and the monic one
    must equal prod(alpha) times the continuant one coefficient for
    coefficient; a mismatch raises AssertionError.  Rational coefficients
    grow fast, hence the size cap.
    """
    raw = p.alphas if isinstance(p, ParameterSet) else tuple(p)
    if not raw:
        raise ValueError("empty parameter list")
    if len(raw) > max_n:
        raise ConditioningError(f"exact oracle is limited to n <= {max_n}, got {len(raw)}")
    for i, v in enumerate(raw):
        if v == 0:
            raise ZeroParameter(i)
    a = [Fraction(v) for v in raw]
    cont = _exact_p(a)
    mono = _exact_r(a)
    scale = Fraction(1)
    for v in a:
        scale *= v
    scaled = [scale * c for c in cont]
    if mono != scaled:
        raise AssertionError(f"monic recursion != prod(alpha) * continuant for {raw}")
    return RationalPolynomial(tuple(mono))
