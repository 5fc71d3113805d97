"""Characteristic polynomials of J_n and product-form evaluation.

Two coefficient recursions are provided.  ``charpoly_p`` is the continuant
recursion for det(xI - J_n) (leading coefficient 1/prod(alpha)), and
``charpoly_r`` is the recursion for the real part of the conjugate product,
which is monic.  They differ exactly by the factor prod(alpha).

Coefficient forms lose accuracy quickly with n, so root finding past a few
dozen parameters goes through the product form instead::

    Q(u)  = (u + j) * prod(((u + j a_i) / 2)**2)
    Qc(u) = (u - j) * prod(((u - j a_i) / 2)**2)
    R(x)  = (Q(u) + Qc(u)) / (2u),      u = sqrt(4x - 1)

R is even in u, hence a polynomial in x, and any branch of the square root
gives the same value.  For real x > 1/4, Qc = conj(Q) and the argument of Q
is exactly the phase function, so R(x) = |Q| cos(phase) / u.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, ZeroParameter
from .params import ParameterSet


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in ascending degree order."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = [float(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (0.0,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def __call__(self, x):
        return npoly.polyval(x, np.asarray(self.coeffs))

    def monic(self) -> Polynomial:
        return Polynomial(tuple(np.asarray(self.coeffs) / self.leading))

    def scaled(self, factor: float) -> Polynomial:
        return Polynomial(tuple(np.asarray(self.coeffs) * factor))

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, data: dict) -> Polynomial:
        poly = cls(tuple(data["coeffs"]))
        if poly.degree != data["degree"]:
            raise ValueError("degree does not match coefficient list")
        return poly


def _require_nonzero(p: ParameterSet) -> None:
    for i, a in enumerate(p.alphas):
        if a == 0.0:
            raise ZeroParameter(i)


def charpoly_p(p: ParameterSet) -> Polynomial:
    """det(xI - J_n) by the continuant three-term recursion."""
    _require_nonzero(p)
    a = p.alphas
    prev2 = np.array([1.0])
    prev1 = np.array([-((a[0] + 1.0) ** 2) / (4.0 * a[0]), 1.0 / a[0]])
    for k in range(1, len(a)):
        cur, last = a[k], a[k - 1]
        gamma = np.array([
            -1.0 - (cur - 1.0) ** 2 / (4.0 * cur) - (last - 1.0) ** 2 / (4.0 * last),
            1.0 / cur + 1.0 / last,
        ])
        delta = np.array([(last - 1.0) ** 2 / (4.0 * last) - (last - 1.0) / 2.0, -1.0 / last])
        nxt = npoly.polysub(npoly.polymul(gamma, prev1), npoly.polymul(npoly.polymul(delta, delta), prev2))
        prev2, prev1 = prev1, nxt
    return Polynomial(tuple(prev1))


def charpoly_r(p: ParameterSet) -> Polynomial:
    """Monic polynomial from the conjugate-product recursion.

    Uses R_k = c_k R_{k-1} - d_k R_{k-2} with
    c_k = (4x - 1 - a_k a_{k-1})(a_k + a_{k-1}) / (4 a_{k-1}) and
    d_k = a_k (4x - 1 + a_{k-1}^2)^2 / (16 a_{k-1}).
    """
    _require_nonzero(p)
    a = p.alphas
    prev2 = np.array([1.0])
    prev1 = np.array([-((a[0] + 1.0) ** 2) / 4.0, 1.0])
    for k in range(1, len(a)):
        cur, last = a[k], a[k - 1]
        scale = (cur + last) / (4.0 * last)
        c = np.array([(-1.0 - cur * last) * scale, 4.0 * scale])
        sq = np.array([last * last - 1.0, 4.0])
        d = npoly.polymul(sq, sq) * (cur / (16.0 * last))
        nxt = npoly.polysub(npoly.polymul(c, prev1), npoly.polymul(d, prev2))
        prev2, prev1 = prev1, nxt
    # the recursion keeps the leading coefficient at 1 only up to rounding
    return Polynomial(tuple(prev1[:-1] / prev1[-1]) + (1.0,))


def eval_conjugate_form(p: ParameterSet, x: float) -> float:
    """Monic R(x) from the product of quadratic factors, for x > 1/4.

    Plain float products; overflows for long parameter lists, see eval_scaled.
    """
    if not x > 0.25:
        raise DomainError(f"conjugate form needs x > 1/4, got {x}")
    u = math.sqrt(4.0 * x - 1.0)
    a = p.as_array()
    factors = ((4.0 * x - 1.0) - a * a) / 4.0 + 1j * (a / 2.0) * u
    q = (u + 1j) * np.prod(factors)
    return float(q.real / u)


def eval_sub_quarter(p: ParameterSet, x: float) -> float:
    """(u+1) prod (u+a_i)^2 + (u-1) prod (u-a_i)^2 with u = sqrt(1 - 4x), x < 1/4.

    Equals (-1)^n 2u 4^n R(x).  The factor u makes x = 1/4 a spurious zero.
    """
    if not x < 0.25:
        raise DomainError(f"sub-quarter form needs x < 1/4, got {x}")
    u = math.sqrt(1.0 - 4.0 * x)
    a = p.as_array()
    # u - 1 = -4x/(u + 1) keeps the digits that u - 1 itself loses near x = 0
    u_minus_1 = -4.0 * x / (u + 1.0)
    plus = np.where(a == -1.0, u_minus_1, u + a)
    minus = np.where(a == 1.0, u_minus_1, u - a)
    return float((u + 1.0) * np.prod(plus**2) + u_minus_1 * np.prod(minus**2))


def _log_terms(values: np.ndarray, counts: np.ndarray, x: complex) -> tuple[complex, complex, complex]:
    """Complex logs of Q and Qc, plus u, at (possibly complex) x."""
    u = np.sqrt(complex(4.0 * x - 1.0))
    plus, minus = _unit_factors(u, complex(x))
    with np.errstate(divide="ignore"):
        lq = np.log(plus) + _weighted_log(2.0 * counts, (u + 1j * values) / 2.0)
        lqc = np.log(minus) + _weighted_log(2.0 * counts, (u - 1j * values) / 2.0)
    return complex(lq), complex(lqc), complex(u)


def _weighted_log(weights: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_i weights_i log(w_i) over the last axis.

    Real and imaginary parts are weighted separately: a complex product
    would turn log(0) = -inf into NaN through -inf * 0j.
    """
    with np.errstate(divide="ignore"):
        mag = np.log(np.abs(w))
    return mag @ weights + 1j * (np.angle(w) @ weights)


def _unit_factors(u, x):
    """(u + j, u - j) without cancellation: their product is u^2 + 1 = 4x.

    Near x = 0, u sits next to +j or -j and one of the two differences
    would lose every digit.
    """
    plus = u + 1j
    minus = u - 1j
    small_minus = np.abs(minus) < np.abs(plus)
    with np.errstate(divide="ignore", invalid="ignore"):
        minus = np.where(small_minus, 4.0 * x / plus, minus)
        plus = np.where(small_minus, plus, 4.0 * x / minus)
    return plus, minus


def _scaled_sum(lq: complex, lqc: complex) -> tuple[complex, float, float]:
    """(Q + Qc) as mantissa * e**shift, plus |Q|+|Qc| in the same scale."""
    shift = max(lq.real, lqc.real)
    if shift == -math.inf:
        # both products vanish: an exact zero of R
        return 0j, 0.0, 1.0
    a = np.exp(lq - shift)
    b = np.exp(lqc - shift)
    return complex(a + b), shift, float(abs(a) + abs(b))


def scaled_value(p: ParameterSet, x: complex) -> tuple[complex, int]:
    """R(x) as (mantissa, binary exponent) for any x != 1/4, complex allowed."""
    values, counts = p.grouped()
    if p.n == 0:
        return complex(1.0), 0
    lq, lqc, u = _log_terms(values, counts, x)
    total, shift, _ = _scaled_sum(lq, lqc)
    if u == 0:
        raise DomainError("product form is undefined at x = 1/4")
    z = total / (2.0 * u)
    if z == 0:
        return 0j, 0
    # fold e**shift into a power of two plus a bounded residual factor
    log2_total = shift / math.log(2.0) + math.log2(abs(z))
    exponent = math.floor(log2_total) + 1
    mag = 2.0 ** (log2_total - exponent)
    return complex(mag * z / abs(z)), exponent


def eval_scaled(p: ParameterSet, x: float) -> tuple[float, int]:
    """Overflow-free R(x) for real x != 1/4; mantissa in [0.5, 1) by magnitude."""
    if x == 0.25:
        raise DomainError("product form is undefined at x = 1/4")
    mant, exp = scaled_value(p, x)
    return float(mant.real), exp


def relative_residual(p: ParameterSet, x: complex) -> float:
    """|Q + Qc| / (|Q| + |Qc|) at x: a dimensionless backward-error style residual.

    For real x > 1/4 this is |cos(phase(x))|, i.e. the phase-equation residual
    to first order.
    """
    if p.n == 0:
        return 0.0
    values, counts = p.grouped()
    lq, lqc, _ = _log_terms(values, counts, x)
    total, _, scale = _scaled_sum(lq, lqc)
    return float(abs(total) / scale)


def conjugate_derivative_ratio(p: ParameterSet, x: complex) -> complex:
    """R(x) / R'(x) from the product form at a single point."""
    return complex(newton_ratios(p, np.array([x]))[0])


def newton_ratios(p: ParameterSet, z: np.ndarray) -> np.ndarray:
    """Vectorized R/R' from the product form at complex points z."""
    values, counts = p.grouped()
    z = np.asarray(z, dtype=complex)
    u = np.sqrt(4.0 * z - 1.0)[:, None]
    plus = u + 1j * values[None, :]
    minus = u - 1j * values[None, :]
    u = u[:, 0]
    up, um = _unit_factors(u, z)
    # dR/dx = (N'(u)/u - N(u)/u^2)/u with N = Q + Qc and du/dx = 2/u
    with np.errstate(divide="ignore"):
        lq = np.log(up) + _weighted_log(2.0 * counts, plus / 2.0)
        lqc = np.log(um) + _weighted_log(2.0 * counts, minus / 2.0)
    dq = 1.0 / up + 2.0 * ((1.0 / plus) @ counts)
    dqc = 1.0 / um + 2.0 * ((1.0 / minus) @ counts)
    shift = np.maximum(lq.real, lqc.real)
    q = np.exp(lq - shift)
    qc = np.exp(lqc - shift)
    num = q + qc
    with np.errstate(divide="ignore", invalid="ignore"):
        deriv = (q * dq + qc * dqc) / u - num / (u * u)
        return num / (2.0 * deriv)


def sign_changes(values: Sequence[float]) -> list[int]:
    """Indices i with values[i] and values[i+1] of strictly opposite sign."""
    s = np.sign(np.asarray(values, dtype=float))
    return [int(i) for i in np.nonzero(s[:-1] * s[1:] < 0)[0]]
