"""Simultaneous polynomial root finding (Aberth-Ehrlich)."""
from __future__ import annotations

import math

import numpy as np

from .charpoly import Polynomial
from .errors import NonConvergence

EPS = np.finfo(float).eps


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    """Points on a circle around the root centroid, radius from the coefficients."""
    n = c.size - 1
    center = -c[n - 1] / (n * c[n])
    # Fujiwara-style bound on |z - center| via the shifted polynomial's magnitude
    shifted = np.polynomial.polynomial.Polynomial(c)(np.polynomial.polynomial.Polynomial([center, 1.0])).coef
    shifted = np.resize(shifted, n + 1) if shifted.size < n + 1 else shifted
    lead = abs(shifted[n])
    ratios = [abs(shifted[n - k] / lead) ** (1.0 / k) for k in range(1, n + 1) if shifted[n - k] != 0]
    radius = max(ratios) if ratios else 1.0
    radius = radius if radius > 0 else 1.0
    angles = 2 * math.pi * np.arange(n) / n + 0.4
    return center + radius * np.exp(1j * angles)


def _pair_conjugates(z: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the real axis and average conjugate partners."""
    z = z.copy()
    scale = np.maximum(1.0, np.abs(z))
    out = []
    used = np.zeros(z.size, dtype=bool)
    order = np.argsort(-np.abs(z.imag))
    for i in order:
        if used[i]:
            continue
        used[i] = True
        if abs(z[i].imag) <= 1e-10 * scale[i] or _real_sign_change(c, z[i].real, abs(z[i].imag)):
            out.append(complex(z[i].real, 0.0))
            continue
        cand = np.where(~used)[0]
        if cand.size == 0:
            out.append(z[i])
            continue
        j = cand[np.argmin(np.abs(z[cand] - np.conj(z[i])))]
        used[j] = True
        mid = 0.5 * (z[i] + np.conj(z[j]))
        mid = complex(mid.real, abs(mid.imag))
        out.extend([mid, mid.conjugate()])
    return np.array(out, dtype=complex)


def _real_sign_change(c: np.ndarray, x: float, width: float) -> bool:
    if width == 0 or width > 1e-6 * max(1.0, abs(x)):
        return False
    vals = np.polynomial.polynomial.polyval([x - 2 * width, x + 2 * width], c)
    return bool(vals[0] * vals[1] < 0)


def fallback_roots(poly: Polynomial, tol: float = 1e-13, max_iter: int = 500) -> list[complex]:
    """All complex roots of a real polynomial.

    Iterates until every correction satisfies |dz| <= tol * max(1, |z|) or the
    residual at z is at rounding level (multiple roots never reach the first
    test).  Roots come back sorted by real part, conjugate pairs adjacent.
    """
    c = np.asarray(poly.coeffs, dtype=float)
    if poly.degree < 1:
        raise ValueError("need degree >= 1")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coefficients")
    n = poly.degree
    if n == 1:
        return [complex(-c[0] / c[1])]
    dc = np.polynomial.polynomial.polyder(c)
    absc = np.abs(c)
    z = _initial_guesses(c)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pz = np.polynomial.polynomial.polyval(z, c)
        dpz = np.polynomial.polynomial.polyval(z, dc)
        floor = 4 * n * EPS * np.polynomial.polynomial.polyval(np.abs(z), absc)
        at_floor = np.abs(pz) <= floor
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(at_floor | done | ~np.isfinite(step), 0.0, step)
        z = z - step
        done |= at_floor | (np.abs(step) <= tol * np.maximum(1.0, np.abs(z)))
        if done.all():
            break
    else:
        raise NonConvergence(max_iter)
    roots = _pair_conjugates(z, c)
    return sorted(roots.tolist(), key=lambda r: (r.real, r.imag))


def refine_product_form(p, z0, fixed=(), tol: float = 1e-14, max_iter: int = 300) -> np.ndarray:
    """Aberth-Ehrlich sweeps driven by the product form of a parameter set.

    The coefficient form is badly conditioned for mixed-sign parameters, so
    coefficient roots serve only as starting points; R/R' comes from the
    quadratic-factor product.  Roots in ``fixed`` are known already: they are
    not moved but still repel the free approximations, which deflates them
    implicitly.
    """
    from .charpoly import newton_ratios

    z = np.array(z0, dtype=complex)
    fixed = np.asarray(fixed, dtype=complex)
    done = np.zeros(z.size, dtype=bool)
    for _ in range(max_iter):
        ratio = newton_ratios(p, z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            repel = inv.sum(axis=1)
            if fixed.size:
                repel = repel + (1.0 / (z[:, None] - fixed[None, :])).sum(axis=1)
            step = ratio / (1.0 - ratio * repel)
        step = np.where(done | ~np.isfinite(step), 0.0, step)
        z = z - step
        done |= np.abs(step) <= tol * np.maximum(1.0, np.abs(z))
        if done.all():
            break
    return z
