"""Arctangent phase equation and its branch solvers.

The phase function of a parameter set is

    phase(lam) = arctan(1/u) + 2 * sum_i arctan(a_i/u),   u = sqrt(4 lam - 1),

and real eigenvalues above 1/4 are exactly the points where it hits an odd
multiple of pi/2.  All solving happens in ``u``: eigenvalues close to 1/4
sit at tiny ``u`` where ``lam`` itself cannot resolve them in float64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charpoly import sign_changes
from .errors import DomainError, NoSolutionOnBranch, ToleranceNotReached
from .params import Classification, ParameterSet

DEFAULT_TOL = 1e-13
_CHUNK = 1 << 22
_NEWTON_SWITCH = 1e-3


@dataclass(frozen=True)
class PhaseQuery:
    params: ParameterSet
    k: int
    tol: float = DEFAULT_TOL
    max_iter: int = 200

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class PhaseSolution:
    lam: float
    residual: float
    iterations: int
    bracket: tuple[float, float]
    k: int
    u: float

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "k": self.k,
            "residual": self.residual,
            "iterations": self.iterations,
            "bracket": list(self.bracket),
        }


def _u_of(lam: float) -> float:
    if not lam > 0.25:
        raise DomainError(f"phase is defined for lambda > 1/4, got {lam}")
    return math.sqrt(4.0 * lam - 1.0)


def lam_of_u(u):
    return (1.0 + u * u) / 4.0


def target(k: int) -> float:
    return (2 * k - 1) * math.pi / 2.0


def phase_u(values, counts, u, dtype=np.float64) -> np.ndarray:
    """Phase at an array of u > 0, parameters given as grouped (values, counts)."""
    u = np.asarray(u, dtype=dtype)
    shape = u.shape
    flat_u = u.reshape(-1)
    vals = np.asarray(values, dtype=dtype)
    cnts = np.asarray(counts, dtype=dtype)
    flat_out = np.arctan(dtype(1.0) / flat_u)
    if vals.size:
        rows = max(1, _CHUNK // vals.size)
        for start in range(0, flat_u.size, rows):
            block = flat_u[start:start + rows]
            flat_out[start:start + rows] += 2 * (np.arctan(vals[None, :] / block[:, None]) @ cnts)
    return flat_out.reshape(shape)


def dphase_du(values, counts, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    shape = u.shape
    flat_u = u.reshape(-1)
    vals = np.asarray(values, dtype=float)
    cnts = np.asarray(counts, dtype=float)
    flat_out = -1.0 / (1.0 + flat_u * flat_u)
    if vals.size:
        rows = max(1, _CHUNK // vals.size)
        for start in range(0, flat_u.size, rows):
            block = flat_u[start:start + rows, None]
            flat_out[start:start + rows] -= 2 * ((vals[None, :] / (block * block + vals[None, :] ** 2)) @ cnts)
    return flat_out.reshape(shape)


def phase(p: ParameterSet, lam: float) -> float:
    values, counts = p.grouped()
    return float(phase_u(values, counts, _u_of(lam)))


def phase_derivative(p: ParameterSet, lam: float) -> float:
    """d phase / d lambda = (d phase / du) * 2/u."""
    u = _u_of(lam)
    values, counts = p.grouped()
    return float(dphase_du(values, counts, u) * 2.0 / u)


def _solve_u(values, counts, targets, lo, hi, tol, max_iter):
    """Safeguarded Newton on phase(u) = target, vectorized over brackets.

    Each bracket must hold a sign change of phase - target.  Bisection is
    geometric (u spans many decades) until the bracket is relatively narrow,
    then Newton steps are taken whenever they stay inside the bracket.
    Returns (u, iterations, lo, hi) arrays.
    """
    targets = np.asarray(targets, dtype=float)
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    f_lo = phase_u(values, counts, lo) - targets
    f_hi = phase_u(values, counts, hi) - targets
    if np.any(f_lo * f_hi > 0):
        raise ValueError("bracket without sign change")
    x = np.sqrt(lo * hi)
    iters = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        xa, la, ha = x[idx], lo[idx], hi[idx]
        f = phase_u(values, counts, xa) - targets[idx]
        same = np.sign(f) == np.sign(f_lo[idx])
        la = np.where(same, xa, la)
        ha = np.where(same, ha, xa)
        f_lo[idx] = np.where(same, f, f_lo[idx])
        df = dphase_du(values, counts, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xa - f / df
        narrow = (ha - la) <= _NEWTON_SWITCH * xa
        ok = narrow & np.isfinite(newton) & (newton > la) & (newton < ha)
        nxt = np.where(ok, newton, np.sqrt(la * ha))
        step = np.abs(nxt - xa)
        # lambda = (1 + u^2)/4, so |d lambda| = u |du| / 2
        lam = lam_of_u(nxt)
        done = (f == 0) | (step * nxt / 2.0 <= tol * np.maximum(1.0, lam)) | (ha - la <= 4 * np.spacing(xa))
        x[idx] = np.where(f == 0, xa, nxt)
        lo[idx], hi[idx] = la, ha
        iters[idx] += 1
        active[idx[done]] = False
    if np.any(active):
        raise ToleranceNotReached(max_iter)
    return x, iters, lo, hi


def _polish_extended(values, counts, u, ks):
    """Two Newton steps with the phase in extended precision; returns (u, residual)."""
    ld = np.longdouble
    t = (2 * np.asarray(ks).astype(ld) - 1) * (_pi_ld() / 2)
    for _ in range(2):
        f = phase_u(values, counts, u.astype(ld), ld) - t
        df = dphase_du(values, counts, u).astype(ld)
        cand = (u.astype(ld) - f / df).astype(float)
        u = np.where(np.isfinite(cand) & (cand > 0), cand, u)
    res = np.abs(phase_u(values, counts, u.astype(ld), ld) - t)
    return u, res.astype(float)


def positive_brackets(p: ParameterSet) -> tuple[float, float]:
    """u-interval holding every branch root of an all-positive set.

    Uses arctan(z) <= z and arctan(a/u) >= pi/2 - u/a.
    """
    a = p.as_array()
    lo = 0.5 * math.pi / (1.0 + 2.0 * float(np.sum(1.0 / a)))
    hi = 4.0 * (1.0 + 2.0 * float(np.sum(a))) / math.pi
    return lo, hi


def solve_all_positive(p: ParameterSet, tol: float = DEFAULT_TOL, max_iter: int = 200,
                       ks=None) -> list[PhaseSolution]:
    """Every branch k = 1..n at once; solutions come out in decreasing lambda."""
    if p.classification is not Classification.ALL_POSITIVE:
        raise ValueError("solve_all_positive needs strictly positive parameters")
    values, counts = p.grouped()
    ks = np.arange(1, p.n + 1) if ks is None else np.asarray(ks)
    targets = (2 * ks - 1) * (math.pi / 2.0)
    lo, hi = positive_brackets(p)
    lo_arr = np.full(ks.shape, lo)
    hi_arr = np.full(ks.shape, hi)
    u, iters, blo, bhi = _solve_u(values, counts, targets, lo_arr, hi_arr, tol, max_iter)
    u, res = _polish_extended(values, counts, u, ks)
    lam = lam_of_u(u)
    return [
        PhaseSolution(float(lam[i]), float(res[i]), int(iters[i]),
                      (float(lam_of_u(blo[i])), float(lam_of_u(bhi[i]))), int(ks[i]), float(u[i]))
        for i in range(ks.size)
    ]


def scan_grid(p: ParameterSet, density: int = 64) -> np.ndarray:
    """Geometric u-grid wide enough to contain every crossing but degenerate ones.

    Above the top end the phase magnitude is below pi/4; below the bottom end
    it stays within pi/2 of its limit at u -> 0.
    """
    a = np.abs(p.as_array())
    top = 4.0 * (1.0 + 2.0 * float(np.sum(a))) / math.pi
    bottom = 1e-6 * 0.5 * math.pi / (1.0 + 2.0 * float(np.sum(1.0 / a)))
    count = max(density * p.n, 1024)
    return np.geomspace(bottom, top, count)


def scan_crossings(p: ParameterSet, tol: float = DEFAULT_TOL, max_iter: int = 200,
                   density: int = 64) -> list[PhaseSolution]:
    """All crossings of odd multiples of pi/2 found on a grid, any sign pattern."""
    if p.n == 0:
        return []
    values, counts = p.grouped()
    grid = scan_grid(p, density)
    ph = phase_u(values, counts, grid)
    # As u -> 0 the phase tends to an odd multiple of pi/2 (the spurious
    # crossing at lambda = 1/4).  Where it is still within rounding of that
    # limit the level assignment is noise, so the scan starts past it.
    limit = 0.5 * math.pi * (1.0 + 2.0 * float(np.sum(counts * np.sign(values))))
    noise = 64.0 * np.finfo(float).eps * 0.5 * math.pi * (1.0 + 2.0 * float(np.sum(counts)))
    start = int(np.argmax(np.abs(ph - limit) > noise))
    grid, ph = grid[start:], ph[start:]
    level = np.floor(ph / math.pi + 0.5).astype(np.int64)
    los, his, ks = [], [], []
    for i in np.nonzero(level[:-1] != level[1:])[0]:
        a_, b_ = sorted((level[i], level[i + 1]))
        for k in range(a_ + 1, b_ + 1):
            los.append(grid[i])
            his.append(grid[i + 1])
            ks.append(k)
    if not ks:
        return []
    ks_arr = np.array(ks)
    targets = (2 * ks_arr - 1) * (math.pi / 2.0)
    u, iters, blo, bhi = _solve_u(values, counts, targets, los, his, tol, max_iter)
    u, res = _polish_extended(values, counts, u, ks_arr)
    lam = lam_of_u(u)
    out = [
        PhaseSolution(float(lam[i]), float(res[i]), int(iters[i]),
                      (float(lam_of_u(blo[i])), float(lam_of_u(bhi[i]))), int(ks_arr[i]), float(u[i]))
        for i in range(ks_arr.size)
    ]
    return sorted(out, key=lambda s: -s.lam)


def solve_branch(q: PhaseQuery) -> list[PhaseSolution]:
    """Solutions on branch k.  Always a list; one entry for all-positive sets."""
    p = q.params
    if p.classification is Classification.ALL_POSITIVE:
        if not 1 <= q.k <= p.n:
            raise NoSolutionOnBranch(q.k)
        return solve_all_positive(p, q.tol, q.max_iter, ks=[q.k])
    found = [s for s in scan_crossings(p, q.tol, q.max_iter) if s.k == q.k]
    if not found:
        raise NoSolutionOnBranch(q.k)
    return found


def _sub_quarter_values(alphas: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Sign-faithful (s+1) prod (s+a)^2 + (s-1) prod (s-a)^2, rescaled per point."""
    with np.errstate(divide="ignore"):
        l1 = np.log(s + 1.0) + 2.0 * np.sum(np.log(np.abs(s[:, None] + alphas[None, :])), axis=1)
        l2 = np.log(np.abs(s - 1.0)) + 2.0 * np.sum(np.log(np.abs(s[:, None] - alphas[None, :])), axis=1)
    m = np.maximum(l1, l2)
    m = np.where(np.isfinite(m), m, 0.0)
    return np.exp(l1 - m) + np.sign(s - 1.0) * np.exp(l2 - m)


def solve_sub_quarter(p: ParameterSet, tol: float = DEFAULT_TOL, density: int = 256) -> list[float]:
    """Real roots below 1/4 from the s = sqrt(1 - 4x) form, s in (0, s_max].

    s = 0 (x = 1/4) is a spurious zero of the bracketed form and is never
    scanned.  Roots are bisected to float resolution in s, which is finer
    than any ``tol`` >= 1e-15; ``tol`` only has to be positive.
    """
    return [x for x, _ in sub_quarter_enclosures(p, tol, density)]


def sub_quarter_enclosures(p: ParameterSet, tol: float = DEFAULT_TOL,
                           density: int = 256) -> list[tuple[float, float]]:
    """Like solve_sub_quarter, paired with the width in x of each root's bracket.

    Brackets are disjoint, so every entry is a distinct root even when two of
    them round to the same float.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if p.n == 0:
        return []
    alphas = p.as_array()
    s_max = math.sqrt(1.0 + 4.0 * (float(np.max(alphas ** 2)) + 1.0))
    count = density * p.n
    grid = np.linspace(s_max / count, s_max, count)
    # At s = |a_i| one of the two products vanishes to second order, and when
    # the other is tiny by comparison a real root pair straddles |a_i| far
    # closer than any grid spacing.  A geometric ladder splits such pairs.
    # s = 1 (x = 0) gets the same treatment: eigenvalues can be exponentially
    # close to zero.
    centers = np.unique(np.abs(alphas))
    centers = np.append(centers[centers < 1.0], 1.0)
    offsets = np.concatenate([-(10.0 ** -np.arange(1, 16)), [0.0], 10.0 ** -np.arange(15, 0, -1)])
    grid = np.unique(np.concatenate([grid, (centers[:, None] * (1.0 + offsets[None, :])).ravel()]))
    grid = grid[(grid > 0) & (grid <= s_max)]
    vals = _sub_quarter_values(alphas, grid)
    brackets = [(float(grid[i]), float(grid[i])) for i in np.nonzero(vals == 0)[0]]
    for i in sign_changes(vals):
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = vals[i]
        # bisect all the way to float resolution in s: root pairs split by the
        # ladder can sit closer together than any sensible tolerance
        while hi - lo > 2 * np.spacing(hi):
            mid = 0.5 * (lo + hi)
            f_mid = _sub_quarter_values(alphas, np.array([mid]))[0]
            if f_mid == 0:
                lo = hi = mid
                break
            if np.sign(f_mid) == np.sign(f_lo):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        brackets.append((lo, hi))
    out = []
    for lo, hi in brackets:
        t = 1.0 - 0.5 * (lo + hi)
        width = abs(hi - lo) * hi / 2.0
        if abs(t) <= _NEAR_ORIGIN:
            t, width = _near_origin_root(alphas, t)
        out.append((t * (2.0 - t) / 4.0, width))
    return sorted(out)


_NEAR_ORIGIN = 1e-6


def _near_origin_root(alphas: np.ndarray, t: float) -> tuple[float, float]:
    """Root t = 1 - s of the sub-quarter form when s is within float reach of 1.

    With m parameters equal to 1 the root condition rearranges to
    t = (2 - t) * prod_{a != 1}((1 - t + a)/(1 - t - a))^(2/(2m + 1)).  The
    right side is tiny and flat here, so fixed-point iteration contracts in
    a couple of steps and t keeps full relative precision.
    """
    ones = int(np.count_nonzero(alphas == 1.0))
    step = 0.0
    rest = alphas[alphas != 1.0]
    power = 2.0 / (2 * ones + 1)
    t = max(t, 0.0)
    for _ in range(8):
        with np.errstate(divide="ignore"):
            log_ratio = float(np.sum(np.log(np.abs(1.0 - t + rest)) - np.log(np.abs(1.0 - t - rest))))
        nxt = (2.0 - t) * math.exp(power * log_ratio)
        step = abs(nxt - t)
        t = nxt
        if step == 0.0:
            break
    # x = t(2 - t)/4, so the last step in t bounds the error in x by about half
    return t, step / 2.0


def _pi_ld():
    return 4 * np.arctan(np.longdouble(1))


def phase_residual(p: ParameterSet, u) -> np.ndarray:
    """Distance from phase(u) to the nearest odd multiple of pi/2, extended precision."""
    values, counts = p.grouped()
    ld = np.longdouble
    pi = _pi_ld()
    ph = phase_u(values, counts, np.asarray(u, dtype=float).astype(ld), ld)
    m = np.round(ph / pi - ld(0.5))
    return np.abs(ph - (m + ld(0.5)) * pi).astype(float)
