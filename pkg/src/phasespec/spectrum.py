"""Full spectrum of J_n: deflation, closed forms, phase branches, fallback."""
from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import phase as ph
from .charpoly import charpoly_r, newton_ratios
from .errors import CertificationFailure, IncompleteSpectrum, NonConvergence
from .params import Classification, ParameterSet
from .roots import fallback_roots, refine_product_form

CERT_THRESHOLD = 1e-8
COEFF_GUESS_MAX_N = 60
AB_MAX_N = 2000
AB_MAX_ITER = 2000
EPS = np.finfo(float).eps


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    DEFLATION = "Deflation"
    PHASE_BRANCH = "PhaseBranch"
    SUB_QUARTER_SCAN = "SubQuarterScan"
    POLY_FALLBACK = "PolyFallback"


@dataclass(frozen=True)
class Eigenvalue:
    value: complex
    multiplicity: int
    method: Method
    residual: float

    def to_dict(self) -> dict:
        return {
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "mult": self.multiplicity,
            "method": self.method.value,
            "residual": float(self.residual),
        }


@dataclass(frozen=True)
class DeflationRecord:
    """Eigenvalues forced by structure, and the parameter set left to solve.

    zero_count   eigenvalue 1/4 once per zero parameter
    pairs        each exact (a, -a) pair gives (1 - a^2)/4 twice
    origin_count one parameter equal to -1 gives eigenvalue 0; the rest of
                 the spectrum is then that of J built from the negated others
    """

    zero_count: int
    pairs: tuple[float, ...]
    origin_count: int
    reduced: ParameterSet

    @property
    def original_n(self) -> int:
        return self.zero_count + 2 * len(self.pairs) + self.origin_count + self.reduced.n

    def eigenvalues(self) -> list[Eigenvalue]:
        out = []
        if self.zero_count:
            out.append(Eigenvalue(complex(0.25), self.zero_count, Method.DEFLATION, 0.0))
        for a in self.pairs:
            out.append(Eigenvalue(complex((1.0 - a * a) / 4.0), 2, Method.DEFLATION, 0.0))
        if self.origin_count:
            out.append(Eigenvalue(0j, self.origin_count, Method.DEFLATION, 0.0))
        return out


@dataclass
class SpectrumReport:
    """Eigenvalues with multiplicities.

    ``residual`` is the phase-equation residual for eigenvalues solved on a
    phase branch or given in closed form, the relative width of the
    sign-change bracket for roots below 1/4 found by scanning, the relative
    Newton correction |R/R'| / max(1, |lambda|) of the product form for
    fallback roots, and 0 for exact ones.
    """

    n: int
    eigenvalues: list[Eigenvalue]
    deflation: DeflationRecord
    certification_threshold: float = CERT_THRESHOLD
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.multiplicity for e in self.eigenvalues)

    @property
    def max_residual(self) -> float:
        return max((e.residual for e in self.eigenvalues), default=0.0)

    def values(self) -> np.ndarray:
        """Eigenvalues expanded by multiplicity."""
        return np.array([e.value for e in self.eigenvalues for _ in range(e.multiplicity)], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eigenvalues": [e.to_dict() for e in self.eigenvalues],
            "max_residual": self.max_residual,
            "timings": dict(self.timings),
        }


def deflate(p: ParameterSet) -> DeflationRecord:
    alphas = list(p.alphas)
    zero_count = sum(1 for a in alphas if a == 0.0)
    alphas = [a for a in alphas if a != 0.0]

    unmatched: dict[float, list[int]] = {}
    removed = set()
    pairs = []
    for i, a in enumerate(alphas):
        partners = unmatched.get(-a)
        if partners:
            j = partners.pop()
            removed.update((i, j))
            pairs.append(abs(a))
        else:
            unmatched.setdefault(a, []).append(i)
    rest = [a for i, a in enumerate(alphas) if i not in removed]

    origin_count = 0
    if -1.0 in rest:
        # With pairs gone, +1 and -1 cannot coexist, so one peel suffices.
        rest.remove(-1.0)
        rest = [-a for a in rest]
        origin_count = 1
    return DeflationRecord(zero_count, tuple(pairs), origin_count, ParameterSet(tuple(rest)))


def closed_form(p: ParameterSet) -> list[Eigenvalue] | None:
    """Spectra of the all-ones and all-minus-ones parameter sets."""
    n = p.n
    if n == 0:
        return None
    ld = np.longdouble
    if all(a == 1.0 for a in p.alphas):
        theta = np.arange(1, n + 1).astype(ld) * (ph._pi_ld() / (2 * n + 1))
        u = np.tan(theta).astype(float)
        lam = (0.25 / np.cos(theta) ** 2).astype(float)
        res = ph.phase_residual(p, u)
        return [Eigenvalue(complex(l), 1, Method.CLOSED_FORM, float(r)) for l, r in zip(lam, res)]
    if all(a == -1.0 for a in p.alphas):
        out = [Eigenvalue(0j, 1, Method.CLOSED_FORM, 0.0)]
        if n > 1:
            theta = (1 + 2 * np.arange(n - 1)).astype(ld) * (ph._pi_ld() / (2 * (2 * n - 1)))
            u = (1 / np.tan(theta)).astype(float)
            lam = (0.25 / np.sin(theta) ** 2).astype(float)
            res = ph.phase_residual(p, u)
            out += [Eigenvalue(complex(l), 1, Method.CLOSED_FORM, float(r)) for l, r in zip(lam, res)]
        return out
    return None


def newton_residual(p: ParameterSet, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.abs(newton_ratios(p, z)) / np.maximum(1.0, np.abs(z))
    return np.where(np.isfinite(r), r, np.inf)


def quarter_is_root(p: ParameterSet) -> bool:
    """R(1/4) = (-1)^n prod(a/2)^2 (1 + 2 sum 1/a), tested in exact arithmetic."""
    if p.n == 0 or any(a == 0.0 for a in p.alphas):
        return False
    return 1 + 2 * sum(1 / Fraction(a) for a in p.alphas) == 0


def _ellipse_guesses(p: ParameterSet, count: int) -> np.ndarray:
    """Starting points around the segment [(1 - max a^2)/4, 1/4].

    Roots left over after the phase and sub-quarter scans are complex or
    negative, and in practice they crowd along that segment.
    """
    a = p.as_array()
    left = (1.0 - float(np.max(a * a))) / 4.0
    center = 0.5 * (left + 0.25)
    semi = max(0.5, 0.6 * (0.25 - left))
    angles = 2 * math.pi * np.arange(count) / max(count, 1) + 0.4
    return center + semi * np.cos(angles) + 0.5j * semi * np.sin(angles)


def _break_ties(z: np.ndarray) -> np.ndarray:
    """Push coincident approximations apart, in opposite imaginary directions.

    Two equal real starting points keep a real polynomial's iteration on the
    real axis for good, which strands them when the roots they should find
    form a complex pair.
    """
    z = np.array(z, dtype=complex)
    order = np.argsort(z.real, kind="stable")
    sign = 1.0
    for a, b in zip(order[:-1], order[1:]):
        if abs(z[a] - z[b]) <= 8 * EPS * max(abs(z[a]), 1e-300):
            delta = 0.1 * max(abs(z[a]), 1e-12)
            z[a] += 1j * sign * delta
            z[b] -= 1j * sign * delta
            sign = -sign
    return z


def _initial_guesses(p: ParameterSet, known: list[float], count: int) -> np.ndarray:
    if p.n <= COEFF_GUESS_MAX_N:
        try:
            guesses = list(fallback_roots(charpoly_r(p)))
        except NonConvergence:
            guesses = []
        if len(guesses) == p.n:
            for k in known:
                j = int(np.argmin([abs(g - k) for g in guesses]))
                guesses.pop(j)
            return _break_ties(np.array(guesses[:count], dtype=complex))
    return _ellipse_guesses(p, count)


def _remaining_roots(p: ParameterSet, known: list[float]) -> list[complex]:
    """Roots not found by the scans, via Aberth on the product form."""
    count = p.n - len(known)
    z = _initial_guesses(p, known, count)
    z = refine_product_form(p, z, fixed=known, max_iter=AB_MAX_ITER)
    for _ in range(3):
        bad = np.nonzero(newton_residual(p, z) > CERT_THRESHOLD)[0]
        if bad.size == 0:
            break
        # two approximations pinned across the real axis near a close real
        # pair: restart them on the real line, split apart
        for i in bad:
            spread = max(10.0 * abs(z[i].imag), 1e-8 * max(1.0, abs(z[i].real)))
            z[i] = z[i].real + (spread if z[i].imag >= 0 else -spread)
        z = refine_product_form(p, _break_ties(z), fixed=known, max_iter=AB_MAX_ITER)
    return _symmetrize(p, z)


def _symmetrize(p: ParameterSet, z: np.ndarray) -> list[complex]:
    """Enforce conjugate symmetry on Aberth output.

    Each approximation is matched with the nearest conjugate of another.  A
    close match is either a genuine complex pair or two real roots that
    picked up rounding-level imaginary parts; near a near-double root both
    look alike, so whichever reading has the smaller Newton correction wins.

    Left of the origin there is no choice to make.  For x < 0 we have
    s = sqrt(1 - 4x) > 1, and both terms of
    (s + 1) prod (s + a)^2 + (s - 1) prod (s - a)^2 are then nonnegative, so
    a real root there needs an exact (a, -a) pair, and those are deflated
    before this point.  Anything left of 0 is a complex pair, however thin.
    """
    out: list[complex] = []
    pending = sorted(z.tolist(), key=lambda w: (w.real, -abs(w.imag)))
    while pending:
        w = pending.pop(0)
        scale = max(1.0, abs(w))
        j = int(np.argmin([abs(v - w.conjugate()) for v in pending])) if pending else -1
        if j < 0 or abs(pending[j] - w.conjugate()) > max(4.0 * abs(w.imag), 1e-8 * scale):
            real_ok = w.real >= 0 and abs(w.imag) <= 1e-6 * scale
            out.append(complex(w.real, 0.0) if real_ok else w)
            continue
        v = pending.pop(j)
        mid = 0.5 * (w + v.conjugate())
        as_pair = [complex(mid.real, abs(mid.imag)), complex(mid.real, -abs(mid.imag))]
        as_real = [complex(w.real, 0.0), complex(v.real, 0.0)]
        if mid.real < 0:
            z = _polish_pair(p, mid, 0.5 * abs(w - v))
            out.extend([z, z.conjugate()])
        elif max(newton_residual(p, as_real)) < max(newton_residual(p, as_pair)):
            out.extend(as_real)
        else:
            out.extend(as_pair)
    return out


def _polish_pair(p: ParameterSet, mid: complex, spread: float, max_iter: int = 200) -> complex:
    """Newton on the product form for a thin conjugate pair left of the origin.

    Aberth may have left the two approximations on the real axis, either side
    of the pair; starting off the axis by their half-distance, Newton can only
    go to the complex root since there is no real one to fall into.
    """
    scale = max(1.0, abs(mid))
    z = complex(mid.real, max(abs(mid.imag), spread, 1e-8 * scale))
    for _ in range(max_iter):
        step = complex(newton_ratios(p, np.array([z]))[0])
        if not np.isfinite(step):
            break
        z -= step
        if abs(step) <= 4 * EPS * max(1.0, abs(z)):
            break
    if not np.isfinite(z) or newton_residual(p, [z])[0] > newton_residual(p, [mid])[0]:
        z = mid
    return complex(z.real, abs(z.imag))


def _solve_general(p: ParameterSet, tol: float, timings: dict) -> list[Eigenvalue]:
    t0 = time.perf_counter()
    crossings = ph.scan_crossings(p, tol)
    timings["phase"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    below = ph.sub_quarter_enclosures(p, tol)
    timings["sub_quarter"] = time.perf_counter() - t0

    # Roots from disjoint brackets are distinct by construction, even when
    # they agree to more digits than the dedup threshold, so nothing is
    # merged here.  Phase roots lie above 1/4 and scanned ones below.
    eigs = [Eigenvalue(complex(s.lam), 1, Method.PHASE_BRANCH, s.residual) for s in crossings]
    seen = [s.lam for s in crossings]
    for x, width in below:
        seen.append(x)
        eigs.append(Eigenvalue(complex(x), 1, Method.SUB_QUARTER_SCAN, width / max(1.0, abs(x))))
    if quarter_is_root(p):
        seen.append(0.25)
        eigs.append(Eigenvalue(complex(0.25), 1, Method.CLOSED_FORM, 0.0))
    if len(seen) > p.n:
        raise IncompleteSpectrum(f"scans produced {len(seen)} roots for degree {p.n}")
    if len(seen) == p.n:
        return eigs

    if p.n > AB_MAX_N:
        raise IncompleteSpectrum(
            f"{p.n - len(seen)} roots missing and n={p.n} exceeds the fallback limit {AB_MAX_N}")
    t0 = time.perf_counter()
    rest = _remaining_roots(p, seen)
    timings["fallback"] = time.perf_counter() - t0
    res = newton_residual(p, np.array(rest)) if rest else []
    eigs += [Eigenvalue(z, 1, Method.POLY_FALLBACK, float(r)) for z, r in zip(rest, res)]
    return eigs


def _merge(eigs: list[Eigenvalue]) -> list[Eigenvalue]:
    """Fold exactly equal analytic eigenvalues together; sort by real part descending."""
    merged: list[Eigenvalue] = []
    slot: dict[complex, int] = {}
    for e in eigs:
        key = e.value
        if e.method in (Method.DEFLATION, Method.CLOSED_FORM) and key in slot:
            m = merged[slot[key]]
            merged[slot[key]] = Eigenvalue(m.value, m.multiplicity + e.multiplicity, m.method,
                                           max(m.residual, e.residual))
            continue
        if e.method in (Method.DEFLATION, Method.CLOSED_FORM):
            slot[key] = len(merged)
        merged.append(e)
    return sorted(merged, key=lambda e: (-e.value.real, -e.value.imag))


def solve_spectrum(p: ParameterSet, tol: float = ph.DEFAULT_TOL) -> SpectrumReport:
    timings: dict[str, float] = {}
    t_all = time.perf_counter()
    t0 = time.perf_counter()
    record = deflate(p)
    timings["deflation"] = time.perf_counter() - t0

    reduced = record.reduced
    eigs = record.eigenvalues()
    t0 = time.perf_counter()
    closed = closed_form(reduced)
    timings["closed_form"] = time.perf_counter() - t0
    if closed is not None:
        eigs += closed
    elif reduced.n == 0:
        pass
    elif reduced.classification is Classification.ALL_POSITIVE:
        t0 = time.perf_counter()
        sols = ph.solve_all_positive(reduced, tol)
        timings["phase"] = time.perf_counter() - t0
        eigs += [Eigenvalue(complex(s.lam), 1, Method.PHASE_BRANCH, s.residual) for s in sols]
    else:
        eigs += _solve_general(reduced, tol, timings)

    report = SpectrumReport(p.n, _merge(eigs), record, CERT_THRESHOLD, timings)
    if report.total_multiplicity != p.n:
        raise IncompleteSpectrum(f"found {report.total_multiplicity} of {p.n} eigenvalues")
    for e in report.eigenvalues:
        if not e.residual <= CERT_THRESHOLD:
            raise CertificationFailure(e.value, e.residual)
    timings["total"] = time.perf_counter() - t_all
    return report
