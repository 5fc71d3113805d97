import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phasespec import Method, build_jn, solve_spectrum, validate_params
from phasespec.errors import CertificationFailure, IncompleteSpectrum
from phasespec.oracle import charpoly_by_interpolation
from phasespec.roots import fallback_roots
from phasespec.spectrum import closed_form, deflate, quarter_is_root

from conftest import exact_roots, match_multisets, param_lists, random_params

EXAMPLE = [5, -0.1, 3, -2, 1.5]
EXAMPLE_VALUES = [22.5527, 0.9821, 0.2287, -0.7492 + 0.03131j, -0.7492 - 0.03131j]


def quarter_sec2(k, n):
    return 0.25 / math.cos(k * math.pi / (2 * n + 1)) ** 2


def quarter_csc2(k, n):
    return 0.25 / math.sin((1 + 2 * k) * math.pi / (2 * (2 * n - 1))) ** 2


def exact_eigenvalues(p):
    # zero parameters leave exact factors of (x - 1/4); drop and add them back
    nonzero = [a for a in p.alphas if a != 0.0]
    quarter = [0.25] * (p.n - len(nonzero))
    return quarter + (exact_roots(validate_params(nonzero)) if nonzero else [])


def test_deflation_vectors():
    d = deflate(validate_params([0, 2, 0]))
    assert (d.zero_count, d.pairs, d.reduced.alphas) == (2, (), (2.0,))
    d = deflate(validate_params([3, -3, 1]))
    assert d.pairs == (3.0,) and d.reduced.alphas == (1.0,)
    assert [(e.value, e.multiplicity) for e in d.eigenvalues()] == [(-2 + 0j, 2)]
    d = deflate(validate_params([1, 2]))
    assert (d.zero_count, d.pairs, d.origin_count, d.reduced.alphas) == (0, (), 0, (1.0, 2.0))


def test_minus_one_peel():
    d = deflate(validate_params([-1, 2, -3]))
    assert d.origin_count == 1
    assert d.reduced.alphas == (-2.0, 3.0)
    assert d.original_n == 3
    got = solve_spectrum(validate_params([-1, 2, -3])).values()
    assert match_multisets(got, exact_eigenvalues(validate_params([-1, 2, -3]))) < 1e-12


def test_closed_forms():
    ones = closed_form(validate_params([1, 1, 1]))
    assert sorted(e.value.real for e in ones) == pytest.approx(sorted(quarter_sec2(k, 3) for k in (1, 2, 3)), rel=1e-14)
    assert [e.value for e in closed_form(validate_params([-1]))] == [0j]
    minus = closed_form(validate_params([-1, -1, -1]))
    want = [0.0, 0.25 / math.sin(math.pi / 10) ** 2, 0.25 / math.sin(3 * math.pi / 10) ** 2]
    assert sorted(e.value.real for e in minus) == pytest.approx(sorted(want), rel=1e-14)
    assert match_multisets([e.value for e in minus], exact_eigenvalues(validate_params([-1] * 3))) < 1e-12
    assert closed_form(validate_params([1, 2])) is None


def test_example_spectrum():
    report = solve_spectrum(validate_params(EXAMPLE))
    assert report.total_multiplicity == 5
    assert match_multisets(report.values(), EXAMPLE_VALUES) < 5e-4
    methods = {e.method for e in report.eigenvalues}
    assert methods == {Method.PHASE_BRANCH, Method.SUB_QUARTER_SCAN, Method.POLY_FALLBACK}


def test_small_vectors():
    assert solve_spectrum(validate_params([1])).values() == pytest.approx([1.0])
    (e,) = solve_spectrum(validate_params([2, -2])).eigenvalues
    assert (e.value, e.multiplicity, e.method) == (-0.75, 2, Method.DEFLATION)
    (e,) = solve_spectrum(validate_params([0])).eigenvalues
    assert (e.value, e.multiplicity) == (0.25, 1)


def test_report_schema():
    d = solve_spectrum(validate_params(EXAMPLE)).to_dict()
    assert set(d) == {"n", "eigenvalues", "max_residual", "timings"}
    assert set(d["eigenvalues"][0]) == {"re", "im", "mult", "method", "residual"}
    assert d["n"] == 5 and d["max_residual"] <= 1e-8


def test_quarter_root_is_exact():
    # 1 + 2 sum 1/a = 0 puts an eigenvalue exactly at 1/4
    p = validate_params([4, -1, 4, 0])
    assert quarter_is_root(deflate(p).reduced)
    report = solve_spectrum(p)
    quarter = [e for e in report.eigenvalues if e.value == 0.25]
    assert sum(e.multiplicity for e in quarter) == 2
    assert match_multisets(report.values(), exact_eigenvalues(p)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(param_lists(max_size=14))
def test_complete_and_certified(p):
    report = solve_spectrum(p)
    assert report.total_multiplicity == p.n
    assert report.max_residual <= report.certification_threshold
    values = report.values()
    # conjugate symmetric
    assert match_multisets(values, np.conj(values)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(param_lists(max_size=10), st.randoms(use_true_random=False))
def test_permutation_invariance(p, r):
    shuffled = list(p.alphas)
    r.shuffle(shuffled)
    a = solve_spectrum(p).values()
    b = solve_spectrum(validate_params(shuffled)).values()
    assert match_multisets(a, b) < 1e-9


def test_agrees_with_exact_eigenvalues(rng):
    worst = 0.0
    for _ in range(60):
        p = random_params(rng, int(rng.integers(1, 13)))
        assert not deflate(p).pairs
        worst = max(worst, match_multisets(solve_spectrum(p).values(), exact_eigenvalues(p)))
    assert worst < 1e-8


@pytest.mark.xfail(strict=True, reason=(
    "roots of the interpolated polynomial are themselves off by up to ~3e-4 at n = 11, 12: "
    "its coefficients are rounded to double and the roots amplify that; the solver sits "
    "within 1e-15 of the exact eigenvalues on the same sets"))
def test_agrees_with_interpolation_oracle_literally(rng):
    failures = 0
    for _ in range(100):
        p = random_params(rng, int(rng.integers(1, 13)))
        oracle = fallback_roots(charpoly_by_interpolation(build_jn(p)))
        failures += match_multisets(solve_spectrum(p).values(), oracle) > 1e-8
    assert failures == 0


def test_interpolation_oracle_roots_are_the_inaccurate_side(rng):
    # where the literal comparison fails, the exact eigenvalues side with the solver
    for _ in range(60):
        p = random_params(rng, int(rng.integers(1, 13)))
        exact = exact_eigenvalues(p)
        ours = match_multisets(solve_spectrum(p).values(), exact)
        theirs = match_multisets(fallback_roots(charpoly_by_interpolation(build_jn(p))), exact)
        assert ours <= max(theirs, 1e-12)


@pytest.mark.parametrize("n", range(2, 8))
def test_nilpotent(n):
    minus = math.ceil(n / 2)
    for signs in set(itertools.permutations([-1.0] * minus + [1.0] * (n - minus))):
        report = solve_spectrum(validate_params(signs))
        assert np.max(np.abs(report.values())) <= 1e-8
        assert report.total_multiplicity == n


def test_no_negative_reals_without_pairs(rng):
    seen = 0
    for trial in range(150):
        n = int(rng.integers(2, 40 if trial % 3 else 120))
        p = validate_params(np.round(rng.uniform(-5, 5, n), 3) + 0.0005)
        if deflate(p).pairs:
            continue
        seen += 1
        for e in solve_spectrum(p).eigenvalues:
            assert not (e.value.imag == 0 and e.value.real < 0), e
    assert seen > 100


def test_large_parameter_limit(rng):
    for trial in range(20):
        rest = list(random_params(rng, int(rng.integers(1, 7)), positive=trial % 2 == 0).alphas)
        p = validate_params([1e6] + rest)
        values = solve_spectrum(p).values()
        top = int(np.argmax(values.real))
        assert values[top].real > 1e10
        others = np.delete(values, top)
        reduced = solve_spectrum(validate_params(rest)).values()
        assert match_multisets(others, reduced) < 1e-3


def test_pairs_leave_reduced_spectrum(rng):
    for _ in range(40):
        base = list(random_params(rng, int(rng.integers(1, 8))).alphas)
        a = float(rng.uniform(0.2, 4))
        full = base + [a, -a]
        rng.shuffle(full)
        report = solve_spectrum(validate_params(full))
        pair = [e for e in report.eigenvalues if e.method is Method.DEFLATION]
        assert [(e.value, e.multiplicity) for e in pair] == [((1 - a * a) / 4, 2)]
        rest = [v for e in report.eigenvalues if e.method is not Method.DEFLATION for v in [e.value] * e.multiplicity]
        assert match_multisets(rest, solve_spectrum(validate_params(base)).values()) < 1e-9


def test_zero_parameters_counted_exactly(rng):
    for _ in range(30):
        base = list(random_params(rng, int(rng.integers(1, 6))).alphas)
        m = int(rng.integers(1, 4))
        full = base + [0.0] * m
        rng.shuffle(full)
        report = solve_spectrum(validate_params(full))
        quarter = [e for e in report.eigenvalues if e.value == 0.25]
        assert sum(e.multiplicity for e in quarter) == m + (1 if quarter_is_root(validate_params(base)) else 0)


def test_errors_are_typed():
    assert issubclass(CertificationFailure, Exception)
    assert issubclass(IncompleteSpectrum, Exception)


CLUSTERED = [
    # near-nilpotent: a real root and a thin complex pair within 1e-7 of the origin
    [-0.9779, -1.0135, 1.0, -0.9936, 1.0111, -0.9857, 1.0102, -1.0125, 0.9967, -1.0115,
     -1.0165, -0.9922, -0.9927, -1.008, -1.0074, 0.9921, 0.9685, -0.9844, 1.0122, 0.9949],
    # thin conjugate pairs just left of the origin, near (1 - a^2)/4
    [1.0039, -0.9986, -1.0002, 1.0049, 0.9738, -1.0161, -0.9869, 0.9949, -0.9911, -1.0011,
     -1.0017, -1.0089, -0.9954, 0.9845, 0.9996, -1.0062],
    [1.003, -0.9965, 1.0046, 1.0042, 1.008, -1.0087, 0.9744, 0.995, 0.9997, 0.9978, -0.9851, -0.9959],
]


@pytest.mark.parametrize("alphas", CLUSTERED)
def test_clustered_unit_parameters(alphas):
    p = validate_params(alphas)
    report = solve_spectrum(p)
    assert report.max_residual <= 1e-8
    assert match_multisets(report.values(), exact_eigenvalues(p)) < 1e-12
    assert not any(e.value.imag == 0 and e.value.real < 0 for e in report.eigenvalues)
