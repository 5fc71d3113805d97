import numpy as np
import pytest
from hypothesis import strategies as st

from phasespec import validate_params

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion; tests sharing a number report together")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        previous = _criteria.get(number, ("PASS", title))[0]
        status = "PASS" if rep.passed and previous == "PASS" else "FAIL"
        _criteria[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}  {status}  {title}")


def match_multisets(got, want):
    """Greedy nearest matching; worst |g - w| / max(1, |w|)."""
    got = list(np.asarray(got, dtype=complex))
    want = list(np.asarray(want, dtype=complex))
    assert len(got) == len(want), (len(got), len(want))
    worst = 0.0
    for w in sorted(want, key=lambda v: (-abs(v.imag), v.real)):
        j = int(np.argmin([abs(g - w) for g in got]))
        worst = max(worst, abs(got.pop(j) - w) / max(1.0, abs(w)))
    return worst


def exact_roots(p, dps=80):
    """Roots of the exact rational characteristic polynomial, to ``dps`` digits."""
    import mpmath

    from phasespec.oracle import exact_charpoly_small

    coeffs = exact_charpoly_small(p, max_n=64).coeffs
    with mpmath.workdps(dps):
        mp_coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(coeffs)]
        roots = mpmath.polyroots(mp_coeffs, maxsteps=500, extraprec=20 * dps)
        return [complex(r) for r in roots]


def random_params(rng, n, *, positive=False, low=0.1, high=5.0):
    a = rng.uniform(low, high, n)
    if not positive:
        a = a * rng.choice([-1.0, 1.0], n)
    return validate_params(a)


def nonzero_floats(lo=0.05, hi=6.0):
    mag = st.floats(lo, hi, allow_nan=False, allow_infinity=False)
    return st.tuples(mag, st.booleans()).map(lambda t: -t[0] if t[1] else t[0])


def param_lists(min_size=1, max_size=8, positive=False):
    elem = st.floats(0.05, 6.0) if positive else nonzero_floats()
    return st.lists(elem, min_size=min_size, max_size=max_size).map(validate_params)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
