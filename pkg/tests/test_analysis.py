import math

import numpy as np
import pytest
from hypothesis import given, settings

from phasespec import radius_lower_bound, sensitivity, solve_spectrum, validate_params
from phasespec.errors import ClassificationError, DomainError, SingularSensitivity

from conftest import param_lists

GOLDEN = 0.25 * (6 + 2 * math.sqrt(5))


def real_spectrum(alphas):
    return np.sort(solve_spectrum(validate_params(alphas)).values().real)[::-1]


def spectral_radius(alphas):
    return float(np.max(np.abs(solve_spectrum(validate_params(alphas)).values())))


def fd_partials(alphas, k, rel_h=1e-6):
    out = []
    for i, a in enumerate(alphas):
        h = rel_h * max(1.0, abs(a))
        up, down = list(alphas), list(alphas)
        up[i] += h
        down[i] -= h
        out.append((real_spectrum(up)[k] - real_spectrum(down)[k]) / (2 * h))
    return np.array(out)


def test_two_ones_top_eigenvalue():
    row = sensitivity(validate_params([1, 1]), GOLDEN)
    fd = fd_partials([1.0, 1.0], 0)
    assert np.allclose(row.partials, fd, rtol=1e-6, atol=0)
    assert row.to_dict()["lambda"] == GOLDEN


def test_single_parameter():
    # lambda = (a + 1)^2 / 4, so d lambda / d a = (a + 1)/2
    for a in (1.0, 2.0, 5.0):
        lam = (a + 1) ** 2 / 4
        assert sensitivity(validate_params([a]), lam).partials[0] == pytest.approx((a + 1) / 2, rel=1e-14)


def test_partials_positive_two_three():
    p = validate_params([2, 3])
    for lam in real_spectrum([2, 3]):
        assert all(v > 0 for v in sensitivity(p, lam).partials)


@settings(max_examples=25, deadline=None)
@given(param_lists(max_size=8, positive=True))
def test_partials_match_finite_differences(p):
    lams = real_spectrum(p.alphas)
    for k, lam in enumerate(lams):
        gaps = [abs(lam - other) / lam for j, other in enumerate(lams) if j != k]
        if gaps and min(gaps) <= 1e-3:
            continue
        row = sensitivity(p, lam)
        assert all(v > 0 for v in row.partials)
        fd = fd_partials(list(p.alphas), k)
        assert np.all(np.abs(np.array(row.partials) - fd) <= 1e-5 * np.abs(row.partials))


def test_sensitivity_errors():
    with pytest.raises(DomainError):
        sensitivity(validate_params([1.0]), 0.25)
    # 1/(2 lam) + 4a/(4 lam - 1 + a^2) vanishes for a = -3, lam = 0.4
    with pytest.raises(SingularSensitivity):
        sensitivity(validate_params([-3.0]), 0.4)


def test_bound_vectors():
    b = radius_lower_bound(validate_params([1, 1]))
    assert 2.0 <= b <= GOLDEN
    assert radius_lower_bound(validate_params([3])) == pytest.approx(4.0, rel=1e-15)
    with pytest.raises(ClassificationError):
        radius_lower_bound(validate_params([1, -1]))
    with pytest.raises(ClassificationError):
        radius_lower_bound(validate_params([1, 0]))


def test_bound_below_radius(rng):
    for _ in range(40):
        alphas = rng.uniform(0.05, 6, 10)
        assert radius_lower_bound(validate_params(alphas)) <= spectral_radius(alphas) + 1e-10


def test_two_parameter_inequality_region(rng):
    """rho(J_2) >= x0 = sum (a_i + 1)^2 / 4 holds exactly when det <= a1 a2 x0.

    For n = 2, trace = x0 + a1 a2 and det = ((a1 + 1)(a2 + 1)/4)^2, so
    rho >= x0 is equivalent to x0^2 - trace x0 + det <= 0.
    """
    for _ in range(300):
        a1, a2 = 10 ** rng.uniform(-2.5, 1, 2)
        x0 = ((a1 + 1) ** 2 + (a2 + 1) ** 2) / 4
        det = ((a1 + 1) * (a2 + 1) / 4) ** 2
        margin = a1 * a2 * x0 - det
        if abs(margin) <= 1e-9 * det:
            continue
        rho = spectral_radius([a1, a2])
        assert (rho >= x0) == (margin > 0)


def test_two_parameter_counterexample():
    rho = spectral_radius([0.012, 0.1303])
    x0 = (1.012**2 + 1.1303**2) / 4
    assert rho < x0
    # the Newton bound itself is still below the radius
    assert radius_lower_bound(validate_params([0.012, 0.1303])) <= rho
