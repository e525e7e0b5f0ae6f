import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blaschke_circle import (
    INFINITY,
    DomainError,
    KappaVector,
    ParameterPoint,
    eval_B,
    eval_B_prime,
    lift_derivative,
    lift_second_derivative,
    lift_value,
)
from blaschke_circle.core import (
    derivative_parameter_gradient,
    lift_parameter_gradient,
    log_abs_B,
)


@st.composite
def family_points(draw, max_m=3):
    """Any parameter of the family (not necessarily multimodal) with a matching kappa."""
    m = draw(st.integers(1, max_m))
    radii = draw(st.lists(st.floats(1.02, 3.0), min_size=m, max_size=m))
    angles = draw(st.lists(st.floats(0.0, 1.0, exclude_max=True), min_size=m - 1, max_size=m - 1))
    ks = draw(st.lists(st.integers(1, 4), min_size=m, max_size=m))
    d = draw(st.integers(1, 3))
    eta0 = draw(st.floats(0.0, 1.0, exclude_max=True))
    mu = ParameterPoint(eta0, radii[0], tuple(zip(radii[1:], angles)))
    return mu, KappaVector(d + sum(ks), tuple(ks))


def test_kappa_degrees():
    kap = KappaVector(7, (3, 3))
    assert kap.d == 1 and kap.sphere_degree == 13 and kap.m == 2
    assert KappaVector.from_sequence([8, 3, 2, 2]).as_tuple() == (8, 3, 2, 2)
    assert kap.permuted([1, 0]).k == (3, 3)


@pytest.mark.parametrize("bad", [(1, (1,)), (3, ()), (3, (0,))])
def test_kappa_rejects_bad_exponents(bad):
    with pytest.raises(DomainError):
        KappaVector(*bad)


def test_parameter_point_domain():
    with pytest.raises(DomainError):
        ParameterPoint(0.0, 0.5)
    with pytest.raises(DomainError):
        ParameterPoint(0.0, 1.5, ((1.0, 0.2),))
    mu = ParameterPoint(1.25, 1.5, ((2.0, -0.25),))
    assert mu.eta0 == 0.25 and mu.poles[0][1] == 0.75
    assert np.allclose(ParameterPoint.from_vector(mu.as_vector()).as_vector(), mu.as_vector())
    with pytest.raises(DomainError):
        mu.check(KappaVector(2, (1,)))


def test_eval_B_hand_values(unimodal):
    mu, kap = unimodal
    assert eval_B(0.0, mu, kap) == 0
    assert eval_B(1.0, mu, kap) == pytest.approx(1.0, abs=1e-15)
    assert eval_B(0.5, mu, kap) == INFINITY  # 1 - conj(a) z = 0
    assert cmath.isinf(eval_B(INFINITY, mu, kap))


def test_eval_B_prime_at_origin_and_poles(unimodal):
    mu, kap = unimodal
    assert eval_B_prime(0.0, mu, kap) == 0
    with pytest.raises(DomainError):
        eval_B_prime(0.5, mu, kap)


def test_B_prime_tangential_component_vanishes_at_turning_point(unimodal):
    mu, kap = unimodal
    t = math.acos(7 / 8) / (2 * math.pi)
    z = cmath.exp(2j * math.pi * t)
    # d/dt B(e^{2 pi i t}) = 2 pi i z B'(z) vanishes at a turning point
    assert abs(z * eval_B_prime(z, mu, kap)) < 1e-12


@given(family_points())
def test_B_maps_circle_to_circle_and_commutes_with_inversion(case):
    mu, kap = case
    rng = np.random.default_rng(0)
    for t in rng.uniform(0, 1, 20):
        z = cmath.exp(2j * math.pi * t)
        assert abs(abs(eval_B(z, mu, kap)) - 1.0) <= 1e-12
        w = 0.7 * z
        prod = eval_B(1.0 / w.conjugate(), mu, kap) * eval_B(w, mu, kap).conjugate()
        assert abs(prod - 1.0) <= 1e-10


@given(family_points(), st.floats(0, 1))
def test_B_prime_matches_central_difference(case, t):
    mu, kap = case
    z = 1.1 * cmath.exp(2j * math.pi * t)
    h = 1e-6
    fd = (eval_B(z + h, mu, kap) - eval_B(z - h, mu, kap)) / (2 * h)
    exact = eval_B_prime(z, mu, kap)
    assert abs(exact - fd) <= 1e-6 * max(1.0, abs(exact))


@given(family_points())
def test_lift_is_a_lift_and_has_degree_d(case):
    mu, kap = case
    t = np.linspace(-1.0, 2.0, 301)
    F = lift_value(t, mu, kap)
    B = np.array([eval_B(cmath.exp(2j * math.pi * s), mu, kap) for s in t])
    assert np.max(np.abs(np.exp(2j * np.pi * F) - B)) <= 1e-10
    assert np.max(np.abs(lift_value(t + 1, mu, kap) - F - kap.d)) <= 1e-10


def test_lift_hand_values(unimodal):
    mu, kap = unimodal
    assert lift_value(0.0, mu, kap) == pytest.approx(1.0, abs=1e-15)
    assert lift_value(1.0, mu, kap) == pytest.approx(2.0, abs=1e-14)
    assert lift_derivative(0.0, mu, kap) == pytest.approx(-1.0, abs=1e-12)
    assert lift_derivative(0.5, mu, kap) == pytest.approx(5 / 3, abs=1e-12)
    assert lift_second_derivative(0.0, mu, kap) == pytest.approx(0.0, abs=1e-12)
    # far pole: F'(0) = 2 - (r + 1)/(r - 1) = 7/9 > 0, so the map is monotone
    wide = ParameterPoint(0.0, 10.0)
    assert lift_derivative(0.0, wide, kap) == pytest.approx(2 - 11 / 9, abs=1e-12)
    assert lift_derivative(0.5, wide, kap) == pytest.approx(2 - 9 / 11, abs=1e-12)


@given(family_points())
def test_derivative_integrates_to_degree(case):
    mu, kap = case
    n = 4096
    t = np.arange(n) / n
    # trapezoid rule on a periodic analytic integrand converges geometrically
    assert np.mean(lift_derivative(t, mu, kap)) == pytest.approx(kap.d, abs=1e-8)


@given(family_points(), st.floats(0, 1))
def test_derivatives_match_central_differences(case, t):
    mu, kap = case
    h = 1e-6
    fd1 = (lift_value(t + h, mu, kap) - lift_value(t - h, mu, kap)) / (2 * h)
    fd2 = (lift_derivative(t + h, mu, kap) - lift_derivative(t - h, mu, kap)) / (2 * h)
    d1, d2 = lift_derivative(t, mu, kap), lift_second_derivative(t, mu, kap)
    assert abs(d1 - fd1) <= 1e-5 * max(1.0, abs(d1))
    assert abs(d2 - fd2) <= 1e-5 * max(1.0, abs(d2))


@given(family_points(), st.floats(0, 1))
def test_parameter_gradients_match_central_differences(case, t):
    mu, kap = case
    base = mu.as_vector()
    g = lift_parameter_gradient(t, mu, kap)
    dg = derivative_parameter_gradient(t, mu, kap)
    h = 1e-6
    for col in range(len(base)):
        up, dn = base.copy(), base.copy()
        up[col] += h
        dn[col] -= h
        mu_up, mu_dn = ParameterPoint.from_vector(up), ParameterPoint.from_vector(dn)
        diff = lift_value(t, mu_up, kap) - lift_value(t, mu_dn, kap)
        diff -= round(diff)  # angle reduction shifts the lift by integers
        assert diff / (2 * h) == pytest.approx(g[col], abs=1e-5 * max(1, abs(g[col])))
        ddiff = (lift_derivative(t, mu_up, kap) - lift_derivative(t, mu_dn, kap)) / (2 * h)
        assert ddiff == pytest.approx(dg[col], abs=1e-5 * max(1, abs(dg[col])))


def test_log_abs_B_vanishes_on_circle(three_pole_params):
    mu, kap = three_pole_params
    z = np.exp(2j * np.pi * np.linspace(0, 1, 50))
    assert np.max(np.abs(log_abs_B(z, mu, kap))) < 1e-12
