import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdim.errors import DomainError
from fracdim.special import gamma, jacobi_rule


def weighted_cos_series(alpha):
    # int_0^1 (1-u)^(alpha-1) cos(u) du, expanded in v = 1 - u
    return math.fsum(
        (-1) ** m * math.cos(1 + m * math.pi / 2) / (math.factorial(m) * (alpha + m))
        for m in range(40)
    )


def beta(p, q):
    return math.gamma(p) * math.gamma(q) / math.gamma(p + q)


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (5.0, 24.0), (0.5, 1.7724538509055160)])
def test_gamma_examples(x, expected):
    assert gamma(x) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, 171.5, math.nan, math.inf])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


def test_gamma_matches_libm_across_range():
    xs = np.concatenate([np.linspace(1e-3, 1, 200), np.linspace(1, 171, 800)])
    rel = [abs(gamma(x) - math.gamma(x)) / math.gamma(x) for x in xs]
    assert max(rel) <= 1e-12


def test_gamma_recurrence_sweep():
    for i in range(1, 101):
        x = i / 10
        assert abs(gamma(x + 1) - x * gamma(x)) <= 1e-10 * gamma(x + 1)


@given(st.floats(min_value=1e-3, max_value=169.0))
def test_gamma_recurrence_property(x):
    assert abs(gamma(x + 1) - x * gamma(x)) <= 1e-10 * gamma(x + 1)


def test_jacobi_rule_alpha_one_is_legendre():
    rule = jacobi_rule(1.0, 10)
    t, w = np.polynomial.legendre.leggauss(10)
    np.testing.assert_allclose(rule.nodes, (t + 1) / 2, rtol=0, atol=1e-15)
    np.testing.assert_allclose(rule.weights, w / 2, rtol=1e-14)
    assert rule.integrate(np.ones(10)) == pytest.approx(1.0, abs=1e-15)


def test_jacobi_rule_two_points_linear():
    rule = jacobi_rule(0.5, 2)
    assert rule.node_count == 2
    assert beta(2, 0.5) == pytest.approx(4 / 3, rel=1e-15)
    assert rule.integrate(rule.nodes) == pytest.approx(4 / 3, rel=1e-14)


@settings(max_examples=60)
@given(
    alpha=st.floats(min_value=0.3, max_value=1.0),
    n=st.integers(min_value=2, max_value=128),
)
def test_rule_invariants(alpha, n):
    rule = jacobi_rule(alpha, n)
    u, w = rule.nodes, rule.weights
    assert np.all(np.diff(u) > 0)
    assert np.all((u > 0) & (u < 1))
    assert np.all(w > 0)
    assert abs(w.sum() - 1 / alpha) <= 1e-12 * max(1.0, 1 / alpha)


@settings(max_examples=60)
@given(
    alpha=st.floats(min_value=0.2, max_value=1.0),
    n=st.integers(min_value=32, max_value=128),
    grading=st.sampled_from([1, 2, 3]),
)
def test_rule_complements(alpha, n, grading):
    # 1 - u stays resolvable even where u itself rounds to 1.0
    rule = jacobi_rule(alpha, n, grading)
    v = rule.complements
    assert np.all(np.diff(v) < 0)
    assert np.all((v > 0) & (v < 1))
    np.testing.assert_allclose(1.0 - v, rule.nodes, rtol=0, atol=2e-16)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 1 / alpha) <= 1e-12 / alpha


@pytest.mark.parametrize("degree", range(0, 9))
def test_half_order_polynomial_exactness(degree):
    # g(u) = u^d; exact value is Beta(d + 1, 1/2)
    n = degree + 1 if degree > 0 else 2
    rule = jacobi_rule(0.5, n)
    got = rule.integrate(rule.nodes**degree)
    assert got == pytest.approx(beta(degree + 1, 0.5), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.25, 0.3, 0.5, 0.7, 0.9, 1.0])
def test_refinement_never_increases_error(alpha):
    exact = weighted_cos_series(alpha)
    errs = []
    for n in (8, 16, 32, 64):
        rule = jacobi_rule(alpha, n)
        errs.append(abs(rule.integrate(np.cos(rule.nodes)) - exact))
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= max(coarse, 1e-15)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 0.9])
def test_graded_rule_accuracy(alpha):
    exact = weighted_cos_series(alpha)
    rule = jacobi_rule(alpha, 64, grading=2)
    assert rule.integrate(np.cos(rule.nodes)) == pytest.approx(exact, rel=1e-14)


def test_graded_rule_handles_sqrt_kink():
    # g(u) = sqrt(u); exact Beta(3/2, alpha)
    alpha = 0.5
    exact = beta(1.5, alpha)
    plain = jacobi_rule(alpha, 64)
    graded = jacobi_rule(alpha, 64, grading=2)
    err_plain = abs(plain.integrate(np.sqrt(plain.nodes)) - exact)
    err_graded = abs(graded.integrate(np.sqrt(graded.nodes)) - exact)
    assert err_graded <= 1e-13
    assert err_plain > 100 * err_graded


@pytest.mark.parametrize("alpha, n", [(0.0, 4), (1.5, 4), (-0.3, 4), (0.5, 1), (0.5, 2.5)])
def test_jacobi_rule_invalid(alpha, n):
    with pytest.raises(DomainError):
        jacobi_rule(alpha, n)


def test_rule_is_immutable():
    rule = jacobi_rule(0.4, 8)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.5
