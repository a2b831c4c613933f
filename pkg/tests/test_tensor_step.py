"""Taylor models, tensor steps, and the criterion-to-acceptance parameter map."""

import math

import numpy as np
import pytest

from hiprox import (
    ParameterError,
    ProxConfig,
    SeparableObjective,
    TaylorModel,
    check_acceptable,
    convexity_threshold,
    get_problem,
    lemma2_bound_check,
    make_family,
    make_term,
    tensor_acceptance_map,
    tensor_criterion,
    tensor_step_1d,
)


def _quartic_abs():
    prob = get_problem("quartic-abs-1d")
    return prob.oracle, prob.term


def test_taylor_model_reproduces_polynomials_exactly():
    # degree-3 model of x^4 has a known closed form; check against sympy-free
    # direct expansion around x
    oracle, _ = _quartic_abs()
    tm = TaylorModel(oracle, np.array([0.8]), 3, 0.0)
    for y in (-1.0, 0.0, 0.5, 1.3):
        h = y - 0.8
        expected = 0.8 ** 4 + 4 * 0.8 ** 3 * h + 6 * 0.8 ** 2 * h ** 2 + 4 * 0.8 * h ** 3
        np.testing.assert_allclose(tm.taylor_value(np.array([y])), expected, rtol=1e-12)
        grad = 4 * 0.8 ** 3 + 12 * 0.8 ** 2 * h + 12 * 0.8 * h ** 2
        np.testing.assert_allclose(tm.taylor_gradient(np.array([y]))[0], grad, rtol=1e-12)


def test_taylor_remainder_order():
    # f(y) - model(y) = (y - x)^4 exactly for the cubic model of x^4
    oracle, _ = _quartic_abs()
    tm = TaylorModel(oracle, np.array([0.8]), 3, 0.0)
    rng = np.random.default_rng(0)
    for y in rng.uniform(-1.5, 1.5, 20):
        yv = np.array([y])
        np.testing.assert_allclose(
            oracle.value(yv) - tm.taylor_value(yv), (y - 0.8) ** 4, atol=1e-12
        )


def test_augmented_value_and_gradient():
    oracle, _ = _quartic_abs()
    m = 45.6
    tm = TaylorModel(oracle, np.array([0.8]), 3, m)
    assert tm.prox_h == pytest.approx(m / 6.0)
    y = np.array([1.2])
    d = 0.4
    np.testing.assert_allclose(
        tm.augmented_value(y),
        tm.taylor_value(y) + m / 24.0 * d ** 4,
        rtol=1e-12,
    )
    np.testing.assert_allclose(
        tm.augmented_gradient(y)[0],
        tm.taylor_gradient(y)[0] + m / 6.0 * d ** 3,
        rtol=1e-12,
    )
    fd = (tm.augmented_value(np.array([1.2 + 1e-6])) - tm.augmented_value(np.array([1.2 - 1e-6]))) / 2e-6
    np.testing.assert_allclose(tm.augmented_gradient(y)[0], fd, rtol=1e-8)


def test_taylor_model_validation():
    oracle, _ = _quartic_abs()
    with pytest.raises(ParameterError):
        TaylorModel(oracle, np.array([0.0]), 0, 1.0)
    with pytest.raises(ParameterError):
        TaylorModel(oracle, np.array([0.0]), 3, -1.0)


def test_convexity_threshold():
    assert convexity_threshold(3, 24.0) == 72.0
    # at the threshold the augmented model's second derivative is nonnegative
    oracle, _ = _quartic_abs()
    tm = TaylorModel(oracle, np.array([0.8]), 3, 72.0)
    ts = np.linspace(-2.0, 2.0, 2001)
    grads = np.array([float(tm.augmented_gradient(np.array([t]))[0]) for t in ts])
    assert np.all(np.diff(grads) >= -1e-9)


def test_linear_objective_step_closed_form():
    # f(t) = t: the augmented model minimizer is x - (p! / M)^{1/p}
    oracle = SeparableObjective(np.array([[1.0]]), np.array([0.0]), make_family("linear"))
    term = make_term("zero")
    for p, m, x in ((3, 6.0, 2.0), (3, 48.0, 0.5), (2, 4.0, 1.0)):
        tm = TaylorModel(oracle, np.array([x]), p, m)
        t, g, ok, lhs, rhs = tensor_step_1d(tm, term, 0.25)
        expected = x - (math.factorial(p) / m) ** (1.0 / p)
        np.testing.assert_allclose(t, [expected], rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(g, [0.0], atol=1e-14)
        assert ok
        assert lhs <= 1e-10  # exact minimizer: zero augmented residual


def test_tensor_criterion_return_order_and_slack():
    oracle, term = _quartic_abs()
    tm = TaylorModel(oracle, np.array([0.8]), 3, 45.6)
    point = np.array([0.4])
    g = term.subgradient_select(point, -tm.augmented_gradient(point))
    ok, lhs, rhs = tensor_criterion(tm, term, point, g, 8.0 / 19.0)
    assert isinstance(ok, (bool, np.bool_))
    np.testing.assert_allclose(
        lhs, abs(float(tm.augmented_gradient(point)[0] + g[0])), rtol=1e-12
    )
    np.testing.assert_allclose(
        rhs, abs(float(tm.taylor_gradient(point)[0] + g[0])), rtol=1e-12
    )
    assert ok == (lhs <= (8.0 / 19.0) / (1.0 + 8.0 / 19.0) * rhs + 1e-12)


def test_exact_step_always_passes_criterion():
    oracle, term = _quartic_abs()
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.uniform(-1.5, 1.5)
        tm = TaylorModel(oracle, np.array([x]), 3, 45.6)
        t, g, ok, lhs, _ = tensor_step_1d(tm, term, 0.0)
        assert ok
        assert lhs <= 1e-9


def test_acceptance_map_frozen_values():
    m, h = tensor_acceptance_map(3, 0.9, 8.0 / 19.0, 24.0)
    np.testing.assert_allclose(m, 456.0, rtol=1e-12)
    np.testing.assert_allclose(h, 76.0, rtol=1e-12)
    # the map inverts the acceptance-level formula exactly
    gamma = 8.0 / 19.0
    implied = (24.0 + gamma * m) / ((1.0 - gamma) * m - 24.0)
    np.testing.assert_allclose(implied, 0.9, rtol=1e-12)


def test_acceptance_map_validation():
    with pytest.raises(ParameterError):
        tensor_acceptance_map(3, 1.0, 0.1, 24.0)
    with pytest.raises(ParameterError):
        tensor_acceptance_map(3, 0.5, 0.4, 24.0)  # gamma >= beta/(1+beta)
    with pytest.raises(ParameterError):
        tensor_acceptance_map(3, 0.9, -0.1, 24.0)
    with pytest.raises(ParameterError):
        tensor_acceptance_map(3, 0.9, 0.1, 0.0)


def test_criterion_region_nonempty_and_accepted():
    # the worked instance: M = 1.9 * 24, gamma = 8/19, anchor 0.8
    oracle, term = _quartic_abs()
    gamma = 8.0 / 19.0
    m = 1.9 * 24.0
    h = m / 6.0
    beta_level = (24.0 + gamma * m) / ((1.0 - gamma) * m - 24.0)
    np.testing.assert_allclose(beta_level, 18.0, rtol=1e-12)
    tm = TaylorModel(oracle, np.array([0.8]), 3, m)
    passing = 0
    for t in np.linspace(-1.0, 1.5, 501):
        point = np.array([t])
        g = term.subgradient_select(point, -tm.augmented_gradient(point))
        ok, _, _ = tensor_criterion(tm, term, point, g, gamma)
        if ok:
            passing += 1
            res = float(oracle.gradient(point)[0] + g[0])
            reg = res + h * abs(t - 0.8) ** 2 * (t - 0.8)
            assert abs(reg) <= beta_level * abs(res) + 1e-12
    assert passing > 0


def test_target_beta_map_chain():
    # criterion pass at the mapped (M, H) implies beta = 0.9 acceptance
    oracle, term = _quartic_abs()
    gamma = 8.0 / 19.0
    m, h = tensor_acceptance_map(3, 0.9, gamma, 24.0)
    cfg = ProxConfig(3, h, 0.9)
    anchor = np.array([0.8])
    tm = TaylorModel(oracle, anchor, 3, m)
    passing = 0
    for t in np.linspace(-1.0, 1.5, 501):
        point = np.array([t])
        g = term.subgradient_select(point, -tm.augmented_gradient(point))
        ok, _, _ = tensor_criterion(tm, term, point, g, gamma)
        if ok:
            passing += 1
            cert = check_acceptable(oracle, term, cfg, anchor, point, g)
            assert cert.accepted
    assert passing > 0
    t, g, ok, _, _ = tensor_step_1d(tm, term, gamma)
    assert ok
    assert check_acceptable(oracle, term, cfg, anchor, t, g).accepted


def test_lemma2_bound_check():
    oracle, term = _quartic_abs()
    gamma = 8.0 / 19.0
    m, _ = tensor_acceptance_map(3, 0.9, gamma, 24.0)
    tm = TaylorModel(oracle, np.array([0.8]), 3, m)
    t, g, ok, _, _ = tensor_step_1d(tm, term, gamma)
    assert ok
    lhs, bound, bound_ok = lemma2_bound_check(tm, t, g, gamma, 24.0)
    assert bound_ok
    assert lhs <= bound + 1e-10
    with pytest.raises(ParameterError):
        lemma2_bound_check(TaylorModel(oracle, np.array([0.8]), 3, 10.0), t, g, gamma, 24.0)
