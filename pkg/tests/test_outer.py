"""Outer loops: coefficient schedules, estimating sequences, rate bounds."""

import math

import numpy as np
import pytest

from hiprox import (
    CapabilityError,
    EstimatingState,
    NumericalError,
    ParameterError,
    PowerProx,
    ProxConfig,
    aihopp_run,
    bilevel_h,
    biopt_run,
    bound_evaluator,
    coefficients,
    estimating_update,
    exact_prox_provider,
    get_problem,
    ihopp_run,
    inner_prox_provider,
    make_term,
    psi_argmin,
    tensor_prox_provider,
)
from hiprox.metric import MetricSpace


def test_coefficients_accelerated_frozen():
    # p = 3, beta = 1/3, H = 3 gives c_p^p/8 = 1/36, so A_4 = 1/36
    a4, a5 = coefficients("accelerated", 3, 4, beta=1.0 / 3.0, h=3.0)
    np.testing.assert_allclose(a4, 1.0 / 36.0, rtol=1e-14)
    np.testing.assert_allclose(a5, (1.0 / 36.0) * ((5.0 / 4.0) ** 4 - 1.0), rtol=1e-13)
    a0, a1 = coefficients("accelerated", 3, 0, beta=1.0 / 3.0, h=3.0)
    assert a0 == 0.0
    np.testing.assert_allclose(a1, (1.0 / 36.0) / 4.0 ** 4, rtol=1e-14)


def test_coefficients_bilevel_lead():
    p, m = 3, 24.0
    lead = (p - 1) * math.factorial(p - 1) / (3.0 * p * 2 ** (p + 1) * m)
    for k in (0, 1, 7):
        a_k, a_next = coefficients("bilevel", p, k, m_next=m)
        np.testing.assert_allclose(a_k, lead * (k / 4.0) ** 4, rtol=1e-14)
        np.testing.assert_allclose(
            a_next, lead * (((k + 1) / 4.0) ** 4 - (k / 4.0) ** 4), rtol=1e-13
        )


def test_coefficients_validation():
    with pytest.raises(ParameterError):
        coefficients("accelerated", 3, -1, beta=0.3, h=1.0)
    with pytest.raises(ParameterError):
        coefficients("accelerated", 3, 2, beta=None, h=1.0)
    with pytest.raises(ParameterError):
        coefficients("accelerated", 3, 2, beta=0.3, h=None)
    for bad_m in (None, 0.0, -1.0, np.inf):
        with pytest.raises(ParameterError):
            coefficients("bilevel", 3, 2, m_next=bad_m)
    with pytest.raises(ParameterError):
        coefficients("steepest", 3, 2, beta=0.3, h=1.0)


@pytest.mark.parametrize("p", [2, 3, 4])
def test_coefficient_growth_inequality(p):
    # a_{k+1}^{(p+1)/p} <= (c_p/2) A_{k+1} keeps the estimating argument valid
    beta, h = 1.0 / p, 5.0
    c_p = ((1.0 - beta) / h) ** (1.0 / p)
    for k in list(range(0, 50)) + [10 ** 2, 10 ** 3, 10 ** 4]:
        a_k, a_next = coefficients("accelerated", p, k, beta=beta, h=h)
        lhs = a_next ** ((p + 1.0) / p)
        rhs = (c_p / 2.0) * (a_k + a_next)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_estimating_state_value_and_update():
    rng = np.random.default_rng(5)
    x0 = rng.standard_normal(4)
    pp = PowerProx(3, MetricSpace.euclidean(4))
    state = EstimatingState(power=pp, x0=x0)
    term = make_term("l1", lam=0.4)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(state.value(x, term), pp.value(x - x0), rtol=1e-14)

    t1, t2 = rng.standard_normal(4), rng.standard_normal(4)
    g1, g2 = rng.standard_normal(4), rng.standard_normal(4)
    estimating_update(state, t1, g1, 2.0, 0.5)
    estimating_update(state, t2, g2, -1.0, 1.25)
    assert state.k == 2 and state.a_total == 1.75
    direct = (
        0.5 * (2.0 + g1 @ (x - t1))
        + 1.25 * (-1.0 + g2 @ (x - t2))
        + 1.75 * term.value(x)
        + pp.value(x - x0)
    )
    np.testing.assert_allclose(state.value(x, term), direct, rtol=1e-12)
    with pytest.raises(ParameterError):
        estimating_update(state, t1, g1, 0.0, 0.0)


def test_psi_argmin_zero_term_closed_form():
    rng = np.random.default_rng(11)
    for metric in (MetricSpace.euclidean(3), MetricSpace(3, weights=[1.0, 2.0, 0.5])):
        pp = PowerProx(3, metric)
        x0 = rng.standard_normal(3)
        state = EstimatingState(power=pp, x0=x0)
        estimating_update(state, x0, rng.standard_normal(3), 0.0, 1.0)
        term = make_term("zero")
        v = psi_argmin(state, term, pp)
        s = state.s
        sn = metric.dual_norm(s)
        np.testing.assert_allclose(
            v, x0 - sn ** (-2.0 / 3.0) * metric.apply_inv(s), rtol=1e-12
        )
        # stationarity: s + |v-x0|^{p-1} B (v-x0) = 0
        r = metric.primal_norm(v - x0)
        np.testing.assert_allclose(
            s + r ** 2 * metric.apply(v - x0), 0.0, atol=1e-12 * sn
        )


def test_psi_argmin_zero_gradient_returns_anchor():
    pp = PowerProx(3, MetricSpace.euclidean(2))
    state = EstimatingState(power=pp, x0=np.array([1.0, -2.0]))
    term = make_term("zero")
    np.testing.assert_allclose(psi_argmin(state, term, pp), state.x0)


@pytest.mark.parametrize("kind,kwargs", [("l1", {"lam": 0.6}), ("nonneg", {})])
def test_psi_argmin_composite_optimality(kind, kwargs):
    rng = np.random.default_rng(17)
    pp = PowerProx(3, MetricSpace.euclidean(5))
    term = make_term(kind, **kwargs)
    for _ in range(20):
        x0 = np.abs(rng.standard_normal(5))
        state = EstimatingState(power=pp, x0=x0)
        a1, a2 = rng.uniform(0.2, 1.5, size=2)
        estimating_update(state, x0, rng.standard_normal(5), 1.0, a1)
        estimating_update(state, x0, rng.standard_normal(5), 1.0, a2)
        v = psi_argmin(state, term, pp)
        assert term.contains(v)
        r = np.linalg.norm(v - x0)
        g = -(state.s + r ** 2 * (v - x0)) / state.a_total
        assert term.subgradient_distance(v, g) <= 1e-7
        # argmin property against random competitors
        base = state.value(v, term)
        for _ in range(40):
            w = term.project(v + 0.3 * rng.standard_normal(5))
            assert state.value(w, term) >= base - 1e-9


def test_psi_argmin_needs_identity_metric_with_term():
    metric = MetricSpace(3, weights=[1.0, 2.0, 3.0])
    pp = PowerProx(3, metric)
    state = EstimatingState(power=pp, x0=np.ones(3))
    estimating_update(state, np.ones(3), np.ones(3), 0.0, 1.0)
    with pytest.raises(CapabilityError):
        psi_argmin(state, make_term("l1", lam=1.0), pp)


def test_bound_evaluator_values():
    cfg = ProxConfig(p=3, h=72.0, beta=1.0 / 3.0)
    assert bound_evaluator("plain", cfg, 2.0, 16.0, 0) == np.inf
    np.testing.assert_allclose(bound_evaluator("plain", cfg, 2.0, 16.0, 8), 872.0)
    np.testing.assert_allclose(bound_evaluator("accelerated", cfg, 2.0, 16.0, 8), 216.0)
    # decay orders: k^-p and k^-(p+1)
    np.testing.assert_allclose(
        bound_evaluator("plain", cfg, 2.0, 16.0, 16), 872.0 / 8.0, rtol=1e-14
    )
    np.testing.assert_allclose(
        bound_evaluator("bilevel", cfg, 2.0, 16.0, 16), 216.0 / 16.0, rtol=1e-14
    )
    with pytest.raises(ParameterError):
        bound_evaluator("steepest", cfg, 2.0, 16.0, 8)


def test_ihopp_run_descent_and_bound():
    prob = get_problem("quartic-abs-1d")
    cfg = ProxConfig(p=3, h=bilevel_h(3, prob.m_next(3)), beta=1.0 / 3.0)
    provider = exact_prox_provider(prob.oracle, prob.term, cfg)
    trace = ihopp_run(prob, cfg, provider, eps=-1.0, max_k=25)
    assert trace.status == "max_iter"
    f = trace.column("F")
    assert np.all(np.diff(f) <= 1e-12)
    gaps, bounds = trace.column("gap"), trace.column("bound_rhs")
    assert np.all(gaps[1:] <= bounds[1:] + 1e-8)
    assert len(trace.points) == len(trace.rows) == 26
    assert len(trace.certificates) == 25
    for cert in trace.certificates:
        assert cert.accepted

    quick = ihopp_run(prob, cfg, provider, eps=1e-6, max_k=200)
    assert quick.status == "converged"
    assert quick.rows[-1].gap <= 1e-6


def test_ihopp_rhs_tol_exit():
    prob = get_problem("quartic-abs-1d")
    cfg = ProxConfig(p=3, h=72.0, beta=1.0 / 3.0)
    provider = exact_prox_provider(prob.oracle, prob.term, cfg)
    trace = ihopp_run(prob, cfg, provider, eps=-1.0, max_k=200, rhs_tol=1e-4)
    assert trace.status == "converged"
    assert trace.rows[-1].cert_rhs <= 1e-4


def test_aihopp_invariant_and_distance_control():
    prob = get_problem("quartic-sep-10d")
    m = prob.m_next(3)
    cfg = ProxConfig(p=3, h=bilevel_h(3, m), beta=1.0 / 3.0)
    provider = inner_prox_provider(prob.oracle, prob.term, cfg, m_next=m)
    trace = aihopp_run(prob, cfg, provider, eps=-1.0, max_k=20)
    # key invariant A_k F(x_k) <= min Psi_k
    margins = np.asarray(trace.aux["invariant_margin"], dtype=float)
    assert np.all(margins >= -1e-8)
    # the dual points stay inside an enlarged initial ball
    x_star = np.asarray(prob.x_star, dtype=float)
    x0 = np.asarray(prob.x0, dtype=float)
    lim = 2.0 ** 2 * np.linalg.norm(x0 - x_star) ** 4 / 4.0
    for v in trace.aux["v_points"]:
        assert np.linalg.norm(v - x_star) ** 4 / 4.0 <= lim + 1e-8
    gaps, bounds = trace.column("gap"), trace.column("bound_rhs")
    assert np.all(gaps[1:] <= bounds[1:] + 1e-8)
    assert len(trace.aux["a_coeffs"]) == len(trace.rows)


def test_aihopp_rejects_large_beta():
    prob = get_problem("quartic-sep-10d")
    cfg = ProxConfig(p=3, h=72.0, beta=0.5)
    provider = inner_prox_provider(prob.oracle, prob.term, cfg, m_next=24.0)
    with pytest.raises(ParameterError):
        aihopp_run(prob, cfg, provider)


def test_biopt_run_converges():
    prob = get_problem("neglog-sep")
    trace = biopt_run(prob, 3, eps=1e-6, max_k=100)
    assert trace.status == "converged"
    assert trace.rows[-1].gap <= 1e-6
    assert trace.mode == "bilevel"
    rc = trace.aux["relative_constants"]
    np.testing.assert_allclose((rc.xi, rc.mu, rc.lsmooth), (2.0, 0.5, 1.5), rtol=1e-12)


def test_biopt_rejects_degenerate_high_order_bound():
    # the quartic catalog entry has M_5 = 0, so p = 4 has no bi-level schedule
    prob = get_problem("quartic-1d")
    with pytest.raises(ParameterError):
        biopt_run(prob, 4)


def test_tensor_provider_drives_plain_loop():
    prob = get_problem("quartic-1d")
    provider, cfg = tensor_prox_provider(
        prob.oracle, prob.term, 3, 0.9, 8.0 / 19.0, prob.m_next(3)
    )
    np.testing.assert_allclose((cfg.h,), (76.0,))
    trace = ihopp_run(prob, cfg, provider, eps=1e-8, max_k=400)
    assert trace.status == "converged"
    assert all(r.inner_iters == 1 for r in trace.rows[1:])


def test_outer_trace_csv_and_summary():
    prob = get_problem("quartic-abs-1d")
    cfg = ProxConfig(p=3, h=72.0, beta=1.0 / 3.0)
    provider = exact_prox_provider(prob.oracle, prob.term, cfg)
    t1 = ihopp_run(prob, cfg, provider, eps=-1.0, max_k=12)
    t2 = ihopp_run(prob, cfg, provider, eps=-1.0, max_k=12)
    assert t1.to_csv() == t2.to_csv()
    lines = t1.to_csv().strip().split("\n")
    assert lines[0] == "k,F,gap,bound_rhs,inner_iters,cert_lhs,cert_rhs"
    assert len(lines) == 14
    assert t1.inner_total == 0
    s = t1.summary()
    for key in ("mode", "status", "iterations", "final_gap", "fitted_slope", "p", "h", "beta"):
        assert key in s
    assert s["iterations"] == 12
    # fewer than two usable points inside the fit window gives nan
    assert np.isnan(t1.fitted_slope(50, 100))
