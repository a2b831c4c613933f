"""Seeded property suites behind the command-line `verify` subcommand.

Each suite samples with a fixed seed, evaluates one family of inequalities
from the certified machinery, and reports the worst violation against its
tolerance. Suites: lemma1, estseq, bregman, sandwich, theta, tensor, all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .acceptance import ProxConfig, certificate_inequalities, check_acceptable, exact_prox_1d
from .bregman import (
    RegularizedObjective,
    ScalingFunction,
    bilevel_h,
    bregman_distance,
    hat_l_sampled,
    relative_constants,
    relative_sandwich_check,
    theta_bound,
)
from .inner import StepSolver, inner_solve
from .outer import (
    EstimatingState,
    aihopp_run,
    coefficients,
    estimating_update,
    exact_prox_provider,
    psi_argmin,
)
from .problems import get_problem
from .tensor_step import (
    TaylorModel,
    convexity_threshold,
    tensor_acceptance_map,
    tensor_criterion,
    tensor_step_1d,
)


@dataclass
class CheckResult:
    suite: str
    name: str
    violation: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.violation <= self.tolerance)

    def line(self):
        flag = "PASS" if self.passed else "FAIL"
        return "%-9s %-40s max violation %10.3e (tol %.1e): %s" % (
            self.suite,
            self.name,
            self.violation,
            self.tolerance,
            flag,
        )


def certificate_violation(cert, cfg):
    """Worst slack-free violation across acceptance and the accepted-pair triple."""
    worst = max(0.0, cert.lhs - (cfg.beta * cert.rhs + 1e-12))
    for _ok, margin in certificate_inequalities(cert, cfg).values():
        worst = max(worst, -margin)
    return worst


# ---------------------------------------------------------------------------
# lemma1: exact and inner-solver certificates pass the accepted-pair triple


def suite_lemma1(seed=0):
    rng = np.random.default_rng(seed)
    results = []
    for name in ("quartic-1d", "quartic-abs-1d", "linear-nonneg-1d"):
        prob = get_problem(name)
        worst = 0.0
        for _ in range(50):
            anchor = prob.term.project(rng.uniform(prob.sample_lo, prob.sample_hi))
            for beta in (0.0, 0.1, 1.0 / 3.0):
                cfg = ProxConfig(3, 2.0, beta)
                t, g = exact_prox_1d(prob.oracle, prob.term, cfg, anchor)
                cert = check_acceptable(prob.oracle, prob.term, cfg, anchor, t, g)
                if not cert.accepted:
                    worst = max(worst, cert.lhs - cfg.beta * cert.rhs)
                worst = max(worst, certificate_violation(cert, cfg))
        results.append(CheckResult("lemma1", name + " exact prox", worst, 1e-10))
    prob = get_problem("quartic-sep-10d")
    m = prob.m_next(3)
    h = bilevel_h(3, m)
    rc = relative_constants(3, h, m)
    worst = 0.0
    for _ in range(5):
        anchor = rng.uniform(prob.sample_lo, prob.sample_hi)
        for beta in (0.1, 1.0 / 3.0):
            cfg = ProxConfig(3, h, beta, metric=prob.metric)
            res = inner_solve(prob.oracle, prob.term, cfg, rc, anchor)
            worst = max(worst, certificate_violation(res.certificate, cfg))
    results.append(CheckResult("lemma1", "quartic-sep-10d inner solve", worst, 1e-10))
    return results


# ---------------------------------------------------------------------------
# estseq: estimating-sequence invariants along an accelerated run


def suite_estseq(seed=0):
    rng = np.random.default_rng(seed)
    prob = get_problem("quartic-abs-1d")
    p, beta, h = 3, 1.0 / 3.0, 3.0
    cfg = ProxConfig(p, h, beta)
    provider = exact_prox_provider(prob.oracle, prob.term, cfg)
    trace = aihopp_run(prob, cfg, provider, eps=-1.0, max_k=50)
    pp = cfg.power(1)
    state = EstimatingState(power=pp, x0=np.asarray(prob.x0, dtype=float))
    sigma_p = 1.0 / (p + 1) * 0.5 ** (p - 1)
    key_worst = 0.0
    sandwich_worst = 0.0
    for k, cert in enumerate(trace.certificates):
        t = np.asarray(cert.point, dtype=float)
        _, a_next = coefficients("accelerated", p, k, beta=beta, h=h)
        estimating_update(state, t, prob.oracle.gradient(t), prob.oracle.value(t), a_next)
        v = psi_argmin(state, prob.term, pp)
        psi_v = state.value(v, prob.term)
        key_worst = max(key_worst, state.a_total * trace.rows[k + 1].f_value - psi_v)
        for x in rng.uniform(-2.0, 2.0, 100):
            xv = np.array([x])
            psi_x = state.value(xv, prob.term)
            upper = state.a_total * prob.objective(xv) + pp.value(xv - state.x0)
            lower = psi_v + sigma_p * abs(x - v[0]) ** (p + 1)
            sandwich_worst = max(sandwich_worst, psi_x - upper, lower - psi_x)
    coeff_worst = 0.0
    c_p = ((1.0 - beta) / h) ** (1.0 / p)
    for k in range(0, 10001, 97):
        a_k, a_next = coefficients("accelerated", p, k, beta=beta, h=h)
        coeff_worst = max(coeff_worst, a_next ** ((p + 1.0) / p) - c_p / 2.0 * (a_k + a_next))
    part3_worst = 0.0
    d_star = pp.value(np.asarray(prob.x0, dtype=float) - prob.x_star)
    for v in trace.aux["v_points"]:
        part3_worst = max(part3_worst, pp.value(v - prob.x_star) - 2.0 ** (p - 1) * d_star)
    return [
        CheckResult("estseq", "key inequality A_k F(x_k) <= Psi_k*", key_worst, 1e-8),
        CheckResult("estseq", "estimating sandwich", sandwich_worst, 1e-8),
        CheckResult("estseq", "coefficient growth", coeff_worst, 1e-12),
        CheckResult("estseq", "minimizer distance bound", part3_worst, 1e-10),
    ]


# ---------------------------------------------------------------------------
# bregman: inner-loop descent, contraction against a reference minimizer,
# residual decay with trace-measured constants, iteration log fit


def suite_bregman(seed=0):
    rng = np.random.default_rng(seed)
    results = []
    prob = get_problem("quartic-sep-10d")
    p = 3
    m = prob.m_next(p)
    h = bilevel_h(p, m)
    anchor = np.asarray(prob.x0, dtype=float)
    sf = ScalingFunction(prob.oracle, anchor, p, h)
    worst = 0.0
    for _ in range(200):
        x = rng.uniform(prob.sample_lo, prob.sample_hi)
        y = rng.uniform(prob.sample_lo, prob.sample_hi)
        z = rng.uniform(prob.sample_lo, prob.sample_hi)
        lhs = bregman_distance(sf, x, z) - bregman_distance(sf, y, z) + bregman_distance(sf, y, x)
        rhs = float(np.dot(sf.gradient(y) - sf.gradient(x), z - x))
        worst = max(worst, abs(lhs - rhs))
        worst = max(worst, -bregman_distance(sf, x, y))
    results.append(CheckResult("bregman", "three-point identity", worst, 1e-10))

    descent_worst = 0.0
    contraction_worst = 0.0
    residual_worst = 0.0
    for name, p_run in (("quartic-sep-10d", 3), ("neglog-sep", 4)):
        pr = get_problem(name)
        m = pr.m_next(p_run)
        h_run = bilevel_h(p_run, m)
        cfg = ProxConfig(p_run, h_run, 1.0 / p_run, metric=pr.metric)
        rc = relative_constants(p_run, h_run, m)
        anchor = pr.term.project(
            np.asarray(pr.x0, dtype=float) + 0.2 * (pr.sample_hi - np.asarray(pr.x0))
        )
        res = inner_solve(pr.oracle, pr.term, cfg, rc, anchor, keep_points=True)
        sf = ScalingFunction(pr.oracle, anchor, p_run, h_run, cfg.metric)
        reg = RegularizedObjective(pr.oracle, anchor, p_run, h_run, cfg.metric)
        rows, pts = res.trace.rows, res.trace.points
        for i in range(1, len(rows)):
            drop = rows[i - 1].phi - rows[i].phi
            descent_worst = max(descent_worst, rc.lsmooth * rows[i].bregman_step - drop)
        z_star = _inner_reference(reg, pr.term, pts[-1])
        phi_star = reg.value(z_star) + pr.term.value(z_star)
        b0 = bregman_distance(sf, pts[0], z_star)
        for i in range(1, len(pts)):
            bound = (1.0 - rc.kappa / 2.0) ** i * b0 + (phi_star - rows[i].phi) / (
                2.0 * rc.lsmooth
            )
            contraction_worst = max(
                contraction_worst, bregman_distance(sf, pts[i], z_star) - bound
            )
        # residual decay with a trace-measured gradient-Lipschitz surrogate
        lip_loc = 0.0
        for i in range(1, len(pts)):
            dz = float(np.linalg.norm(pts[i] - pts[i - 1]))
            if dz > 0:
                dgrad = float(np.linalg.norm(sf.gradient(pts[i]) - sf.gradient(pts[i - 1])))
                lip_loc = max(lip_loc, dgrad / dz)
        sigma = h_run / (p_run + 1.0) * 0.5 ** (p_run - 1)
        if lip_loc > 0:
            c_inst = rc.lsmooth * sigma / (2.0 * rc.lsmooth * lip_loc) ** (p_run + 1)
            for i in range(1, len(pts)):
                gmap = 2.0 * rc.lsmooth * (sf.gradient(pts[i - 1]) - sf.gradient(pts[i]))
                drop = rows[i - 1].phi - rows[i].phi
                residual_worst = max(
                    residual_worst,
                    c_inst * float(np.linalg.norm(gmap)) ** (p_run + 1) - drop,
                )
    results.append(CheckResult("bregman", "inner descent inequality", descent_worst, 1e-10))
    results.append(CheckResult("bregman", "inner contraction", contraction_worst, 1e-8))
    results.append(CheckResult("bregman", "residual decay (measured C)", residual_worst, 1e-10))
    results.append(_iteration_log_fit())
    return results


def _inner_reference(reg, term, start):
    """1e-12-accurate minimizer of f_reg + psi by reference Newton solvers."""
    from .problems import box_newton_reference, newton_reference

    if term.kind == "zero":
        return newton_reference(reg, start)
    if term.kind == "box":
        return box_newton_reference(reg, term.lo, term.hi, start)
    raise ValueError("no reference route for term kind %r" % term.kind)


def _iteration_log_fit():
    """Steps to reach residual eps over decades fit i* <= A + B log(1/eps)."""
    prob = get_problem("quartic-sep-10d")
    m = prob.m_next(3)
    h = bilevel_h(3, m)
    rc = relative_constants(3, h, m)
    anchor = np.asarray(prob.x0, dtype=float) + 0.3
    sf = ScalingFunction(prob.oracle, anchor, 3, h, prob.metric)
    reg = RegularizedObjective(prob.oracle, anchor, 3, h, prob.metric)
    solver = StepSolver(sf, reg, prob.term, rc.lsmooth)
    residuals = []
    z = anchor.copy()
    for _ in range(5000):
        z, g = solver.step(z)
        residuals.append(sf.metric.dual_norm(reg.gradient(z) + g))
        if residuals[-1] <= 1e-9:
            break
    residuals = np.asarray(residuals)
    levels = [10.0 ** (-j) for j in range(2, 9)]
    counts = []
    for eps in levels:
        idx = np.where(residuals <= eps)[0]
        if len(idx) == 0:
            return CheckResult("bregman", "iteration log fit", np.inf, 0.0)
        counts.append(float(idx[0] + 1))
    xs = np.log(1.0 / np.asarray(levels))
    counts = np.asarray(counts)
    slope, intercept = np.polyfit(xs, counts, 1)
    intercept = max(1.0, intercept + float(np.max(counts - (intercept + slope * xs))))
    violation = 0.0 if (slope > 0 and intercept > 0) else np.inf
    return CheckResult("bregman", "iteration log fit", violation, 0.0)


# ---------------------------------------------------------------------------
# sandwich: relative smoothness/strong convexity at xi = 2 (p = 3, where the
# odd Taylor order coincides with p and the bound is tight), plus scaling
# Hessian positivity and the odd-derivative bracket for p in {3, 4, 5}


def _odd_bracket_violation(oracle, metric, y, x, u, p, m, xi=2.0):
    """Signed excess of |sum_k D^{2k+1}f(y)[h]^{2k-1}[u,u]/(2k-1)!| over

    sum_k D^{2k}f(y)[h]^{2k-2}[u,u]/((2k-2)! xi^{p-2k}) + xi m |h|^{p-1}|u|^2/(p-1)!
    """
    h = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    odd = 0.0
    bound = (
        xi * m / math.factorial(p - 1)
        * metric.primal_norm(h) ** (p - 1)
        * metric.primal_norm(u) ** 2
    )
    for k in range(1, p // 2 + 1):
        odd += oracle.tensor_form2(y, h, 2 * k + 1, u) / math.factorial(2 * k - 1)
        bound += oracle.tensor_form2(y, h, 2 * k, u) / (
            math.factorial(2 * k - 2) * xi ** (p - 2 * k)
        )
    return abs(odd) - bound


def suite_sandwich(seed=0, pairs=1000):
    rng = np.random.default_rng(seed)
    results = []
    for name in (
        "quartic-1d",
        "quartic-abs-1d",
        "linear-nonneg-1d",
        "quartic-sep-10d",
        "ball-quadratic",
        "neglog-sep",
        "logistic-sep-3d",
    ):
        prob = get_problem(name)
        m3 = prob.m_next(3)
        if not np.isfinite(m3) or m3 <= 0.0:
            m3 = 1.0  # degenerate true sup (0); any positive bound is valid
        h3 = bilevel_h(3, m3)
        rc = relative_constants(3, h3, m3)
        anchor = prob.sample(rng, 1)[0]
        sf = ScalingFunction(prob.oracle, anchor, 3, h3, prob.metric)
        reg = RegularizedObjective(prob.oracle, anchor, 3, h3, prob.metric)
        value_worst = relative_sandwich_check(
            sf, reg, rc, list(zip(prob.sample(rng, pairs), prob.sample(rng, pairs)))
        )
        hess_worst = 0.0
        xs = prob.sample(rng, pairs)
        us = rng.standard_normal((pairs, prob.dimension))
        us /= np.linalg.norm(us, axis=1)[:, None]
        for x, u in zip(xs, us):
            hr = sf.hessian_form(x, u)
            hf = reg.hessian_form(x, u)
            hess_worst = max(hess_worst, rc.mu * hr - hf, hf - rc.lsmooth * hr)
        results.append(CheckResult("sandwich", name + " values (p=3)", value_worst, 1e-8))
        results.append(CheckResult("sandwich", name + " hessians (p=3)", hess_worst, 1e-8))
        psd_worst = 0.0
        bracket_worst = 0.0
        for p in (3, 4, 5):
            m = prob.m_next(p)  # declared sup, possibly 0 for polynomials
            hp = 6.0 * m / math.factorial(p - 1)
            anchor = prob.sample(rng, 1)[0]
            sfp = ScalingFunction(prob.oracle, anchor, p, hp, prob.metric)
            xs = prob.sample(rng, pairs)
            us = rng.standard_normal((pairs, prob.dimension))
            us /= np.linalg.norm(us, axis=1)[:, None]
            for x, u in zip(xs, us):
                psd_worst = max(psd_worst, -sfp.hessian_form(x, u))
                bracket_worst = max(
                    bracket_worst,
                    _odd_bracket_violation(prob.oracle, sfp.metric, anchor, x, u, p, m),
                )
        results.append(CheckResult("sandwich", name + " rho hessian psd", psd_worst, 1e-10))
        results.append(
            CheckResult("sandwich", name + " odd bracket (p=3,4,5)", bracket_worst, 1e-10)
        )
    return results


# ---------------------------------------------------------------------------
# theta: norm domination of the Bregman distance on a radius-R ball


def suite_theta(seed=0, samples=1000):
    rng = np.random.default_rng(seed)
    results = []
    for name, plist in (("neglog-sep", (3, 4, 5)), ("quartic-sep-10d", (3,))):
        prob = get_problem(name)
        for p in plist:
            m = prob.m_next(p)
            h = bilevel_h(p, m)
            anchor = np.asarray(prob.x0, dtype=float)
            sf = ScalingFunction(prob.oracle, anchor, p, h, prob.metric)
            radius = 0.5
            hat_l = hat_l_sampled(sf, radius, rng)
            theta, _ = theta_bound(p, radius, hat_l, h=h)
            worst = 0.0
            for _ in range(samples):
                dx = rng.standard_normal(prob.dimension)
                dx *= rng.uniform(0.0, radius) / np.linalg.norm(dx)
                dy = rng.standard_normal(prob.dimension)
                dy *= rng.uniform(0.0, radius) / np.linalg.norm(dy)
                x, y = anchor + dx, anchor + dy
                tau = float(np.linalg.norm(x - y))
                worst = max(worst, bregman_distance(sf, x, y) - theta(tau))
            results.append(CheckResult("theta", "%s p=%d R=0.5" % (name, p), worst, 1e-12))
    return results


# ---------------------------------------------------------------------------
# tensor: model convexity and gradient bounds, criterion/acceptance chain


def suite_tensor(seed=0):
    rng = np.random.default_rng(seed)
    results = []
    prob = get_problem("quartic-abs-1d")
    oracle, term = prob.oracle, prob.term
    m4 = 24.0

    # composite model subdifferential is monotone on a grid when M >= p M4
    tm = TaylorModel(oracle, np.array([0.8]), 3, convexity_threshold(3, m4))
    worst = 0.0
    prev_hi = -np.inf
    for t in np.linspace(-2.0, 2.0, 1001):
        gval = float(tm.augmented_gradient(np.array([t]))[0])
        if t > 0:
            lo = hi = gval + 1.0
        elif t < 0:
            lo = hi = gval - 1.0
        else:
            lo, hi = gval - 1.0, gval + 1.0
        worst = max(worst, prev_hi - lo)
        prev_hi = hi
    results.append(CheckResult("tensor", "model subdifferential monotone", worst, 1e-12))

    worst = 0.0
    for _ in range(200):
        x = rng.uniform(-1.5, 1.5, 1)
        y = rng.uniform(-1.5, 1.5, 1)
        tmx = TaylorModel(oracle, x, 3, m4)
        diff = abs(float(oracle.gradient(y)[0]) - float(tmx.taylor_gradient(y)[0]))
        worst = max(worst, diff - m4 / 6.0 * abs(float(y[0] - x[0])) ** 3)
    results.append(CheckResult("tensor", "model gradient bound", worst, 1e-10))

    # criterion region at M = 1.9 M4 is nonempty; the mapped acceptance level
    # beta = (M4 + gamma M)/((1-gamma) M - M4) holds at every passing point
    gamma = 8.0 / 19.0
    anchor = np.array([0.8])
    m_lvl = 1.9 * m4
    h_lvl = m_lvl / 6.0
    beta_lvl = (m4 + gamma * m_lvl) / ((1.0 - gamma) * m_lvl - m4)
    tm_lvl = TaylorModel(oracle, anchor, 3, m_lvl)
    passing = 0
    worst = 0.0
    for t in np.linspace(-1.0, 1.5, 2000):
        point = np.array([t])
        g = term.subgradient_select(point, -tm_lvl.augmented_gradient(point))
        ok, _, _ = tensor_criterion(tm_lvl, term, point, g, gamma)
        if ok:
            passing += 1
            res = float(oracle.gradient(point)[0] + g[0])
            reg = res + h_lvl * abs(t - 0.8) ** 2 * (t - 0.8)
            worst = max(worst, abs(reg) - beta_lvl * abs(res) - 1e-12)
    if passing == 0:
        worst = np.inf
    results.append(
        CheckResult("tensor", "criterion region maps to acceptance", worst, 1e-12)
    )

    # with (M, H) chosen for a target beta, criterion passing implies accepted
    beta = 0.9
    m_map, h_map = tensor_acceptance_map(3, beta, gamma, m4)
    cfg = ProxConfig(3, h_map, beta)
    tm_map = TaylorModel(oracle, anchor, 3, m_map)
    passing = 0
    worst = 0.0
    for t in np.linspace(-1.0, 1.5, 2000):
        point = np.array([t])
        g = term.subgradient_select(point, -tm_map.augmented_gradient(point))
        ok, _, _ = tensor_criterion(tm_map, term, point, g, gamma)
        if ok:
            passing += 1
            cert = check_acceptable(oracle, term, cfg, anchor, point, g)
            if not cert.accepted:
                worst = max(worst, cert.lhs - cfg.beta * cert.rhs)
    if passing == 0:
        worst = np.inf
    results.append(CheckResult("tensor", "target-beta map acceptance", worst, 1e-12))

    t_step, g_step, ok, _, _ = tensor_step_1d(tm_map, term, gamma)
    worst = 0.0 if ok else np.inf
    cert = check_acceptable(oracle, term, cfg, anchor, t_step, g_step)
    if not cert.accepted:
        worst = max(worst, cert.lhs - cfg.beta * cert.rhs)
    results.append(CheckResult("tensor", "exact step criterion + acceptance", worst, 1e-12))
    return results


SUITES = {
    "lemma1": suite_lemma1,
    "estseq": suite_estseq,
    "bregman": suite_bregman,
    "sandwich": suite_sandwich,
    "theta": suite_theta,
    "tensor": suite_tensor,
}


def run_suite(name, seed=0):
    if name == "all":
        out = []
        for key in ("lemma1", "estseq", "bregman", "sandwich", "theta", "tensor"):
            out.extend(SUITES[key](seed))
        return out
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError("unknown suite %r" % (name,)) from None
    return fn(seed)
