"""Plain and accelerated inexact proximal-point outer loops.

The plain loop anchors each certified prox step at the current iterate; the
accelerated loop drives an estimating sequence

    Psi_{k+1}(x) = Psi_k(x) + a_{k+1} [f(T_k) + <grad f(T_k), x - T_k> + psi(x)],
    Psi_0(x) = d_{p+1}(x - x_0),

whose minimizer v_k enters the anchor combination
y_k = (A_k/A_{k+1}) x_k + (a_{k+1}/A_{k+1}) v_k. The bi-level entry point
fixes H = 6 M_{p+1} / (p-1)! and beta = 1/p and uses the certified Bregman
inner loop as its acceptable-solution provider. x_{k+1} keeps the previous
iterate whenever the prox output would increase F; the update rule only
requires F(x_{k+1}) <= F(T_k), which both choices satisfy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .acceptance import ProxConfig, check_acceptable, exact_prox_1d
from .bregman import bilevel_h, relative_constants
from .errors import CapabilityError, NumericalError, ParameterError
from .inner import inner_solve
from .metric import PowerProx
from .oracles import psi_prox_euclid
from .tensor_step import TaylorModel, tensor_acceptance_map, tensor_step_1d

_MODES = ("plain", "accelerated", "bilevel")


def coefficients(mode, p, k, beta=None, h=None, m_next=None):
    """(A_k, a_{k+1}) for the accelerated or bi-level coefficient schedule."""
    if k < 0:
        raise ParameterError("k must be nonnegative")

    if mode == "accelerated":
        if beta is None or h is None:
            raise ParameterError("accelerated schedule needs beta and H")
        c_p = ((1.0 - beta) / h) ** (1.0 / p)
        lead = (c_p / 2.0) ** p
    elif mode == "bilevel":
        if m_next is None or not np.isfinite(m_next) or m_next <= 0:
            raise ParameterError("bi-level schedule needs finite M_{p+1} > 0")
        lead = (p - 1) * math.factorial(p - 1) / (3.0 * p * 2 ** (p + 1) * m_next)
    else:
        raise ParameterError("unknown schedule mode %r" % mode)

    def a_of(j):
        return lead * (j / (p + 1.0)) ** (p + 1)

    return a_of(k), a_of(k + 1) - a_of(k)


@dataclass
class EstimatingState:
    """Aggregated form of Psi_k: c + <s, x> + A_k psi(x) + d_{p+1}(x - x0)."""

    power: PowerProx
    x0: np.ndarray
    k: int = 0
    a_total: float = 0.0
    s: np.ndarray = None
    c: float = 0.0

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        if self.s is None:
            self.s = np.zeros_like(self.x0)

    def value(self, x, term):
        x = np.asarray(x, dtype=float)
        return (
            self.c
            + float(np.dot(self.s, x))
            + self.a_total * term.value(x)
            + self.power.value(x - self.x0)
        )


def estimating_update(state, point, grad_at_point, f_at_point, a_next):
    """Fold a_{k+1} [f(T) + <grad f(T), x - T> + psi(x)] into the state."""
    if a_next <= 0:
        raise ParameterError("coefficient increment must be positive")
    point = np.asarray(point, dtype=float)
    state.s = state.s + a_next * np.asarray(grad_at_point, dtype=float)
    state.c += a_next * (float(f_at_point) - float(np.dot(grad_at_point, point)))
    state.a_total += a_next
    state.k += 1
    return state


def psi_argmin(state, term, pp):
    """argmin over x of <s, x> + A_k psi(x) + d_{p+1}(x - x0).

    Scalarized on the step radius: for trial r the candidate solves the
    Euclidean prox with weight tau = r^{p-1} (rescaled by the psi-weight),
    and the radius equation |x(r) - x0| = r is closed by bracketing.
    """
    s, w, x0, p = state.s, state.a_total, state.x0, pp.p
    metric = pp.metric
    sn = metric.dual_norm(s)
    if sn == 0.0:
        return x0.copy()
    if w == 0.0 or term.kind == "zero":
        return x0 - sn ** ((1.0 - p) / p) * metric.apply_inv(s)
    if not metric.is_identity:
        raise CapabilityError("psi_argmin with a nontrivial term needs B = I")

    def candidate(r):
        tau = r ** (p - 1)
        return psi_prox_euclid(term, s / w, x0, tau / w)

    def radius_gap(r):
        return float(np.linalg.norm(candidate(r) - x0)) - r

    r_lo = 1e-12
    if radius_gap(r_lo) <= 0.0:
        return candidate(r_lo)
    r_hi = 2.0 * sn ** (1.0 / p) + 1.0
    for _ in range(60):
        if radius_gap(r_hi) < 0.0:
            break
        r_hi *= 2.0
    else:
        raise NumericalError("radius bracketing failed in psi_argmin")
    r = brentq(radius_gap, r_lo, r_hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
    return candidate(r)


def bound_evaluator(mode, cfg, radius, gap0, k):
    """Right-hand side of the mode's convergence-rate guarantee at step k."""
    if mode not in _MODES:
        raise ParameterError("unknown mode %r" % mode)
    if k <= 0:
        return np.inf
    p, h, beta = cfg.p, cfg.h, cfg.beta
    if mode == "plain":
        lead = 0.5 * (h * radius ** (p + 1) / (1.0 - beta) + gap0)
        return lead * ((2.0 * p + 2.0) / k) ** p
    lead = h / (2.0 * (1.0 - beta)) * radius ** (p + 1) / (p + 1.0)
    return lead * ((2.0 * p + 2.0) / k) ** (p + 1)


@dataclass
class OuterRow:
    k: int
    f_value: float
    gap: float
    bound_rhs: float
    inner_iters: int
    cert_lhs: float
    cert_rhs: float


@dataclass
class OuterTrace:
    mode: str
    rows: list = field(default_factory=list)
    points: list = field(default_factory=list)
    anchors: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    inner_traces: list = field(default_factory=list)
    aux: dict = field(default_factory=dict)
    status: str = "running"

    COLUMNS = ("k", "F", "gap", "bound_rhs", "inner_iters", "cert_lhs", "cert_rhs")

    def column(self, name):
        attr = {"F": "f_value", "bound_rhs": "bound_rhs"}.get(name, name)
        return np.array([getattr(r, attr) for r in self.rows], dtype=float)

    def to_csv(self):
        lines = [",".join(self.COLUMNS)]
        for r in self.rows:
            cells = [str(r.k)]
            cells += [repr(float(v)) for v in (r.f_value, r.gap, r.bound_rhs)]
            cells.append(str(r.inner_iters))
            cells += [repr(float(v)) for v in (r.cert_lhs, r.cert_rhs)]
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    @property
    def inner_total(self):
        return int(sum(r.inner_iters for r in self.rows))

    def fitted_slope(self, k_lo=10, k_hi=100):
        ks = self.column("k")
        gaps = self.column("gap")
        mask = (ks >= k_lo) & (ks <= k_hi) & np.isfinite(gaps) & (gaps > 0)
        if mask.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(ks[mask]), np.log(gaps[mask]), 1)[0])

    def summary(self):
        last = self.rows[-1]
        out = {
            "mode": self.mode,
            "status": self.status,
            "iterations": last.k,
            "inner_total": self.inner_total,
            "final_f": last.f_value,
            "final_gap": last.gap,
            "fitted_slope": self.fitted_slope(),
        }
        out.update(self.aux.get("config", {}))
        return out


def exact_prox_provider(oracle, term, cfg):
    """Acceptable-solution provider backed by the exact 1-D prox solver."""

    def provider(anchor):
        t, g = exact_prox_1d(oracle, term, cfg, anchor)
        cert = check_acceptable(oracle, term, cfg, anchor, t, g)
        if not cert.accepted:
            raise NumericalError("exact prox output failed acceptance")
        return t, g, cert, 0, None

    return provider


def inner_prox_provider(oracle, term, cfg, rc=None, m_next=None, max_iter=2000):
    """Acceptable-solution provider backed by the Bregman inner loop."""
    if rc is None:
        m = m_next if m_next is not None else oracle.m_bound(cfg.p + 1)
        rc = relative_constants(cfg.p, cfg.h, m)

    def provider(anchor):
        res = inner_solve(oracle, term, cfg, rc, anchor, max_iter=max_iter)
        return res.point, res.subgradient, res.certificate, res.iterations, res.trace

    return provider


def tensor_prox_provider(oracle, term, p, beta, gamma, m_next):
    """1-D provider that takes one augmented-model tensor step per anchor.

    Returns (provider, cfg) where cfg carries the (M, H) pair under which a
    criterion-passing tensor step is acceptable at level beta.
    """
    m, h = tensor_acceptance_map(p, beta, gamma, m_next)
    cfg = ProxConfig(p, h, beta)

    def provider(anchor):
        tm = TaylorModel(oracle, anchor, p, m)
        t, g, ok, _, _ = tensor_step_1d(tm, term, gamma)
        if not ok:
            raise NumericalError("tensor step failed its inexactness criterion")
        cert = check_acceptable(oracle, term, cfg, anchor, t, g)
        if not cert.accepted:
            raise NumericalError("tensor step output failed acceptance")
        return t, g, cert, 1, None

    return provider, cfg


def _objective(problem, x):
    return problem.oracle.value(x) + problem.term.value(x)


def _gap(problem, f_value):
    if problem.f_star is None:
        return float("nan")
    return f_value - problem.f_star


def ihopp_run(problem, cfg, provider, eps=0.0, max_k=50, d0=None, rhs_tol=None):
    """Plain loop: anchor at x_k, accept the certified prox point."""
    x = np.asarray(problem.x0, dtype=float).copy()
    f_x = _objective(problem, x)
    gap0 = _gap(problem, f_x)
    if d0 is None:
        d0 = problem.d0
    trace = OuterTrace(mode="plain")
    trace.aux["config"] = {"p": cfg.p, "h": cfg.h, "beta": cfg.beta}
    trace.rows.append(OuterRow(0, f_x, gap0, np.inf, 0, np.nan, np.nan))
    trace.points.append(x.copy())
    for k in range(1, max_k + 1):
        t, g, cert, iters, itrace = provider(x)
        if not cert.accepted:
            raise NumericalError("provider returned a non-accepted certificate")
        x = np.asarray(t, dtype=float)
        f_x = _objective(problem, x)
        gap = _gap(problem, f_x)
        bound = (
            bound_evaluator("plain", cfg, d0, gap0, k) if d0 is not None else np.nan
        )
        trace.rows.append(OuterRow(k, f_x, gap, bound, iters, cert.lhs, cert.rhs))
        trace.points.append(x.copy())
        trace.anchors.append(trace.points[-2])
        trace.certificates.append(cert)
        trace.inner_traces.append(itrace)
        if np.isfinite(gap) and gap <= eps:
            trace.status = "converged"
            return trace
        if rhs_tol is not None and cert.rhs <= rhs_tol:
            trace.status = "converged"
            return trace
    trace.status = "max_iter"
    return trace


def aihopp_run(
    problem,
    cfg,
    provider,
    eps=0.0,
    max_k=50,
    mode="accelerated",
    m_next=None,
    dist0=None,
    rhs_tol=None,
):
    """Accelerated loop with estimating-sequence bookkeeping."""
    if mode not in ("accelerated", "bilevel"):
        raise ParameterError("aihopp mode must be accelerated or bilevel")
    if cfg.beta > 1.0 / cfg.p + 1e-12:
        raise ParameterError("the accelerated analysis requires beta <= 1/p")
    p = cfg.p
    x = np.asarray(problem.x0, dtype=float).copy()
    f_x = _objective(problem, x)
    gap0 = _gap(problem, f_x)
    if dist0 is None and problem.x_star is not None:
        dist0 = cfg.power(len(x)).metric.primal_norm(x - problem.x_star)
    pp = cfg.power(len(x))
    state = EstimatingState(power=pp, x0=x.copy())
    v = x.copy()
    trace = OuterTrace(mode=mode)
    trace.aux["config"] = {"p": p, "h": cfg.h, "beta": cfg.beta}
    trace.aux["a_coeffs"] = [0.0]
    trace.aux["v_points"] = [v.copy()]
    trace.aux["psi_at_v"] = [state.value(v, problem.term)]
    trace.aux["invariant_margin"] = [0.0]
    trace.aux["fallback"] = []
    trace.rows.append(OuterRow(0, f_x, gap0, np.inf, 0, np.nan, np.nan))
    trace.points.append(x.copy())
    for k in range(max_k):
        a_k, a_next = coefficients(mode, p, k, beta=cfg.beta, h=cfg.h, m_next=m_next)
        a_total_next = a_k + a_next
        y = (a_k / a_total_next) * x + (a_next / a_total_next) * v
        t, g, cert, iters, itrace = provider(y)
        if not cert.accepted:
            raise NumericalError("provider returned a non-accepted certificate")
        t = np.asarray(t, dtype=float)
        f_t = _objective(problem, t)
        estimating_update(
            state, t, problem.oracle.gradient(t), problem.oracle.value(t), a_next
        )
        fallback = f_t > f_x
        if not fallback:
            x, f_x = t, f_t
        v = psi_argmin(state, problem.term, pp)
        psi_at_v = state.value(v, problem.term)
        gap = _gap(problem, f_x)
        bound = (
            bound_evaluator(mode, cfg, dist0, gap0, k + 1)
            if dist0 is not None
            else np.nan
        )
        trace.rows.append(OuterRow(k + 1, f_x, gap, bound, iters, cert.lhs, cert.rhs))
        trace.points.append(x.copy())
        trace.anchors.append(y)
        trace.certificates.append(cert)
        trace.inner_traces.append(itrace)
        trace.aux["a_coeffs"].append(a_total_next)
        trace.aux["v_points"].append(v.copy())
        trace.aux["psi_at_v"].append(psi_at_v)
        trace.aux["invariant_margin"].append(psi_at_v - a_total_next * f_x)
        trace.aux["fallback"].append(bool(fallback))
        if np.isfinite(gap) and gap <= eps:
            trace.status = "converged"
            return trace
        if rhs_tol is not None and cert.rhs <= rhs_tol:
            trace.status = "converged"
            return trace
    trace.status = "max_iter"
    return trace


def biopt_run(problem, p, eps=0.0, max_k=50, max_inner=2000, rhs_tol=None):
    """Bi-level run: H = 6 M_{p+1}/(p-1)!, beta = 1/p, Bregman inner loop."""
    m = problem.m_next(p)
    if not np.isfinite(m) or m <= 0:
        raise ParameterError("bi-level mode needs a finite positive M_{p+1}")
    h = bilevel_h(p, m)
    cfg = ProxConfig(p, h, 1.0 / p, metric=problem.metric)
    rc = relative_constants(p, h, m)
    provider = inner_prox_provider(
        problem.oracle, problem.term, cfg, rc=rc, max_iter=max_inner
    )
    trace = aihopp_run(
        problem,
        cfg,
        provider,
        eps=eps,
        max_k=max_k,
        mode="bilevel",
        m_next=m,
        rhs_tol=rhs_tol,
    )
    trace.aux["relative_constants"] = rc
    return trace
