"""Certified inner loop: Bregman composite gradient steps on the scaling function.

Each step solves

    z+ = argmin_z  <grad f_reg(z_i), z - z_i> + psi(z) + 2 L breg(z_i, z)

whose optimality conditions yield the constructive subgradient

    g = 2 L (grad rho(z_i) - grad rho(z+)) - grad f_reg(z_i)  in  dpsi(z+),

and the loop stops as soon as (z+, g) is acceptable for the proximal
certificate at the anchor. Step subproblems are dispatched to
(a) exact univariate bracketing in dimension 1,
(b) a secular-equation solve for q = 1 (p in {2, 3}), identity metric and
    psi in {zero, ball} (the ball boundary case is a 2x2 Newton system in
    the step radius and the normal-cone multiplier),
(c) a damped proximal Newton method otherwise (coordinate-descent prox of
    the local quadratic for separable psi; KKT Newton for the ball).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .acceptance import check_acceptable
from .bregman import RegularizedObjective, ScalingFunction, bregman_distance
from .errors import CapabilityError, NumericalError, ParameterError
from .univariate import minimize_composite_1d

_RES_TOL = 1e-12
_NEWTON_CAP = 200


@dataclass
class InnerRow:
    i: int
    phi: float
    bregman_step: float
    lhs: float
    rhs: float
    ratio: float


@dataclass
class InnerTrace:
    """Per-step record of one inner run; phi must be nonincreasing."""

    rows: list = field(default_factory=list)
    points: list = field(default_factory=list)
    certificate: object = None
    iterations: int = 0

    COLUMNS = ("i", "phi", "bregman_step", "lhs", "rhs", "ratio")

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self):
        lines = [",".join(self.COLUMNS)]
        for r in self.rows:
            lines.append(
                ",".join(
                    [str(r.i)] + [repr(float(v)) for v in (r.phi, r.bregman_step, r.lhs, r.rhs, r.ratio)]
                )
            )
        return "\n".join(lines) + "\n"


@dataclass
class InnerResult:
    point: np.ndarray
    subgradient: np.ndarray
    certificate: object
    iterations: int
    trace: InnerTrace = None


class StepSolver:
    """One inner step z -> z+, route fixed by (dimension, p, metric, psi)."""

    def __init__(self, sf, reg, term, lsmooth):
        self.sf = sf
        self.reg = reg
        self.term = term
        self.lsmooth = float(lsmooth)
        self.n = len(sf.anchor)
        self.last_multiplier = 0.0
        if self.n == 1:
            self.route = "univariate"
        elif sf.q == 1 and sf.metric.is_identity and term.kind in ("zero", "ball"):
            self.route = "secular"
            lam, vec = np.linalg.eigh(sf.oracle.hessian_matrix(sf.anchor))
            if lam.min() < -1e-9 * max(1.0, abs(lam).max()):
                raise ParameterError("oracle Hessian at the anchor is not PSD")
            self._lam = np.maximum(lam, 0.0)
            self._vec = vec
        elif term.is_separable:
            self.route = "prox_newton"
        elif term.kind == "ball":
            self.route = "ball_kkt"
        else:
            raise CapabilityError("no step solver for term kind %r" % term.kind)

    # -- shared pieces ----------------------------------------------------
    def _smooth(self, ctil):
        two_l = 2.0 * self.lsmooth
        sf = self.sf

        def val(w):
            return two_l * sf.value(w) + float(np.dot(ctil, w))

        def grad(w):
            return two_l * sf.gradient(w) + ctil

        def hess(w):
            return two_l * sf.hessian_matrix(w)

        return val, grad, hess

    def step(self, z):
        z = np.asarray(z, dtype=float)
        c = self.reg.gradient(z)
        two_l = 2.0 * self.lsmooth
        rho_z = self.sf.gradient(z)
        ctil = c - two_l * rho_z
        if self.route == "univariate":
            z_new = self._step_1d(z, ctil)
        elif self.route == "secular":
            z_new = self._step_secular(z, c, rho_z)
        elif self.route == "prox_newton":
            z_new = self._step_prox_newton(z, ctil, c)
        else:
            z_new = self._step_ball_kkt(z, ctil, c)
        g = two_l * (rho_z - self.sf.gradient(z_new)) - c
        dist = self.term.subgradient_distance(z_new, g)
        tol = _RES_TOL * max(1.0, self.sf.metric.dual_norm(c))
        if dist > 100.0 * tol:
            raise NumericalError("inner step residual %.3e" % dist, residual=dist)
        return z_new, g

    # -- route (a): dimension 1 --------------------------------------------
    def _step_1d(self, z, ctil):
        two_l = 2.0 * self.lsmooth

        def deriv(x):
            return two_l * float(self.sf.gradient(np.array([x]))[0]) + float(ctil[0])

        t = minimize_composite_1d(deriv, self.term, float(z[0]))
        return np.array([t])

    # -- route (b): q = 1 secular equation ---------------------------------
    def _resolvent(self, bt, extra):
        """(lam + extra)^{-1} bt in the eigenbasis, guarded against 0."""
        denom = np.maximum(self._lam + extra, 1e-300)
        return bt / denom

    def _secular_radius(self, bt, shift):
        """Solve r = |(lam + shift + H r^{p-1})^{-1} bt|."""
        h, p = self.sf.h, self.sf.p

        def phi(r):
            return float(np.linalg.norm(self._resolvent(bt, shift + h * r ** (p - 1)))) - r

        nb = float(np.linalg.norm(bt))
        if nb == 0.0:
            return 0.0
        r_lo = 1e-18
        if phi(r_lo) <= 0.0:
            return r_lo
        r_hi = max(1.0, nb ** (1.0 / p))
        for _ in range(200):
            if phi(r_hi) < 0.0:
                break
            r_hi *= 2.0
        else:
            raise NumericalError("secular bracketing failed")
        return brentq(phi, r_lo, r_hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)

    def _step_secular(self, z, c, rho_z):
        sf = self.sf
        h, p = sf.h, sf.p
        b = rho_z - c / (2.0 * self.lsmooth)
        bt = self._vec.T @ b
        self.last_multiplier = 0.0
        r = self._secular_radius(bt, 0.0)
        step = self._vec @ self._resolvent(bt, h * r ** (p - 1))
        z_new = sf.anchor + step
        if self.term.kind == "zero" or self.term.contains(z_new, tol=1e-12):
            return z_new
        # boundary case: unknowns (r, av) with av = alpha / (2L) >= 0
        center = self.term.center
        delta = self.term.radius
        st = self._vec.T @ (sf.anchor - center)

        def trial(r, av):
            return self._resolvent(bt - av * st, av + h * r ** (p - 1))

        def residual(r, av):
            ht = trial(r, av)
            return np.array(
                [
                    float(np.linalg.norm(ht)) - r,
                    float(np.linalg.norm(st + ht)) - delta,
                ]
            )

        w = self.term.project(z_new)
        r = max(float(np.linalg.norm(w - sf.anchor)), 1e-8)
        av = 1e-6 * (1.0 + h * r ** (p - 1) + float(self._lam.max()))
        f = residual(r, av)
        for _ in range(_NEWTON_CAP):
            if np.abs(f).max() <= 1e-13 * (1.0 + delta + r):
                break
            jac = np.empty((2, 2))
            er = 1e-7 * max(1.0, r)
            ea = 1e-7 * max(1.0, av)
            jac[:, 0] = (residual(r + er, av) - f) / er
            jac[:, 1] = (residual(r, av + ea) - f) / ea
            try:
                d = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError as exc:
                raise NumericalError("singular Jacobian in ball step") from exc
            t = 1.0
            merit = float(np.dot(f, f))
            for _ in range(60):
                r_t = max(r + t * d[0], 1e-14)
                av_t = max(av + t * d[1], 0.0)
                f_t = residual(r_t, av_t)
                if float(np.dot(f_t, f_t)) <= merit * (1.0 - 1e-4 * t) + 1e-30:
                    r, av, f = r_t, av_t, f_t
                    break
                t *= 0.5
            else:
                raise NumericalError("ball step line search failed", residual=merit)
        else:
            raise NumericalError("ball step did not converge", residual=float(np.abs(f).max()))
        self.last_multiplier = 2.0 * self.lsmooth * av
        return sf.anchor + self._vec @ trial(r, av)

    # -- route (c): damped proximal Newton ----------------------------------
    def _cd_quadratic(self, w, grad, hm, sweeps=400):
        """Coordinate descent on <grad, z-w> + (z-w)'hm(z-w)/2 + psi(z)."""
        z = w.copy()
        hd = np.zeros_like(w)  # hm @ (z - w), maintained incrementally
        for _ in range(sweeps):
            move = 0.0
            for i in range(len(w)):
                quad = hm[i, i]
                lin = grad[i] - quad * w[i] + (hd[i] - quad * (z[i] - w[i]))
                zi = self.term.coordinate_min(i, lin, quad)
                d = zi - z[i]
                if d != 0.0:
                    hd += hm[:, i] * d
                    z[i] = zi
                    move = max(move, abs(d))
            if move <= 1e-14 * (1.0 + float(np.abs(z).max())):
                break
        return z

    def _step_prox_newton(self, z, ctil, c):
        val, grad, hess = self._smooth(ctil)
        term = self.term
        tol = _RES_TOL * max(1.0, self.sf.metric.dual_norm(c))
        w = term.project(z)
        fw = val(w) + term.value(w)
        for _ in range(_NEWTON_CAP):
            gw = grad(w)
            if term.subgradient_distance(w, -gw) <= 0.5 * tol:
                return w
            hm = hess(w)
            nu = 1e-11 * (1.0 + float(np.abs(np.diag(hm)).max()))
            hm = hm + nu * np.eye(self.n)
            cand = self._cd_quadratic(w, gw, hm)
            d = cand - w
            model_drop = -(float(np.dot(gw, d)) + 0.5 * float(d @ hm @ d)
                           + term.value(cand) - term.value(w))
            accepted = False
            t = 1.0
            for _ in range(50):
                wt = w + t * d
                ft = val(wt) + term.value(wt)
                if ft <= fw - 1e-4 * t * max(model_drop, 0.0) and ft <= fw + 1e-15 * abs(fw):
                    if ft < fw or t == 1.0:
                        w, fw = wt, ft
                        accepted = True
                        break
                t *= 0.5
            if not accepted:
                # flat-curvature safeguard: backtracked proximal gradient step
                lip = max(1.0, float(np.abs(np.linalg.eigvalsh(hm)).max()))
                for _ in range(60):
                    wt = term.prox(gw, w, lip)
                    ft = val(wt) + term.value(wt)
                    if ft <= fw + 1e-15 * abs(fw):
                        break
                    lip *= 2.0
                if not ft <= fw + 1e-15 * abs(fw):
                    raise NumericalError("prox-Newton stalled")
                w, fw = wt, ft
        gw = grad(w)
        dist = term.subgradient_distance(w, -gw)
        if dist <= 100.0 * tol:
            return w
        raise NumericalError("prox-Newton cap reached (residual %.3e)" % dist, residual=dist)

    def _step_ball_kkt(self, z, ctil, c):
        val, grad, hess = self._smooth(ctil)
        term = self.term
        tol = _RES_TOL * max(1.0, self.sf.metric.dual_norm(c))
        # unconstrained damped Newton first
        w = z.copy()
        for _ in range(_NEWTON_CAP):
            gw = grad(w)
            if float(np.linalg.norm(gw)) <= 0.5 * tol:
                break
            hm = hess(w) + 1e-11 * np.eye(self.n)
            d = np.linalg.solve(hm, -gw)
            t, fw = 1.0, val(w)
            while t > 1e-14 and val(w + t * d) > fw - 1e-4 * t * float(np.dot(gw, -d)):
                t *= 0.5
            w = w + t * d
        if term.contains(w, tol=1e-12):
            self.last_multiplier = 0.0
            return w
        center, delta = term.center, term.radius
        zb = term.project(w)
        dvec = zb - center
        av = max(1e-8, -float(np.dot(grad(zb), dvec)) / float(np.dot(dvec, dvec)))
        for _ in range(_NEWTON_CAP):
            dvec = zb - center
            big_g = np.concatenate([grad(zb) + av * dvec, [0.5 * (float(np.dot(dvec, dvec)) - delta ** 2)]])
            if float(np.abs(big_g).max()) <= tol:
                break
            hm = hess(zb) + av * np.eye(self.n)
            jac = np.zeros((self.n + 1, self.n + 1))
            jac[: self.n, : self.n] = hm
            jac[: self.n, self.n] = dvec
            jac[self.n, : self.n] = dvec
            try:
                step = np.linalg.solve(jac, -big_g)
            except np.linalg.LinAlgError as exc:
                raise NumericalError("singular KKT system in ball step") from exc
            t = 1.0
            merit = float(np.dot(big_g, big_g))

            def merit_at(t):
                zt = zb + t * step[: self.n]
                at = av + t * step[self.n]
                dt = zt - center
                gt = np.concatenate(
                    [grad(zt) + at * dt, [0.5 * (float(np.dot(dt, dt)) - delta ** 2)]]
                )
                return float(np.dot(gt, gt)), zt, at

            for _ in range(60):
                m_t, z_t, a_t = merit_at(t)
                if m_t <= merit * (1.0 - 1e-4 * t) + 1e-30:
                    zb, av = z_t, a_t
                    break
                t *= 0.5
            else:
                raise NumericalError("ball KKT line search failed", residual=merit)
        if av < -1e-10:
            raise NumericalError("negative multiplier in ball step")
        self.last_multiplier = max(av, 0.0)
        return zb


def _regularized(sf, oracle):
    return RegularizedObjective(oracle, sf.anchor, sf.p, sf.h, sf.metric)


def inner_step(sf, oracle, term, lsmooth, z):
    """Single inner step from z (convenience wrapper used by diagnostics)."""
    solver = StepSolver(sf, _regularized(sf, oracle), term, lsmooth)
    z_new, g = solver.step(np.asarray(z, dtype=float))
    return z_new, g


def ball_inner_step_p3(sf, oracle, center, radius, lsmooth, z):
    """Secular-route step onto the Euclidean ball; returns the new point."""
    from .simple_terms import BallTerm

    if sf.p != 3:
        raise ParameterError("ball step route is parameterized for p = 3")
    term = BallTerm(center=center, radius=radius)
    solver = StepSolver(sf, _regularized(sf, oracle), term, lsmooth)
    z_new, _ = solver.step(np.asarray(z, dtype=float))
    return z_new


def inner_solve(oracle, term, cfg, rc, anchor, max_iter=2000, keep_points=False):
    """Run the inner loop from z0 = anchor until the certificate accepts.

    Returns an InnerResult whose trace rows carry (i, phi, bregman_step,
    lhs, rhs, ratio) per step; row 0 records the starting objective value.
    A composite-stationary anchor terminates at iteration 0.
    """
    if rc.mu <= 0:
        raise ParameterError("relative strong convexity requires xi > 1")
    anchor = np.asarray(anchor, dtype=float)
    if not term.contains(anchor):
        raise ParameterError("inner loop must start inside dom psi")
    sf = ScalingFunction(oracle, anchor, cfg.p, cfg.h, cfg.metric)
    reg = _regularized(sf, oracle)
    solver = StepSolver(sf, reg, term, rc.lsmooth)

    def phi(x):
        return reg.value(x) + term.value(x)

    z = anchor.copy()
    trace = InnerTrace(rows=[InnerRow(0, phi(z), np.nan, np.nan, np.nan, np.nan)])
    if keep_points:
        trace.points.append(z.copy())
    for i in range(1, max_iter + 1):
        z_new, g = solver.step(z)
        cert = check_acceptable(oracle, term, cfg, anchor, z_new, g)
        if cert.rhs > 0:
            ratio = cert.lhs / cert.rhs
        else:
            ratio = 0.0 if cert.accepted else np.inf
        fixed_point = i == 1 and cert.accepted and (
            float(np.abs(z_new - z).max()) <= 1e-14 * (1.0 + float(np.abs(z).max()))
        )
        if not fixed_point:
            trace.rows.append(
                InnerRow(i, phi(z_new), bregman_distance(sf, z, z_new), cert.lhs, cert.rhs, ratio)
            )
        z = z_new
        if keep_points and not fixed_point:
            trace.points.append(z.copy())
        if cert.accepted:
            trace.certificate = cert
            trace.iterations = 0 if fixed_point else i
            return InnerResult(z, g, cert, trace.iterations, trace)
    raise NumericalError(
        "inner loop exceeded %d iterations" % max_iter, residual=trace.rows[-1].ratio
    )
