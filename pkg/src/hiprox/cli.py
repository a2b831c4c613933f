"""Command-line experiment runner.

Subcommands:

    run            execute one solver configuration, write trace artifacts
    verify         run a seeded property suite, print per-check violations
    rates          compare (problem, mode, p) combinations in one table
    list-problems  show the catalog

`run` writes outer.csv, inner_k<k>.csv (when the run used the Bregman inner
loop), summary.json, and scan.csv for the two example modes. Exit codes:
0 converged / clean finish, 1 bad configuration or unknown problem,
2 iteration limit, 3 numerical failure. Identical config and seed produce
byte-identical CSVs (floats are serialized with repr).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .acceptance import ProxConfig, acceptable_interval_1d, check_acceptable
from .bregman import bilevel_h
from .errors import NumericalError, CertificateError
from .outer import (
    aihopp_run,
    biopt_run,
    exact_prox_provider,
    ihopp_run,
    inner_prox_provider,
)
from .problems import get_problem, list_problems
from .tensor_step import TaylorModel, tensor_acceptance_map, tensor_criterion
from .verify import run_suite

_MODES = ("plain", "accelerated", "bilevel", "example1", "example2")


@dataclass
class RunConfig:
    problem: str = "quartic-abs-1d"
    mode: str = "plain"
    p: int = 3
    beta: float = None
    h: float = None
    m: float = None
    eps: float = 1e-8
    max_outer: int = 100
    max_inner: int = 2000
    seed: int = 0
    out: str = None

    def validate(self):
        if self.mode not in _MODES:
            raise ValueError("unknown mode %r (choose from %s)" % (self.mode, ", ".join(_MODES)))
        if self.mode == "bilevel" and self.h is not None:
            raise ValueError("bilevel mode derives H from M; drop the explicit H")
        if self.p < 2:
            raise ValueError("p must be at least 2")
        return self


_CONFIG_FIELDS = set(RunConfig().__dict__)


def load_config(path, overrides):
    """Flat JSON config file plus command-line overrides."""
    data = {}
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - _CONFIG_FIELDS
        if unknown:
            raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**data).validate()


def _json_safe(value):
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _write_json(path, payload):
    payload = {k: _json_safe(v) for k, v in payload.items()}
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _outdir(cfg):
    name = cfg.out or "runs/%s-%s-p%d" % (cfg.problem, cfg.mode, cfg.p)
    out = Path(name)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_trace(cfg, trace, out):
    (out / "outer.csv").write_text(trace.to_csv())
    for k, itrace in enumerate(trace.inner_traces, start=1):
        if itrace is not None:
            (out / ("inner_k%d.csv" % k)).write_text(itrace.to_csv())
    summary = dict(trace.summary())
    summary.update(
        problem=cfg.problem,
        eps=cfg.eps,
        max_outer=cfg.max_outer,
        max_inner=cfg.max_inner,
        seed=cfg.seed,
    )
    _write_json(out / "summary.json", summary)


def _solver_pieces(cfg, prob):
    p = cfg.p
    beta = cfg.beta if cfg.beta is not None else 1.0 / p
    m = cfg.m if cfg.m is not None else prob.m_next(p)
    h = cfg.h
    if h is None:
        h = bilevel_h(p, m) if (np.isfinite(m) and m > 0) else 3.0
    pcfg = ProxConfig(p, h, beta, metric=prob.metric)
    if prob.dimension == 1:
        provider = exact_prox_provider(prob.oracle, prob.term, pcfg)
    else:
        provider = inner_prox_provider(
            prob.oracle, prob.term, pcfg, m_next=m, max_iter=cfg.max_inner
        )
    return pcfg, provider


def run_command(cfg):
    if cfg.mode == "example1":
        return _run_example1(cfg)
    if cfg.mode == "example2":
        return _run_example2(cfg)
    prob = get_problem(cfg.problem)
    if cfg.mode == "bilevel":
        if cfg.m is not None:
            prob.m_override[cfg.p + 1] = float(cfg.m)
        trace = biopt_run(
            prob, cfg.p, eps=cfg.eps, max_k=cfg.max_outer, max_inner=cfg.max_inner
        )
    else:
        pcfg, provider = _solver_pieces(cfg, prob)
        runner = ihopp_run if cfg.mode == "plain" else aihopp_run
        trace = runner(prob, pcfg, provider, eps=cfg.eps, max_k=cfg.max_outer)
    out = _outdir(cfg)
    _write_trace(cfg, trace, out)
    print("%s: status=%s iterations=%d final_gap=%s" % (
        out, trace.status, trace.rows[-1].k, repr(trace.rows[-1].gap)))
    return 0 if trace.status == "converged" else 2


def _run_example1(cfg):
    """Acceptance-region scan for f(x) = x on the nonnegative ray, p = 3."""
    prob = get_problem("linear-nonneg-1d")
    beta = cfg.beta if cfg.beta is not None else 0.85
    h = cfg.h if cfg.h is not None else 1.0
    pcfg = ProxConfig(3, h, beta)
    out = _outdir(cfg)
    anchors = (0.6, 1.4)
    lines = ["anchor,point,subgradient,lhs,rhs,accepted"]
    endpoints = {}
    for anchor in anchors:
        av = np.array([anchor])
        for t in np.arange(0.0, 2.5 + 1e-12, 1e-4):
            point = np.array([t])
            target = -(prob.oracle.gradient(point) + h * abs(t - anchor) ** 2 * (point - av))
            g = prob.term.subgradient_select(point, target)
            cert = check_acceptable(prob.oracle, prob.term, pcfg, av, point, g)
            lines.append(
                "%s,%s,%s,%s,%s,%d"
                % (
                    repr(float(anchor)),
                    repr(float(t)),
                    repr(float(g[0])),
                    repr(cert.lhs),
                    repr(cert.rhs),
                    int(cert.accepted),
                )
            )
        interval = acceptable_interval_1d(pcfg, anchor)
        endpoints["anchor=%s" % repr(float(anchor))] = list(interval) if interval else None
    (out / "scan.csv").write_text("\n".join(lines) + "\n")
    summary = {"mode": "example1", "p": 3, "h": h, "beta": beta, "seed": cfg.seed}
    summary.update(endpoints)
    _write_json(out / "summary.json", summary)
    print("%s: wrote scan.csv (%d rows)" % (out, len(lines) - 1))
    return 0


def _run_example2(cfg):
    """Tensor-step criterion scan for f(x) = x^4 + |x| at x = 0.8, p = 3."""
    prob = get_problem("quartic-abs-1d")
    gamma = 8.0 / 19.0
    beta = cfg.beta if cfg.beta is not None else 0.9
    m4 = cfg.m if cfg.m is not None else 24.0
    m, h = tensor_acceptance_map(3, beta, gamma, m4)
    pcfg = ProxConfig(3, h, beta)
    anchor = np.array([0.8])
    tm = TaylorModel(prob.oracle, anchor, 3, m)
    out = _outdir(cfg)
    lines = ["point,subgradient,crit_lhs,crit_rhs,criterion_ok,cert_lhs,cert_rhs,accepted"]
    n_pass = n_accept = 0
    for t in np.linspace(-1.0, 1.5, 2001):
        point = np.array([t])
        g = prob.term.subgradient_select(point, -tm.augmented_gradient(point))
        ok, lhs, rhs = tensor_criterion(tm, prob.term, point, g, gamma)
        cert = check_acceptable(prob.oracle, prob.term, pcfg, anchor, point, g)
        n_pass += int(ok)
        n_accept += int(ok and cert.accepted)
        lines.append(
            "%s,%s,%s,%s,%d,%s,%s,%d"
            % (
                repr(float(t)),
                repr(float(g[0])),
                repr(float(lhs)),
                repr(float(rhs)),
                int(ok),
                repr(cert.lhs),
                repr(cert.rhs),
                int(cert.accepted),
            )
        )
    (out / "scan.csv").write_text("\n".join(lines) + "\n")
    _write_json(
        out / "summary.json",
        {
            "mode": "example2",
            "p": 3,
            "gamma": gamma,
            "beta": beta,
            "m_scaled": m,
            "h": h,
            "criterion_passing": n_pass,
            "accepted_of_passing": n_accept,
            "seed": cfg.seed,
        },
    )
    print("%s: criterion passes %d points, %d accepted" % (out, n_pass, n_accept))
    return 0


def rates_command(args):
    problems = args.problems.split(",")
    modes = args.modes.split(",")
    ps = [int(s) for s in args.p.split(",")]
    levels = (1e-2, 1e-4, 1e-6)
    header = ["problem", "mode", "p", "it_1e-2", "it_1e-4", "it_1e-6", "slope", "bound_ok"]
    table = [header]
    for name in problems:
        for mode in modes:
            for p in ps:
                table.append(_rate_row(name, mode, p, levels, args.max_outer, args.max_inner))
    widths = [max(len(row[j]) for row in table) for j in range(len(header))]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "rates.csv").write_text("\n".join(",".join(r) for r in table) + "\n")
    return 0


def _rate_row(name, mode, p, levels, max_outer, max_inner):
    prob = get_problem(name)
    if prob.f_star is None:
        return [name, mode, str(p), "N/A", "N/A", "N/A", "N/A", "N/A"]
    cfg = RunConfig(problem=name, mode=mode, p=p, eps=min(levels), max_outer=max_outer,
                    max_inner=max_inner).validate()
    if mode == "bilevel":
        trace = biopt_run(prob, p, eps=cfg.eps, max_k=max_outer, max_inner=max_inner)
    else:
        pcfg, provider = _solver_pieces(cfg, prob)
        runner = ihopp_run if mode == "plain" else aihopp_run
        trace = runner(prob, pcfg, provider, eps=cfg.eps, max_k=max_outer)
    ks = trace.column("k")
    gaps = trace.column("gap")
    bounds = trace.column("bound_rhs")
    cells = [name, mode, str(p)]
    for level in levels:
        hit = ks[(gaps <= level)]
        cells.append(str(int(hit[0])) if hit.size else "-")
    slope = trace.fitted_slope()
    cells.append("%.2f" % slope if np.isfinite(slope) else "-")
    mask = (ks >= 1) & np.isfinite(bounds)
    if mask.any():
        cells.append("yes" if bool(np.all(gaps[mask] <= bounds[mask] + 1e-8)) else "no")
    else:
        cells.append("n/a")
    return cells


def verify_command(args):
    try:
        results = run_suite(args.suite, seed=args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser():
    class Parser(argparse.ArgumentParser):
        def error(self, message):  # keep exit 2 reserved for iteration limits
            self.exit(1, "%s: error: %s\n" % (self.prog, message))

    parser = Parser(prog="hiprox", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one solver configuration")
    p_run.add_argument("--config", help="flat JSON config file")
    p_run.add_argument("--problem")
    p_run.add_argument("--mode", choices=_MODES)
    p_run.add_argument("--p", type=int)
    p_run.add_argument("--beta", type=float)
    p_run.add_argument("--h", type=float)
    p_run.add_argument("--m", type=float)
    p_run.add_argument("--eps", type=float)
    p_run.add_argument("--max-outer", type=int, dest="max_outer")
    p_run.add_argument("--max-inner", type=int, dest="max_inner")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out")
    p_run.add_argument("--print-config", action="store_true")

    p_verify = sub.add_parser("verify", help="run a seeded property suite")
    p_verify.add_argument(
        "suite",
        choices=("lemma1", "estseq", "bregman", "sandwich", "theta", "tensor", "all"),
    )
    p_verify.add_argument("--seed", type=int, default=0)

    p_rates = sub.add_parser("rates", help="compare problems/modes/p in one table")
    p_rates.add_argument("--problems", default="quartic-1d")
    p_rates.add_argument("--modes", default="plain,accelerated")
    p_rates.add_argument("--p", default="3")
    p_rates.add_argument("--max-outer", type=int, default=300, dest="max_outer")
    p_rates.add_argument("--max-inner", type=int, default=2000, dest="max_inner")
    p_rates.add_argument("--out")

    sub.add_parser("list-problems", help="show the catalog")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {
                key: getattr(args, key)
                for key in _CONFIG_FIELDS
                if hasattr(args, key)
            }
            cfg = load_config(args.config, overrides)
            if args.print_config:
                print(json.dumps(asdict(cfg), indent=2, sort_keys=True))
                return 0
            return run_command(cfg)
        if args.command == "verify":
            return verify_command(args)
        if args.command == "rates":
            return rates_command(args)
        for name, description in list_problems():
            print("%-18s %s" % (name, description))
        return 0
    except (NumericalError, CertificateError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3
    except (ValueError, NotImplementedError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
