"""Command-line interface.

Subcommands: simulate, sweep, validate, table1, gatecount.  Exit codes:
0 success, 1 a validation/bound check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .formulas import Implementation, Method, gate_count
from .harness import (
    ConfigError,
    fit_order,
    load_experiment,
    resolve_model,
    run_sweep,
    table1_report,
    validate_all,
)
from .lindblad import GeneratorFormatError
from .linalg import DensityMatrix, devectorize, trace_distance, vectorize
from .norms import generator_stats


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lindsim",
        description="Simulate Markovian open-system dynamics with deterministic and "
                    "randomised product formulas and certify the errors in diamond norm.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single run: final state and distances per method")
    p.add_argument("config", help="experiment config file")

    p = sub.add_parser("sweep", help="run the N/epsilon sweep and write CSV + plot data")
    p.add_argument("config", help="experiment config file")

    p = sub.add_parser("validate", help="run the property suite")
    p.add_argument("suite", nargs="?", default="all",
                   help="all, norms, cptp, identities, bounds, forking or sampling")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default=None, help="also write the report as CSV")

    p = sub.add_parser("table1", help="gate-complexity comparison for given bound scalars")
    p.add_argument("--m", type=int, required=True, help="number of generator terms")
    p.add_argument("--t", type=float, required=True, help="simulation time")
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="max diamond norm of rate-scaled terms")
    p.add_argument("--gamma", type=float, required=True, help="total decay rate")
    p.add_argument("--omega", type=float, required=True,
                   help="max diamond norm of rate-free terms")
    p.add_argument("--eps", type=float, required=True, help="target precision")
    p.add_argument("--conservative-bounds", action="store_true",
                   help="use the larger second-order randomised constant")

    p = sub.add_parser("gatecount", help="simple-channel count of one schedule")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--impl", required=True, choices=[i.value for i in Implementation])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    return parser


def _fmt_state(rho: np.ndarray) -> str:
    rows = []
    for row in rho:
        rows.append("  [" + "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) + "]")
    return "\n".join(rows)


def _cmd_simulate(args) -> int:
    spec = load_experiment(args.config)
    gen = resolve_model(spec)
    stats = generator_stats(gen)
    from .formulas import error_bound, step_count
    from .harness import approximation_step_channel
    from .lindblad import exact_channel, is_cptp

    rho0 = (DensityMatrix.ground(gen.dim) if spec.initial_state == "ground"
            else DensityMatrix.maximally_mixed(gen.dim))
    t_exact = exact_channel(gen, spec.t)
    rho_t = devectorize(t_exact @ vectorize(rho0.matrix))
    print(f"model: {spec.model}   t={spec.t}   M={stats.term_count}")
    print("exact state rho(t):")
    print(_fmt_state(rho_t))
    for method in spec.methods:
        if spec.n_grid:
            n = spec.n_grid[0]
        else:
            n = step_count(method, stats, spec.t, spec.epsilon_grid[0],
                           conservative=spec.conservative).n_steps
        step = approximation_step_channel(method, gen, spec.t, n, stats.total_rate)
        total = np.linalg.matrix_power(step, n)
        rho_approx = devectorize(total @ vectorize(rho0.matrix))
        dist = trace_distance(rho_t, rho_approx)
        bound = error_bound(method, stats, spec.t, n, conservative=spec.conservative)
        physical = "cptp" if is_cptp(total) else "NOT CPTP"
        print(f"{method.value:<8} N={n:<6} trace_dist={dist:.3e} "
              f"bound/2={bound / 2:.3e} [{physical}]")
    return 0


def _cmd_sweep(args) -> int:
    spec = load_experiment(args.config)
    records = run_sweep(spec)
    failures = [r for r in records if r.status != "ok"]
    ok_records = [r for r in records if r.status == "ok"]
    for r in records:
        extra = f" stat_err={r.stat_err:.3e}" if r.stat_err is not None else ""
        print(f"{r.method.value:<8} N={r.n:<6} eps={r.epsilon_empirical:.3e} "
              f"bound={r.epsilon_bound:.3e} gates_cs={r.gates_cs}{extra} [{r.status}]")
    by_method = {}
    for r in ok_records:
        by_method.setdefault(r.method, []).append(r)
    for method, rows in by_method.items():
        if len(rows) >= 3:
            slope = fit_order(rows)[method]
            print(f"order {method.value}: slope {slope:+.3f}")
    print(f"wrote {spec.outputs}/sweep.csv")
    return 1 if failures else 0


def _cmd_validate(args) -> int:
    report = validate_all(seed=args.seed, suite=args.suite)
    print(report.table())
    if args.csv:
        report.write_csv(args.csv)
        print(f"wrote {args.csv}")
    return 0 if report.passed else 1


def _cmd_table1(args) -> int:
    print(table1_report(m=args.m, t=args.t, lam=args.lam, gamma=args.gamma,
                        omega=args.omega, eps=args.eps,
                        conservative=args.conservative_bounds))
    return 0


def _cmd_gatecount(args) -> int:
    count = gate_count(Method(args.method), args.m, args.n, Implementation(args.impl))
    print(count)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "validate": _cmd_validate,
    "table1": _cmd_table1,
    "gatecount": _cmd_gatecount,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, GeneratorFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
