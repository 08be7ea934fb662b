"""Command line front end: ``deaorient eval|self-check|bars``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .batch import (
    RunConfig,
    bars_table,
    evaluate_dmus,
    parse_orientation,
    parse_switch,
    parse_zero_policy,
    read_csv,
    report_json,
    report_table,
)
from .core import RTS, DataError, Orientation, ReturnsToScale, SubjectOutsideTechnology, Technology
from .lo import solve_lo
from .lp import LpProblem, solve_lp
from .oracle import MAX_CONSTRAINTS, MAX_VARS, brute_beta, monotonicity_scan
from .projection import is_efficient, is_weakly_efficient
from .qo import QoConsistencyError, fast_path_applies, solve_qo

EXIT_OK, EXIT_DATA, EXIT_SOLVER = 0, 1, 2


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV with header dmu,i:<name>...,o:<name>...")
    p.add_argument("--config", help="JSON run configuration; flags override it")
    p.add_argument("--model", choices=("lo", "qo", "both"))
    p.add_argument("--orient", help="d1,...,dm:d1,...,ds or a file containing it")
    p.add_argument("--rts", help="crs, vrs, nirs, ndrs or grs:L:U")
    p.add_argument("--second-stage", choices=("on", "off"))
    p.add_argument("--zero-output-policy", help="potential, impossible, or per output: y1=impossible,...")
    p.add_argument("--qo-force-bisection", action="store_true", default=None)
    p.add_argument("--round", type=int, help="decimals in the CSV table (default 6)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deaorient", description="Generalized oriented DEA")
    sub = parser.add_subparsers(dest="command", required=True)
    ev = sub.add_parser("eval", help="evaluate every DMU and write reports")
    _add_run_flags(ev)
    ev.add_argument("--out", help="output prefix: writes PREFIX.json and PREFIX.csv")
    sc = sub.add_parser("self-check", help="run the invariant suite on a dataset")
    _add_run_flags(sc)
    sc.add_argument("--samples", type=int, default=50, help="dominated pairs per model")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--corrupt-comparator", action="store_true",
                    help="invert the monotonicity comparator; the check must then fail")
    br = sub.add_parser("bars", help="contraction/dilation bar data")
    _add_run_flags(br)
    br.add_argument("--dmu", action="append", help="restrict to these DMUs (repeatable)")
    br.add_argument("--out", help="write the bar CSV here instead of stdout")
    return parser


def make_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        model=args.model,
        orient=parse_orientation(args.orient) if args.orient else None,
        rts=ReturnsToScale.parse(args.rts) if args.rts else None,
        second_stage=parse_switch(args.second_stage) if args.second_stage else None,
        zero_output_policy=parse_zero_policy(args.zero_output_policy) if args.zero_output_policy else None,
        qo_force_bisection=args.qo_force_bisection,
        round=args.round,
    )


def _print_diagnostics(err: Exception) -> None:
    lines = getattr(err, "diagnostics", None) or [str(err)]
    for line in lines:
        print(f"error: {line}", file=sys.stderr)


def cmd_eval(args) -> int:
    run = evaluate_dmus(read_csv(args.data), make_config(args))
    table = report_table(run, run.config.round)
    if args.out:
        Path(f"{args.out}.json").write_text(report_json(run), encoding="utf-8")
        Path(f"{args.out}.csv").write_text(table, encoding="utf-8")
    else:
        sys.stdout.write(table)
    for entry in run.log.entries():
        print(f"note: {entry}", file=sys.stderr)
    return EXIT_OK


def cmd_bars(args) -> int:
    run = evaluate_dmus(read_csv(args.data), make_config(args))
    if args.dmu:
        wanted = set(args.dmu)
        unknown = wanted - set(run.tech.names)
        if unknown:
            raise DataError(f"unknown DMU(s): {', '.join(sorted(unknown))}")
        run.evaluations = {m: [e for e in evs if e.dmu in wanted] for m, evs in run.evaluations.items()}
    text = bars_table(run, run.config.round)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- self-check -----------------------------------------------------------------


def ccr_input_score(tech: Technology, j: int) -> float:
    """Input-oriented radial score under CRS: ``min t`` with ``X l <= t x_j``, ``Y l >= y_j``."""
    n = tech.n
    x, y = tech.X[:, j], tech.Y[:, j]
    A = np.vstack([
        np.hstack([-x[:, None], tech.X]),
        np.hstack([np.zeros((tech.s, 1)), tech.Y]),
    ])
    rel = ("<=",) * tech.m + (">=",) * tech.s
    b = np.concatenate([np.zeros(tech.m), y])
    c = np.zeros(n + 1)
    c[0] = 1.0
    return float(solve_lp(LpProblem(c, A, rel, b, sense="min")).x[0])


def _within_caps(tech: Technology) -> bool:
    return tech.n <= MAX_VARS and tech.m + tech.s + len(tech.rts.rows(tech.n)) <= MAX_CONSTRAINTS


def self_check(tech: Technology, cfg: RunConfig, *, samples=50, seed=0, corrupt=False):
    """Run the invariant suite; returns a list of ``(name, passed, detail)``."""
    results = []

    def record(name, failures, detail=""):
        results.append((name, not failures, "; ".join(failures[:3]) or detail))

    run = evaluate_dmus(tech, cfg.with_overrides(model="both"))
    tech, d, log = run.tech, cfg.orientation_for(run.tech), run.log
    lo, qo = run.evaluations["lo"], run.evaluations["qo"]

    fails = []
    if _within_caps(tech):
        for el, eq in zip(lo, qo):
            a = el.subject
            for model, ev in (("lo", el), ("qo", eq)):
                exact = float(brute_beta(tech, a, d, model))
                if abs(exact - ev.beta) > 1e-7:
                    fails.append(f"{ev.dmu} {model}: solver {ev.beta:.10g} vs exact {exact:.10g}")
        record("oracle agreement", fails)
    else:
        results.append(("oracle agreement", True, "skipped: instance exceeds the oracle caps"))

    fails = [f"{el.dmu}: beta_Q {eq.beta:.10g} > beta_L {el.beta:.10g}"
             for el, eq in zip(lo, qo) if eq.beta > el.beta + 1e-9]
    d0 = Orientation(d.d_minus, np.zeros_like(d.d_plus)) if np.any(d.d_minus > 0) else None
    if d0 is not None:
        for j in range(tech.n):
            if not np.any(d0.d_minus[tech.X[:, j] > 0] > 0):
                continue
            bl = solve_lo(tech, j, d0, log=log).beta
            bq = solve_qo(tech, j, d0, method="bisection", log=log).beta
            if abs(bl - bq) > 1e-9:
                fails.append(f"{tech.names[j]} with d+=0: {bl:.10g} vs {bq:.10g}")
    record("QO step never exceeds LO step", fails)

    if tech.rts.kind is RTS.CRS and d.is_uniform() and d.d_minus[0] > 0 and d.d_plus[0] > 0:
        fails = []
        for j, (el, eq) in enumerate(zip(lo, qo)):
            if not (np.all(tech.X[:, j] > 0) and np.all(tech.Y[:, j] > 0)):
                continue
            ccr = ccr_input_score(tech, j)
            for ev in (el, eq):
                if abs(ev.rho - ccr) > 1e-6:
                    fails.append(f"{ev.dmu} {ev.model}: rho {ev.rho:.10g} vs radial {ccr:.10g}")
        record("scores equal radial score (CRS, uniform orientation)", fails)
        fails = []
        for j in range(tech.n):
            a = tech.activity(j)
            if not fast_path_applies(tech, a, d):
                continue
            try:
                solve_qo(tech, j, d, cross_check=True, log=log)
            except QoConsistencyError as e:
                fails.append(f"{tech.names[j]}: {e}")
        record("fast path agrees with bisection", fails)

    if tech.rts.kind is RTS.CRS:
        ones = Orientation.uniform(tech.m, tech.s)
        fails = []
        for j in range(tech.n):
            if not (np.all(tech.X[:, j] > 0) and np.all(tech.Y[:, j] > 0)):
                continue
            ev = solve_qo(tech, j, ones, log=log)
            err = np.max(np.abs(np.subtract.outer(ev.phi, 1.0 / ev.theta)))
            if err > 1e-9:
                fails.append(f"{tech.names[j]}: |phi - 1/theta| = {err:.3g}")
        record("dilation mirrors contraction (CRS, unit orientation)", fails)

    fails = []
    for ev in lo + qo:
        if not is_weakly_efficient(tech, ev.target):
            fails.append(f"{ev.dmu} {ev.model}: target not weakly efficient")
        if cfg.second_stage and not is_efficient(tech, ev.projection):
            fails.append(f"{ev.dmu} {ev.model}: projection not efficient")
    record("targets weakly efficient, projections efficient", fails)

    fails = []
    for model in ("lo", "qo"):
        v = monotonicity_scan(tech, d, model, samples=samples, seed=seed, invert=corrupt)
        fails += [f"{model}: {x.quantity} {x.worse_value:.10g} -> {x.better_value:.10g}" for x in v]
    record("monotonicity under domination" + (" (corrupted comparator)" if corrupt else ""), fails,
           f"{samples} pairs per model")
    return results


def cmd_self_check(args) -> int:
    results = self_check(read_csv(args.data), make_config(args), samples=args.samples,
                         seed=args.seed, corrupt=args.corrupt_comparator)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_DATA


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"eval": cmd_eval, "self-check": cmd_self_check, "bars": cmd_bars}[args.command]
    try:
        return handler(args)
    except (DataError, SubjectOutsideTechnology, OSError) as e:
        _print_diagnostics(e)
        return EXIT_DATA
    except (QoConsistencyError, RuntimeError, ArithmeticError) as e:
        print(f"solver failure: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as e:
        _print_diagnostics(e)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
