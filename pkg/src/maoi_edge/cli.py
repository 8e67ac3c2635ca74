"""Command-line front end: sweeps, convergence grids, oracle validation, trends.

All commands are deterministic for a fixed seed and write data-only CSVs;
a nonzero exit code signals a failed assertion (unbracketed oracle point
or violated trend).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import yaml

from . import baselines, experiments, trends
from .optimizer import ScenarioEvaluator
from .scenario import generate_scenario

log = logging.getLogger("maoi_edge")


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _parse_overrides(pairs: list[str], config_path: str | None) -> dict:
    overrides: dict = {}
    if config_path:
        doc = yaml.safe_load(Path(config_path).read_text())
        if not isinstance(doc, dict):
            raise SystemExit(f"{config_path}: expected a mapping")
        if "devices" in doc:
            raise SystemExit(f"{config_path}: sweeps generate their own device "
                             "populations; provide a 'system' section (plus "
                             "optional 'device', 'psi_range', 'path_loss_exponent')")
        overrides.update(doc.get("system", {}))
        overrides.update(doc.get("device", {}))
        for key in ("psi_range", "path_loss_exponent"):
            if key in doc:
                overrides[key] = doc[key]
    for pair in pairs or []:
        if "=" not in pair:
            raise SystemExit(f"--override needs key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = yaml.safe_load(value)
    return overrides


def _seeds(base: int, count: int) -> tuple[int, ...]:
    return tuple(range(base, base + count))


def cmd_sweep(args: argparse.Namespace) -> int:
    overrides = _parse_overrides(args.override, args.config)
    algorithms = tuple(args.algorithms.split(",")) if args.algorithms \
        else tuple(sorted(baselines.ALGORITHMS))
    spec = experiments.SweepSpec(
        param=args.param, grid=_parse_float_list(args.grid),
        algorithms=algorithms, seeds=_seeds(args.seed, args.seeds),
        base_devices=args.devices, overrides=overrides)
    rows = experiments.run_sweep(spec, workers=args.workers)
    out = Path(args.out)
    experiments.write_results_csv(rows, out / "results.csv")
    experiments.write_aggregate_csv(experiments.aggregate(rows), out / "aggregate.csv")
    log.info("wrote %s and %s", out / "results.csv", out / "aggregate.csv")
    return 0


def cmd_converge_grid(args: argparse.Namespace) -> int:
    overrides = _parse_overrides(args.override, args.config)
    d_grid = _parse_int_list(args.d_grid)
    e_grid = _parse_float_list(args.e_grid)
    cells = experiments.convergence_grid(
        d_grid, e_grid, seeds=_seeds(args.seed, args.seeds),
        algorithm=args.algorithm, overrides=overrides, workers=args.workers)
    out = Path(args.out)
    experiments.write_convergence_grid_csv(d_grid, e_grid, cells,
                                           out / "convergence_grid.csv")
    log.info("wrote %s", out / "convergence_grid.csv")
    return 0


def cmd_validate_oracle(args: argparse.Namespace) -> int:
    rows = experiments.validate_oracle(n_updates=args.updates, seed=args.seed,
                                       z=args.z)
    out = Path(args.out)
    experiments.write_oracle_csv(rows, out / "oracle_validation.csv")
    failures = [r for r in rows if not r["bracketed"]]
    for r in failures:
        print(f"OUTSIDE CI: lambda={r['lambda']} psi={r['psi']} tau={r['tau']} "
              f"t_sys={r['t_sys']} closed={r['closed_form']:.6f} "
              f"ci=[{r['ci_low']:.6f}, {r['ci_high']:.6f}]")
    print(f"oracle validation: {len(rows) - len(failures)}/{len(rows)} points bracketed")
    return 1 if failures else 0


def cmd_assert_trends(args: argparse.Namespace) -> int:
    rows = experiments.read_csv(args.results)
    spec = yaml.safe_load(Path(args.trend_spec).read_text())
    checks = spec.get("checks") if isinstance(spec, dict) else None
    if not checks:
        raise SystemExit(f"{args.trend_spec}: expected a mapping with a 'checks' list")
    report = trends.evaluate_checks(rows, checks)
    text = report.render()
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "trend_report.txt").write_text(text + "\n")
    return 0 if report.passed else 1


def cmd_solve(args: argparse.Namespace) -> int:
    overrides = _parse_overrides(args.override, args.config)
    sc = generate_scenario(args.devices, args.seed, overrides)
    decision, trace = baselines.solve(args.algorithm, list(sc.profiles), sc.config)
    ev = ScenarioEvaluator(sc.profiles, sc.config)
    metrics = ev.achieved_metrics(decision.tau, decision.x)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace.write_csv(out / "trace.csv")
    with open(out / "decision.csv", "w", newline="") as fh:
        fh.write("device,tau,x,mu\n")
        for d in range(len(sc.profiles)):
            fh.write(f"{d},{decision.tau[d]!r},{decision.x[d]},{decision.mu[d]!r}\n")
    print(f"{args.algorithm}: converged={trace.converged} iters={trace.n_iters} "
          f"avg_maoi={metrics['avg_maoi']:.4f} avg_aoi={metrics['avg_aoi']:.4f} "
          f"offloaded={metrics['n_offloaded']}/{len(sc.profiles)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maoi-edge",
        description="Freshness-aware sampling/offloading experiments for "
                    "multimodal edge computing")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="YAML with generator overrides "
                       "(system/device sections)")
        p.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="single override, repeatable")
        p.add_argument("--seed", type=int, default=0, help="base seed")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel solver processes")
        p.add_argument("--out", required=out_required, help="output directory")

    p = sub.add_parser("sweep", help="run a parameter sweep and emit CSVs")
    common(p)
    p.add_argument("--param", required=True, choices=experiments.SWEEP_PARAMS)
    p.add_argument("--grid", required=True, help="comma-separated grid values")
    p.add_argument("--algorithms", help="comma-separated algorithm names "
                   f"(default: all of {','.join(sorted(baselines.ALGORITHMS))})")
    p.add_argument("--seeds", type=int, default=10, help="replications per point")
    p.add_argument("--devices", type=int, default=10,
                   help="device count for non-device-count sweeps")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("converge-grid",
                       help="mean outer iterations over a (D, budget) grid")
    common(p)
    p.add_argument("--d-grid", required=True, help="comma-separated device counts")
    p.add_argument("--e-grid", required=True, help="comma-separated energy budgets")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--algorithm", default="jso", choices=sorted(baselines.ALGORITHMS))
    p.set_defaults(fn=cmd_converge_grid)

    p = sub.add_parser("validate-oracle",
                       help="check the closed-form ages against the Monte-Carlo oracle")
    p.add_argument("--updates", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z", type=float, default=2.576,
                   help="CI half-width in standard errors (default 99%%)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_validate_oracle)

    p = sub.add_parser("assert-trends",
                       help="evaluate a trend spec against an aggregate CSV")
    p.add_argument("--results", required=True, help="aggregate CSV path")
    p.add_argument("--trend-spec", required=True, help="YAML check list")
    p.add_argument("--out", help="directory for trend_report.txt")
    p.set_defaults(fn=cmd_assert_trends)

    p = sub.add_parser("solve", help="solve one generated scenario and dump the trace")
    common(p)
    p.add_argument("--algorithm", default="jso", choices=sorted(baselines.ALGORITHMS))
    p.add_argument("--devices", type=int, default=10)
    p.set_defaults(fn=cmd_solve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
