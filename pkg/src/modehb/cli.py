"""Command-line interface: run experiments, report metrics, query oracles.

Exit codes: 0 success, 2 usage/configuration errors (nothing written),
3 runtime evaluation failure (partial outputs removed).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np
from scipy.stats import rankdata

from . import bench, metrics, optimizer
from .errors import EvaluationError, MetricsError, ModehbError
from .de import DEParams
from .scheduler import build_ladder
from .optimizer import StoppingCriteria, tae_budget

logger = logging.getLogger(__name__)

OPTIMIZER_NAMES = ("modehb_nsga2", "modehb_epsnet", "random_search")

TIME_GRID_POINTS = 100

FLOAT_FMT = "%.17g"

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["benchmark", "optimizers", "ladder", "seeds", "output_dir"],
    "additionalProperties": False,
    "properties": {
        "benchmark": {
            "type": "object",
            "required": ["name"],
            "properties": {"name": {"type": "string"}},
        },
        "optimizers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {
                    "name": {"enum": list(OPTIMIZER_NAMES)},
                    "scaling_factor": {
                        "type": "number",
                        "exclusiveMinimum": 0,
                        "maximum": 2,
                    },
                    "crossover_prob": {
                        "type": "number",
                        "exclusiveMinimum": 0,
                        "maximum": 1,
                    },
                },
            },
        },
        "ladder": {
            "type": "object",
            "required": ["b_min", "b_max", "eta"],
            "additionalProperties": False,
            "properties": {
                "b_min": {"type": "number", "exclusiveMinimum": 0},
                "b_max": {"type": "number", "exclusiveMinimum": 0},
                "eta": {"type": "integer", "minimum": 2},
            },
        },
        "seeds": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"type": "integer", "minimum": 0},
        },
        "stop": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_tae": {"type": ["integer", "null"], "minimum": 1},
                "max_wallclock": {"type": ["number", "null"], "exclusiveMinimum": 0},
            },
        },
        "output_dir": {"type": "string"},
    },
}


class _UsageError(Exception):
    """Configuration or request problem; maps to exit code 2."""


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"{path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise _UsageError(f"{path}: {exc.json_path}: {exc.message}") from exc
    names = [o["name"] for o in config["optimizers"]]
    if len(set(names)) != len(names):
        raise _UsageError(f"{path}: $.optimizers: duplicate optimizer names")
    return config


def _resolve(config: dict):
    """Materialize ladder, benchmark and stopping criteria from a config."""
    ladder_cfg = config["ladder"]
    try:
        ladder = build_ladder(ladder_cfg["b_min"], ladder_cfg["b_max"], ladder_cfg["eta"])
        params = {k: v for k, v in config["benchmark"].items() if k != "name"}
        benchmark = bench.make_benchmark(config["benchmark"]["name"], ladder, **params)
    except ModehbError as exc:
        raise _UsageError(str(exc)) from exc
    stop_cfg = dict(config.get("stop", {}))
    if stop_cfg.get("max_tae") is None:
        stop_cfg["max_tae"] = tae_budget(len(benchmark.space))
    stop = StoppingCriteria(
        max_tae=stop_cfg["max_tae"], max_wallclock=stop_cfg.get("max_wallclock")
    )
    resolved = dict(config)
    resolved["stop"] = {
        "max_tae": stop.max_tae,
        "max_wallclock": stop.max_wallclock,
    }
    return ladder, benchmark, stop, resolved


def _execute_run(config: dict, opt_entry: dict, seed: int) -> metrics.RunTrajectory:
    """Execute one (optimizer, seed) pair; safe to call in a worker process."""
    ladder, benchmark, stop, _ = _resolve(config)
    name = opt_entry["name"]
    if name == "random_search":
        return optimizer.run_random_search(
            benchmark.space,
            ladder,
            benchmark.evaluate,
            stop,
            seed,
            benchmark_name=benchmark.name,
        )
    de_params = DEParams(
        scaling_factor=opt_entry.get("scaling_factor", 0.5),
        crossover_prob=opt_entry.get("crossover_prob", 0.5),
    )
    return optimizer.run(
        benchmark.space,
        ladder,
        name.removeprefix("modehb_"),
        benchmark.evaluate,
        stop,
        seed,
        objective_bounds=benchmark.objective_bounds,
        de_params=de_params,
        benchmark_name=benchmark.name,
    )


def _worker(args):
    config, opt_entry, seed = args
    return _execute_run(config, opt_entry, seed)


def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def write_archive_csv(path: Path, run: metrics.RunTrajectory):
    """Archive CSV with lossless (17 significant digit) float formatting."""
    n_obj = len(run.records[0].objectives) if run.records else 2
    d = len(run.records[0].genotype) if run.records else 0
    header = (
        ["seq", "fidelity", "cost_seconds", "cumulative_cost"]
        + [f"objective_{i + 1}" for i in range(n_obj)]
        + [f"genotype_{i + 1}" for i in range(d)]
    )
    cumulative = 0.0
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in run.records:
            cumulative += rec.cost
            writer.writerow(
                [str(rec.seq), _fmt(rec.fidelity), _fmt(rec.cost), _fmt(cumulative)]
                + [_fmt(v) for v in rec.objectives]
                + [_fmt(v) for v in rec.genotype]
            )


def read_archive_csv(path: Path, metadata: metrics.RunMetadata) -> metrics.RunTrajectory:
    """Inverse of write_archive_csv."""
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_obj = sum(1 for c in header if c.startswith("objective_"))
        for row in reader:
            records.append(
                optimizer.EvaluationRecord(
                    seq=int(row[0]),
                    fidelity=float(row[1]),
                    cost=float(row[2]),
                    objectives=np.array([float(v) for v in row[4 : 4 + n_obj]]),
                    genotype=np.array([float(v) for v in row[4 + n_obj :]]),
                )
            )
    return metrics.RunTrajectory(records=tuple(records), metadata=metadata)


def _run_filenames(opt_name: str, seed: int) -> tuple[str, str]:
    return f"{opt_name}_seed{seed}_archive.csv", f"{opt_name}_seed{seed}_metrics.json"


def cmd_run(config_path: str, workers: int = 1) -> int:
    config = _load_config(config_path)
    ladder, benchmark, stop, resolved = _resolve(config)
    jobs = [
        (opt_entry, seed)
        for opt_entry in config["optimizers"]
        for seed in config["seeds"]
    ]
    out_dir = Path(config["output_dir"])
    created_dir = not out_dir.exists()
    created_files: list[Path] = []
    try:
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(_worker, [(config, o, s) for o, s in jobs])
                )
        else:
            results = [_execute_run(config, o, s) for o, s in jobs]

        out_dir.mkdir(parents=True, exist_ok=True)
        trajectories = dict(zip([(o["name"], s) for o, s in jobs], results))
        bounds = benchmark.objective_bounds
        best = metrics.empirical_best_hv(results, bounds)
        summary: dict = {
            "config": resolved,
            "empirical_best_hv": best,
            "optimizers": {},
            "runs": [],
        }
        for opt_entry in config["optimizers"]:
            name = opt_entry["name"]
            per_seed = {}
            for seed in config["seeds"]:
                run = trajectories[(name, seed)]
                archive_name, metrics_name = _run_filenames(name, seed)
                archive_path = out_dir / archive_name
                write_archive_csv(archive_path, run)
                created_files.append(archive_path)
                series = metrics.hv_trajectory(run, bounds)
                final_hv = float(series.hv[-1]) if len(series.hv) else 0.0
                diff = metrics.log_hv_diff(final_hv, best)
                run_info = {
                    "optimizer": name,
                    "seed": seed,
                    "benchmark": benchmark.name,
                    "ladder": dict(config["ladder"]),
                    "stop_cause": run.metadata.stop_cause,
                    "tae": len(run.records),
                    "cumulative_cost": float(series.cumulative_cost[-1])
                    if len(run.records)
                    else 0.0,
                    "final_hv": final_hv,
                    "final_log_hv_diff": diff,
                }
                metrics_path = out_dir / metrics_name
                metrics_path.write_text(
                    json.dumps(run_info, indent=2) + "\n", encoding="utf-8"
                )
                created_files.append(metrics_path)
                per_seed[str(seed)] = {"final_hv": final_hv, "log_hv_diff": diff}
                summary["runs"].append(
                    {
                        "optimizer": name,
                        "seed": seed,
                        "archive": archive_name,
                        "metrics": metrics_name,
                    }
                )
            diffs = [v["log_hv_diff"] for v in per_seed.values()]
            summary["optimizers"][name] = {
                "log_hv_diff_mean": float(np.mean(diffs)),
                "log_hv_diff_std": float(np.std(diffs)),
                "per_seed": per_seed,
            }
        summary_path = out_dir / "summary.json"
        summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        created_files.append(summary_path)
    except EvaluationError as exc:
        for path in created_files:
            path.unlink(missing_ok=True)
        if created_dir and out_dir.exists() and not any(out_dir.iterdir()):
            out_dir.rmdir()
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def _load_runs(out_dir: Path):
    summary_path = out_dir / "summary.json"
    if not summary_path.exists():
        raise _UsageError(f"{summary_path}: no summary found; run an experiment first")
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    config = summary["config"]
    ladder, benchmark, _, _ = _resolve(config)
    runs = {}
    for entry in summary["runs"]:
        meta = metrics.RunMetadata(
            seed=entry["seed"],
            optimizer=entry["optimizer"],
            benchmark=benchmark.name,
            ladder=ladder,
            stop_cause=None,
        )
        runs[(entry["optimizer"], entry["seed"])] = read_archive_csv(
            out_dir / entry["archive"], meta
        )
    return summary, benchmark, runs


def _hv_at(series: metrics.HVSeries, t: float) -> float:
    idx = int(np.searchsorted(series.cumulative_cost, t, side="right")) - 1
    return float(series.hv[idx]) if idx >= 0 else 0.0


def _write_table(path: Path, header: list[str], rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_report(out_dir: str, attainment: str | None = None) -> int:
    out = Path(out_dir)
    summary, benchmark, runs = _load_runs(out)
    if not runs:
        raise _UsageError(f"{out}: summary lists no runs")
    config = summary["config"]
    opt_names = [o["name"] for o in config["optimizers"]]
    seeds = config["seeds"]
    bounds = benchmark.objective_bounds
    n_runs_per_opt = len(seeds)

    if attainment is None:
        ks = sorted({1, (n_runs_per_opt + 1) // 2, max(n_runs_per_opt - 1, 1)})
    else:
        try:
            ks = [int(part) for part in attainment.split(",") if part.strip()]
        except ValueError as exc:
            raise _UsageError(f"--attainment: {exc}") from exc
        if not ks:
            raise _UsageError("--attainment: no levels given")
    for k in ks:
        if not 1 <= k <= n_runs_per_opt:
            raise _UsageError(
                f"--attainment: k={k} out of range [1, {n_runs_per_opt}]"
            )

    series = {key: metrics.hv_trajectory(run, bounds) for key, run in runs.items()}
    best = float(summary["empirical_best_hv"])
    t_lo = min(float(s.cumulative_cost[0]) for s in series.values())
    t_hi = max(float(s.cumulative_cost[-1]) for s in series.values())
    grid = np.geomspace(t_lo, t_hi, TIME_GRID_POINTS)

    for name in opt_names:
        hv_rows, diff_rows = [], []
        for t in grid:
            hvs = [_hv_at(series[(name, s)], t) for s in seeds]
            hv_rows.append([_fmt(t)] + [_fmt(h) for h in hvs] + [_fmt(np.mean(hvs))])
            diffs = [metrics.log_hv_diff(h, best) for h in hvs]
            diff_rows.append(
                [_fmt(t)] + [_fmt(v) for v in diffs] + [_fmt(np.mean(diffs))]
            )
        header = ["time"] + [f"seed_{s}" for s in seeds] + ["mean"]
        _write_table(out / f"report_hv_{name}.csv", header, hv_rows)
        _write_table(out / f"report_loghvdiff_{name}.csv", header, diff_rows)

        opt_runs = [runs[(name, s)] for s in seeds]
        for k in ks:
            try:
                surface = metrics.attainment_surface(opt_runs, k, bounds)
            except MetricsError as exc:
                raise _UsageError(str(exc)) from exc
            _write_table(
                out / f"report_attainment_{name}_k{k}.csv",
                ["f1", "f2"],
                [[_fmt(p[0]), _fmt(p[1])] for p in surface],
            )

    rank_rows = []
    for t in grid:
        sums = np.zeros(len(opt_names))
        for s in seeds:
            hvs = np.array([_hv_at(series[(name, s)], t) for name in opt_names])
            sums += rankdata(-hvs, method="average")
        rank_rows.append([_fmt(t)] + [_fmt(v) for v in sums / len(seeds)])
    _write_table(out / "report_rank.csv", ["time"] + list(opt_names), rank_rows)
    return 0


def cmd_bench_oracle(
    name: str,
    d: int = 6,
    k: int = 4,
    ladder_spec: str = "1,27,3",
    samples: int = 20001,
) -> int:
    try:
        b_min, b_max, eta = ladder_spec.split(",")
        ladder = build_ladder(float(b_min), float(b_max), int(eta))
        params = {"k": k} if name == "toy_grid" else {"d": d}
        benchmark = bench.make_benchmark(name, ladder, **params)
        true_hv = bench.true_front_hv(benchmark)
    except (ModehbError, ValueError) as exc:
        raise _UsageError(str(exc)) from exc
    print(f"benchmark: {benchmark.name}")
    print(f"objective_bounds: {benchmark.objective_bounds}")
    print(f"true_front_hv: {_fmt(true_hv)}")
    if benchmark.front is not None:
        table = bench.toy_table(k)
        front_set = {tuple(p) for p in benchmark.front}
        print(f"cells: {k * k}")
        print("i,j,f1,f2,on_front")
        for i in range(k):
            for j in range(k):
                f1, f2 = i / (k - 1), table[i, j]
                mark = int((f1, f2) in front_set)
                print(f"{i},{j},{_fmt(f1)},{_fmt(f2)},{mark}")
        print(f"front_size: {len(benchmark.front)}")
    if benchmark.front_curve is not None:
        from .pareto import hypervolume

        dense = benchmark.front_curve(samples)
        sampled = hypervolume(
            metrics.normalize(dense, benchmark.objective_bounds, warn=False),
            np.array([1.0, 1.0]),
        )
        print(f"sampled_front_hv: {_fmt(sampled)} ({samples} points)")
        print(f"abs_error: {_fmt(abs(sampled - true_hv))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modehb",
        description="Multi-objective multi-fidelity optimization experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute every (optimizer, seed) pair")
    p_run.add_argument("config", help="experiment config JSON")
    p_run.add_argument("--workers", type=int, default=1, help="parallel runs")

    p_report = sub.add_parser("report", help="derive metric CSVs from run outputs")
    p_report.add_argument("output_dir", help="directory written by `run`")
    p_report.add_argument(
        "--attainment",
        default=None,
        help="comma-separated attainment levels (default: 1, median, n-1)",
    )

    p_oracle = sub.add_parser("bench-oracle", help="print a benchmark's true front")
    p_oracle.add_argument("name", help="benchmark name")
    p_oracle.add_argument("--d", type=int, default=6, help="dimension (zdt*)")
    p_oracle.add_argument("--k", type=int, default=4, help="grid size (toy_grid)")
    p_oracle.add_argument("--ladder", default="1,27,3", help="b_min,b_max,eta")
    p_oracle.add_argument("--samples", type=int, default=20001)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args.config, workers=args.workers)
        if args.command == "report":
            return cmd_report(args.output_dir, args.attainment)
        return cmd_bench_oracle(
            args.name, d=args.d, k=args.k, ladder_spec=args.ladder, samples=args.samples
        )
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
