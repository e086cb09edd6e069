"""Command-line entry points: run, replay, bench-sensing, serve.

Exit codes for `run`: 0 success, 2 validation (unreadable/invalid scenario,
infeasible plan), 3 runtime failure. `replay` exits 0 on PASS, 1 on FAIL.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .engine import SimulationError
from .mission.planning import AssignmentError, PlanningError
from .runner import replay_file, run_scenario_dict
from .scenario import ScenarioError, bundled_scenario, bundled_scenario_names, load_scenario
from .sensing.bench import bench_sensing, format_table
from .sensing.traces import GENERATOR_PRESETS

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _load(path_or_name: str) -> dict:
    if Path(path_or_name).exists():
        return load_scenario(path_or_name)
    stem = Path(path_or_name).stem
    if f"{stem}.json" in bundled_scenario_names():
        return bundled_scenario(stem)
    raise ScenarioError(
        f"scenario {path_or_name!r} not found (bundled: {', '.join(bundled_scenario_names())})"
    )


def _flatten(prefix: str, value, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for k in sorted(value, key=str):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(value)))


def _write_outputs(result, out_dir: str, fmt: str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_path = out / "events.ndjson"
    with open(log_path, "w", encoding="utf-8") as fh:
        for line in result.log_lines:
            fh.write(line + "\n")
    (out / "events.sha256").write_text(result.log_sha256 + "\n", encoding="utf-8")
    if fmt == "csv":
        rows: list[tuple[str, str]] = []
        _flatten("", result.report, rows)
        with open(out / "report.csv", "w", encoding="utf-8") as fh:
            fh.write("key,value\n")
            for key, value in rows:
                fh.write(f"{key},{value}\n")
    else:
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(result.report, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_run(args) -> int:
    try:
        scenario = _load(args.scenario)
        result = run_scenario_dict(scenario, seed_override=args.seed, until=args.until)
    except (ScenarioError, PlanningError, AssignmentError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SimulationError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        _write_outputs(result, args.out, args.format)
    except OSError as exc:
        print(f"runtime error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"scenario : {result.report['scenario']}")
    print(f"seed     : {result.report['seed']}")
    print(f"sim time : {result.report['sim_time']:.3f} s")
    print(f"events   : {result.report['events']['total']}")
    print(f"log hash : {result.log_sha256}")
    if "offload" in result.report:
        off = result.report["offload"]
        print(
            f"offload  : completion {off['completion_rate']:.3f} "
            f"success {off['success_rate']:.3f} "
            f"throughput {off['throughput_fps']:.1f} fps"
        )
    if "linkcheck" in result.report:
        for d, frac in result.report["linkcheck"]["delivered_fraction"].items():
            print(f"link     : d={float(d):.3f} m delivered {frac:.4f}")
    if "mission" in result.report:
        m = result.report["mission"]
        print(
            f"mission  : coverage {m['coverage']['overall']:.3f} "
            f"detections {m['detections']['total']} "
            f"correct {m['classifications']['correct_fraction']:.3f}"
        )
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        result = replay_file(args.log, args.hash_file)
    except OSError as exc:
        print(f"FAIL: cannot read log: {exc}", file=sys.stderr)
        return 1
    print(result.verdict)
    for problem in result.problems:
        print(f"  {problem}", file=sys.stderr)
    if result.ok:
        print(f"  events: {result.events}")
        print(f"  sha256: {result.log_sha256}")
    return EXIT_OK if result.ok else 1


def cmd_bench_sensing(args) -> int:
    try:
        config = _load(args.config) if args.config else bundled_scenario("sensing_bench")
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    sensing = config.get("sensing", {})
    preset = sensing.get("generator", {}).get("preset", "reference")
    repetitions = sensing.get("repetitions", 6)
    seed = config.get("seed", 0) if args.seed is None else args.seed
    table = bench_sensing(
        GENERATOR_PRESETS[preset](), repetitions=repetitions, seed=seed
    )
    text = format_table(table)
    print(f"generator: {preset}  repetitions: {repetitions}  seed: {seed}")
    print(text)
    if args.out:
        payload = {
            "generator": preset,
            "repetitions": repetitions,
            "seed": seed,
            "rows": [
                {
                    "subset": row.subset,
                    "knn_accuracy": row.knn_accuracy,
                    "rf_accuracy": row.rf_accuracy,
                    "average": row.average,
                }
                for row in table
            ],
        }
        Path(args.out).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = args.port or int(os.environ.get("ABYSS_PORT", "8080"))
    uvicorn.run(create_app(), host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abyss",
        description="Deterministic AUV survey simulator and mission-control service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headless")
    run.add_argument("--scenario", required=True, help="path or bundled scenario name")
    run.add_argument("--seed", type=int, default=None, help="override scenario seed")
    run.add_argument("--until", type=float, default=None, help="stop at sim time")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--format", choices=["json", "csv"], default="json")
    run.set_defaults(fn=cmd_run)

    replay = sub.add_parser("replay", help="verify a recorded event log")
    replay.add_argument("--log", required=True)
    replay.add_argument("--hash-file", default=None, dest="hash_file")
    replay.set_defaults(fn=cmd_replay)

    bench = sub.add_parser("bench-sensing", help="cross-validated accuracy table")
    bench.add_argument("--config", default=None, help="scenario with a sensing section")
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--out", default=None, help="write the table as JSON")
    bench.set_defaults(fn=cmd_bench_sensing)

    serve = sub.add_parser("serve", help="start the mission-control service")
    serve.add_argument("--port", type=int, default=None, help="default $ABYSS_PORT or 8080")
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
