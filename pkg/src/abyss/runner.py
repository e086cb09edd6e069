"""Assemble a scenario onto one engine, run it, and produce the run report.

The report is recomputed from controller/session tallies that are themselves
driven by logged events, so report totals always equal event-log tallies.
Replay re-checks a written log line by line: strict JSON round-trip, seq
contiguity, non-decreasing time, and the SHA-256 over canonical lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .comms import Message, Transport
from .core import World
from .engine import SimEngine, SimEvent, log_sha256_of_lines
from .mission.fleet import AuvState, ChargingStation, FleetController
from .mission.planning import (
    AreaSpec,
    AssignmentError,
    PlanningError,
    TransectPlan,
    assign_transects,
    merge_plans,
    plan_3d_grid,
    plan_belt_transects,
)
from .offload import (
    DEFAULT_FRAME_BITS,
    DEFAULT_RESULT_BITS,
    FrameJob,
    OffloadSession,
    compute_stats,
    elect_master,
    session_throughput,
)
from .scenario import (
    ScenarioError,
    build_areas,
    build_condition,
    build_confusion,
    build_constraints,
    build_link,
    build_processing_model,
    build_world,
    validate_scenario,
)

DEFAULT_DURATION = 86_400.0


@dataclass
class RunContext:
    engine: SimEngine
    scenario: dict
    seed: int
    duration: float
    world: World | None = None
    areas: list[AreaSpec] = field(default_factory=list)
    plan: TransectPlan | None = None
    controller: FleetController | None = None
    offload: OffloadSession | None = None
    linkcheck: dict | None = None
    comms_range: float | None = None


def build_run(scenario: dict, seed_override: int | None = None) -> RunContext:
    """Validate and wire a scenario; raises ScenarioError/PlanningError/
    AssignmentError before any event is dispatched."""
    validate_scenario(scenario)
    seed = scenario["seed"] if seed_override is None else seed_override
    engine = SimEngine(seed=seed)
    ctx = RunContext(
        engine=engine,
        scenario=scenario,
        seed=seed,
        duration=scenario.get("duration", DEFAULT_DURATION),
    )
    links_cfg = scenario.get("links", {})
    areas = build_areas(scenario)
    ctx.areas = areas

    if "offload" in scenario:
        cfg = scenario["offload"]
        link = build_link(cfg["link"], links_cfg)
        members = [f"dev{i}" for i in range(cfg["devices"])]
        group = elect_master(members, engine.stream("offload"))
        frames = [
            FrameJob(i, size=cfg.get("frame_bits", float(DEFAULT_FRAME_BITS)))
            for i in range(cfg["frames"])
        ]
        if "distances" in cfg:
            distances: dict | float = {}
            for w in group.workers:
                distances[(group.master, w)] = cfg["distances"]["to_worker"]
                distances[(w, group.master)] = cfg["distances"]["to_master"]
        else:
            distances = cfg.get("distance", 0.05)
        ctx.offload = OffloadSession(
            engine,
            group,
            frames,
            link,
            distances,
            build_processing_model(cfg),
            encased=cfg.get("encased", True),
            submerged=cfg.get("submerged", False),
            stop_and_wait=cfg.get("stop_and_wait", False),
            result_bits=cfg.get("result_bits", float(DEFAULT_RESULT_BITS)),
        )
        ctx.offload.start()

    if "linkcheck" in scenario:
        ctx.linkcheck = _run_linkcheck_setup(ctx, scenario["linkcheck"], links_cfg)

    if areas and "plan" in scenario and "fleet" in scenario:
        _build_mission(ctx, scenario, links_cfg)

    return ctx


def _run_linkcheck_setup(ctx: RunContext, cfg: dict, links_cfg: dict) -> dict:
    link = build_link(cfg["link"], links_cfg)
    n = cfg.get("transmissions", 10_000)
    bits = cfg.get("message_bits", 1024.0)
    engine = ctx.engine
    results = {}
    for d in cfg["distances"]:
        transport = Transport(engine, link)
        delivered = 0
        for i in range(n):
            msg = Message(
                id=f"lc-{d}-{i}", src="probe-tx", dst="probe-rx",
                size=bits, kind="probe", payload={"session": "linkcheck"},
            )
            if transport.transmit(msg, d).delivered:
                delivered += 1
        results[f"{d:.6f}"] = delivered / n
    return {"link": link.name, "transmissions": n, "delivered_fraction": results}


def _build_mission(ctx: RunContext, scenario: dict, links_cfg: dict) -> None:
    engine = ctx.engine
    areas = ctx.areas
    constraints = build_constraints(scenario)
    plan_cfg = scenario["plan"]
    fleet_cfg = scenario["fleet"]
    spacing = plan_cfg["strip_spacing"]
    swath = plan_cfg.get("swath_width")

    plans = []
    for area in areas:
        if plan_cfg["type"] == "grid3d":
            plans.append(
                plan_3d_grid(
                    area, spacing, plan_cfg.get("layer_spacing", spacing),
                    swath or 10.0, constraints,
                )
            )
        else:
            plans.append(plan_belt_transects(area, spacing, swath or 10.0, constraints))
    plan = merge_plans(plans)
    ctx.plan = plan

    link = build_link(fleet_cfg.get("comms_link", "optical"), links_cfg)
    comms_range = link.curve.max_range()
    ctx.comms_range = comms_range

    count = fleet_cfg["count"]
    capacity = fleet_cfg.get("capacity", 144_000.0)
    battery = capacity * fleet_cfg.get("battery_fraction", 1.0)
    ids = [f"auv{i}" for i in range(count)]
    assignment = assign_transects(ids, plan, comms_range)
    stations = [
        ChargingStation(_vec3(s["position"]), s["charge_rate"])
        for s in scenario.get("stations", [])
    ]
    if not stations:
        first = areas[0].polygon[0]
        stations = [ChargingStation(_vec3([first[0], first[1], 0.0]), 50.0)]

    fleet = []
    for auv_id in ids:
        strips = assignment[auv_id]
        if strips:
            start = plan.strips[strips[0]].waypoints[0]
        else:
            start = stations[0].position
        fleet.append(
            AuvState(
                auv_id,
                start,
                speed=fleet_cfg.get("speed", 1.0),
                battery=battery,
                capacity=capacity,
                motion_power=fleet_cfg.get("motion_power", 8.0),
                hotel_power=fleet_cfg.get("hotel_power", 2.0),
            )
        )

    ctx.world = build_world(scenario, areas, engine.stream("worldgen"))
    mission_cfg = scenario.get("mission", {})
    ctx.controller = FleetController(
        engine,
        ctx.world,
        fleet,
        plan,
        assignment,
        stations,
        areas,
        build_condition(scenario.get("world", {})),
        build_confusion(scenario),
        camera_range=fleet_cfg.get("camera_range", 5.0),
        dt=mission_cfg.get("dt", 1.0),
        safety_margin=mission_cfg.get("safety_margin", 0.2),
        return_policy=mission_cfg.get("return_policy", True),
        coverage_cell=mission_cfg.get("coverage_cell", 1.0),
    )
    ctx.controller.start()


def _vec3(xyz):
    from .core import Vec3

    return Vec3(*xyz)


@dataclass
class RunResult:
    report: dict
    log_lines: list[str]
    log_sha256: str
    context: RunContext


def run_context(ctx: RunContext, until: float | None = None) -> RunResult:
    horizon = until if until is not None else ctx.duration
    ctx.engine.run_all(hard_limit=horizon)
    return RunResult(
        report=build_report(ctx),
        log_lines=ctx.engine.log_lines(),
        log_sha256=ctx.engine.log_sha256(),
        context=ctx,
    )


def run_scenario_dict(
    scenario: dict, seed_override: int | None = None, until: float | None = None
) -> RunResult:
    return run_context(build_run(scenario, seed_override), until)


def build_report(ctx: RunContext) -> dict:
    engine = ctx.engine
    by_kind: dict[str, int] = {}
    for ev in engine.log:
        by_kind[ev.kind] = by_kind.get(ev.kind, 0) + 1
    report: dict = {
        "scenario": ctx.scenario.get("name", "unnamed"),
        "seed": ctx.seed,
        "sim_time": engine.clock,
        "events": {"total": len(engine.log), "by_kind": by_kind},
        "log_sha256": engine.log_sha256(),
    }
    if ctx.linkcheck is not None:
        report["linkcheck"] = ctx.linkcheck
    if ctx.offload is not None:
        stats = compute_stats(engine.log, ctx.offload.name)
        report["offload"] = {
            "frames_sent": stats.frames_sent,
            "frames_processed": stats.frames_processed,
            "results_received": stats.results_received,
            "completion_rate": stats.completion_rate,
            "success_rate": stats.success_rate,
            "throughput_fps": session_throughput(engine.log, ctx.offload.name),
        }
    if ctx.controller is not None:
        controller = ctx.controller
        confusion = {
            f"{true}->{pred}": n
            for (true, pred), n in sorted(controller.confusion_counts.items())
        }
        total_classified = sum(controller.confusion_counts.values())
        correct = sum(
            n for (true, pred), n in controller.confusion_counts.items() if true == pred
        )
        report["mission"] = {
            "strips_planned": len(ctx.plan.strips),
            "strips_completed": len(controller.completed_strips),
            "coverage": {
                "overall": controller.coverage(),
                "per_area": [controller.grid.fraction(a) for a in controller.areas],
            },
            "detections": {
                "total": sum(controller.detections_by_material.values()),
                "by_material": dict(controller.detections_by_material),
            },
            "classifications": {
                "total": total_classified,
                "correct": correct,
                "correct_fraction": (correct / total_classified) if total_classified else 0.0,
                "confusion": confusion,
            },
            "energy": controller.energy_summary(),
            "comms_range": ctx.comms_range,
        }
    return report


# -- replay -------------------------------------------------------------------


@dataclass
class ReplayResult:
    ok: bool
    problems: list[str]
    events: int
    log_sha256: str | None = None
    by_kind: dict[str, int] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "PASS" if self.ok else "FAIL"


def replay_lines(lines: list[str], expected_sha256: str | None = None) -> ReplayResult:
    problems: list[str] = []
    by_kind: dict[str, int] = {}
    prev_seq = None
    prev_time = None
    clean_lines: list[str] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append(f"line {lineno}: corrupt JSON ({exc.msg})")
            continue
        if list(data.keys()) != ["seq", "time", "kind", "payload"]:
            problems.append(f"line {lineno}: unexpected key set {list(data.keys())}")
            continue
        event = SimEvent(data["seq"], data["time"], data["kind"], data["payload"])
        if event.canonical() != line:
            problems.append(f"line {lineno}: not in canonical form")
            continue
        if prev_seq is not None and event.seq != prev_seq + 1:
            problems.append(
                f"line {lineno}: seq gap ({prev_seq} -> {event.seq})"
            )
        if prev_time is not None and event.time < prev_time:
            problems.append(
                f"line {lineno}: time decreased ({prev_time} -> {event.time})"
            )
        prev_seq = event.seq
        prev_time = event.time
        by_kind[event.kind] = by_kind.get(event.kind, 0) + 1
        clean_lines.append(line)
    digest = log_sha256_of_lines(clean_lines) if not problems else None
    if expected_sha256 and digest and digest != expected_sha256:
        problems.append("hash mismatch against recorded digest")
    return ReplayResult(
        ok=not problems,
        problems=problems,
        events=len(clean_lines),
        log_sha256=digest,
        by_kind=by_kind,
    )


def replay_file(path: str, hash_path: str | None = None) -> ReplayResult:
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    expected = None
    if hash_path:
        with open(hash_path, encoding="utf-8") as fh:
            expected = fh.read().split()[0].strip()
    return replay_lines(lines, expected)
