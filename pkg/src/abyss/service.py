"""Mission-control HTTP/WebSocket service over running simulations.

Each mission runs its own engine on a dedicated thread. API handlers never
touch simulation state directly: commands go through a queue and are applied
at tick boundaries (logged as COMMAND_APPLIED), reads see immutable snapshot
frames. Telemetry fan-out drops frames for slow consumers rather than ever
blocking the engine.
"""

from __future__ import annotations

import asyncio
import itertools
import json
import queue
import threading
import time
from importlib import resources

import jsonschema
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .mission.planning import (
    AssignmentError,
    PlanningError,
    assign_transects,
    merge_plans,
    plan_3d_grid,
    plan_belt_transects,
)
from .runner import build_report, build_run
from .scenario import (
    ScenarioError,
    build_areas,
    build_constraints,
    mission_request_to_scenario,
)

AS_FAST_AS_POSSIBLE = "as_fast_as_possible"


def _load_schema(name: str) -> dict:
    ref = resources.files("abyss").joinpath("schemas").joinpath(name)
    return json.loads(ref.read_text(encoding="utf-8"))


MISSION_REQUEST_SCHEMA = _load_schema("mission_request.schema.json")
CONTROL_COMMAND_SCHEMA = _load_schema("control_command.schema.json")


class MissionRuntime:
    """One mission: engine + fleet controller driven by a worker thread."""

    def __init__(self, mission_id: str, request: dict):
        self.id = mission_id
        self.request = request
        self.scenario = mission_request_to_scenario(request)
        self.time_scale = request.get("time_scale", AS_FAST_AS_POSSIBLE)
        self.ctx = build_run(self.scenario)  # raises on planning errors
        if self.ctx.controller is None:
            raise PlanningError("mission request produced no fleet mission")
        self.dt = self.ctx.controller.dt
        self.commands: queue.Queue[dict] = queue.Queue()
        self.subscribers: list[queue.Queue] = []
        self._sub_lock = threading.Lock()
        self.paused = False
        self.terminal = False
        self.report: dict | None = None
        self._published_seq = -1
        self.latest_frame: dict = self._frame()
        self.thread = threading.Thread(target=self._run, name=f"mission-{mission_id}", daemon=True)

    # -- lifecycle -------------------------------------------------------

    def start(self) -> None:
        self.thread.start()

    def _run(self) -> None:
        engine = self.ctx.engine
        controller = self.ctx.controller
        horizon = self.ctx.duration
        while not self.terminal:
            applied = self._apply_commands()
            if self.paused and not applied:
                self._publish(self._frame())
                time.sleep(0.1)
                continue
            if controller.finished or engine.clock >= horizon:
                break
            engine.run_until(min(engine.clock + self.dt, horizon))
            self._publish(self._frame())
            if self.time_scale != AS_FAST_AS_POSSIBLE:
                time.sleep(self.dt / float(self.time_scale))
        self.report = build_report(self.ctx)
        self.terminal = True
        self._publish(self._frame())

    def _apply_commands(self) -> bool:
        applied = False
        while True:
            try:
                command = self.commands.get_nowait()
            except queue.Empty:
                return applied
            self._apply(command)
            applied = True

    def _apply(self, command: dict) -> None:
        engine = self.ctx.engine
        controller = self.ctx.controller
        kind = command["kind"]
        detail: dict = {"kind": kind}
        if kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "abort":
            controller.abort()
        elif kind == "add_constraint":
            constraints = build_constraints({"constraints": [command["constraint"]]})
            removed = controller.apply_constraint(constraints[0])
            detail["removed_strips"] = removed
        elif kind == "retask":
            try:
                detail["strips"] = self._retask(command)
            except (PlanningError, AssignmentError, ScenarioError, ValueError) as exc:
                engine.record("COMMAND_REJECTED", {"kind": kind, "error": str(exc)})
                return
        engine.record("COMMAND_APPLIED", detail)

    def _retask(self, command: dict) -> int:
        controller = self.ctx.controller
        areas = build_areas({"areas": [command["area"]]})
        spacing = command["spacing"]
        plans = []
        for area in areas:
            if command.get("dimensionality") == "grid3d":
                plans.append(
                    plan_3d_grid(area, spacing, command.get("layer_spacing", spacing),
                                 self.ctx.plan.swath_width)
                )
            else:
                plans.append(
                    plan_belt_transects(area, spacing, self.ctx.plan.swath_width)
                )
        plan = merge_plans(plans)
        ids = [a.id for a in controller.fleet]
        assignment = assign_transects(ids, plan, self.ctx.comms_range or 1e9)
        controller.retask(plan, assignment)
        controller.areas = areas
        self.ctx.plan = plan
        return len(plan.strips)

    # -- telemetry ---------------------------------------------------------

    def _frame(self) -> dict:
        snap = self.ctx.controller.snapshot()
        # interleave the SimEvents recorded since the previous frame so
        # clients can react to COMMAND_APPLIED and friends without polling
        log = self.ctx.engine.log
        events = [
            {"seq": ev.seq, "time": ev.time, "kind": ev.kind, "payload": ev.payload}
            for ev in log[self._published_seq + 1 :]
        ]
        if log:
            self._published_seq = log[-1].seq
        return {
            "mission_id": self.id,
            "sim_time": self.ctx.engine.clock,
            "paused": self.paused,
            "terminal": self.terminal,
            "events": events,
            **snap,
        }

    def _publish(self, frame: dict) -> None:
        self.latest_frame = frame
        with self._sub_lock:
            for q in self.subscribers:
                try:
                    q.put_nowait(frame)
                except queue.Full:
                    try:  # drop the oldest frame, keep the stream alive
                        q.get_nowait()
                        q.put_nowait(frame)
                    except (queue.Empty, queue.Full):
                        pass

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=256)
        with self._sub_lock:
            self.subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._sub_lock:
            if q in self.subscribers:
                self.subscribers.remove(q)

    def summary(self) -> dict:
        return {
            "id": self.id,
            "status": "terminated" if self.terminal else ("paused" if self.paused else "running"),
            "sim_time": self.ctx.engine.clock,
            "strips": len(self.ctx.plan.strips),
            "fleet_size": len(self.ctx.controller.fleet),
        }

    def plan_summary(self) -> dict:
        plan = self.ctx.plan
        return {
            "strips": len(plan.strips),
            "spacing": plan.spacing,
            "swath_width": plan.swath_width,
            "dimensionality": plan.dimensionality.value,
            "comms_range": self.ctx.comms_range,
            "depth_layers": sorted({s.z for s in plan.strips}, reverse=True),
            "strip_geometry": [
                {
                    "index": i,
                    "start": [s.waypoints[0].x, s.waypoints[0].y, s.waypoints[0].z],
                    "end": [s.waypoints[-1].x, s.waypoints[-1].y, s.waypoints[-1].z],
                }
                for i, s in enumerate(plan.strips)
            ],
        }


def create_app() -> FastAPI:
    app = FastAPI(title="abyss mission control", version="1.0")
    missions: dict[str, MissionRuntime] = {}
    counter = itertools.count(1)

    def _error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.get("/v1/schemas/mission_request.schema.json")
    def mission_schema():
        return MISSION_REQUEST_SCHEMA

    @app.get("/v1/schemas/control_command.schema.json")
    def command_schema():
        return CONTROL_COMMAND_SCHEMA

    @app.post("/v1/missions", status_code=201)
    async def create_mission(request: dict):
        try:
            jsonschema.validate(request, MISSION_REQUEST_SCHEMA)
        except jsonschema.ValidationError as exc:
            return _error(400, f"invalid mission request: {exc.message}")
        mission_id = f"m{next(counter):04d}"
        try:
            runtime = MissionRuntime(mission_id, request)
        except (ScenarioError, ValueError) as exc:
            return _error(400, str(exc))
        except (PlanningError, AssignmentError) as exc:
            return _error(422, str(exc))
        missions[mission_id] = runtime
        runtime.start()
        return {"id": mission_id, "plan_summary": runtime.plan_summary()}

    @app.get("/v1/missions")
    async def list_missions():
        return {"missions": [m.summary() for m in missions.values()]}

    @app.get("/v1/missions/{mission_id}")
    async def get_mission(mission_id: str):
        runtime = missions.get(mission_id)
        if runtime is None:
            return _error(404, "unknown mission")
        return {**runtime.summary(), "latest_frame": runtime.latest_frame}

    @app.post("/v1/missions/{mission_id}/commands", status_code=202)
    async def post_command(mission_id: str, command: dict):
        runtime = missions.get(mission_id)
        if runtime is None:
            return _error(404, "unknown mission")
        try:
            jsonschema.validate(command, CONTROL_COMMAND_SCHEMA)
        except jsonschema.ValidationError as exc:
            return _error(400, f"invalid command: {exc.message}")
        if runtime.terminal:
            return _error(409, "mission already terminated")
        runtime.commands.put(command)
        return {"accepted": True, "kind": command["kind"]}

    @app.get("/v1/missions/{mission_id}/report")
    async def get_report(mission_id: str):
        runtime = missions.get(mission_id)
        if runtime is None:
            return _error(404, "unknown mission")
        if not runtime.terminal or runtime.report is None:
            return _error(409, "mission still running")
        return runtime.report

    @app.websocket("/v1/missions/{mission_id}/stream")
    async def stream(websocket: WebSocket, mission_id: str):
        runtime = missions.get(mission_id)
        if runtime is None:
            await websocket.close(code=4404, reason="unknown mission")
            return
        await websocket.accept()
        q = runtime.subscribe()
        try:
            snapshot = dict(runtime.latest_frame)
            snapshot["snapshot"] = True
            await websocket.send_json(snapshot)
            if snapshot["terminal"]:
                return
            while True:
                try:
                    frame = q.get_nowait()
                except queue.Empty:
                    await asyncio.sleep(0.02)
                    continue
                await websocket.send_json(frame)
                if frame["terminal"]:
                    break
        except WebSocketDisconnect:
            pass
        finally:
            runtime.unsubscribe(q)
            try:
                await websocket.close()
            except RuntimeError:
                pass

    return app
