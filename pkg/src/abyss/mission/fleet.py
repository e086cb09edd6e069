"""Fleet execution: kinematics, energy policy, detection, and coverage.

AUVs are stepped once per tick in id order inside the engine's event loop.
The return-trip policy checks before every move whether the vehicle could
still reach the nearest charging station with the safety margin applied; on
a failed check the AUV turns home immediately, which is what keeps the
no-stranding property over randomized missions. Energy defaults give 4 h of
unassisted endurance (144 kJ at 10 W), inside the 1.5-4 h band of small
commercial submersibles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..core import MaterialClass, Vec3, World, distance, lerp
from ..engine import SimEngine, SimEvent
from ..sensing.confusion import ConfusionModel, sample_confusion
from ..sensing.traces import Condition
from .geometry import point_in_polygon, point_segment_distance, polygon_bbox
from .planning import AreaSpec, Constraint, TransectPlan


class AuvStatus(str, Enum):
    SURVEYING = "surveying"
    RETURNING = "returning"
    CHARGING = "charging"
    LOST = "lost"


@dataclass
class AuvState:
    id: str
    position: Vec3
    speed: float = 1.0  # m/s
    battery: float = 144_000.0  # joules
    capacity: float = 144_000.0
    motion_power: float = 8.0  # watts
    hotel_power: float = 2.0
    status: AuvStatus = AuvStatus.SURVEYING
    assignment: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.battery <= self.capacity:
            raise ValueError("battery must lie within [0, capacity]")
        if self.speed <= 0:
            raise ValueError("speed must be positive")

    @property
    def total_power(self) -> float:
        return self.motion_power + self.hotel_power


@dataclass(frozen=True)
class ChargingStation:
    position: Vec3
    charge_rate: float  # watts

    def __post_init__(self):
        if self.charge_rate <= 0:
            raise ValueError("charge_rate must be positive")
        if abs(self.position.z) > 1e-9:
            raise ValueError("charging stations are surface buoys (z = 0)")


def return_trip_feasible(
    auv: AuvState, station: ChargingStation, safety_margin: float = 0.2
) -> bool:
    """True only if the trip cost stays strictly below battery*(1-margin);
    the boundary case turns the vehicle around."""
    travel_s = distance(auv.position, station.position) / auv.speed
    required = travel_s * auv.total_power
    return required < auv.battery * (1.0 - safety_margin)


class CoverageGrid:
    """Covered cells on the surface plane, marked along swept path segments."""

    def __init__(self, cell_size: float = 1.0):
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell_size = cell_size
        self.covered: set[tuple[int, int]] = set()
        self._area_cells: dict[int, list[tuple[int, int]]] = {}

    def _cell_center(self, cell: tuple[int, int]) -> tuple[float, float]:
        return ((cell[0] + 0.5) * self.cell_size, (cell[1] + 0.5) * self.cell_size)

    def mark_segment(self, a: Vec3, b: Vec3, radius: float) -> None:
        lo_x = min(a.x, b.x) - radius
        hi_x = max(a.x, b.x) + radius
        lo_y = min(a.y, b.y) - radius
        hi_y = max(a.y, b.y) + radius
        cs = self.cell_size
        for ix in range(int(math.floor(lo_x / cs)), int(math.floor(hi_x / cs)) + 1):
            for iy in range(int(math.floor(lo_y / cs)), int(math.floor(hi_y / cs)) + 1):
                cell = (ix, iy)
                if cell in self.covered:
                    continue
                center = self._cell_center(cell)
                if point_segment_distance(center, (a.x, a.y), (b.x, b.y)) <= radius:
                    self.covered.add(cell)

    def cells_in_area(self, area: AreaSpec) -> list[tuple[int, int]]:
        key = id(area)
        if key not in self._area_cells:
            x_lo, y_lo, x_hi, y_hi = polygon_bbox(area.polygon)
            cs = self.cell_size
            cells = []
            for ix in range(int(math.floor(x_lo / cs)), int(math.floor(x_hi / cs)) + 1):
                for iy in range(int(math.floor(y_lo / cs)), int(math.floor(y_hi / cs)) + 1):
                    if point_in_polygon(self._cell_center((ix, iy)), area.polygon):
                        cells.append((ix, iy))
            self._area_cells[key] = cells
        return self._area_cells[key]

    def fraction(self, area: AreaSpec) -> float:
        cells = self.cells_in_area(area)
        if not cells:
            return 0.0
        return sum(1 for c in cells if c in self.covered) / len(cells)


def coverage_fraction(grid: CoverageGrid, area: AreaSpec) -> float:
    return grid.fraction(area)


@dataclass
class _AuvRuntime:
    auv: AuvState
    queue: list[tuple[int, Vec3]] = field(default_factory=list)  # (strip, waypoint)
    target_station: ChargingStation | None = None
    consumed: float = 0.0
    recharged: float = 0.0
    aborted: bool = False


class FleetController:
    """Drives a fleet through a transect plan on the simulation engine."""

    TICK = "FLEET_TICK"

    def __init__(
        self,
        engine: SimEngine,
        world: World,
        fleet: list[AuvState],
        plan: TransectPlan,
        assignment: dict[str, list[int]],
        stations: list[ChargingStation],
        areas: list[AreaSpec],
        condition: Condition,
        confusion: ConfusionModel,
        *,
        camera_range: float = 5.0,
        dt: float = 1.0,
        safety_margin: float = 0.2,
        return_policy: bool = True,
        coverage_cell: float = 1.0,
    ):
        if dt <= 0:
            raise ValueError("dt must be positive")
        if not stations:
            raise ValueError("at least one charging station is required")
        self.engine = engine
        self.world = world
        self.plan = plan
        self.stations = stations
        self.areas = areas
        self.condition = condition
        self.confusion = confusion
        self.camera_range = camera_range
        self.swath_radius = plan.swath_width / 2.0
        self.dt = dt
        self.safety_margin = safety_margin
        self.return_policy = return_policy
        self.grid = CoverageGrid(coverage_cell)
        self.detected: set[str] = set()
        self.detections_by_material: dict[str, int] = {m.name: 0 for m in MaterialClass}
        self.confusion_counts: dict[tuple[str, str], int] = {}
        self.completed_strips: set[int] = set()
        self.finished = False
        self._fleet: dict[str, _AuvRuntime] = {}
        for auv in sorted(fleet, key=lambda a: a.id):
            runtime = _AuvRuntime(auv)
            auv.assignment = list(assignment.get(auv.id, []))
            runtime.queue = [
                (s, wp) for s in auv.assignment for wp in self.plan.strips[s].waypoints
            ]
            self._fleet[auv.id] = runtime
        engine.subscribe(self.TICK, self._on_tick)

    @property
    def fleet(self) -> list[AuvState]:
        return [rt.auv for rt in self._fleet.values()]

    def start(self) -> None:
        self.engine.schedule(self.engine.clock, self.TICK)

    def abort(self) -> None:
        for rt in self._fleet.values():
            rt.aborted = True
            rt.queue.clear()
            if rt.auv.status in (AuvStatus.SURVEYING, AuvStatus.RETURNING):
                self._turn_home(rt, reason="abort")

    def apply_constraint(self, constraint: Constraint) -> list[int]:
        """Drop whole unexecuted strips that the new standoff touches."""
        removed: set[int] = set()
        for strip_index, strip in enumerate(self.plan.strips):
            if strip_index in self.completed_strips:
                continue
            if any(constraint.violated_by((wp.x, wp.y)) for wp in strip.waypoints):
                removed.add(strip_index)
        for rt in self._fleet.values():
            rt.queue = [(s, wp) for s, wp in rt.queue if s not in removed]
        return sorted(removed)

    def retask(self, plan: TransectPlan, assignment: dict[str, list[int]]) -> None:
        self.plan = plan
        self.swath_radius = plan.swath_width / 2.0
        self.completed_strips = set()
        for auv_id, rt in self._fleet.items():
            rt.auv.assignment = list(assignment.get(auv_id, []))
            rt.queue = [
                (s, wp) for s in rt.auv.assignment for wp in plan.strips[s].waypoints
            ]
            if rt.auv.status is AuvStatus.RETURNING and rt.queue:
                rt.auv.status = AuvStatus.SURVEYING

    def nearest_station(self, position: Vec3) -> ChargingStation:
        return min(
            self.stations, key=lambda s: (distance(position, s.position), s.position.x)
        )

    # -- per-tick stepping ---------------------------------------------------

    def _on_tick(self, engine: SimEngine, ev: SimEvent) -> None:
        if self.finished:
            return
        for auv_id in sorted(self._fleet):
            self._step_auv(self._fleet[auv_id])
        if self._all_settled():
            self.finished = True
            engine.record("MISSION_COMPLETE", {"time": engine.clock})
            return
        engine.schedule(engine.clock + self.dt, self.TICK)

    def _all_settled(self) -> bool:
        for rt in self._fleet.values():
            if rt.auv.status is AuvStatus.LOST:
                continue
            if rt.auv.status is AuvStatus.CHARGING and not rt.queue:
                continue
            return False
        return True

    def _drain(self, rt: _AuvRuntime, power: float) -> None:
        amount = power * self.dt
        rt.auv.battery = max(0.0, rt.auv.battery - amount)
        rt.consumed += amount

    def _turn_home(self, rt: _AuvRuntime, reason: str) -> None:
        rt.auv.status = AuvStatus.RETURNING
        rt.target_station = self.nearest_station(rt.auv.position)
        self.engine.record(
            "AUV_RETURNING",
            {"auv": rt.auv.id, "reason": reason, "battery": rt.auv.battery},
        )

    def _move_toward(self, rt: _AuvRuntime, target: Vec3) -> bool:
        """Advance up to speed*dt toward target; True when it was reached."""
        auv = rt.auv
        budget = auv.speed * self.dt
        gap = distance(auv.position, target)
        start = auv.position
        if gap <= budget:
            auv.position = target
            reached = True
        else:
            auv.position = lerp(auv.position, target, budget / gap)
            reached = False
        self.grid.mark_segment(start, auv.position, self.swath_radius)
        self._drain(rt, auv.total_power)
        return reached

    def _follow_queue(self, rt: _AuvRuntime) -> None:
        auv = rt.auv
        budget = auv.speed * self.dt
        start = auv.position
        moved = False
        while rt.queue and budget > 1e-12:
            strip_index, wp = rt.queue[0]
            gap = distance(auv.position, wp)
            if gap <= budget:
                auv.position = wp
                budget -= gap
                rt.queue.pop(0)
                moved = True
                if not any(s == strip_index for s, _ in rt.queue):
                    self.completed_strips.add(strip_index)
                    self.engine.record(
                        "STRIP_COMPLETED", {"auv": auv.id, "strip": strip_index}
                    )
            else:
                auv.position = lerp(auv.position, wp, budget / gap)
                budget = 0.0
                moved = True
        self.grid.mark_segment(start, auv.position, self.swath_radius)
        self._drain(rt, auv.total_power if moved else auv.hotel_power)

    def _step_auv(self, rt: _AuvRuntime) -> None:
        auv = rt.auv
        if auv.status is AuvStatus.LOST:
            return
        if auv.status is AuvStatus.CHARGING:
            self._charge(rt)
            return
        if auv.status is AuvStatus.RETURNING:
            station = rt.target_station or self.nearest_station(auv.position)
            rt.target_station = station
            if self._move_toward(rt, station.position):
                auv.status = AuvStatus.CHARGING
                self.engine.record(
                    "AUV_CHARGING", {"auv": auv.id, "battery": auv.battery}
                )
            self._check_lost(rt)
            self._sense(rt)
            return
        # SURVEYING
        if not rt.queue:
            self._turn_home(rt, reason="plan_complete")
            return
        if self.return_policy and not return_trip_feasible(
            auv, self.nearest_station(auv.position), self.safety_margin
        ):
            self._turn_home(rt, reason="energy")
            return
        self._follow_queue(rt)
        self._check_lost(rt)
        self._sense(rt)

    def _charge(self, rt: _AuvRuntime) -> None:
        auv = rt.auv
        station = rt.target_station or self.nearest_station(auv.position)
        gain = (station.charge_rate - auv.hotel_power) * self.dt
        before = auv.battery
        auv.battery = min(auv.capacity, auv.battery + gain)
        rt.recharged += max(0.0, auv.battery - before)
        if auv.battery >= auv.capacity - 1e-9:
            auv.battery = auv.capacity
            if rt.queue and not rt.aborted:
                auv.status = AuvStatus.SURVEYING
                rt.target_station = None
                self.engine.record("AUV_RESUMED", {"auv": auv.id})

    def _check_lost(self, rt: _AuvRuntime) -> None:
        auv = rt.auv
        if auv.battery > 0.0:
            return
        at_station = any(
            distance(auv.position, s.position) < 1e-6 for s in self.stations
        )
        if not at_station:
            auv.status = AuvStatus.LOST
            self.engine.record("AUV_LOST", {"auv": auv.id, "position": [auv.position.x, auv.position.y, auv.position.z]})

    def _sense(self, rt: _AuvRuntime) -> None:
        auv = rt.auv
        if auv.status is AuvStatus.LOST:
            return
        for item in self.world.items_within(auv.position, self.camera_range):
            if item.id in self.detected:
                continue
            self.detected.add(item.id)
            self.detections_by_material[item.material.name] += 1
            self.engine.record(
                "DETECTION",
                {
                    "auv": auv.id,
                    "item": item.id,
                    "material": item.material.name,
                    "position": [item.position.x, item.position.y, item.position.z],
                },
            )
            predicted = sample_confusion(
                self.confusion, item.material, self.condition, self.engine.stream("sensing")
            )
            key = (item.material.name, predicted.name)
            self.confusion_counts[key] = self.confusion_counts.get(key, 0) + 1
            self.engine.record(
                "CLASSIFIED",
                {
                    "auv": auv.id,
                    "item": item.id,
                    "true": item.material.name,
                    "predicted": predicted.name,
                },
            )

    # -- reporting -----------------------------------------------------------

    def coverage(self) -> float:
        if not self.areas:
            return 0.0
        fractions = [self.grid.fraction(a) for a in self.areas]
        return sum(fractions) / len(fractions)

    def snapshot(self) -> dict:
        return {
            "auvs": [
                {
                    "id": rt.auv.id,
                    "position": [rt.auv.position.x, rt.auv.position.y, rt.auv.position.z],
                    "battery_fraction": rt.auv.battery / rt.auv.capacity,
                    "status": rt.auv.status.value,
                }
                for rt in self._fleet.values()
            ],
            "coverage_fraction": self.coverage(),
            "detections_by_material": dict(self.detections_by_material),
        }

    def energy_summary(self) -> dict:
        return {
            rt.auv.id: {
                "consumed_j": rt.consumed,
                "recharged_j": rt.recharged,
                "final_battery_j": rt.auv.battery,
                "status": rt.auv.status.value,
            }
            for rt in self._fleet.values()
        }
