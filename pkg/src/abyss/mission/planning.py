"""Transect planners and comms-constrained fleet assignment.

Belt plans sweep boustrophedon strips along the longer bounding-box axis;
strip offsets are centered in the lateral extent so no interior point is ever
more than spacing/2 from a strip. 3D grids replicate the belt at descending
depth layers. Assignment partitions strips contiguously and rejects fleets
that would have to work adjacent strips further apart than comms range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..core import Vec3
from .geometry import (
    Interval,
    Point2,
    capsule_forbidden_intervals,
    circle_forbidden_interval,
    line_polygon_intervals,
    point_in_polygon,
    polygon_bbox,
    polygon_is_simple,
    subtract_intervals,
)

EPS = 1e-9


class PlanningError(Exception):
    pass


class AssignmentError(Exception):
    pass


class PlanKind(str, Enum):
    BELT_2D = "belt_2d"
    GRID_3D = "grid_3d"


class ConstraintKind(str, Enum):
    MIN_STANDOFF = "min_standoff"


@dataclass(frozen=True)
class Constraint:
    """Keep at least `distance` meters (planar) from a point or polygon."""

    reference: tuple  # (x, y) point or tuple of (x, y) vertices
    distance: float
    kind: ConstraintKind = ConstraintKind.MIN_STANDOFF

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError("standoff distance must be >= 0")

    @property
    def is_region(self) -> bool:
        return bool(self.reference) and isinstance(self.reference[0], (tuple, list))

    def forbidden_intervals(self, axis: int, offset: float) -> list[Interval]:
        if not self.is_region:
            iv = circle_forbidden_interval(axis, offset, tuple(self.reference), self.distance)
            return [iv] if iv else []
        vertices = [tuple(v) for v in self.reference]
        out = list(line_polygon_intervals(vertices, axis, offset))
        n = len(vertices)
        for i in range(n):
            out.extend(
                capsule_forbidden_intervals(
                    axis, offset, vertices[i], vertices[(i + 1) % n], self.distance
                )
            )
        return out

    def violated_by(self, point: Point2) -> bool:
        from .geometry import distance_to_polygon

        if self.is_region:
            vertices = [tuple(v) for v in self.reference]
            return distance_to_polygon(point, vertices) < self.distance - EPS
        dx = point[0] - self.reference[0]
        dy = point[1] - self.reference[1]
        return math.hypot(dx, dy) < self.distance - EPS


@dataclass
class AreaSpec:
    """Simple surface polygon plus a depth band (z <= 0)."""

    polygon: list[Point2]
    depth_range: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.polygon = [tuple(p) for p in self.polygon]
        if not polygon_is_simple(self.polygon):
            raise ValueError("area polygon must be simple with >= 3 vertices")
        if any(z > EPS for z in self.depth_range):
            raise ValueError("depth range must be at or below the surface (z <= 0)")

    @property
    def z_shallow(self) -> float:
        return max(self.depth_range)

    @property
    def z_deep(self) -> float:
        return min(self.depth_range)

    def contains(self, p: Point2) -> bool:
        return point_in_polygon(p, self.polygon)


@dataclass(frozen=True)
class Strip:
    """One straight transect segment; waypoints already serpentine-ordered."""

    waypoints: tuple[Vec3, ...]
    lateral_offset: float
    z: float
    axis: int
    area: int = 0

    @property
    def length(self) -> float:
        a, b = self.waypoints[0], self.waypoints[-1]
        return math.hypot(b.x - a.x, b.y - a.y)


@dataclass
class TransectPlan:
    strips: list[Strip]
    spacing: float
    dimensionality: PlanKind
    swath_width: float = 10.0


def _strip_offsets(lo: float, hi: float, spacing: float) -> list[float]:
    """Centered offsets: residual split evenly so max lateral gap <= spacing/2."""
    extent = hi - lo
    k = int(math.floor(extent / spacing + EPS))
    start = lo + 0.5 * (extent - k * spacing)
    return [start + i * spacing for i in range(k + 1)]


def _clipped_intervals(
    area: AreaSpec, axis: int, offset: float, constraints: list[Constraint]
) -> list[Interval]:
    intervals = line_polygon_intervals(area.polygon, axis, offset)
    if not constraints:
        return intervals
    out: list[Interval] = []
    for iv in intervals:
        pieces = [iv]
        for c in constraints:
            forbidden = c.forbidden_intervals(axis, offset)
            pieces = [
                p for piece in pieces for p in subtract_intervals(piece, forbidden)
            ]
        out.extend(pieces)
    return out


def _sweep_axis(area: AreaSpec) -> int:
    x_lo, y_lo, x_hi, y_hi = polygon_bbox(area.polygon)
    return 0 if (x_hi - x_lo) >= (y_hi - y_lo) else 1


def _raw_strips(
    area: AreaSpec, spacing: float, constraints: list[Constraint]
) -> list[tuple[float, Interval]]:
    axis = _sweep_axis(area)
    x_lo, y_lo, x_hi, y_hi = polygon_bbox(area.polygon)
    lo, hi = (y_lo, y_hi) if axis == 0 else (x_lo, x_hi)
    rows: list[tuple[float, Interval]] = []
    for offset in _strip_offsets(lo, hi, spacing):
        for iv in _clipped_intervals(area, axis, offset, constraints):
            if iv[1] - iv[0] > 1e-6:
                rows.append((offset, iv))
    return rows


def _assemble(
    rows: list[tuple[float, Interval]],
    axis: int,
    zs: list[float],
    spacing: float,
    swath_width: float,
    kind: PlanKind,
) -> TransectPlan:
    strips: list[Strip] = []
    index = 0
    for z in zs:
        for offset, (t0, t1) in rows:
            a = Vec3(t0, offset, z) if axis == 0 else Vec3(offset, t0, z)
            b = Vec3(t1, offset, z) if axis == 0 else Vec3(offset, t1, z)
            waypoints = (a, b) if index % 2 == 0 else (b, a)
            strips.append(Strip(waypoints, offset, z, axis))
            index += 1
    if not strips:
        raise PlanningError("no strips remain after clipping area and constraints")
    return TransectPlan(strips, spacing, kind, swath_width)


def plan_belt_transects(
    area: AreaSpec,
    strip_spacing: float,
    swath_width: float,
    constraints: list[Constraint] | None = None,
) -> TransectPlan:
    """Boustrophedon belt at the shallow end of the area's depth band."""
    if strip_spacing <= 0 or swath_width <= 0:
        raise ValueError("spacing and swath width must be positive")
    rows = _raw_strips(area, strip_spacing, constraints or [])
    return _assemble(
        rows, _sweep_axis(area), [area.z_shallow], strip_spacing, swath_width,
        PlanKind.BELT_2D,
    )


def plan_3d_grid(
    area: AreaSpec,
    strip_spacing: float,
    layer_spacing: float,
    swath_width: float = 10.0,
    constraints: list[Constraint] | None = None,
) -> TransectPlan:
    """Belt plan replicated at layers z_shallow, z_shallow - layer_spacing, ..."""
    if strip_spacing <= 0 or layer_spacing <= 0 or swath_width <= 0:
        raise ValueError("spacings must be positive")
    extent = area.z_shallow - area.z_deep
    layers = int(math.floor(extent / layer_spacing + EPS)) + 1
    zs = [area.z_shallow - i * layer_spacing for i in range(layers)]
    rows = _raw_strips(area, strip_spacing, constraints or [])
    return _assemble(
        rows, _sweep_axis(area), zs, strip_spacing, swath_width, PlanKind.GRID_3D
    )


def merge_plans(plans: list[TransectPlan]) -> TransectPlan:
    """Concatenate per-area plans into one strip list, tagging area indices."""
    if not plans:
        raise PlanningError("no plans to merge")
    if len(plans) == 1:
        return plans[0]
    from dataclasses import replace

    strips: list[Strip] = []
    for area_index, plan in enumerate(plans):
        strips.extend(replace(s, area=area_index) for s in plan.strips)
    first = plans[0]
    return TransectPlan(strips, first.spacing, first.dimensionality, first.swath_width)


def _strip_separation(a: Strip, b: Strip) -> float:
    return math.hypot(a.lateral_offset - b.lateral_offset, a.z - b.z)


def assign_transects(
    fleet_ids: list[str], plan: TransectPlan, comms_range: float
) -> dict[str, list[int]]:
    """Contiguous balanced partition of strips over AUVs, in strip order.

    Rejects the assignment when any two AUVs would, at the same phase of
    synchronized progress, work adjacent strips separated by more than
    comms_range. Extra AUVs beyond the strip count receive empty assignments.
    """
    if not fleet_ids:
        raise AssignmentError("fleet must be non-empty")
    ids = sorted(fleet_ids)
    n_strips = len(plan.strips)
    n_active = min(len(ids), n_strips)
    base, extra = divmod(n_strips, n_active)
    assignment: dict[str, list[int]] = {auv_id: [] for auv_id in ids}
    start = 0
    blocks: list[tuple[str, int, int]] = []  # (id, start, size)
    for i, auv_id in enumerate(ids[:n_active]):
        size = base + (1 if i < extra else 0)
        assignment[auv_id] = list(range(start, start + size))
        blocks.append((auv_id, start, size))
        start += size

    max_block = max(size for _, _, size in blocks)
    for phase in range(max_block):
        active = [
            (auv_id, s + min(phase, size - 1)) for auv_id, s, size in blocks
        ]
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                id_a, strip_a = active[i]
                id_b, strip_b = active[j]
                if abs(strip_a - strip_b) != 1:
                    continue
                if plan.strips[strip_a].area != plan.strips[strip_b].area:
                    continue
                sep = _strip_separation(plan.strips[strip_a], plan.strips[strip_b])
                if sep > comms_range + EPS:
                    raise AssignmentError(
                        f"AUVs {id_a!r} and {id_b!r} would work adjacent strips "
                        f"{strip_a} and {strip_b} at {sep:.2f} m, beyond comms "
                        f"range {comms_range:.2f} m"
                    )
    return assignment
