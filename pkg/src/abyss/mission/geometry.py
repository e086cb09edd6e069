"""Planar polygon and interval primitives for transect planning.

Sweep lines are axis-aligned (strips run along the longer bounding-box axis),
which keeps every clipping computation exact: line-polygon intersections come
from edge crossings plus interior midpoint tests, and standoff exclusions
reduce to closed-form interval arithmetic (circle chords and edge capsules).
"""

from __future__ import annotations

import math

Point2 = tuple[float, float]
Interval = tuple[float, float]

EPS = 1e-9


def polygon_bbox(vertices: list[Point2]) -> tuple[float, float, float, float]:
    xs = [p[0] for p in vertices]
    ys = [p[1] for p in vertices]
    return min(xs), min(ys), max(xs), max(ys)


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    return (
        min(a[0], b[0]) - EPS <= p[0] <= max(a[0], b[0]) + EPS
        and min(a[1], b[1]) - EPS <= p[1] <= max(a[1], b[1]) + EPS
    )


def segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool:
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and all(
        abs(o) > EPS for o in (o1, o2, o3, o4)
    ):
        return True
    for o, seg, p in ((o1, (a, b), c), (o2, (a, b), d), (o3, (c, d), a), (o4, (c, d), b)):
        if abs(o) <= EPS and _on_segment(seg[0], seg[1], p):
            return True
    return False


def polygon_is_simple(vertices: list[Point2]) -> bool:
    """At least 3 vertices, no zero-length edges, no non-adjacent crossings."""
    n = len(vertices)
    if n < 3:
        return False
    edges = [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]
    for a, b in edges:
        if math.hypot(b[0] - a[0], b[1] - a[1]) <= EPS:
            return False
    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def point_segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    if d2 <= EPS * EPS:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / d2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_in_polygon(p: Point2, vertices: list[Point2], eps: float = EPS) -> bool:
    """Boundary-inclusive point containment (ray casting)."""
    n = len(vertices)
    for i in range(n):
        if point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= eps:
            return True
    inside = False
    px, py = p
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        if (ay > py) != (by > py):
            x_int = ax + (py - ay) * (bx - ax) / (by - ay)
            if x_int > px:
                inside = not inside
    return inside


def polygon_contains_point_strict(p: Point2, vertices: list[Point2]) -> bool:
    """Interior test used for coverage cell centers (boundary counts)."""
    return point_in_polygon(p, vertices)


def distance_to_polygon(p: Point2, vertices: list[Point2]) -> float:
    """0 inside (or on) the polygon, else distance to the closest edge."""
    if point_in_polygon(p, vertices):
        return 0.0
    n = len(vertices)
    return min(
        point_segment_distance(p, vertices[i], vertices[(i + 1) % n])
        for i in range(n)
    )


def _line_point(axis: int, offset: float, t: float) -> Point2:
    # axis 0: strips run along x at y=offset (t is x); axis 1: along y at x=offset
    return (t, offset) if axis == 0 else (offset, t)


def line_polygon_intervals(
    vertices: list[Point2], axis: int, offset: float
) -> list[Interval]:
    """Portions of the sweep line inside the polygon, as sorted t-intervals."""
    candidates: list[float] = []
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        pa = (a[1], a[0]) if axis == 0 else (a[0], a[1])  # (lateral, along)
        pb = (b[1], b[0]) if axis == 0 else (b[0], b[1])
        da, db = pa[0] - offset, pb[0] - offset
        if abs(da) <= EPS and abs(db) <= EPS:
            candidates.extend([pa[1], pb[1]])  # edge lies on the line
        elif (da <= EPS and db >= -EPS) or (da >= -EPS and db <= EPS):
            if abs(db - da) > EPS:
                t = pa[1] + (pb[1] - pa[1]) * (0.0 - da) / (db - da)
                candidates.append(t)
    if not candidates:
        return []
    candidates = sorted(set(round(c, 12) for c in candidates))
    intervals: list[Interval] = []
    for t0, t1 in zip(candidates[:-1], candidates[1:]):
        if t1 - t0 <= EPS:
            continue
        mid = _line_point(axis, offset, 0.5 * (t0 + t1))
        if point_in_polygon(mid, vertices):
            if intervals and abs(intervals[-1][1] - t0) <= EPS:
                intervals[-1] = (intervals[-1][0], t1)
            else:
                intervals.append((t0, t1))
    return intervals


def circle_forbidden_interval(
    axis: int, offset: float, center: Point2, radius: float
) -> Interval | None:
    """t-range of the sweep line strictly inside the circle, if any."""
    lateral = center[1] if axis == 0 else center[0]
    along = center[0] if axis == 0 else center[1]
    gap2 = radius * radius - (lateral - offset) ** 2
    if gap2 <= 0:
        return None
    half = math.sqrt(gap2)
    return (along - half, along + half)


def capsule_forbidden_intervals(
    axis: int, offset: float, a: Point2, b: Point2, radius: float
) -> list[Interval]:
    """t-ranges of the sweep line within `radius` of segment ab (exact)."""
    out: list[Interval] = []
    for endpoint in (a, b):
        iv = circle_forbidden_interval(axis, offset, endpoint, radius)
        if iv:
            out.append(iv)
    ux, uy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(ux, uy)
    if length > EPS:
        ux, uy = ux / length, uy / length
        # point on line: q(t); lateral coordinate fixed at offset
        if axis == 0:
            qx = lambda t: t
            qy = lambda t: offset
        else:
            qx = lambda t: offset
            qy = lambda t: t
        # dot(t) and cross(t) are affine in t
        # dot(t) = (q-a).u ; cross(t) = (q-a) x u
        def affine(f):
            f0 = f(0.0)
            f1 = f(1.0)
            return f0, f1 - f0

        dot0, dots = affine(lambda t: (qx(t) - a[0]) * ux + (qy(t) - a[1]) * uy)
        cr0, crs = affine(lambda t: (qx(t) - a[0]) * uy - (qy(t) - a[1]) * ux)

        def solve(c0, slope, lo, hi):
            # c0 + slope*t in (lo, hi)
            if abs(slope) <= EPS:
                return None if not (lo < c0 < hi) else (-math.inf, math.inf)
            t_lo, t_hi = (lo - c0) / slope, (hi - c0) / slope
            return (min(t_lo, t_hi), max(t_lo, t_hi))

        band = solve(cr0, crs, -radius, radius)
        span = solve(dot0, dots, 0.0, length)
        if band and span:
            lo = max(band[0], span[0])
            hi = min(band[1], span[1])
            if hi - lo > EPS:
                out.append((lo, hi))
    return out


def subtract_intervals(keep: Interval, forbidden: list[Interval]) -> list[Interval]:
    """keep minus the union of forbidden ranges, in order."""
    pieces = [keep]
    for f_lo, f_hi in sorted(forbidden):
        next_pieces: list[Interval] = []
        for lo, hi in pieces:
            if f_hi <= lo + EPS or f_lo >= hi - EPS:
                next_pieces.append((lo, hi))
                continue
            if f_lo > lo + EPS:
                next_pieces.append((lo, f_lo))
            if f_hi < hi - EPS:
                next_pieces.append((f_hi, hi))
        pieces = next_pieces
    return [(lo, hi) for lo, hi in pieces if hi - lo > EPS]
