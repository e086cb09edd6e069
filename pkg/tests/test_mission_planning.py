import math

import numpy as np
import pytest

from abyss.engine import derive_stream
from abyss.mission.geometry import (
    line_polygon_intervals,
    point_in_polygon,
    polygon_is_simple,
    subtract_intervals,
)
from abyss.mission.planning import (
    AreaSpec,
    AssignmentError,
    Constraint,
    PlanKind,
    PlanningError,
    TransectPlan,
    assign_transects,
    plan_3d_grid,
    plan_belt_transects,
)

SQUARE40 = [(0.0, 0.0), (40.0, 0.0), (40.0, 40.0), (0.0, 40.0)]


def convex_polygon(rng, n=None, radius=50.0):
    n = n or (3 + rng.randint(6))
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(n))
    if len(set(angles)) < 3:
        angles = [0.0, 2.1, 4.2]
    r = [radius * (0.5 + 0.5 * rng.uniform()) for _ in angles]
    return [(ri * math.cos(a) + 60, ri * math.sin(a) + 60) for ri, a in zip(r, angles)]


class TestGeometry:
    def test_square_is_simple(self):
        assert polygon_is_simple(SQUARE40)

    def test_bowtie_is_not_simple(self):
        bowtie = [(0, 0), (10, 10), (10, 0), (0, 10)]
        assert not polygon_is_simple(bowtie)

    def test_point_in_polygon_boundary_inclusive(self):
        assert point_in_polygon((0.0, 20.0), SQUARE40)
        assert point_in_polygon((20.0, 20.0), SQUARE40)
        assert not point_in_polygon((41.0, 20.0), SQUARE40)

    def test_line_through_square(self):
        assert line_polygon_intervals(SQUARE40, 0, 20.0) == [(0.0, 40.0)]

    def test_line_on_square_edge(self):
        assert line_polygon_intervals(SQUARE40, 0, 0.0) == [(0.0, 40.0)]

    def test_line_through_notched_polygon_splits(self):
        # U-shape: notch from x=15..25 down to y=25
        u_shape = [
            (0, 0), (40, 0), (40, 40), (25, 40), (25, 25), (15, 25), (15, 40), (0, 40),
        ]
        assert polygon_is_simple(u_shape)
        ivs = line_polygon_intervals(u_shape, 0, 30.0)
        assert len(ivs) == 2
        assert ivs[0] == pytest.approx((0.0, 15.0))
        assert ivs[1] == pytest.approx((25.0, 40.0))

    def test_subtract_intervals(self):
        assert subtract_intervals((0.0, 10.0), [(2.0, 3.0), (8.0, 12.0)]) == [
            (0.0, 2.0), (3.0, 8.0),
        ]


class TestBeltPlanner:
    def test_square_three_strips_at_paper_spacing(self):
        plan = plan_belt_transects(AreaSpec(SQUARE40), 20.0, 10.0)
        assert len(plan.strips) == 3
        offsets = [s.lateral_offset for s in plan.strips]
        assert offsets == pytest.approx([0.0, 20.0, 40.0])
        assert plan.dimensionality is PlanKind.BELT_2D

    def test_serpentine_alternation(self):
        plan = plan_belt_transects(AreaSpec(SQUARE40), 20.0, 10.0)
        first = [s.waypoints[0] for s in plan.strips]
        assert first[0].x == 0.0
        assert first[1].x == 40.0
        assert first[2].x == 0.0

    def test_spacing_wider_than_polygon_gives_single_centered_strip(self):
        plan = plan_belt_transects(AreaSpec(SQUARE40), 100.0, 10.0)
        assert len(plan.strips) == 1
        assert plan.strips[0].lateral_offset == pytest.approx(20.0)

    def test_consecutive_offsets_differ_by_spacing(self):
        rng = derive_stream(3, "plan")
        for _ in range(20):
            area = AreaSpec(convex_polygon(rng))
            plan = plan_belt_transects(area, 12.5, 6.0)
            offsets = sorted({round(s.lateral_offset, 9) for s in plan.strips})
            for a, b in zip(offsets[:-1], offsets[1:]):
                assert b - a == pytest.approx(12.5, abs=1e-6)

    def test_dense_point_oracle_lateral_distance(self):
        rng = derive_stream(11, "plan-oracle")
        for _ in range(15):
            area = AreaSpec(convex_polygon(rng))
            spacing = 8.0 + rng.uniform(0, 10)
            plan = plan_belt_transects(area, spacing, 4.0)
            axis = plan.strips[0].axis
            offsets = [s.lateral_offset for s in plan.strips]
            for _ in range(300):
                x = rng.uniform(0, 140)
                y = rng.uniform(0, 140)
                if not point_in_polygon((x, y), area.polygon):
                    continue
                lat = y if axis == 0 else x
                assert min(abs(lat - o) for o in offsets) <= spacing / 2 + 1e-6

    def test_waypoints_inside_area(self):
        rng = derive_stream(4, "plan-wp")
        for _ in range(10):
            area = AreaSpec(convex_polygon(rng))
            plan = plan_belt_transects(area, 10.0, 5.0)
            for strip in plan.strips:
                for wp in strip.waypoints:
                    assert point_in_polygon((wp.x, wp.y), area.polygon, eps=1e-6)

    def test_point_standoff_splits_strip(self):
        constraint = Constraint(reference=(20.0, 20.0), distance=5.0)
        plan = plan_belt_transects(AreaSpec(SQUARE40), 20.0, 10.0, [constraint])
        middle = [s for s in plan.strips if s.lateral_offset == pytest.approx(20.0)]
        assert len(middle) == 2  # split around the exclusion circle
        for strip in plan.strips:
            for wp in strip.waypoints:
                assert not constraint.violated_by((wp.x, wp.y))

    def test_region_standoff_respected(self):
        constraint = Constraint(
            reference=((15.0, 15.0), (25.0, 15.0), (25.0, 25.0), (15.0, 25.0)),
            distance=3.0,
        )
        plan = plan_belt_transects(AreaSpec(SQUARE40), 10.0, 5.0, [constraint])
        for strip in plan.strips:
            for wp in strip.waypoints:
                assert not constraint.violated_by((wp.x, wp.y))
        # dense sampling along each strip stays clear too
        for strip in plan.strips:
            a, b = strip.waypoints[0], strip.waypoints[-1]
            for t in np.linspace(0, 1, 50):
                p = (a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
                assert not constraint.violated_by(p)

    def test_area_fully_forbidden_raises(self):
        constraint = Constraint(reference=(20.0, 20.0), distance=100.0)
        with pytest.raises(PlanningError):
            plan_belt_transects(AreaSpec(SQUARE40), 20.0, 10.0, [constraint])

    def test_self_intersecting_polygon_rejected(self):
        with pytest.raises(ValueError):
            AreaSpec([(0, 0), (10, 10), (10, 0), (0, 10)])


class TestGridPlanner:
    def test_three_layers_over_forty_meters(self):
        area = AreaSpec(SQUARE40, depth_range=(0.0, -40.0))
        plan = plan_3d_grid(area, 20.0, 20.0)
        zs = sorted({s.z for s in plan.strips}, reverse=True)
        assert zs == pytest.approx([0.0, -20.0, -40.0])
        assert len(plan.strips) == 9
        assert plan.dimensionality is PlanKind.GRID_3D

    def test_layer_spacing_wider_than_extent_single_layer(self):
        area = AreaSpec(SQUARE40, depth_range=(-5.0, -15.0))
        plan = plan_3d_grid(area, 20.0, 50.0)
        assert {s.z for s in plan.strips} == {-5.0}

    def test_serpentine_continues_across_layers(self):
        area = AreaSpec(SQUARE40, depth_range=(0.0, -40.0))
        plan = plan_3d_grid(area, 20.0, 20.0)
        starts = [s.waypoints[0].x for s in plan.strips]
        assert starts == pytest.approx([0, 40, 0, 40, 0, 40, 0, 40, 0])


class TestAssignment:
    def plan(self, spacing=20.0):
        return plan_belt_transects(AreaSpec(SQUARE40), spacing, 10.0)

    def test_single_auv_takes_everything(self):
        a = assign_transects(["a1"], self.plan(), comms_range=1e9)
        assert a == {"a1": [0, 1, 2]}

    def test_three_auvs_three_strips_in_range(self):
        a = assign_transects(["a1", "a2", "a3"], self.plan(), comms_range=25.0)
        assert a == {"a1": [0], "a2": [1], "a3": [2]}

    def test_three_auvs_out_of_range_rejected(self):
        with pytest.raises(AssignmentError) as err:
            assign_transects(["a1", "a2", "a3"], self.plan(), comms_range=15.0)
        assert "a1" in str(err.value) and "a2" in str(err.value)

    def test_extra_auvs_left_unassigned(self):
        a = assign_transects(["a1", "a2", "a3", "a4", "a5"], self.plan(), 25.0)
        assert a["a4"] == [] and a["a5"] == []

    def test_contiguous_balanced_blocks(self):
        plan = plan_belt_transects(AreaSpec(SQUARE40), 5.0, 4.0)  # 9 strips
        a = assign_transects(["x", "y"], plan, comms_range=1e9)
        assert a["x"] == [0, 1, 2, 3, 4] and a["y"] == [5, 6, 7, 8]

    def test_empty_fleet_rejected(self):
        with pytest.raises(AssignmentError):
            assign_transects([], self.plan(), 25.0)
