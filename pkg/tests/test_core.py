import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abyss.core import (
    MaterialClass,
    PlumeField,
    PlumeSource,
    PollutantItem,
    Vec3,
    World,
    WorldSpec,
    distance,
    items_within,
    plume_concentration,
)
from abyss.engine import derive_stream


def make_world(items=None):
    spec = WorldSpec(Vec3(0, 0, -50), Vec3(100, 100, 0))
    return World(spec, items or [])


class TestDistance:
    def test_three_four_five(self):
        assert distance(Vec3(0, 0, 0), Vec3(3, 4, 0)) == 5.0

    def test_identity(self):
        assert distance(Vec3(1, 1, 1), Vec3(1, 1, 1)) == 0.0

    def test_unit_cube_diagonal(self):
        assert distance(Vec3(0, 0, 0), Vec3(1, 1, 1)) == pytest.approx(1.7320508, abs=1e-6)

    @given(
        st.lists(
            st.tuples(
                st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)
            ),
            min_size=3,
            max_size=3,
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_triangle_inequality(self, pts):
        a, b, c = (Vec3(*p) for p in pts)
        assert distance(a, c) <= distance(a, b) + distance(b, c) + 1e-9

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            Vec3(math.nan, 0, 0)


class TestItemsWithin:
    def test_zero_radius_empty(self):
        world = make_world(
            [PollutantItem("a", Vec3(10, 10, -1), MaterialClass.PET, 0.1)]
        )
        assert items_within(world, Vec3(50, 50, 0), 0.0) == []

    def test_full_diagonal_returns_all(self):
        items = [
            PollutantItem(f"i{k}", Vec3(k, k, -(k % 40)), MaterialClass.HDPE, 0.1)
            for k in range(1, 11)
        ]
        world = make_world(items)
        got = items_within(world, Vec3(0, 0, 0), 1e6)
        assert [it.id for it in got] == sorted(it.id for it in items)

    def test_matches_brute_force_scan(self):
        rng = derive_stream(7, "items")
        items = [
            PollutantItem(
                f"p{k:03d}",
                Vec3(rng.uniform(0, 100), rng.uniform(0, 100), -rng.uniform(0, 50)),
                MaterialClass.WOOD,
                0.2,
            )
            for k in range(100)
        ]
        world = make_world(items)
        center = Vec3(50, 50, -25)
        expected = sorted(
            (it for it in items if distance(center, it.position) <= 5.0),
            key=lambda it: it.id,
        )
        assert items_within(world, center, 5.0) == expected

    def test_negative_radius_rejected(self):
        world = make_world()
        with pytest.raises(ValueError):
            items_within(world, Vec3(0, 0, 0), -1.0)

    def test_item_outside_bounds_rejected(self):
        spec = WorldSpec(Vec3(0, 0, -50), Vec3(100, 100, 0))
        with pytest.raises(ValueError):
            World(spec, [PollutantItem("x", Vec3(500, 0, 0), MaterialClass.PET, 0.1)])


class TestPlume:
    def test_empty_field_zero(self):
        assert plume_concentration(PlumeField(), Vec3(0, 0, 0)) == 0.0

    def test_at_source_equals_strength(self):
        field = PlumeField([PlumeSource(Vec3(5, 5, -5), 2.0, 10.0)])
        assert plume_concentration(field, Vec3(5, 5, -5)) == 2.0

    def test_one_decay_length_is_inverse_e(self):
        field = PlumeField([PlumeSource(Vec3(0, 0, 0), 1.0, 10.0)])
        got = plume_concentration(field, Vec3(10, 0, 0))
        assert got == pytest.approx(0.3678794, abs=1e-6)

    @given(st.floats(0, 100), st.floats(0, 100))
    @settings(max_examples=50, deadline=None)
    def test_monotone_in_distance(self, d1, d2):
        field = PlumeField([PlumeSource(Vec3(0, 0, 0), 3.0, 7.0)])
        lo, hi = sorted((d1, d2))
        c_near = plume_concentration(field, Vec3(lo, 0, 0))
        c_far = plume_concentration(field, Vec3(hi, 0, 0))
        assert c_near >= c_far - 1e-12


class TestWorldSpec:
    def test_degenerate_bounds_rejected(self):
        with pytest.raises(ValueError):
            WorldSpec(Vec3(0, 0, -10), Vec3(0, 100, 0))

    def test_material_enum_is_closed_set_of_six(self):
        assert len(MaterialClass) == 6
        assert [m.name for m in MaterialClass] == [
            "PAPERBOARD", "HDPE", "PET", "ALUMINIUM", "CERAMIC", "WOOD",
        ]
