from abyss.core import MaterialClass, PollutantItem, Vec3, World, WorldSpec
from abyss.engine import SimEngine, derive_stream
from abyss.mission.fleet import (
    AuvState,
    AuvStatus,
    ChargingStation,
    CoverageGrid,
    FleetController,
    return_trip_feasible,
)
from abyss.mission.planning import AreaSpec, assign_transects, plan_belt_transects
from abyss.sensing.confusion import default_confusion_model
from abyss.sensing.traces import Condition, Luminosity, Medium

WATER_AMBIENT = Condition(Medium.WATER, Luminosity.AMBIENT)
SQUARE40 = [(0.0, 0.0), (40.0, 0.0), (40.0, 40.0), (0.0, 40.0)]


def build_mission(
    *,
    items=None,
    fleet=None,
    battery=None,
    return_policy=True,
    seed=0,
    area_poly=SQUARE40,
    spacing=20.0,
    swath=10.0,
    station=None,
):
    spec = WorldSpec(Vec3(-50, -50, -50), Vec3(200, 200, 0))
    world = World(spec, items or [])
    area = AreaSpec(area_poly, depth_range=(0.0, 0.0))
    plan = plan_belt_transects(area, spacing, swath)
    if fleet is None:
        fleet = [AuvState("auv0", plan.strips[0].waypoints[0])]
    if battery is not None:
        for auv in fleet:
            auv.battery = battery
            auv.capacity = max(auv.capacity, battery)
    assignment = assign_transects([a.id for a in fleet], plan, comms_range=1e9)
    stations = [station or ChargingStation(Vec3(0, 0, 0), charge_rate=50.0)]
    engine = SimEngine(seed=seed)
    controller = FleetController(
        engine, world, fleet, plan, assignment, stations, [area],
        WATER_AMBIENT, default_confusion_model(),
        return_policy=return_policy,
    )
    controller.start()
    return engine, controller, plan, area


def run_mission(engine, t_max=36_000.0):
    engine.run_all(hard_limit=t_max)
    return engine.log


class TestReturnTripFeasible:
    def auv(self, battery, x=0.0):
        return AuvState(
            "a", Vec3(x, 0, 0), speed=1.0, battery=battery, capacity=200_000.0,
            motion_power=8.0, hotel_power=2.0,
        )

    def station(self):
        return ChargingStation(Vec3(6000.0, 0, 0), 50.0)

    def test_comfortably_feasible(self):
        auv = self.auv(100_000.0)  # 6000 s * 10 W = 60 kJ <= 80 kJ
        assert return_trip_feasible(auv, self.station(), 0.2)

    def test_infeasible(self):
        auv = self.auv(100_000.0, x=-3000.0)  # 9000 s * 10 W = 90 kJ > 80 kJ
        assert not return_trip_feasible(auv, self.station(), 0.2)

    def test_boundary_goes_to_return(self):
        # required exactly equals battery*(1-margin): must be infeasible
        auv = self.auv(75_000.0)  # required 60 kJ == 75 kJ * 0.8
        assert not return_trip_feasible(auv, self.station(), 0.2)


class TestFleetExecution:
    def test_straight_strip_completion_time(self):
        engine, controller, plan, _ = build_mission()
        # serpentine path: 40 m strip, 20 m transit, 40 m, 20 m, 40 m at 1 m/s
        run_mission(engine)
        done = [e for e in engine.log if e.kind == "MISSION_COMPLETE"]
        assert len(done) == 1
        strips = [e for e in engine.log if e.kind == "STRIP_COMPLETED"]
        assert len(strips) == 3
        times = [e.time for e in strips]
        for got, expected in zip(times, [40.0, 100.0, 160.0]):
            assert abs(got - expected) <= 1.5  # within one tick plus rounding

    def test_detection_and_classification_once_per_item(self):
        items = [
            PollutantItem("it1", Vec3(20.0, 0.0, 0.0), MaterialClass.PET, 0.2),
            PollutantItem("it2", Vec3(20.0, 20.0, 0.0), MaterialClass.WOOD, 0.2),
        ]
        engine, controller, _, _ = build_mission(items=items)
        run_mission(engine)
        detections = [e for e in engine.log if e.kind == "DETECTION"]
        classified = [e for e in engine.log if e.kind == "CLASSIFIED"]
        assert {e.payload["item"] for e in detections} == {"it1", "it2"}
        assert len(detections) == 2
        assert len(classified) == 2

    def test_every_classified_preceded_by_its_detection(self):
        rng = derive_stream(5, "items")
        items = [
            PollutantItem(
                f"p{i}",
                Vec3(rng.uniform(0, 40), rng.uniform(0, 40), 0.0),
                MaterialClass(rng.randint(6)),
                0.2,
            )
            for i in range(30)
        ]
        engine, controller, _, _ = build_mission(items=items)
        run_mission(engine)
        seen = set()
        for e in engine.log:
            if e.kind == "DETECTION":
                assert e.payload["item"] not in seen
                seen.add(e.payload["item"])
            elif e.kind == "CLASSIFIED":
                assert e.payload["item"] in seen

    def test_battery_stays_in_bounds(self):
        engine, controller, _, _ = build_mission(battery=20_000.0)
        run_mission(engine)
        for auv in controller.fleet:
            assert 0.0 <= auv.battery <= auv.capacity

    def test_low_battery_triggers_return_and_charge(self):
        engine, controller, _, _ = build_mission(battery=1_500.0)
        run_mission(engine)
        kinds = [e.kind for e in engine.log]
        assert "AUV_RETURNING" in kinds
        assert "AUV_CHARGING" in kinds
        assert "AUV_LOST" not in kinds
        reasons = {
            e.payload["reason"] for e in engine.log if e.kind == "AUV_RETURNING"
        }
        assert "energy" in reasons

    def test_recharge_resumes_and_finishes_plan(self):
        engine, controller, _, _ = build_mission(battery=1_600.0)
        run_mission(engine, t_max=100_000.0)
        kinds = [e.kind for e in engine.log]
        assert "AUV_RESUMED" in kinds
        assert "MISSION_COMPLETE" in kinds
        assert len([e for e in engine.log if e.kind == "STRIP_COMPLETED"]) == 3

    def test_policy_disabled_undersized_battery_strands(self):
        engine, controller, _, _ = build_mission(
            battery=400.0, return_policy=False,
            station=ChargingStation(Vec3(-40.0, -40.0, 0.0), 50.0),
        )
        run_mission(engine)
        assert any(e.kind == "AUV_LOST" for e in engine.log)

    def test_no_stranding_over_many_seeds(self):
        rng = derive_stream(99, "stranding")
        for trial in range(100):
            battery = 900.0 + rng.uniform(0, 2500)
            spacing = 10.0 + rng.uniform(0, 15)
            sx = rng.uniform(-30, 30)
            sy = rng.uniform(-30, 30)
            engine, controller, _, _ = build_mission(
                battery=battery,
                spacing=spacing,
                seed=trial,
                station=ChargingStation(Vec3(sx, sy, 0.0), 60.0),
            )
            run_mission(engine, t_max=50_000.0)
            lost = [e for e in engine.log if e.kind == "AUV_LOST"]
            assert lost == [], f"trial {trial}: stranded with battery {battery}"
            for auv in controller.fleet:
                assert auv.battery >= 0.0

    def test_coverage_with_swath_equal_spacing(self):
        engine, controller, _, area = build_mission(spacing=20.0, swath=20.0)
        run_mission(engine)
        assert controller.grid.fraction(area) >= 0.95

    def test_half_plan_half_coverage(self):
        # stop the mission after the first of two far-apart strips
        engine, controller, plan, area = build_mission(spacing=20.0, swath=20.0)
        engine.run_until(45.0)  # enough for roughly the first strip only
        frac = controller.grid.fraction(area)
        assert 0.2 <= frac <= 0.55

    def test_abort_sends_everyone_home(self):
        engine, controller, _, _ = build_mission()
        engine.run_until(10.0)
        controller.abort()
        run_mission(engine)
        statuses = {a.status for a in controller.fleet}
        assert statuses <= {AuvStatus.CHARGING}
        assert any(e.kind == "MISSION_COMPLETE" for e in engine.log)


class TestEnergyDefaults:
    def test_unassisted_endurance_in_commercial_band(self):
        # capacity / (motion + hotel) must sit in the 1.5-4 h band
        auv = AuvState("a", Vec3(0, 0, 0))
        endurance = auv.capacity / auv.total_power
        assert 5400.0 <= endurance <= 14400.0


class TestCoverageGrid:
    def test_fresh_grid_zero(self):
        grid = CoverageGrid(1.0)
        assert grid.fraction(AreaSpec(SQUARE40)) == 0.0

    def test_marked_segment_covers_band(self):
        grid = CoverageGrid(1.0)
        grid.mark_segment(Vec3(0, 20, 0), Vec3(40, 20, 0), 10.0)
        area = AreaSpec(SQUARE40)
        frac = grid.fraction(area)
        assert 0.45 <= frac <= 0.60  # half the square, fuzzy at cell edges

    def test_fraction_bounded(self):
        grid = CoverageGrid(2.0)
        grid.mark_segment(Vec3(-100, -100, 0), Vec3(200, 200, 0), 500.0)
        assert grid.fraction(AreaSpec(SQUARE40)) == 1.0
