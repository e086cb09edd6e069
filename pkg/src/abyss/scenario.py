"""Scenario files: schema validation and construction of domain objects.

Scenarios are strict JSON (unknown keys are errors, so typos fail fast). A
scenario may describe any combination of a micro-cloud offload session, a
link calibration sweep, and a fleet survey mission; the runner wires whatever
is present onto one engine so everything shares the seed and the log.
"""

from __future__ import annotations

import json
from importlib import resources

import jsonschema

from .comms import BUILTIN_LINKS, DeliveryCurve, LinkSpec
from .core import MaterialClass, PollutantItem, Vec3, World, WorldSpec
from .engine import RngStream
from .mission.planning import AreaSpec, Constraint
from .offload import ProcessingModel
from .sensing.confusion import (
    ConfusionModel,
    confusion_from_diagonals,
    default_confusion_model,
    identity_confusion_model,
)
from .sensing.traces import (
    CONDITIONS,
    Condition,
    GENERATOR_PRESETS,
    GeneratorSpec,
    Luminosity,
    Medium,
)


class ScenarioError(Exception):
    """Scenario failed schema or semantic validation."""


_VEC2 = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}
_POLYGON = {"type": "array", "items": _VEC2, "minItems": 3}

_CONSTRAINT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["distance"],
    "properties": {
        "kind": {"const": "min_standoff"},
        "point": _VEC2,
        "region": _POLYGON,
        "distance": {"type": "number", "minimum": 0},
    },
}

_AREA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["polygon"],
    "properties": {
        "polygon": _POLYGON,
        "depth_range": _VEC2,
    },
}

SCENARIO_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["seed"],
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "duration": {"type": "number", "exclusiveMinimum": 0},
        "world": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bounds": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["min", "max"],
                    "properties": {"min": _VEC3, "max": _VEC3},
                },
                "max_depth": {"type": "number", "exclusiveMinimum": 0},
                "medium": {"enum": ["air", "water"]},
                "luminosity": {"enum": ["ambient", "darkness"]},
                "pollutants": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["id", "position", "material", "size"],
                        "properties": {
                            "id": {"type": "string"},
                            "position": _VEC3,
                            "material": {"enum": [m.name for m in MaterialClass]},
                            "size": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
                "random_items": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["count"],
                    "properties": {
                        "count": {"type": "integer", "minimum": 0},
                        "materials": {
                            "type": "array",
                            "items": {"enum": [m.name for m in MaterialClass]},
                            "minItems": 1,
                        },
                        "region": {"enum": ["areas", "bounds"]},
                        "size_range": _VEC2,
                        "depth_range": _VEC2,
                    },
                },
            },
        },
        "links": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "required": ["bandwidth", "propagation_speed", "delivery"],
                "properties": {
                    "bandwidth": {"type": "number", "exclusiveMinimum": 0},
                    "propagation_speed": {"type": "number", "exclusiveMinimum": 0},
                    "fixed_latency": {"type": "number", "minimum": 0},
                    "delivery": {"type": "array", "items": _VEC2, "minItems": 1},
                },
            },
        },
        "linkcheck": {
            "type": "object",
            "additionalProperties": False,
            "required": ["link", "distances"],
            "properties": {
                "link": {"type": "string"},
                "distances": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "transmissions": {"type": "integer", "minimum": 1},
                "message_bits": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "fleet": {
            "type": "object",
            "additionalProperties": False,
            "required": ["count"],
            "properties": {
                "count": {"type": "integer", "minimum": 1},
                "speed": {"type": "number", "exclusiveMinimum": 0},
                "motion_power": {"type": "number", "minimum": 0},
                "hotel_power": {"type": "number", "minimum": 0},
                "capacity": {"type": "number", "exclusiveMinimum": 0},
                "battery_fraction": {"type": "number", "minimum": 0, "maximum": 1},
                "camera_range": {"type": "number", "exclusiveMinimum": 0},
                "comms_link": {"type": "string"},
            },
        },
        "stations": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["position", "charge_rate"],
                "properties": {
                    "position": _VEC3,
                    "charge_rate": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "areas": {"type": "array", "items": _AREA, "minItems": 1},
        "constraints": {"type": "array", "items": _CONSTRAINT},
        "plan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type", "strip_spacing"],
            "properties": {
                "type": {"enum": ["belt", "grid3d"]},
                "strip_spacing": {"type": "number", "exclusiveMinimum": 0},
                "swath_width": {"type": "number", "exclusiveMinimum": 0},
                "layer_spacing": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "offload": {
            "type": "object",
            "additionalProperties": False,
            "required": ["devices", "frames", "link"],
            "properties": {
                "devices": {"type": "integer", "minimum": 2},
                "frames": {"type": "integer", "minimum": 1},
                "frame_bits": {"type": "number", "exclusiveMinimum": 0},
                "result_bits": {"type": "number", "exclusiveMinimum": 0},
                "link": {"type": "string"},
                "distance": {"type": "number", "minimum": 0},
                "distances": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["to_worker", "to_master"],
                    "properties": {
                        "to_worker": {"type": "number", "minimum": 0},
                        "to_master": {"type": "number", "minimum": 0},
                    },
                },
                "processing": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "base_time": {"type": "number", "minimum": 0},
                        "encasing_overhead": {"type": "number", "minimum": 0},
                        "submersion_overhead": {"type": "number", "minimum": 0},
                    },
                },
                "encased": {"type": "boolean"},
                "submerged": {"type": "boolean"},
                "stop_and_wait": {"type": "boolean"},
            },
        },
        "sensing": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "generator": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["preset"],
                    "properties": {
                        "preset": {"enum": sorted(GENERATOR_PRESETS)},
                    },
                },
                "repetitions": {"type": "integer", "minimum": 1},
                "confusion": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "preset": {"enum": ["default", "identity"]},
                        "diagonals": {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                c.label: {"type": "number", "minimum": 0, "maximum": 1}
                                for c in CONDITIONS
                            },
                        },
                    },
                },
            },
        },
        "mission": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "safety_margin": {"type": "number", "minimum": 0, "maximum": 1},
                "return_policy": {"type": "boolean"},
                "coverage_cell": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


def validate_scenario(data: dict) -> None:
    try:
        jsonschema.validate(data, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"schema violation at {path}: {exc.message}") from exc


def load_scenario(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError("scenario root must be a JSON object")
    validate_scenario(data)
    return data


def bundled_scenario(name: str) -> dict:
    """Load one of the scenarios shipped with the package."""
    if not name.endswith(".json"):
        name = f"{name}.json"
    ref = resources.files("abyss").joinpath("scenarios").joinpath(name)
    data = json.loads(ref.read_text(encoding="utf-8"))
    validate_scenario(data)
    return data


def bundled_scenario_names() -> list[str]:
    folder = resources.files("abyss").joinpath("scenarios")
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".json"))


# -- builders ----------------------------------------------------------------


def build_condition(world_cfg: dict) -> Condition:
    return Condition(
        Medium(world_cfg.get("medium", "water")),
        Luminosity(world_cfg.get("luminosity", "ambient")),
    )


def build_link(name: str, links_cfg: dict) -> LinkSpec:
    if name in links_cfg:
        cfg = links_cfg[name]
        return LinkSpec(
            name=name,
            bandwidth=cfg["bandwidth"],
            propagation_speed=cfg["propagation_speed"],
            fixed_latency=cfg.get("fixed_latency", 0.0),
            curve=DeliveryCurve(tuple((d, p) for d, p in cfg["delivery"])),
        )
    if name in BUILTIN_LINKS:
        return BUILTIN_LINKS[name]
    raise ScenarioError(f"unknown link profile {name!r}")


def build_areas(data: dict) -> list[AreaSpec]:
    out = []
    for cfg in data.get("areas", []):
        try:
            out.append(
                AreaSpec(cfg["polygon"], tuple(cfg.get("depth_range", (0.0, 0.0))))
            )
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
    return out


def build_constraints(data: dict) -> list[Constraint]:
    out = []
    for cfg in data.get("constraints", []):
        if ("point" in cfg) == ("region" in cfg):
            raise ScenarioError("constraint needs exactly one of point/region")
        reference = (
            tuple(cfg["point"]) if "point" in cfg
            else tuple(tuple(v) for v in cfg["region"])
        )
        out.append(Constraint(reference=reference, distance=cfg["distance"]))
    return out


def build_world(data: dict, areas: list[AreaSpec], rng: RngStream) -> World:
    cfg = data.get("world", {})
    bounds = cfg.get("bounds")
    if bounds:
        spec = WorldSpec(Vec3(*bounds["min"]), Vec3(*bounds["max"]),
                         cfg.get("max_depth", 200.0))
    else:
        spec = _bounds_from_areas(areas, cfg.get("max_depth", 200.0))
    items = [
        PollutantItem(
            p["id"], Vec3(*p["position"]), MaterialClass[p["material"]], p["size"]
        )
        for p in cfg.get("pollutants", [])
    ]
    random_cfg = cfg.get("random_items")
    if random_cfg:
        items.extend(_random_items(random_cfg, spec, areas, rng, len(items)))
    try:
        return World(spec, items)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def _bounds_from_areas(areas: list[AreaSpec], max_depth: float) -> WorldSpec:
    if not areas:
        return WorldSpec(Vec3(-100.0, -100.0, -max_depth), Vec3(100.0, 100.0, 0.0), max_depth)
    xs = [p[0] for a in areas for p in a.polygon]
    ys = [p[1] for a in areas for p in a.polygon]
    pad = 100.0
    deepest = min(min(a.z_deep for a in areas), 0.0)
    return WorldSpec(
        Vec3(min(xs) - pad, min(ys) - pad, min(deepest - 10.0, -max_depth)),
        Vec3(max(xs) + pad, max(ys) + pad, 0.0),
        max_depth,
    )


def _random_items(
    cfg: dict, spec: WorldSpec, areas: list[AreaSpec], rng: RngStream, offset: int
) -> list[PollutantItem]:
    materials = [MaterialClass[m] for m in cfg.get("materials", [m.name for m in MaterialClass])]
    size_lo, size_hi = cfg.get("size_range", (0.05, 0.5))
    region = cfg.get("region", "areas" if areas else "bounds")
    depth_range = cfg.get("depth_range")
    items = []
    for k in range(cfg["count"]):
        if region == "areas" and areas:
            area = areas[k % len(areas)]
            x, y = _point_in_area(area, rng)
            z_lo, z_hi = depth_range or (area.z_deep, area.z_shallow)
        else:
            x = rng.uniform(spec.min_corner.x, spec.max_corner.x)
            y = rng.uniform(spec.min_corner.y, spec.max_corner.y)
            z_lo, z_hi = depth_range or (spec.min_corner.z, spec.max_corner.z)
        z = rng.uniform(min(z_lo, z_hi), max(z_lo, z_hi)) if z_lo != z_hi else z_lo
        items.append(
            PollutantItem(
                f"item-{offset + k:05d}",
                Vec3(x, y, z),
                materials[rng.randint(len(materials))],
                rng.uniform(size_lo, size_hi),
            )
        )
    return items


def _point_in_area(area: AreaSpec, rng: RngStream) -> tuple[float, float]:
    from .mission.geometry import point_in_polygon, polygon_bbox

    x_lo, y_lo, x_hi, y_hi = polygon_bbox(area.polygon)
    for _ in range(10_000):
        x = rng.uniform(x_lo, x_hi)
        y = rng.uniform(y_lo, y_hi)
        if point_in_polygon((x, y), area.polygon):
            return x, y
    raise ScenarioError("could not place a random item inside the area polygon")


def build_generator(data: dict) -> GeneratorSpec:
    cfg = data.get("sensing", {}).get("generator", {"preset": "reference"})
    return GENERATOR_PRESETS[cfg["preset"]]()


def build_confusion(data: dict) -> ConfusionModel:
    cfg = data.get("sensing", {}).get("confusion", {"preset": "default"})
    if "diagonals" in cfg:
        given = {
            Condition.parse(label): value for label, value in cfg["diagonals"].items()
        }
        missing = [c.label for c in CONDITIONS if c not in given]
        if missing:
            raise ScenarioError(f"confusion diagonals missing for: {missing}")
        return confusion_from_diagonals(given)
    if cfg.get("preset", "default") == "identity":
        return identity_confusion_model()
    return default_confusion_model()


def build_processing_model(cfg: dict) -> ProcessingModel:
    p = cfg.get("processing", {})
    return ProcessingModel(
        base_time=p.get("base_time", 0.028),
        encasing_overhead=p.get("encasing_overhead", 0.005),
        submersion_overhead=p.get("submersion_overhead", 0.020),
    )


def mission_request_to_scenario(request: dict) -> dict:
    """Translate a mission-control API request into a runnable scenario."""
    area = request["area"]
    polygon = area["polygon"]
    scenario: dict = {
        "name": request.get("name", "mission"),
        "seed": request["seed"],
        "world": {
            "medium": request.get("medium", "water"),
            "luminosity": request.get("luminosity", "ambient"),
        },
        "areas": [
            {
                "polygon": polygon,
                "depth_range": area.get("depth_range", [0.0, 0.0]),
            }
        ],
        "fleet": {"count": request["fleet_size"]},
        "stations": [
            {"position": [polygon[0][0], polygon[0][1], 0.0], "charge_rate": 50.0}
        ],
        "plan": {
            "type": "grid3d" if request.get("dimensionality") == "grid3d" else "belt",
            "strip_spacing": request["spacing"],
        },
    }
    if request.get("constraints"):
        scenario["constraints"] = request["constraints"]
    if request.get("layer_spacing") is not None:
        scenario["plan"]["layer_spacing"] = request["layer_spacing"]
    if request.get("swath_width") is not None:
        scenario["plan"]["swath_width"] = request["swath_width"]
    if request.get("comms_link"):
        scenario["fleet"]["comms_link"] = request["comms_link"]
    if request.get("duration") is not None:
        scenario["duration"] = request["duration"]
    count = request.get("pollutant_count", 60)
    if count:
        scenario["world"]["random_items"] = {"count": count, "region": "areas"}
    validate_scenario(scenario)
    return scenario
