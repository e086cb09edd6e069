"""World model: geometry substrate, pollutant inventory, and plume field.

Coordinates are right-handed meters with the water surface at z = 0 and depth
negative below it. Spatial queries are plain linear scans; at the item counts
this simulator targets (<= 1e4) an index would only add nondeterminism risk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class MaterialClass(Enum):
    """The six debris classes; enum order is the tie-break order everywhere."""

    PAPERBOARD = 0
    HDPE = 1
    PET = 2
    ALUMINIUM = 3
    CERAMIC = 4
    WOOD = 5


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"Vec3.{name} must be finite")

    def __iter__(self):
        return iter((self.x, self.y, self.z))


def distance(a: Vec3, b: Vec3) -> float:
    """Euclidean distance in meters."""
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def lerp(a: Vec3, b: Vec3, t: float) -> Vec3:
    return Vec3(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t)


@dataclass(frozen=True)
class WorldSpec:
    """Axis-aligned world box. max_depth defaults to the sunlight-zone floor."""

    min_corner: Vec3
    max_corner: Vec3
    max_depth: float = 200.0

    def __post_init__(self):
        if self.max_corner.x <= self.min_corner.x or self.max_corner.y <= self.min_corner.y:
            raise ValueError("world bounds must have positive x and y extent")
        if self.max_depth <= 0:
            raise ValueError("max_depth must be positive")

    def contains(self, p: Vec3) -> bool:
        return (
            self.min_corner.x <= p.x <= self.max_corner.x
            and self.min_corner.y <= p.y <= self.max_corner.y
            and self.min_corner.z <= p.z <= self.max_corner.z
        )


@dataclass(frozen=True)
class PollutantItem:
    id: str
    position: Vec3
    material: MaterialClass
    size: float

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError(f"item {self.id}: size must be positive")


@dataclass(frozen=True)
class PlumeSource:
    position: Vec3
    strength: float
    decay_length: float

    def __post_init__(self):
        if self.strength < 0:
            raise ValueError("plume strength must be >= 0")
        if self.decay_length <= 0:
            raise ValueError("plume decay_length must be positive")


@dataclass
class PlumeField:
    sources: list[PlumeSource] = field(default_factory=list)


def plume_concentration(plume: PlumeField, p: Vec3) -> float:
    """Sum of strength * exp(-d / decay_length) over all sources."""
    return sum(
        s.strength * math.exp(-distance(p, s.position) / s.decay_length)
        for s in plume.sources
    )


class World:
    """World spec plus pollutant inventory, held immutable except item removal."""

    def __init__(
        self,
        spec: WorldSpec,
        items: list[PollutantItem] | None = None,
        plume: PlumeField | None = None,
    ):
        self.spec = spec
        self.plume = plume or PlumeField()
        self._items: dict[str, PollutantItem] = {}
        for item in items or []:
            if item.id in self._items:
                raise ValueError(f"duplicate pollutant id {item.id!r}")
            if not spec.contains(item.position):
                raise ValueError(f"item {item.id!r} outside world bounds")
            self._items[item.id] = item
        self._sorted: list[PollutantItem] | None = None

    @property
    def items(self) -> list[PollutantItem]:
        if self._sorted is None:
            self._sorted = sorted(self._items.values(), key=lambda it: it.id)
        return self._sorted

    def remove_item(self, item_id: str) -> PollutantItem:
        self._sorted = None
        return self._items.pop(item_id)

    def items_within(self, center: Vec3, radius: float) -> list[PollutantItem]:
        """All items with distance(center, item) <= radius, ordered by id."""
        if radius < 0:
            raise ValueError("radius must be >= 0")
        return [
            it for it in self.items if distance(center, it.position) <= radius
        ]


def items_within(world: World, center: Vec3, radius: float) -> list[PollutantItem]:
    return world.items_within(center, radius)
