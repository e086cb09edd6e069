"""Link models: bandwidth, latency, and distance-stepped Bernoulli delivery.

The "paper-wifi" profile encodes the measured submerged WiFi steps (100%
within 7 cm, 70% at 10 cm, nothing beyond) and is what the calibration tests
run against. "optical" and "acoustic" are plausible fleet-scale placeholders;
the acoustic parameters especially are order-of-magnitude choices, not
measurements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .engine import RngStream, SimEngine


@dataclass(frozen=True)
class DeliveryCurve:
    """Piecewise-constant delivery probability: first breakpoint with
    max_distance >= d wins; beyond the last breakpoint delivery is 0."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        last = -1.0
        for dist, prob in self.breakpoints:
            if dist <= last:
                raise ValueError("breakpoint distances must be strictly increasing")
            if not 0.0 <= prob <= 1.0:
                raise ValueError("delivery probabilities must be within [0, 1]")
            last = dist

    def probability(self, d: float) -> float:
        if d < 0:
            raise ValueError("distance must be >= 0")
        for dist, prob in self.breakpoints:
            if d <= dist:
                return prob
        return 0.0

    def max_range(self) -> float:
        """Largest distance with nonzero delivery probability."""
        best = 0.0
        for dist, prob in self.breakpoints:
            if prob > 0:
                best = dist
        return best


@dataclass(frozen=True)
class LinkSpec:
    name: str
    bandwidth: float  # bits/second
    propagation_speed: float  # meters/second
    fixed_latency: float  # seconds
    curve: DeliveryCurve

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.propagation_speed <= 0:
            raise ValueError("propagation_speed must be positive")


# Submerged WiFi steps as measured; distances in meters (7 cm -> 0.07).
PAPER_WIFI = LinkSpec(
    name="paper-wifi",
    bandwidth=1e8,
    propagation_speed=2.25e8,
    fixed_latency=0.001,
    curve=DeliveryCurve(((0.07, 1.0), (0.10, 0.70))),
)

# Meter-scale stand-in for short-range optical links between fleet members.
OPTICAL = LinkSpec(
    name="optical",
    bandwidth=1e6,
    propagation_speed=2.25e8,
    fixed_latency=0.001,
    curve=DeliveryCurve(((5.0, 1.0), (10.0, 0.70))),
)

# Order-of-magnitude placeholder for surface-link acoustics.
ACOUSTIC = LinkSpec(
    name="acoustic",
    bandwidth=1e4,
    propagation_speed=1500.0,
    fixed_latency=0.0,
    curve=DeliveryCurve(((1000.0, 1.0),)),
)

BUILTIN_LINKS = {link.name: link for link in (PAPER_WIFI, OPTICAL, ACOUSTIC)}


def delivery_probability(link: LinkSpec, d: float) -> float:
    return link.curve.probability(d)


def latency(link: LinkSpec, size: float, d: float) -> float:
    """fixed + transmission + propagation delay, seconds."""
    if size <= 0:
        raise ValueError("message size must be positive")
    if d < 0:
        raise ValueError("distance must be >= 0")
    return link.fixed_latency + size / link.bandwidth + d / link.propagation_speed


class Outcome(Enum):
    DELIVERED = "delivered"
    DROPPED = "dropped"


@dataclass(frozen=True)
class DeliveryOutcome:
    outcome: Outcome
    time: float | None = None  # receive time when delivered

    @property
    def delivered(self) -> bool:
        return self.outcome is Outcome.DELIVERED


@dataclass
class Message:
    id: str
    src: str
    dst: str
    size: float  # bits
    kind: str
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("message size must be positive")


class Transport:
    """Per-link transmitter: one Bernoulli draw per message, FIFO per pair.

    Each transmit logs a SEND, then either schedules a RECEIVE event at
    send + latency (never earlier than the pair's previous delivery, keeping
    per-pair FIFO order even if latency varies) or logs a DROP immediately.
    """

    def __init__(self, engine: SimEngine, link: LinkSpec, rng: RngStream | None = None):
        self.engine = engine
        self.link = link
        self.rng = rng or engine.stream("comms")
        self._last_delivery: dict[tuple[str, str], float] = {}

    def transmit(self, msg: Message, d: float) -> DeliveryOutcome:
        if msg.src == msg.dst:
            raise ValueError("src and dst must differ")
        engine = self.engine
        p = delivery_probability(self.link, d)
        draw = self.rng.uniform()
        base = {
            "msg_id": msg.id,
            "src": msg.src,
            "dst": msg.dst,
            "msg_kind": msg.kind,
            "link": self.link.name,
            "distance": d,
            "payload": msg.payload,
        }
        engine.record("SEND", dict(base, size=msg.size))
        if draw < p:
            t_rx = engine.clock + latency(self.link, msg.size, d)
            pair = (msg.src, msg.dst)
            t_rx = max(t_rx, self._last_delivery.get(pair, 0.0))
            self._last_delivery[pair] = t_rx
            engine.schedule(t_rx, "RECEIVE", dict(base))
            return DeliveryOutcome(Outcome.DELIVERED, t_rx)
        engine.record("DROP", base)
        return DeliveryOutcome(Outcome.DROPPED)


def transmit(engine: SimEngine, link: LinkSpec, msg: Message, d: float) -> DeliveryOutcome:
    """One-shot transmit without persistent FIFO state (single-message uses)."""
    return Transport(engine, link).transmit(msg, d)
