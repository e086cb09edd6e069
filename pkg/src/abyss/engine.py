"""Deterministic discrete-event core: seeded streams, event queue, canonical log.

Every stochastic subsystem draws from its own labeled RngStream so that adding
or removing a subsystem never perturbs the draws seen by the others. The event
log is the single source of truth for a run: one line of JSON per dispatched
event, floats fixed to six decimals, so the SHA-256 of the log is stable
across runs and platforms.
"""

from __future__ import annotations

import hashlib
import heapq
import json
import math
import struct
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_GAMMA = 0x9E3779B97F4A7C15
_U53_INV = 2.0 ** -53


class SchedulingError(Exception):
    """Raised when an event is scheduled in the simulated past."""


class SimulationError(Exception):
    """Raised when an event handler fails; the run is aborted."""


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash, pure integer arithmetic."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


class RngStream:
    """Splitmix-style counter generator keyed by (master_seed, label).

    Equal (seed, label) pairs replay identical sequences; scalar and vector
    draws advance the same underlying counter, so they interleave freely.
    """

    def __init__(self, master_seed: int, label: str):
        if not label:
            raise ValueError("stream label must be non-empty")
        self.master_seed = master_seed
        self.label = label
        seed_bytes = struct.pack("<Q", master_seed & _MASK64)
        self._state = fnv1a64(seed_bytes + label.encode("utf-8"))

    def child(self, label: str) -> "RngStream":
        """Independent stream derived from this one's label namespace."""
        return RngStream(self.master_seed, f"{self.label}/{label}")

    def _next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix64(self._state)

    def _next_u64_array(self, n: int) -> np.ndarray:
        ks = np.uint64(self._state) + np.uint64(_GAMMA) * np.arange(
            1, n + 1, dtype=np.uint64
        )
        self._state = (self._state + n * _GAMMA) & _MASK64
        return _mix64_array(ks)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        """One double in [low, high)."""
        u = (self._next_u64() >> 11) * _U53_INV
        return low + u * (high - low)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles in [0, 1); same values as n scalar uniform() calls."""
        return (self._next_u64_array(n) >> np.uint64(11)) * _U53_INV

    def randint(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self._next_u64()
            if v < limit:
                return v % n

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def normal(self, mean: float = 0.0, std: float = 1.0) -> float:
        """Box-Muller, two uniforms per draw (spare discarded)."""
        u1 = max(self.uniform(), _U53_INV)
        u2 = self.uniform()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
        return mean + std * z

    def normals(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """n Gaussian draws; same values as n scalar normal() calls."""
        u = self.uniforms(2 * n)
        u1 = np.maximum(u[0::2], _U53_INV)
        u2 = u[1::2]
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return mean + std * z


def derive_stream(master_seed: int, label: str) -> RngStream:
    """Stream keyed by FNV-1a-64 of (seed bytes || label bytes)."""
    return RngStream(master_seed, label)


def _canonical_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value in event payload: {value!r}")
        if value == 0.0:
            value = 0.0  # normalize -0.0
        return f"{value:.6f}"
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_canonical_value(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = [
            f"{json.dumps(str(k))}:{_canonical_value(value[k])}"
            for k in sorted(value, key=str)
        ]
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"unsupported payload type: {type(value).__name__}")


@dataclass(frozen=True)
class SimEvent:
    """One record of the canonical event log."""

    seq: int
    time: float
    kind: str
    payload: dict

    def canonical(self) -> str:
        """Fixed top-level key order; payload keys sorted; floats at 6 dp."""
        return (
            f'{{"seq":{self.seq},"time":{self.time:.6f},'
            f'"kind":{json.dumps(self.kind)},'
            f'"payload":{_canonical_value(self.payload)}}}'
        )


@dataclass
class _Pending:
    time: float
    order: int
    kind: str
    payload: dict
    cancelled: bool = False

    def __lt__(self, other: "_Pending") -> bool:
        return (self.time, self.order) < (other.time, other.order)


class Handle:
    """Cancellation handle for a scheduled event."""

    def __init__(self, entry: _Pending):
        self._entry = entry

    def cancel(self) -> None:
        self._entry.cancelled = True

    @property
    def cancelled(self) -> bool:
        return self._entry.cancelled


class EventQueue:
    """Min-heap keyed by (time, insertion order); ties pop in insertion order."""

    def __init__(self):
        self._heap: list[_Pending] = []
        self._order = 0

    def __len__(self) -> int:
        return sum(1 for e in self._heap if not e.cancelled)

    def push(self, time: float, kind: str, payload: dict) -> Handle:
        entry = _Pending(time, self._order, kind, payload)
        self._order += 1
        heapq.heappush(self._heap, entry)
        return Handle(entry)

    def peek_time(self) -> float | None:
        while self._heap and self._heap[0].cancelled:
            heapq.heappop(self._heap)
        return self._heap[0].time if self._heap else None

    def pop(self) -> _Pending | None:
        while self._heap:
            entry = heapq.heappop(self._heap)
            if not entry.cancelled:
                return entry
        return None


class SimEngine:
    """Single-threaded deterministic event loop with a canonical log.

    Handlers registered per event kind may schedule further events but never
    execute them directly; dispatch is strictly sequential in (time, order).
    """

    def __init__(self, seed: int, start_time: float = 0.0):
        self.seed = seed
        self.clock = start_time
        self.queue = EventQueue()
        self.log: list[SimEvent] = []
        self._handlers: dict[str, list[Callable[["SimEngine", SimEvent], None]]] = {}
        self._streams: dict[str, RngStream] = {}
        self._seq = 0

    def stream(self, label: str) -> RngStream:
        """Per-subsystem stream; repeated calls return the same instance."""
        if label not in self._streams:
            self._streams[label] = derive_stream(self.seed, label)
        return self._streams[label]

    def subscribe(self, kind: str, handler: Callable[["SimEngine", SimEvent], None]) -> None:
        self._handlers.setdefault(kind, []).append(handler)

    def schedule(self, time: float, kind: str, payload: dict | None = None) -> Handle:
        if time < self.clock:
            raise SchedulingError(
                f"cannot schedule {kind!r} at t={time} before clock t={self.clock}"
            )
        return self.queue.push(time, kind, payload or {})

    def schedule_in(self, delay: float, kind: str, payload: dict | None = None) -> Handle:
        return self.schedule(self.clock + delay, kind, payload)

    def record(self, kind: str, payload: dict | None = None) -> SimEvent:
        """Append a log record at the current clock without queueing."""
        event = SimEvent(self._seq, self.clock, kind, payload or {})
        self._seq += 1
        self.log.append(event)
        return event

    def _dispatch(self, event: SimEvent) -> None:
        for handler in self._handlers.get(event.kind, ()):
            handler(self, event)

    def run_until(self, t_end: float) -> tuple[float, list[SimEvent]]:
        """Dispatch all events with time <= t_end, then advance the clock to t_end."""
        if t_end < self.clock:
            raise SchedulingError(
                f"run_until target t={t_end} is before clock t={self.clock}"
            )
        while True:
            t_next = self.queue.peek_time()
            if t_next is None or t_next > t_end:
                break
            entry = self.queue.pop()
            self.clock = max(self.clock, entry.time)
            event = self.record(entry.kind, entry.payload)
            try:
                self._dispatch(event)
            except Exception as exc:
                self.record(
                    "HANDLER_ERROR",
                    {"event_kind": event.kind, "error": f"{type(exc).__name__}: {exc}"},
                )
                raise SimulationError(
                    f"handler for {event.kind!r} failed at t={self.clock}: {exc}"
                ) from exc
        self.clock = t_end
        return self.clock, self.log

    def run_all(self, hard_limit: float = math.inf) -> tuple[float, list[SimEvent]]:
        """Drain the queue; clock ends at the last event (capped at hard_limit)."""
        while True:
            t_next = self.queue.peek_time()
            if t_next is None or t_next > hard_limit:
                break
            self.run_until(min(t_next, hard_limit))
        return self.clock, self.log

    def log_lines(self) -> list[str]:
        return [e.canonical() for e in self.log]

    def log_sha256(self) -> str:
        h = hashlib.sha256()
        for line in self.log_lines():
            h.update(line.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


def log_sha256_of_lines(lines: list[str]) -> str:
    """Hash of an already-serialized log (one canonical line per entry)."""
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()
