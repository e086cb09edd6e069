"""Micro-cloud offloading: random master, round-robin dispatch, loss accounting.

The master emits frames sequentially; while it is busy sending one frame it
cannot start the next, but workers process in parallel (pipelined mode). A
strict stop-and-wait mode is available for scenarios that want the master to
hold until each frame resolves. Lost frames are never retransmitted: the
completion/success metrics only make sense without retries.
"""

from __future__ import annotations

from dataclasses import dataclass

from .comms import LinkSpec, Message, Transport
from .engine import RngStream, SimEngine, SimEvent

DEFAULT_FRAME_BITS = 224 * 224 * 3 * 8  # raw 224x224 RGB frame
DEFAULT_RESULT_BITS = 2048


class ConfigurationError(Exception):
    pass


@dataclass(frozen=True)
class MicroCloudGroup:
    members: tuple[str, ...]
    master: str

    def __post_init__(self):
        if len(self.members) < 2:
            raise ConfigurationError("a micro-cloud needs at least 2 members")
        if self.master not in self.members:
            raise ConfigurationError("master must be one of the members")

    @property
    def workers(self) -> tuple[str, ...]:
        return tuple(m for m in self.members if m != self.master)


@dataclass(frozen=True)
class FrameJob:
    frame_id: int
    size: float = float(DEFAULT_FRAME_BITS)
    resolution: tuple[int, int] = (224, 224)


@dataclass(frozen=True)
class ProcessingModel:
    """Per-frame time model; overheads compose additively."""

    base_time: float = 0.028
    encasing_overhead: float = 0.005
    submersion_overhead: float = 0.020

    def __post_init__(self):
        if min(self.base_time, self.encasing_overhead, self.submersion_overhead) < 0:
            raise ValueError("processing times must be >= 0")


def frame_duration(model: ProcessingModel, encased: bool, submerged: bool) -> float:
    if submerged and not encased:
        raise ValueError("a bare device cannot be submerged")
    t = model.base_time
    if encased:
        t += model.encasing_overhead
    if submerged:
        t += model.submersion_overhead
    return t


def elect_master(members: list[str], rng: RngStream) -> MicroCloudGroup:
    """Master drawn uniformly; worker order preserves the member order."""
    if len(members) < 2:
        raise ConfigurationError("cannot elect a master from fewer than 2 members")
    master = members[rng.randint(len(members))]
    return MicroCloudGroup(tuple(members), master)


def dispatch_next(group: MicroCloudGroup, dispatch_counter: int) -> str:
    """Round-robin worker for the given dispatch count (0-based)."""
    workers = group.workers
    if not workers:
        raise ConfigurationError("no workers to dispatch to")
    return workers[dispatch_counter % len(workers)]


@dataclass(frozen=True)
class OffloadStats:
    frames_sent: int
    frames_processed: int
    results_received: int

    def __post_init__(self):
        if not (self.results_received <= self.frames_processed <= self.frames_sent):
            raise ValueError("stats must satisfy received <= processed <= sent")

    @property
    def completion_rate(self) -> float:
        return self.frames_processed / self.frames_sent

    @property
    def success_rate(self) -> float:
        return self.results_received / self.frames_sent


def _event_session(ev: SimEvent) -> str | None:
    p = ev.payload
    if "session" in p:
        return p["session"]
    inner = p.get("payload")
    if isinstance(inner, dict):
        return inner.get("session")
    return None


def compute_stats(log: list[SimEvent], session: str = "offload") -> OffloadStats:
    """Tally SEND/PROCESS_DONE/result-RECEIVE records for one session."""
    sent = processed = received = 0
    for ev in log:
        if _event_session(ev) != session:
            continue
        if ev.kind == "SEND" and ev.payload.get("msg_kind") == "frame":
            sent += 1
        elif ev.kind == "PROCESS_DONE":
            processed += 1
        elif ev.kind == "RECEIVE" and ev.payload.get("msg_kind") == "result":
            received += 1
    if sent == 0:
        raise ValueError("no frames sent; rates are undefined")
    return OffloadStats(sent, processed, received)


def session_throughput(log: list[SimEvent], session: str = "offload") -> float:
    """Processed frames per simulated second, first PROCESS_START to last DONE."""
    t_start = None
    t_end = None
    n = 0
    for ev in log:
        if _event_session(ev) != session:
            continue
        if ev.kind == "PROCESS_START" and t_start is None:
            t_start = ev.time
        elif ev.kind == "PROCESS_DONE":
            t_end = ev.time
            n += 1
    if n == 0 or t_start is None or t_end is None or t_end <= t_start:
        return 0.0
    return n / (t_end - t_start)


class OffloadSession:
    """Event-driven master/worker session on one link.

    distances maps directed (src, dst) pairs to meters; a bare float applies
    to every pair.
    """

    def __init__(
        self,
        engine: SimEngine,
        group: MicroCloudGroup,
        frames: list[FrameJob],
        link: LinkSpec,
        distances: dict[tuple[str, str], float] | float,
        model: ProcessingModel | None = None,
        *,
        encased: bool = True,
        submerged: bool = False,
        stop_and_wait: bool = False,
        result_bits: float = DEFAULT_RESULT_BITS,
        name: str = "offload",
    ):
        if not frames:
            raise ConfigurationError("frames must be non-empty")
        self.engine = engine
        self.group = group
        self.frames = list(frames)
        self.link = link
        self.model = model or ProcessingModel()
        self.duration = frame_duration(self.model, encased, submerged)
        self.stop_and_wait = stop_and_wait
        self.result_bits = result_bits
        self.name = name
        self._distances = distances
        self.transport = Transport(engine, link)
        self._next_frame = 0
        self._counter = 0
        self._busy: dict[str, bool] = {w: False for w in group.workers}
        self._queues: dict[str, list[int]] = {w: [] for w in group.workers}
        engine.subscribe("MASTER_READY", self._on_master_ready)
        engine.subscribe("RECEIVE", self._on_receive)
        engine.subscribe("PROCESS_DONE", self._on_process_done)

    def distance(self, src: str, dst: str) -> float:
        if isinstance(self._distances, dict):
            return self._distances[(src, dst)]
        return float(self._distances)

    def start(self) -> None:
        self.engine.schedule(self.engine.clock, "MASTER_READY", {"session": self.name})

    def _mine(self, ev: SimEvent) -> bool:
        return _event_session(ev) == self.name

    def _send_occupancy(self, bits: float) -> float:
        return bits / self.link.bandwidth

    def _on_master_ready(self, engine: SimEngine, ev: SimEvent) -> None:
        if not self._mine(ev) or self._next_frame >= len(self.frames):
            return
        frame = self.frames[self._next_frame]
        self._next_frame += 1
        worker = dispatch_next(self.group, self._counter)
        self._counter += 1
        msg = Message(
            id=f"{self.name}-frame-{frame.frame_id}",
            src=self.group.master,
            dst=worker,
            size=frame.size,
            kind="frame",
            payload={"session": self.name, "frame_id": frame.frame_id},
        )
        outcome = self.transport.transmit(msg, self.distance(self.group.master, worker))
        if not self.stop_and_wait:
            t_free = engine.clock + self._send_occupancy(frame.size)
            engine.schedule(t_free, "MASTER_READY", {"session": self.name})
        elif not outcome.delivered:
            # stop-and-wait: a dropped frame resolves when the send completes
            t_free = engine.clock + self._send_occupancy(frame.size)
            engine.schedule(t_free, "MASTER_READY", {"session": self.name})

    def _on_receive(self, engine: SimEngine, ev: SimEvent) -> None:
        if not self._mine(ev):
            return
        p = ev.payload
        if p["msg_kind"] == "frame" and p["dst"] in self._queues:
            worker = p["dst"]
            self._queues[worker].append(p["payload"]["frame_id"])
            if not self._busy[worker]:
                self._begin_processing(worker)
        elif p["msg_kind"] == "result" and p["dst"] == self.group.master:
            if self.stop_and_wait:
                engine.schedule(engine.clock, "MASTER_READY", {"session": self.name})

    def _begin_processing(self, worker: str) -> None:
        frame_id = self._queues[worker].pop(0)
        self._busy[worker] = True
        self.engine.record(
            "PROCESS_START", {"session": self.name, "worker": worker, "frame_id": frame_id}
        )
        self.engine.schedule_in(
            self.duration,
            "PROCESS_DONE",
            {"session": self.name, "worker": worker, "frame_id": frame_id},
        )

    def _on_process_done(self, engine: SimEngine, ev: SimEvent) -> None:
        if not self._mine(ev):
            return
        worker = ev.payload["worker"]
        frame_id = ev.payload["frame_id"]
        msg = Message(
            id=f"{self.name}-result-{frame_id}",
            src=worker,
            dst=self.group.master,
            size=self.result_bits,
            kind="result",
            payload={"session": self.name, "frame_id": frame_id},
        )
        outcome = self.transport.transmit(msg, self.distance(worker, self.group.master))
        if self.stop_and_wait and not outcome.delivered:
            engine.schedule(engine.clock, "MASTER_READY", {"session": self.name})
        self._busy[worker] = False
        if self._queues[worker]:
            self._begin_processing(worker)


def run_offload_session(
    engine: SimEngine,
    group: MicroCloudGroup,
    frames: list[FrameJob],
    link: LinkSpec,
    distances: dict[tuple[str, str], float] | float,
    model: ProcessingModel | None = None,
    **kwargs,
) -> OffloadStats:
    """Run a full session to completion and tally its stats from the log."""
    session = OffloadSession(engine, group, frames, link, distances, model, **kwargs)
    session.start()
    engine.run_all()
    return compute_stats(engine.log, session.name)
