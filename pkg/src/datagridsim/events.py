"""Discrete-event core: a virtual clock and a time-ordered event queue.

Event times are integer microsecond counts; simultaneous events pop in
insertion order, so the event sequence of a run is reproducible across
platforms.
"""
import heapq
from dataclasses import dataclass
from enum import Enum

from .errors import SimulationError

US_PER_S = 1_000_000


class EventKind(Enum):
    JOB_SUBMIT = "JobSubmit"
    TRANSFER_COMPLETE = "TransferComplete"
    JOB_START = "JobStart"
    JOB_COMPLETE = "JobComplete"


@dataclass(frozen=True, slots=True)
class SimEvent:
    time_us: int
    seq: int
    kind: EventKind
    payload: object


class EventQueue:
    """Min-heap of events keyed by (time_us, seq).

    The time of the most recently popped event is the current clock;
    pushing an event before it is a fatal logic error.
    """

    __slots__ = ("_heap", "_next_seq", "clock_us")

    def __init__(self):
        self._heap: list[tuple[int, int, SimEvent]] = []
        self._next_seq = 0
        self.clock_us = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, time_us: int, kind: EventKind, payload: object) -> SimEvent:
        if time_us < 0:
            raise SimulationError(f"event time must be non-negative, got {time_us}")
        if time_us < self.clock_us:
            raise SimulationError(
                f"cannot schedule {kind.value} at t={time_us}us: "
                f"clock already at {self.clock_us}us"
            )
        ev = SimEvent(time_us, self._next_seq, kind, payload)
        self._next_seq += 1
        heapq.heappush(self._heap, (time_us, ev.seq, ev))
        return ev

    def pop(self) -> SimEvent:
        if not self._heap:
            raise SimulationError("pop from an empty event queue")
        time_us, _, ev = heapq.heappop(self._heap)
        self.clock_us = time_us
        return ev
