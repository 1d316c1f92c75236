"""Deterministic discrete-event core.

Simulation time is an integer count of microseconds, so event ordering never
depends on floating-point rounding.  Ties on the fire time break by insertion
order.  All randomness flows through seeded per-stream generators; a node's
stream is derived as ``seed XOR node_id`` so adding a node never perturbs the
draws of the others.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable

US_PER_S = 1_000_000
MASK64 = 0xFFFF_FFFF_FFFF_FFFF


def to_us(seconds: float) -> int:
    """Convert seconds to integer microseconds."""
    return int(round(seconds * US_PER_S))


def to_s(t_us: int) -> float:
    return t_us / US_PER_S


class SimLogicError(RuntimeError):
    """Fatal violation of a simulator precondition (e.g. scheduling in the past)."""


@dataclass
class Event:
    fire_at: int
    target: Any  # node id or "global"
    kind: str
    payload: Any = None
    action: Callable[[], None] | None = None


class EventHandle:
    __slots__ = ("event", "cancelled")

    def __init__(self, event: Event):
        self.event = event
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True


class Simulator:
    """Single-threaded event queue with a monotonic microsecond clock."""

    def __init__(self) -> None:
        self.now: int = 0
        self._heap: list[tuple[int, int, EventHandle]] = []
        self._seq = 0

    def schedule(self, ev: Event) -> EventHandle:
        if ev.fire_at < self.now:
            raise SimLogicError(
                f"schedule at t={ev.fire_at} in the past (now={self.now})"
            )
        handle = EventHandle(ev)
        heapq.heappush(self._heap, (ev.fire_at, self._seq, handle))
        self._seq += 1
        return handle

    def at(self, t: int, kind: str, action: Callable[[], None],
           target: Any = "global", payload: Any = None) -> EventHandle:
        return self.schedule(Event(t, target, kind, payload, action))

    def after(self, dt: int, kind: str, action: Callable[[], None],
              target: Any = "global", payload: Any = None) -> EventHandle:
        return self.at(self.now + dt, kind, action, target, payload)

    def run(self, until: int) -> int:
        """Execute every event with fire_at <= until; returns executed count."""
        executed = 0
        while self._heap and self._heap[0][0] <= until:
            fire_at, _, handle = heapq.heappop(self._heap)
            if handle.cancelled:
                continue
            self.now = fire_at
            if handle.event.action is not None:
                handle.event.action()
            executed += 1
        self.now = until
        return executed


class Rng:
    """Seeded uniform source (Mersenne Twister behind a fixed 64-bit seed)."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._r = random.Random(self.seed)

    @classmethod
    def substream(cls, seed: int, stream_id: int) -> "Rng":
        return cls((seed ^ stream_id) & MASK64)

    def rand_uniform(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise SimLogicError(f"rand_uniform: lo={lo} > hi={hi}")
        return lo + (hi - lo) * self._r.random()

    def rand_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        if lo > hi:
            raise SimLogicError(f"rand_int: lo={lo} > hi={hi}")
        return lo + self._r.randrange(hi - lo + 1)
