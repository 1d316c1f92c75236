"""Random-waypoint mobility over a rectangle with unit-disk connectivity.

Positions for the whole population advance in one vectorized step per mobility
tick; queries between ticks project positions forward without mutating state,
so the error from lazy updates is zero.  The unit-disk boundary is inclusive:
nodes exactly at radio range are connected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .sim import Rng, SimLogicError, US_PER_S


@dataclass(frozen=True)
class Position:
    x: float
    y: float


@dataclass
class MobilityState:
    pos: Position
    waypoint: Position
    speed: float
    paused_until: int  # us


def in_range(a: Position, b: Position, radio_range: float) -> bool:
    return math.dist((a.x, a.y), (b.x, b.y)) <= radio_range


def step_waypoint(m: MobilityState, dt_us: int, rng: Rng,
                  area_x: float, area_y: float,
                  speed_min: float, speed_max: float,
                  pause_time_us: int, now_us: int = 0) -> MobilityState:
    """Scalar reference step: move toward the waypoint, pause on arrival, redraw.

    The vectorized tick in :class:`World` must agree with this function; the
    property tests compare the two.
    """
    if dt_us <= 0:
        raise SimLogicError("step_waypoint requires dt > 0")
    end = now_us + dt_us
    start = max(now_us, m.paused_until)
    if end <= start:
        return m
    dt_s = (end - start) / US_PER_S
    dx = m.waypoint.x - m.pos.x
    dy = m.waypoint.y - m.pos.y
    dist = math.hypot(dx, dy)
    step = m.speed * dt_s
    if step < dist:
        f = step / dist
        return replace(m, pos=Position(m.pos.x + dx * f, m.pos.y + dy * f))
    # arrival: pause, then a fresh uniform waypoint and speed
    arrived = Position(m.waypoint.x, m.waypoint.y)
    wp = Position(rng.rand_uniform(0.0, area_x), rng.rand_uniform(0.0, area_y))
    speed = rng.rand_uniform(speed_min, speed_max)
    return MobilityState(arrived, wp, speed, end + pause_time_us)


class World:
    """Positions and motion for the whole node population."""

    def __init__(self, n: int, area_x: float, area_y: float, radio_range: float,
                 seed: int, speed_min: float, speed_max: float,
                 pause_time_us: int, positions: list[tuple[float, float]] | None = None,
                 mobile: bool = True, steady_state_pause: bool = False):
        self.n = n
        self.area_x = area_x
        self.area_y = area_y
        self.radio_range = radio_range
        self.range_sq = radio_range * radio_range
        self.speed_min = speed_min
        self.speed_max = speed_max
        self.pause_time_us = pause_time_us
        self.mobile = mobile and speed_max > 0
        self._rngs = [Rng.substream(seed, i) for i in range(n)]
        placement = Rng.substream(seed, 0x5EED0905)
        self.xs = np.empty(n, dtype=np.float64)
        self.ys = np.empty(n, dtype=np.float64)
        self.wx = np.empty(n, dtype=np.float64)
        self.wy = np.empty(n, dtype=np.float64)
        self.speed = np.zeros(n, dtype=np.float64)
        self.paused_until = np.zeros(n, dtype=np.int64)
        self.alive = np.ones(n, dtype=np.bool_)
        for i in range(n):
            if positions is not None:
                x, y = positions[i]
            else:
                x = placement.rand_uniform(0.0, area_x)
                y = placement.rand_uniform(0.0, area_y)
            self.xs[i] = x
            self.ys[i] = y
            if self.mobile:
                r = self._rngs[i]
                self.wx[i] = r.rand_uniform(0.0, area_x)
                self.wy[i] = r.rand_uniform(0.0, area_y)
                self.speed[i] = r.rand_uniform(speed_min, speed_max)
                if steady_state_pause and pause_time_us > 0:
                    # start mid-pause so mean mobility scales with pause time
                    self.paused_until[i] = int(r.rand_uniform(0.0, pause_time_us))
            else:
                self.wx[i] = x
                self.wy[i] = y
        self._last_tick = 0
        self._cache_t = 0
        self._cache_x = self.xs.copy()
        self._cache_y = self.ys.copy()

    def advance_to(self, t_us: int) -> None:
        """Commit motion up to t_us and handle waypoint arrivals."""
        if not self.mobile or t_us <= self._last_tick:
            self._last_tick = max(self._last_tick, t_us)
            return
        arrived = np.zeros(self.n, dtype=np.bool_)
        _kernels.advance_positions(self.xs, self.ys, self.wx, self.wy,
                                   self.speed, self.paused_until,
                                   self._last_tick, t_us, arrived)
        for i in np.nonzero(arrived)[0]:
            r = self._rngs[i]
            self.wx[i] = r.rand_uniform(0.0, self.area_x)
            self.wy[i] = r.rand_uniform(0.0, self.area_y)
            self.speed[i] = r.rand_uniform(self.speed_min, self.speed_max)
            self.paused_until[i] = t_us + self.pause_time_us
        self._last_tick = t_us
        self._cache_t = -1  # invalidate

    def positions_at(self, t_us: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.mobile:
            return self.xs, self.ys
        if t_us == self._cache_t:
            return self._cache_x, self._cache_y
        _kernels.project_positions(self.xs, self.ys, self.wx, self.wy,
                                   self.speed, self.paused_until,
                                   self._last_tick, t_us,
                                   self._cache_x, self._cache_y)
        self._cache_t = t_us
        return self._cache_x, self._cache_y

    def neighbors_mask(self, i: int, t_us: int) -> np.ndarray:
        xs, ys = self.positions_at(t_us)
        mask = _kernels.range_mask(xs, ys, xs[i], ys[i], self.range_sq, self.alive)
        mask[i] = False
        return mask

    def neighbors(self, i: int, t_us: int) -> list[int]:
        return [int(j) for j in np.nonzero(self.neighbors_mask(i, t_us))[0]]

    def in_range(self, i: int, j: int, t_us: int) -> bool:
        xs, ys = self.positions_at(t_us)
        dx = xs[i] - xs[j]
        dy = ys[i] - ys[j]
        return dx * dx + dy * dy <= self.range_sq

    def position(self, i: int, t_us: int) -> Position:
        xs, ys = self.positions_at(t_us)
        return Position(float(xs[i]), float(ys[i]))

    def remove(self, i: int) -> None:
        """Take a node out of the radio graph (departed or dead)."""
        self.alive[i] = False
