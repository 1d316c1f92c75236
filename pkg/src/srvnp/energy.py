"""Per-node battery model and the three-zone power classification.

Charge lives on a 0-10 scale.  Only nodes in the Active zone take part in
route discovery forwarding and repair candidacy; a node at level 0 is dead and
neither transmits nor receives.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .sim import SimLogicError

DEFAULT_ACTIVE_MIN = 5.0
DEFAULT_DANGER_MAX = 2.0
LEVEL_MAX = 10.0


class PowerZone(enum.Enum):
    ACTIVE = "active"
    CRITICAL = "critical"
    DANGER = "danger"


def classify_zone(level: float, active_min: float = DEFAULT_ACTIVE_MIN,
                  danger_max: float = DEFAULT_DANGER_MAX) -> PowerZone:
    """Active if level >= active_min, Danger if level < danger_max, else Critical."""
    if level < 0.0 or level > LEVEL_MAX:
        raise SimLogicError(f"battery level {level} outside [0, {LEVEL_MAX}]")
    if level >= active_min:
        return PowerZone.ACTIVE
    if level < danger_max:
        return PowerZone.DANGER
    return PowerZone.CRITICAL


@dataclass
class Battery:
    level: float = LEVEL_MAX
    drain_tx: float = 0.0
    drain_rx: float = 0.0
    drain_idle: float = 0.0  # units per second; 0 keeps short fixtures stable

    def drain(self, amount: float) -> None:
        if amount < 0:
            raise SimLogicError("battery drain must be non-negative")
        self.level = max(0.0, self.level - amount)

    def on_tx(self) -> None:
        self.drain(self.drain_tx)

    def on_rx(self) -> None:
        self.drain(self.drain_rx)

    def on_idle(self, seconds: float) -> None:
        self.drain(self.drain_idle * seconds)

    @property
    def dead(self) -> bool:
        return self.level <= 0.0

    def zone(self, active_min: float = DEFAULT_ACTIVE_MIN,
             danger_max: float = DEFAULT_DANGER_MAX) -> PowerZone:
        return classify_zone(self.level, active_min, danger_max)

    def power_status(self) -> float:
        """The 0-10 figure fed directly into the repair-score arithmetic."""
        return self.level
