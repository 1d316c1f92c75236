"""Scenario configuration: flat ``key = value`` files with strict validation.

Unknown keys are fatal (with a nearest-key suggestion); missing keys take the
documented defaults, which reproduce the reference scenario: 100 nodes in a
1000x1000 m area, radio range 250 m, 25 CBR flows.
"""
from __future__ import annotations

import difflib
from dataclasses import dataclass, field, fields

from .sim import Rng, to_us
from .traffic import FlowSpec


class ScenarioError(ValueError):
    """Configuration file problem; message names the key and line."""


@dataclass
class ScenarioConfig:
    area_x: float = 1000.0
    area_y: float = 1000.0
    node_count: int = 100
    radio_range_m: float = 250.0
    speed_min: float = 0.5
    speed_max: float = 10.0
    pause_time_s: float = 0.0
    sim_duration_s: float = 100.0
    seed: int = 1
    protocol: str = "srvnp"
    hop_latency_ms: float = 2.0
    mobility_tick_ms: float = 100.0
    steady_state_pause: bool = True
    # energy model
    battery_init: float = 10.0
    battery_init_spread: float = 0.0
    drain_tx: float = 0.0005
    drain_rx: float = 0.0002
    drain_idle: float = 0.0
    zone_active_min: float = 5.0
    zone_danger_max: float = 2.0
    # routing tunables
    active_route_timeout_s: float = 3.0
    vn_refresh_interval_s: float = 1.0
    repair_discovery_period_s: float = 0.2
    discovery_period_s: float = 1.0
    rreq_retries: int = 2
    rreq_ttl: int = 35
    max_repair_distance: int = 5
    buffer_capacity: int = 64
    # traffic defaults used when no explicit flow lines are given
    flow_count: int = 25
    flow_rate_pps: float = 4.0
    flow_payload_bytes: int = 512
    flow_start_s: float = 1.0
    retransmit_retries: int = 0
    retransmit_timeout_s: float = 0.5
    check_loops: bool = False
    flows: list[FlowSpec] = field(default_factory=list)

    def validate(self) -> None:
        if self.node_count < 2:
            raise ScenarioError("node_count must be at least 2")
        if self.speed_min > self.speed_max:
            raise ScenarioError(
                f"speed_min ({self.speed_min}) exceeds speed_max ({self.speed_max})")
        if self.protocol not in ("srvnp", "aodv_baseline"):
            raise ScenarioError(
                f"protocol must be srvnp or aodv_baseline, got {self.protocol!r}")
        if self.pause_time_s < 0 or self.sim_duration_s <= 0:
            raise ScenarioError("pause_time_s must be >= 0 and sim_duration_s > 0")
        for f in self.flows:
            if not (0 <= f.src < self.node_count) or not (0 <= f.dst < self.node_count):
                raise ScenarioError(
                    f"flow {f.id}: src/dst must be node ids below node_count")
            if f.src == f.dst:
                raise ScenarioError(f"flow {f.id}: src equals dst")

    def effective_flows(self) -> list[FlowSpec]:
        """Explicit flows, or flow_count random pairs drawn from the seed."""
        if self.flows:
            return self.flows
        rng = Rng.substream(self.seed, 0xF10C0DE)
        flows = []
        for i in range(self.flow_count):
            src = rng.rand_int(0, self.node_count - 1)
            dst = rng.rand_int(0, self.node_count - 2)
            if dst >= src:
                dst += 1
            flows.append(FlowSpec(
                id=i, src=src, dst=dst, rate_pps=self.flow_rate_pps,
                payload_bytes=self.flow_payload_bytes,
                start_us=to_us(self.flow_start_s),
                stop_us=to_us(self.sim_duration_s)))
        return flows


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)
                if f.name != "flows"}
_BOOL_KEYS = {"steady_state_pause", "check_loops"}
_INT_KEYS = {"node_count", "seed", "rreq_retries", "rreq_ttl",
             "max_repair_distance", "buffer_capacity", "flow_count",
             "flow_payload_bytes", "retransmit_retries"}
_STR_KEYS = {"protocol"}


def _parse_value(key: str, raw: str, lineno: int):
    try:
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError("expected a boolean")
        if key in _INT_KEYS:
            return int(raw)
        if key in _STR_KEYS:
            return raw
        return float(raw)
    except ValueError as exc:
        raise ScenarioError(
            f"line {lineno}: bad value for {key!r}: {raw!r} ({exc})") from exc


def _parse_flow(raw: str, lineno: int, flow_id: int) -> FlowSpec:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 6:
        raise ScenarioError(
            f"line {lineno}: flow needs src,dst,rate_pps,payload_bytes,start_s,stop_s")
    try:
        src, dst = int(parts[0]), int(parts[1])
        rate = float(parts[2])
        payload = int(parts[3])
        start_s, stop_s = float(parts[4]), float(parts[5])
        return FlowSpec(id=flow_id, src=src, dst=dst, rate_pps=rate,
                        payload_bytes=payload, start_us=to_us(start_s),
                        stop_us=to_us(stop_s))
    except ValueError as exc:
        raise ScenarioError(f"line {lineno}: bad flow spec {raw!r}: {exc}") from exc


def parse_scenario_text(text: str) -> ScenarioConfig:
    cfg = ScenarioConfig()
    flows: list[FlowSpec] = []
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {rawline!r}")
        key, _, raw = line.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key == "flow":
            flows.append(_parse_flow(raw, lineno, len(flows)))
            continue
        if key not in _FIELD_TYPES:
            hint = difflib.get_close_matches(key, list(_FIELD_TYPES) + ["flow"], n=1)
            suggest = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ScenarioError(f"line {lineno}: unknown key {key!r}{suggest}")
        setattr(cfg, key, _parse_value(key, raw, lineno))
    cfg.flows = flows
    cfg.validate()
    return cfg


def parse_scenario(path: str) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path!r}: {exc}") from exc
    return parse_scenario_text(text)
