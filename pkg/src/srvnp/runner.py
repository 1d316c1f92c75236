"""Single-run and sweep execution producing CSV rows and optional traces."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .energy import Battery
from .mobility import World
from .network import Network
from .routing import RoutingConfig
from .scenario import ScenarioConfig, ScenarioError
from .sim import Rng, Simulator, to_us
from .traffic import (FlowStats, MetricsReport, TrafficSource, build_report)

CSV_HEADER = ("seed,protocol,node_count,pause_time_s,speed_max,pdr,"
              "mean_delay_s,throughput_std_Bps,throughput_paper_Bps,"
              "sent,received,rreq_tx,err_tx,repairs_attempted,repairs_succeeded")

SWEEP_PARAMS = ("pause_time_s", "speed_max", "flow_count")


@dataclass
class RunResult:
    config: ScenarioConfig
    report: MetricsReport
    csv_row: str
    trace: list[str] | None
    network: Network
    flow_stats: list[FlowStats]


def routing_config(cfg: ScenarioConfig, protocol: str) -> RoutingConfig:
    srvnp = protocol == "srvnp"
    return RoutingConfig(
        power_gate=srvnp,
        vn_learning=srvnp,
        active_route_timeout_us=to_us(cfg.active_route_timeout_s),
        vn_refresh_interval_us=to_us(cfg.vn_refresh_interval_s),
        repair_discovery_period_us=to_us(cfg.repair_discovery_period_s),
        discovery_period_us=to_us(cfg.discovery_period_s),
        rreq_retries=cfg.rreq_retries,
        rreq_ttl=cfg.rreq_ttl,
        max_repair_distance=cfg.max_repair_distance,
        buffer_capacity=cfg.buffer_capacity,
    )


def build_network(cfg: ScenarioConfig, protocol: str | None = None,
                  trace: bool = False,
                  positions: list[tuple[float, float]] | None = None,
                  mobile: bool | None = None) -> tuple[Simulator, Network]:
    proto = protocol or cfg.protocol
    sim = Simulator()
    world = World(
        n=cfg.node_count, area_x=cfg.area_x, area_y=cfg.area_y,
        radio_range=cfg.radio_range_m, seed=cfg.seed,
        speed_min=cfg.speed_min, speed_max=cfg.speed_max,
        pause_time_us=to_us(cfg.pause_time_s),
        positions=positions,
        mobile=cfg.speed_max > 0 if mobile is None else mobile,
        steady_state_pause=cfg.steady_state_pause)
    brng = Rng.substream(cfg.seed, 0xBA77E7)
    batteries = []
    for _ in range(cfg.node_count):
        level = cfg.battery_init
        if cfg.battery_init_spread > 0:
            level -= brng.rand_uniform(0.0, cfg.battery_init_spread)
        level = min(10.0, max(0.0, level))
        batteries.append(Battery(level=level, drain_tx=cfg.drain_tx,
                                 drain_rx=cfg.drain_rx,
                                 drain_idle=cfg.drain_idle))
    net = Network(sim, world, routing_config(cfg, proto), batteries,
                  hop_latency_us=to_us(cfg.hop_latency_ms / 1000.0),
                  zone_active_min=cfg.zone_active_min,
                  zone_danger_max=cfg.zone_danger_max,
                  trace=[] if trace else None,
                  check_loops=cfg.check_loops)
    if world.mobile:
        tick_us = to_us(cfg.mobility_tick_ms / 1000.0)
        tick_s = cfg.mobility_tick_ms / 1000.0

        def tick():
            world.advance_to(sim.now)
            if cfg.drain_idle > 0:
                for n in net.nodes:
                    n.battery.on_idle(tick_s)
            sim.after(tick_us, "mobility-step", tick)

        sim.after(tick_us, "mobility-step", tick)
    return sim, net


def run_scenario(cfg: ScenarioConfig, protocol: str | None = None,
                 trace: bool = False,
                 positions: list[tuple[float, float]] | None = None
                 ) -> RunResult:
    proto = protocol or cfg.protocol
    sim, net = build_network(cfg, proto, trace=trace, positions=positions)
    flows = cfg.effective_flows()
    stats = {f.id: FlowStats() for f in flows}

    def sink(node, d):
        stats[d.flow].on_receive(d.seq, sim.now, d.payload_bytes)

    net.data_sink = sink
    net.start()
    sources = [TrafficSource(f, net, stats[f.id],
                             retries=cfg.retransmit_retries,
                             retry_timeout_us=to_us(cfg.retransmit_timeout_s))
               for f in flows]
    for s in sources:
        s.start()
    sim.run(to_us(cfg.sim_duration_s))
    flow_stats = [stats[f.id] for f in flows]
    report = build_report(flow_stats, cfg.sim_duration_s, net.counters)
    row = format_csv_row(cfg, proto, report)
    return RunResult(cfg, report, row, net.trace_lines, net, flow_stats)


def _fmt(value, digits) -> str:
    if value is None:
        return "nan"
    return f"{value:.{digits}f}"


def format_csv_row(cfg: ScenarioConfig, protocol: str,
                   report: MetricsReport) -> str:
    c = report.counters
    return ",".join([
        str(cfg.seed), protocol, str(cfg.node_count),
        _fmt(cfg.pause_time_s, 1), _fmt(cfg.speed_max, 2),
        _fmt(report.delivery_ratio, 6), _fmt(report.mean_delay_s, 6),
        _fmt(report.throughput_std_Bps, 3), _fmt(report.throughput_paper_Bps, 3),
        str(report.sent), str(report.received),
        str(c.get("rreq_tx", 0)), str(c.get("err_tx", 0)),
        str(c.get("repairs_attempted", 0)), str(c.get("repairs_succeeded", 0)),
    ])


def sweep(base: ScenarioConfig, param: str, values: list[float],
          seeds: list[int], protocols: list[str] | None = None
          ) -> tuple[list[str], list[RunResult]]:
    """Cartesian product of protocols x values x seeds, rows in that order."""
    if param not in SWEEP_PARAMS:
        raise ScenarioError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    if not values or not seeds:
        raise ScenarioError("sweep needs non-empty values and seeds")
    protos = protocols or [base.protocol]
    rows = [CSV_HEADER]
    results = []
    for proto in protos:
        for value in values:
            for seed in seeds:
                cfg = dataclasses.replace(
                    base, seed=seed, protocol=proto, flows=list(base.flows))
                if param == "flow_count":
                    cfg.flow_count = int(value)
                else:
                    setattr(cfg, param, float(value))
                cfg.validate()
                res = run_scenario(cfg)
                rows.append(res.csv_row)
                results.append(res)
    return rows, results
