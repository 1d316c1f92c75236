"""CBR traffic sources, per-flow accounting and the evaluation metrics.

Delivery ratio is the mean over flows of received/sent (not total/total, which
differs when flows are heterogeneous).  Mean delay averages recv-send over the
delivered packets.  Throughput is reported twice: bytes over wall simulation
time, and bytes over the sum of per-packet delays.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .messages import Data
from .sim import US_PER_S, to_us


class UndefinedMetricError(ValueError):
    """Requested a metric whose denominator is empty."""


@dataclass
class FlowSpec:
    id: int
    src: int
    dst: int
    rate_pps: float
    payload_bytes: int
    start_us: int
    stop_us: int

    def __post_init__(self):
        if self.rate_pps <= 0:
            raise ValueError("flow rate must be positive")
        if self.start_us >= self.stop_us:
            raise ValueError("flow start must precede stop")


@dataclass
class FlowStats:
    sent: int = 0
    received: int = 0
    duplicates: int = 0
    bytes_received: int = 0
    send_time: dict[int, int] = field(default_factory=dict)
    recv_time: dict[int, int] = field(default_factory=dict)
    first_send: int | None = None
    last_recv: int | None = None

    def on_send(self, seq: int, t_us: int) -> None:
        self.sent += 1
        self.send_time[seq] = t_us
        if self.first_send is None:
            self.first_send = t_us

    def on_receive(self, seq: int, t_us: int, payload_bytes: int) -> None:
        if seq in self.recv_time:
            self.duplicates += 1
            return
        self.received += 1
        self.recv_time[seq] = t_us
        self.bytes_received += payload_bytes
        self.last_recv = t_us

    def delays_us(self) -> list[int]:
        return [self.recv_time[s] - self.send_time[s]
                for s in self.recv_time if s in self.send_time]


def delivery_ratio(flows: list[FlowStats]) -> float:
    counted = [f for f in flows if f.sent > 0]
    if not counted:
        raise UndefinedMetricError("delivery ratio over zero flows")
    return sum(f.received / f.sent for f in counted) / len(counted)


def mean_delay_s(flows: list[FlowStats]) -> float:
    delays = [d for f in flows for d in f.delays_us()]
    if not delays:
        raise UndefinedMetricError("mean delay with zero delivered packets")
    return (sum(delays) / len(delays)) / US_PER_S


def throughput_Bps(flows: list[FlowStats], sim_duration_s: float
                   ) -> tuple[float, float | None]:
    """(bytes/sim-second, bytes/total-delay-second); the second is None when
    the total delay is zero while bytes were received."""
    if sim_duration_s <= 0:
        raise UndefinedMetricError("throughput over non-positive duration")
    total_bytes = sum(f.bytes_received for f in flows)
    std = total_bytes / sim_duration_s
    total_delay_s = sum(d for f in flows for d in f.delays_us()) / US_PER_S
    if total_bytes == 0:
        return 0.0, 0.0
    if total_delay_s == 0:
        return std, None
    return std, total_bytes / total_delay_s


@dataclass
class MetricsReport:
    delivery_ratio: float
    mean_delay_s: float | None
    throughput_std_Bps: float
    throughput_paper_Bps: float | None
    sent: int
    received: int
    counters: dict[str, int]


def build_report(flows: list[FlowStats], sim_duration_s: float,
                 counters: dict[str, int]) -> MetricsReport:
    pdr = delivery_ratio(flows)
    try:
        delay = mean_delay_s(flows)
    except UndefinedMetricError:
        delay = None
    std, paper = throughput_Bps(flows, sim_duration_s)
    return MetricsReport(
        delivery_ratio=pdr,
        mean_delay_s=delay,
        throughput_std_Bps=std,
        throughput_paper_Bps=paper,
        sent=sum(f.sent for f in flows),
        received=sum(f.received for f in flows),
        counters=dict(counters),
    )


class TrafficSource:
    """Emits one flow's packets at fixed spacing and keeps its statistics."""

    def __init__(self, spec: FlowSpec, network, stats: FlowStats,
                 retries: int = 0, retry_timeout_us: int = 0):
        self.spec = spec
        self.net = network
        self.stats = stats
        self.retries = retries
        self.retry_timeout_us = retry_timeout_us
        self._next_seq = 0
        self._interval_us = to_us(1.0 / spec.rate_pps)

    def start(self) -> None:
        self.net.sim.at(self.spec.start_us, "traffic-tick", self._tick,
                        target=self.spec.src)

    def _tick(self) -> None:
        now = self.net.sim.now
        if now >= self.spec.stop_us:
            return
        seq = self._next_seq
        self._next_seq += 1
        self.stats.on_send(seq, now)
        d = Data(flow=self.spec.id, seq=seq, origin=self.spec.src,
                 dest=self.spec.dst, payload_bytes=self.spec.payload_bytes,
                 gen_us=now)
        self.net.nodes[self.spec.src].protocol.send(d)
        if self.retries > 0:
            self._arm_retry(d, self.retries)
        self.net.sim.after(self._interval_us, "traffic-tick", self._tick,
                           target=self.spec.src)

    def _arm_retry(self, d: Data, left: int) -> None:
        def check():
            if d.seq in self.stats.recv_time or left <= 0:
                return
            self.net.nodes[self.spec.src].protocol.send(d)
            self._arm_retry(d, left - 1)
        self.net.sim.after(self.retry_timeout_us, "traffic-retry", check,
                           target=self.spec.src)
