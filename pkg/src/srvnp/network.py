"""Glue between the event queue, the radio substrate and the per-node protocol.

The link layer is idealized: a unicast either reaches the addressed node (and
is offered to every other in-range node as an overheard copy) or fails
immediately with link-break feedback to the sender.  There is no loss other
than out-of-range and no contention.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .energy import Battery, PowerZone, classify_zone
from .messages import Data, RRep, frame_size
from .mobility import World
from .routing import RepairContext, RoutingConfig, RoutingNode
from .sim import SimLogicError, Simulator


class LoopError(SimLogicError):
    """A table mutation produced a next-hop cycle for some destination."""


@dataclass
class Node:
    id: int
    battery: Battery
    protocol: RoutingNode = None


class Network:
    def __init__(self, sim: Simulator, world: World, cfg: RoutingConfig,
                 batteries: list[Battery], hop_latency_us: int = 2000,
                 zone_active_min: float = 5.0, zone_danger_max: float = 2.0,
                 trace: list[str] | None = None, check_loops: bool = False):
        self.sim = sim
        self.world = world
        self.cfg = cfg
        self.hop_latency_us = hop_latency_us
        self.zone_active_min = zone_active_min
        self.zone_danger_max = zone_danger_max
        self.trace_lines = trace
        self.check_loops = check_loops
        self.counters: dict[str, int] = {}
        self.data_sink = None  # callable(node, Data) set by the harness
        self.nodes = [Node(i, batteries[i]) for i in range(world.n)]
        for n in self.nodes:
            n.protocol = RoutingNode(n.id, self, cfg)

    def start(self) -> None:
        for n in self.nodes:
            n.protocol.start()

    # -- env interface used by RoutingNode ---------------------------------

    def now(self) -> int:
        return self.sim.now

    def timer(self, node: int, delay_us: int, fn, periodic: bool = False):
        return self.sim.after(delay_us, "timer", fn, target=node)

    def power_of(self, node: int) -> float:
        return self.nodes[node].battery.level

    def zone_of(self, node: int) -> PowerZone:
        return classify_zone(self.nodes[node].battery.level,
                             self.zone_active_min, self.zone_danger_max)

    def alive_in_range(self, a: int, b: int) -> bool:
        return (self._alive(b) and self.world.alive[b]
                and self.world.in_range(a, b, self.sim.now))

    def repair_context_of(self, candidate: int, dest: int,
                          exclude: tuple[int, ...] = ()) -> RepairContext:
        # stands in for state piggybacked on the periodic neighbor beacons;
        # routes through the repairing node or the broken hop are useless to
        # the repair and do not count toward the candidate's score
        return self.nodes[candidate].protocol.advertised_context(dest, exclude)

    def count(self, name: str, inc: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + inc

    def trace(self, node: int, ev: str, **kv) -> None:
        if self.trace_lines is None:
            return
        extra = " ".join(f"{k}={v}" for k, v in kv.items())
        line = f"t={self.sim.now} node={node} ev={ev}"
        self.trace_lines.append(line + (" " + extra if extra else ""))

    def deliver_data(self, node: int, d: Data) -> None:
        if self.data_sink is not None:
            self.data_sink(node, d)

    def _alive(self, i: int) -> bool:
        return not self.nodes[i].battery.dead

    def unicast(self, src: int, dst: int, msg) -> bool:
        """True if the frame left toward dst; link-break feedback otherwise."""
        if src == dst or dst >= self.world.n:
            raise SimLogicError(f"unicast {src}->{dst} invalid")
        if not self._alive(src) or not self.world.alive[src]:
            return False
        t = self.sim.now
        self.nodes[src].battery.on_tx()
        mask = self.world.neighbors_mask(src, t)
        receivers = [int(j) for j in mask.nonzero()[0] if self._alive(int(j))]
        if dst not in receivers:
            return False
        overhearers = [j for j in receivers if j != dst]
        at = t + self.hop_latency_us
        self.sim.at(at, "frame-arrival",
                    lambda d=dst, s=src, m=msg: self._deliver(s, d, m),
                    target=dst, payload=msg)
        if overhearers:
            self.sim.at(at, "frame-overheard",
                        lambda ws=overhearers, s=src, m=msg:
                        [self._overhear(s, w, m) for w in ws],
                        target=dst, payload=msg)
        if isinstance(msg, RRep) or (isinstance(msg, Data)
                                     and not msg.alternate_candidate):
            # replies and data travel the primary route; whoever overhears one
            # becomes a virtual node of the transmitter for that destination
            self.nodes[src].protocol.record_virtual_nodes(msg.dest, overhearers)
        return True

    def broadcast(self, src: int, msg) -> list[int]:
        if not self._alive(src) or not self.world.alive[src]:
            return []
        t = self.sim.now
        self.nodes[src].battery.on_tx()
        mask = self.world.neighbors_mask(src, t)
        receivers = [int(j) for j in mask.nonzero()[0] if self._alive(int(j))]
        at = t + self.hop_latency_us
        if receivers:
            self.sim.at(at, "frame-arrival",
                        lambda ws=receivers, s=src, m=msg:
                        [self._deliver(s, w, m) for w in ws],
                        target=src, payload=msg)
        return receivers

    def _deliver(self, src: int, dst: int, msg) -> None:
        if not self._alive(dst) or not self.world.alive[dst]:
            return
        self.nodes[dst].battery.on_rx()
        self.nodes[dst].protocol.on_frame(src, msg)

    def _overhear(self, src: int, node: int, msg) -> None:
        if not self._alive(node) or not self.world.alive[node]:
            return
        self.nodes[node].battery.on_rx()
        self.nodes[node].protocol.on_overhear(src, msg)

    # -- invariants --------------------------------------------------------

    def on_table_change(self, node: int, dest: int) -> None:
        if not self.check_loops:
            return
        self.assert_loop_free(dest)

    def assert_loop_free(self, dest: int) -> None:
        """Follow active next hops toward dest from every node; raise on a cycle."""
        for start in range(self.world.n):
            seen = {start}
            cur = start
            while cur != dest:
                nh = self.nodes[cur].protocol.route_next_hop(dest)
                if nh is None:
                    break
                if nh in seen:
                    self.count("loop_violations")
                    raise LoopError(f"next-hop cycle for dest {dest} at {nh}")
                seen.add(nh)
                cur = nh

    def route_path(self, src: int, dest: int, limit: int = 64) -> list[int] | None:
        """Active next-hop chain from src to dest, or None if it dead-ends."""
        path = [src]
        cur = src
        while cur != dest:
            nh = self.nodes[cur].protocol.route_next_hop(dest)
            if nh is None or len(path) > limit:
                return None
            path.append(nh)
            cur = nh
        return path
