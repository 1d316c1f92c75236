"""Built-in static fixtures: the two routing narratives and the repair-score
table.  Node placements are pinned so the unit-disk adjacency matches the
intended topology exactly; the fixture runners assert that before simulating.
"""
from __future__ import annotations

from dataclasses import dataclass

from .energy import Battery, PowerZone, classify_zone
from .mobility import World
from .network import Network
from .routing import (RepairContext, RouteEntry, RouteState, RoutingConfig,
                      VirtualNodeRecord, repair_score, select_repair_next_hop)
from .sim import Simulator, to_us
from .traffic import FlowSpec, FlowStats, TrafficSource

RANGE_M = 250.0

# chain A-B-C-D below, stable ring A-B-H-G-F-E-D above, detour I, side nodes J,K
FIG1_POSITIONS = {
    "A": (0.0, 150.0), "B": (200.0, 210.0), "C": (400.0, 120.0),
    "D": (620.0, 120.0), "E": (775.0, 311.2), "F": (630.0, 510.0),
    "G": (403.5, 601.5), "H": (240.0, 420.0), "I": (466.5, 328.5),
    "J": (813.9, 121.0), "K": (990.0, 30.0),
}
FIG1_EDGES = {
    ("A", "B"), ("B", "C"), ("C", "D"), ("B", "H"), ("H", "G"), ("G", "F"),
    ("F", "E"), ("E", "D"), ("H", "I"), ("I", "F"), ("J", "D"), ("J", "E"),
    ("J", "K"),
    # harmless extra link: C sits near I but never forwards (danger zone)
    ("C", "I"),
}

# line A-B-N-O-X with repair backbone N-L-M-K-X and rejected branch L-P-X
FIG2_POSITIONS = {
    "A": (0.0, 300.0), "B": (240.0, 300.0), "N": (480.0, 300.0),
    "O": (720.0, 300.0), "X": (960.0, 300.0), "L": (540.0, 520.0),
    "P": (768.6, 445.4), "P1": (480.0, 70.0), "M": (730.0, 660.0),
    "K": (912.4, 523.1),
}
FIG2_EDGES = {
    ("A", "B"), ("B", "N"), ("N", "O"), ("O", "X"), ("N", "L"), ("N", "P1"),
    ("L", "P"), ("L", "M"), ("P", "X"), ("M", "K"), ("K", "X"),
    # harmless extras around the low-power node P and the detour arc
    ("O", "P"), ("M", "P"), ("K", "P"),
}

# printed repair-score table: (vn, min_ttl, hops, power, printed_total)
TABLE1_ROWS = {
    "L": (3, 3, 1, 9.0, 15.0),
    "M": (4, 2, 2, 8.5, 14.5),
    "G": (3, 1, 3, 8.0, 12.0),
    "P": (3, 1, 2, 4.0, 8.0),
    "Q": (3, 1, 3, 3.0, 7.0),
    "P1": (1, 4, 1, 7.0, 12.5),  # arithmetic gives 12; 12.5 is a typo
    "P2": (2, 3, 2, 7.0, 12.0),
    "G1": (2, 1, 4, 7.5, 10.5),
    "L1": (1, 3, 2, 8.0, 12.0),
}


def table1_contexts() -> dict[str, RepairContext]:
    return {name: RepairContext(min_rpr_ttl=ttl, vn_count=vn,
                                hops_to_sender=hops, power=power)
            for name, (vn, ttl, hops, power, _) in TABLE1_ROWS.items()}


def table1_scores() -> dict[str, float]:
    return {name: repair_score(ctx) for name, ctx in table1_contexts().items()}


def adjacency(positions: dict[str, tuple[float, float]],
              radio_range: float = RANGE_M) -> set[tuple[str, str]]:
    names = sorted(positions)
    edges = set()
    for i, a in enumerate(names):
        ax, ay = positions[a]
        for b in names[i + 1:]:
            bx, by = positions[b]
            if (ax - bx) ** 2 + (ay - by) ** 2 <= radio_range ** 2:
                edges.add(tuple(sorted((a, b))))
    return edges


def _check_adjacency(positions, expected) -> None:
    got = adjacency(positions)
    want = {tuple(sorted(e)) for e in expected}
    if got != want:
        missing = want - got
        extra = got - missing - want
        raise AssertionError(
            f"fixture placement drifted: missing={sorted(want - got)} "
            f"unexpected={sorted(got - want)}")


@dataclass
class FixtureNet:
    sim: Simulator
    net: Network
    names: list[str]
    idx: dict[str, int]
    stats: FlowStats

    def path(self, src: str, dst: str) -> list[str] | None:
        p = self.net.route_path(self.idx[src], self.idx[dst])
        if p is None:
            return None
        return [self.names[i] for i in p]


def _build(positions: dict[str, tuple[float, float]],
           batteries: dict[str, float], srvnp: bool = True) -> FixtureNet:
    names = sorted(positions)
    idx = {n: i for i, n in enumerate(names)}
    sim = Simulator()
    world = World(n=len(names), area_x=1000.0, area_y=1000.0,
                  radio_range=RANGE_M, seed=0, speed_min=0.0, speed_max=0.0,
                  pause_time_us=0,
                  positions=[positions[n] for n in names], mobile=False)
    packs = [Battery(level=batteries.get(n, 9.0)) for n in names]
    cfg = RoutingConfig() if srvnp else RoutingConfig.baseline()
    net = Network(sim, world, cfg, packs, trace=[], check_loops=True)
    net.start()
    return FixtureNet(sim, net, names, idx, FlowStats())


def _attach_flow(fx: FixtureNet, src: str, dst: str, rate_pps: float,
                 start_s: float, stop_s: float) -> None:
    spec = FlowSpec(id=0, src=fx.idx[src], dst=fx.idx[dst], rate_pps=rate_pps,
                    payload_bytes=64, start_us=to_us(start_s),
                    stop_us=to_us(stop_s))
    fx.net.data_sink = lambda node, d: fx.stats.on_receive(
        d.seq, fx.sim.now, d.payload_bytes)
    TrafficSource(spec, fx.net, fx.stats).start()


@dataclass
class Fig1Result:
    initial_path: list[str]
    repaired_path: list[str]
    stats: FlowStats
    trace: list[str]


def run_fig1(srvnp: bool = True) -> Fig1Result:
    """Danger-zone C forces the stable ring; removing G triggers local repair
    through the overhearing detour node I."""
    _check_adjacency(FIG1_POSITIONS, FIG1_EDGES)
    batteries = {n: 9.0 for n in FIG1_POSITIONS}
    batteries["C"] = 1.5   # danger zone
    batteries["I"] = 8.0
    fx = _build(FIG1_POSITIONS, batteries, srvnp=srvnp)
    _attach_flow(fx, "A", "D", rate_pps=10.0, start_s=0.1, stop_s=4.0)
    fx.sim.run(to_us(1.9))
    initial = fx.path("A", "D") or []
    fx.sim.at(to_us(2.0), "node-departure",
              lambda: fx.net.world.remove(fx.idx["G"]))
    fx.sim.run(to_us(4.0))
    repaired = fx.path("A", "D") or []
    return Fig1Result(initial, repaired, fx.stats, fx.net.trace_lines)


@dataclass
class Fig2Result:
    initial_path: list[str]
    repaired_path: list[str]
    repair_path: list[str]
    selected: str | None
    candidate_scores: dict[str, float]
    stats: FlowStats
    trace: list[str]


def _seed_invalid_entry(fx: FixtureNet, node: str, dest: str, next_hop: str,
                        hops: int, vns: dict[str, float]) -> None:
    proto = fx.net.nodes[fx.idx[node]].protocol
    entry = RouteEntry(
        dest=fx.idx[dest], next_hop=fx.idx[next_hop], hop_count=hops,
        dest_seq=0, state=RouteState.INVALID, expires_at=0,
        path_min_power=0.0, last_known_hop_count=hops)
    for vn, power in vns.items():
        entry.virtual_nodes[fx.idx[vn]] = VirtualNodeRecord(
            fx.idx[vn], power, fx.sim.now)
    proto.routes[fx.idx[dest]] = entry


def run_fig2() -> Fig2Result:
    """Break at N: the repair picks L over P1 on the printed scores, the
    power gate keeps critical P out, and the backbone becomes N-L-M-K-X."""
    _check_adjacency(FIG2_POSITIONS, FIG2_EDGES)
    batteries = {n: 9.0 for n in FIG2_POSITIONS}
    batteries["L"] = 9.0
    batteries["M"] = 8.5
    batteries["P"] = 4.0   # critical: rejected as repair hop
    batteries["P1"] = 7.0
    fx = _build(FIG2_POSITIONS, batteries, srvnp=True)
    _attach_flow(fx, "A", "X", rate_pps=10.0, start_s=0.1, stop_s=4.0)
    fx.sim.run(to_us(1.0))
    initial = fx.path("A", "X") or []
    # histories behind the printed score table: L and P1 once held routes
    # toward X (L via P) that have since timed out
    _seed_invalid_entry(fx, "L", "X", next_hop="P", hops=3,
                        vns={"P": 4.0, "M": 8.5, "K": 9.0})
    _seed_invalid_entry(fx, "P1", "X", next_hop="N", hops=4,
                        vns={"N": 9.0})
    fx.sim.at(to_us(2.0), "node-departure",
              lambda: fx.net.world.remove(fx.idx["O"]))
    fx.sim.run(to_us(4.0))
    repaired = fx.path("A", "X") or []
    repair_path = fx.path("N", "X") or []
    # which candidate the break-time selection chose, from the trace
    selected = None
    for line in fx.net.trace_lines:
        if f"node={fx.idx['N']} ev=REPAIR_OK" in line:
            nh = fx.net.nodes[fx.idx["N"]].protocol.routes[fx.idx["X"]].next_hop
            selected = fx.names[nh]
            break
    scores = {name: repair_score(ctx)
              for name, ctx in table1_contexts().items()
              if name in ("L", "P1", "P")}
    return Fig2Result(initial, repaired, repair_path, selected, scores,
                      fx.stats, fx.net.trace_lines)


def fig2_candidate_selection() -> tuple[int | None, dict[str, float]]:
    """The break-time choice among L, P1 and critical-zone P, using the
    printed table contexts directly."""
    ctxs = table1_contexts()
    cands = [
        (0, ctxs["L"], PowerZone.ACTIVE),
        (1, ctxs["P1"], PowerZone.ACTIVE),
        (2, ctxs["P"], classify_zone(4.0)),
    ]
    return select_repair_next_hop(cands), {n: repair_score(ctxs[n])
                                           for n in ("L", "P1", "P")}
