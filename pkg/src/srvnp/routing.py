"""On-demand routing state machine.

One class implements both protocol variants: SRVNP (power-gated discovery,
virtual-node learning by promiscuous overhearing, score-directed local repair)
and the AODV-like baseline (same machinery with the power gate and virtual
nodes switched off and a plain scoped-flood repair).

The repair score is

    score = max(last_known_hops + vn_count, 0.5 * hops_to_sender) + power

used both as the hop budget (TTL, rounded up) of a repair flood and as the
weight for picking the repair next hop among virtual-node candidates.

A node installs a route only when (dest_seq, -hop_count) does not get
lexicographically worse than its current active entry, which keeps the
next-hop graph per destination acyclic at all times.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field, replace

from .energy import PowerZone
from .messages import Data, Err, RRep, RReq, RRpr
from .sim import US_PER_S


class RouteState(enum.Enum):
    ACTIVE = "active"
    INVALID = "invalid"
    UNDER_REPAIR = "under_repair"


@dataclass
class VirtualNodeRecord:
    node: int
    power: float
    learned_at: int


@dataclass
class AlternateRecord:
    hop_count: int
    learned_at: int


@dataclass
class RouteEntry:
    dest: int
    next_hop: int
    hop_count: int
    dest_seq: int
    state: RouteState
    expires_at: int
    path_min_power: float
    last_known_hop_count: int
    precursors: set[int] = field(default_factory=set)
    virtual_nodes: dict[int, VirtualNodeRecord] = field(default_factory=dict)


@dataclass
class RepairContext:
    min_rpr_ttl: int      # last known hop count to the destination
    vn_count: int         # virtual nodes attached
    hops_to_sender: int   # hops back to the node whose packets stalled
    power: float          # battery level, 0-10


def repair_score(ctx: RepairContext) -> float:
    """Repair score / TTL: max(min_rpr_ttl + vn, 0.5 * hops) + power."""
    return max(ctx.min_rpr_ttl + ctx.vn_count, 0.5 * ctx.hops_to_sender) + ctx.power


def select_repair_next_hop(
        candidates: list[tuple[int, RepairContext, PowerZone]]) -> int | None:
    """Highest score among Active-zone candidates; ties prefer fewer hops to
    the destination, then the smaller node id.  None if nothing qualifies."""
    best_key = None
    best_node = None
    for node, ctx, zone in candidates:
        if zone is not PowerZone.ACTIVE:
            continue
        key = (-repair_score(ctx), ctx.min_rpr_ttl, node)
        if best_key is None or key < best_key:
            best_key = key
            best_node = node
    return best_node


@dataclass
class RoutingConfig:
    power_gate: bool = True
    vn_learning: bool = True
    active_route_timeout_us: int = 3 * US_PER_S
    vn_refresh_interval_us: int = 1 * US_PER_S
    repair_discovery_period_us: int = 200_000
    discovery_period_us: int = 1 * US_PER_S
    rreq_retries: int = 2
    rreq_ttl: int = 35
    max_repair_distance: int = 5
    buffer_capacity: int = 64
    baseline_repair_ttl_const: int = 2
    sweep_interval_us: int = 500_000
    seen_rreq_lifetime_us: int = 10 * US_PER_S

    @classmethod
    def baseline(cls, **kw) -> "RoutingConfig":
        kw.setdefault("power_gate", False)
        kw.setdefault("vn_learning", False)
        return cls(**kw)


@dataclass
class _Discovery:
    rreq_id: int
    retries_left: int
    handle: object


@dataclass
class _Repair:
    handle: object
    prev_hops: int


class RoutingNode:
    """Per-node protocol instance; all calls arrive on the simulation thread."""

    def __init__(self, node_id: int, env, cfg: RoutingConfig):
        self.node = node_id
        self.env = env
        self.cfg = cfg
        self.routes: dict[int, RouteEntry] = {}
        self.alternates: dict[int, dict[int, AlternateRecord]] = {}
        self.seen_rreq: dict[tuple[int, int], int] = {}
        self.reply_best: dict[tuple[int, int], tuple[int, float]] = {}
        self.buffers: dict[int, deque[Data]] = {}
        self.discovery: dict[int, _Discovery] = {}
        self.repairs: dict[int, _Repair] = {}
        self.salvaged: set[tuple[int, int]] = set()
        self.seq = 0
        self._next_rreq_id = 0

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self.env.timer(self.node, self.cfg.sweep_interval_us, self._sweep)
        if self.cfg.vn_learning:
            self.env.timer(self.node, self.cfg.vn_refresh_interval_us,
                           self._refresh_virtual_nodes)

    # -- helpers -----------------------------------------------------------

    def _now(self) -> int:
        return self.env.now()

    def _power(self) -> float:
        return self.env.power_of(self.node)

    def _zone(self) -> PowerZone:
        return self.env.zone_of(self.node)

    def active_route(self, dest: int) -> RouteEntry | None:
        e = self.routes.get(dest)
        if e is None or e.state is not RouteState.ACTIVE:
            return None
        if e.expires_at <= self._now():
            self._invalidate(e)
            return None
        return e

    def _invalidate(self, e: RouteEntry) -> None:
        """Retire an entry; bumping the sequence number keeps stale copies of
        the old route from being re-installed at equal freshness."""
        e.state = RouteState.INVALID
        e.dest_seq += 1
        self.env.on_table_change(self.node, e.dest)

    def route_next_hop(self, dest: int) -> int | None:
        e = self.routes.get(dest)
        if e is not None and e.state is RouteState.ACTIVE:
            return e.next_hop
        return None

    def _refresh(self, e: RouteEntry) -> None:
        e.expires_at = max(e.expires_at, self._now() + self.cfg.active_route_timeout_us)

    def _maybe_install(self, dest: int, next_hop: int, hop_count: int,
                       dest_seq: int, path_min_power: float,
                       lifetime_us: int | None = None) -> bool:
        """Sequence-number guarded install; never worsens (seq, -hops) of an
        active entry.  Returns True when the table was updated or refreshed."""
        if dest == self.node:
            return False
        now = self._now()
        life = lifetime_us if lifetime_us is not None else self.cfg.active_route_timeout_us
        cur = self.routes.get(dest)
        if cur is not None:
            if cur.state is RouteState.ACTIVE and cur.expires_at > now:
                if dest_seq < cur.dest_seq:
                    return False
                if dest_seq == cur.dest_seq:
                    if hop_count > cur.hop_count:
                        return False
                    if hop_count == cur.hop_count:
                        if (cur.next_hop == next_hop
                                or path_min_power > cur.path_min_power):
                            cur.next_hop = next_hop
                            cur.path_min_power = max(cur.path_min_power, path_min_power)
                            cur.expires_at = max(cur.expires_at, now + life)
                            return True
                        return False
            elif dest_seq < cur.dest_seq:
                return False
            cur.next_hop = next_hop
            cur.hop_count = hop_count
            cur.dest_seq = dest_seq
            cur.state = RouteState.ACTIVE
            cur.expires_at = now + life
            cur.path_min_power = path_min_power
            cur.last_known_hop_count = hop_count
            self.env.on_table_change(self.node, dest)
            self._flush_buffer(dest)
            return True
        self.routes[dest] = RouteEntry(
            dest=dest, next_hop=next_hop, hop_count=hop_count, dest_seq=dest_seq,
            state=RouteState.ACTIVE, expires_at=now + life,
            path_min_power=path_min_power, last_known_hop_count=hop_count)
        self.env.on_table_change(self.node, dest)
        self._flush_buffer(dest)
        return True

    def _buffer_push(self, d: Data) -> None:
        q = self.buffers.setdefault(d.dest, deque())
        if len(q) >= self.cfg.buffer_capacity:
            old = q.popleft()
            self.env.count("drops_buffer_overflow")
            self.env.trace(self.node, "DATA_DROP", flow=old.flow, seq=old.seq,
                           reason="overflow")
        q.append(d)

    def _flush_buffer(self, dest: int) -> None:
        q = self.buffers.get(dest)
        if not q:
            return
        while q and self.active_route(dest) is not None:
            self._forward(q.popleft())

    def _drop_buffer(self, dest: int, reason: str) -> None:
        q = self.buffers.get(dest)
        if not q:
            return
        while q:
            d = q.popleft()
            self.env.count("drops_" + reason)
            self.env.trace(self.node, "DATA_DROP", flow=d.flow, seq=d.seq,
                           reason=reason)

    # -- entry points ------------------------------------------------------

    def send(self, d: Data) -> None:
        """Originate a data packet (called by the traffic source)."""
        self._forward(d)

    def on_frame(self, frm: int, msg) -> None:
        if isinstance(msg, RReq):
            self._on_rreq(frm, msg)
        elif isinstance(msg, RRep):
            self._on_reply(frm, msg)
        elif isinstance(msg, Err):
            self._on_err(frm, msg)
        elif isinstance(msg, Data):
            self._on_data(frm, msg)

    def on_overhear(self, frm: int, msg) -> None:
        """Promiscuous copy of a neighbor's transmission not addressed here."""
        if not self.cfg.vn_learning:
            return
        if isinstance(msg, RRep) and msg.dest != self.node:
            alts = self.alternates.setdefault(msg.dest, {})
            alts[frm] = AlternateRecord(msg.hop_count + 1, self._now())
        elif (isinstance(msg, Data) and not msg.alternate_candidate
              and msg.dest != self.node):
            # a neighbor forwarding data toward dest evidently has a route;
            # hop count is unknown from the frame, so keep any reply-learned
            # figure and otherwise assume the two-hop minimum
            alts = self.alternates.setdefault(msg.dest, {})
            rec = alts.get(frm)
            if rec is None:
                alts[frm] = AlternateRecord(2, self._now())
            else:
                rec.learned_at = self._now()

    def record_virtual_nodes(self, dest: int, overhearers: list[int]) -> None:
        """Attach the nodes that overheard this node's reply transmission as
        virtual nodes of the route entry for dest."""
        if not self.cfg.vn_learning:
            return
        e = self.routes.get(dest)
        if e is None:
            return
        now = self._now()
        for w in overhearers:
            fresh = w not in e.virtual_nodes
            e.virtual_nodes[w] = VirtualNodeRecord(w, self.env.power_of(w), now)
            if fresh:
                self.env.trace(self.node, "VN_ADD", dest=dest, vn=w)

    def advertised_context(self, dest: int,
                           exclude: tuple[int, ...] = ()) -> RepairContext:
        """State a repair initiator learns about this node via beacons.
        Routes and alternates through excluded neighbors (the repairing node
        itself and the broken hop) contribute nothing."""
        e = self.routes.get(dest)
        if e is not None and e.next_hop not in exclude:
            known = e.last_known_hop_count
            vn = len(e.virtual_nodes)
        else:
            alts = self.alternates.get(dest, {})
            known = min((a.hop_count for n, a in alts.items()
                         if n not in exclude), default=0)
            vn = 0
        return RepairContext(min_rpr_ttl=known, vn_count=vn,
                             hops_to_sender=1, power=self._power())

    # -- data path ---------------------------------------------------------

    def _forward(self, d: Data) -> None:
        e = self.active_route(d.dest)
        if e is not None:
            ok = self.env.unicast(self.node, e.next_hop, d)
            if ok:
                self.env.trace(self.node, "DATA_TX", flow=d.flow, seq=d.seq,
                               nh=e.next_hop)
                self._refresh(e)
                rev = self.routes.get(d.origin)
                if rev is not None and rev.state is RouteState.ACTIVE:
                    self._refresh(rev)
            else:
                self._on_link_break(e, d)
            return
        cur = self.routes.get(d.dest)
        if cur is not None and cur.state is RouteState.UNDER_REPAIR:
            self._buffer_push(d)
            return
        if d.origin == self.node:
            self._buffer_push(d)
            self._ensure_discovery(d.dest)
            return
        self.env.count("drops_no_route")
        self.env.trace(self.node, "DATA_DROP", flow=d.flow, seq=d.seq,
                       reason="noroute")
        self._emit_err([(d.dest, cur.dest_seq if cur else 1)])

    def _on_data(self, frm: int, d: Data) -> None:
        if d.dest == self.node:
            self.env.deliver_data(self.node, d)
            self.env.trace(self.node, "DATA_RX", flow=d.flow, seq=d.seq,
                           gen=d.gen_us)
            rev = self.routes.get(d.origin)
            if rev is not None and rev.state is RouteState.ACTIVE:
                self._refresh(rev)
            return
        if d.alternate_candidate:
            self._try_salvage(frm, d)
            return
        self._forward(d)

    def _try_salvage(self, frm: int, d: Data) -> None:
        key = (d.flow, d.seq)
        if key in self.salvaged:
            return
        plain = replace(d, alternate_candidate=False)
        e = self.active_route(d.dest)
        if e is not None and e.next_hop != frm:
            self.salvaged.add(key)
            self._forward(plain)
            return
        alts = self.alternates.get(d.dest, {})
        for nbr in sorted(alts, key=lambda n: (alts[n].hop_count, n)):
            if nbr == frm or not self.env.alive_in_range(self.node, nbr):
                continue
            self.salvaged.add(key)
            # stay in alternate-routing mode so a dead end downstream is
            # dropped quietly instead of spraying route errors
            if self.env.unicast(self.node, nbr,
                                replace(d, alternate_candidate=True)):
                self.env.trace(self.node, "DATA_TX", flow=d.flow, seq=d.seq,
                               nh=nbr, salvage=1)
            return

    # -- discovery ---------------------------------------------------------

    def _new_rreq(self, dest: int, ttl: int, repair: bool) -> RReq:
        self._next_rreq_id += 1
        self.seq += 1
        cur = self.routes.get(dest)
        wanted = cur.dest_seq if cur is not None else 0
        r = RReq(id=self._next_rreq_id, origin=self.node, origin_seq=self.seq,
                 dest=dest, hop_count=0, ttl=ttl,
                 path_min_power=self._power(), dest_seq_known=wanted,
                 repair=repair)
        self.seen_rreq[(self.node, r.id)] = self._now()
        return r

    def _ensure_discovery(self, dest: int) -> None:
        if dest in self.discovery or self.active_route(dest) is not None:
            return
        r = self._new_rreq(dest, self.cfg.rreq_ttl, repair=False)
        self.env.broadcast(self.node, r)
        self.env.count("rreq_tx")
        self.env.trace(self.node, "RREQ_TX", dest=dest, id=r.id, ttl=r.ttl,
                       power=round(self._power(), 3))
        handle = self.env.timer(self.node, self.cfg.discovery_period_us,
                                lambda: self._discovery_timeout(dest),
                                periodic=False)
        self.discovery[dest] = _Discovery(r.id, self.cfg.rreq_retries, handle)

    def _discovery_timeout(self, dest: int) -> None:
        st = self.discovery.get(dest)
        if st is None:
            return
        if self.active_route(dest) is not None:
            del self.discovery[dest]
            self._flush_buffer(dest)
            return
        if st.retries_left > 0:
            st.retries_left -= 1
            r = self._new_rreq(dest, self.cfg.rreq_ttl, repair=False)
            st.rreq_id = r.id
            self.env.broadcast(self.node, r)
            self.env.count("rreq_tx")
            self.env.trace(self.node, "RREQ_TX", dest=dest, id=r.id, ttl=r.ttl,
                           power=round(self._power(), 3))
            st.handle = self.env.timer(self.node, self.cfg.discovery_period_us,
                                       lambda: self._discovery_timeout(dest),
                                       periodic=False)
            return
        del self.discovery[dest]
        self._drop_buffer(dest, "discovery_failed")

    def _on_rreq(self, frm: int, r: RReq) -> None:
        if r.origin == self.node:
            return
        now = self._now()
        if r.dest == self.node:
            # destination replies to the first copy and to any later copy that
            # came over a strictly better path (fewer hops, then higher
            # bottleneck power); duplicates are not suppressed here
            self._maybe_install(r.origin, frm, r.hop_count + 1, r.origin_seq,
                                r.path_min_power)
            key = (r.origin, r.id)
            metric = (r.hop_count, -r.path_min_power)
            best = self.reply_best.get(key)
            if best is not None and metric >= best:
                return
            self.reply_best[key] = metric
            self.seq = max(self.seq, r.dest_seq_known) + 1
            self._send_reply(frm, r, dest_seq=self.seq, hop_count=0,
                             lifetime_us=self.cfg.active_route_timeout_us,
                             path_min_power=self._power())
            return
        key = (r.origin, r.id)
        if key in self.seen_rreq:
            self.env.trace(self.node, "RREQ_DROP_DUP", origin=r.origin, id=r.id)
            return
        self.seen_rreq[key] = now
        if r.ttl <= 0:
            return
        self._maybe_install(r.origin, frm, r.hop_count + 1, r.origin_seq,
                            r.path_min_power)
        gated = self.cfg.power_gate and self._zone() is not PowerZone.ACTIVE
        if gated:
            # critical/danger nodes neither relay discovery nor volunteer
            # as intermediates
            self.env.trace(self.node, "RREQ_DROP_POWER", origin=r.origin,
                           id=r.id, power=round(self._power(), 3))
            return
        e = self.active_route(r.dest)
        if e is not None and e.dest_seq >= r.dest_seq_known:
            e.precursors.add(frm)
            self._send_reply(frm, r, dest_seq=e.dest_seq, hop_count=e.hop_count,
                             lifetime_us=max(0, e.expires_at - now),
                             path_min_power=min(e.path_min_power, self._power()))
            return
        if r.ttl - 1 <= 0:
            return
        fwd = replace(r, hop_count=r.hop_count + 1, ttl=r.ttl - 1,
                      path_min_power=min(r.path_min_power, self._power()))
        self.env.broadcast(self.node, fwd)
        self.env.count("rreq_tx")
        self.env.trace(self.node, "RREQ_TX", dest=r.dest, id=r.id, fwd=1,
                       power=round(self._power(), 3))

    def _send_reply(self, to: int, r: RReq, dest_seq: int, hop_count: int,
                    lifetime_us: int, path_min_power: float) -> None:
        cls = RRpr if r.repair else RRep
        m = cls(origin=r.origin, dest=r.dest, dest_seq=dest_seq,
                hop_count=hop_count, lifetime_us=lifetime_us,
                path_min_power=path_min_power)
        if self.env.unicast(self.node, to, m):
            ev = "RRPR_TX" if r.repair else "RREP_TX"
            self.env.trace(self.node, ev, dest=r.dest, hops=hop_count, nh=to)

    # -- replies -----------------------------------------------------------

    def _on_reply(self, frm: int, m: RRep) -> None:
        hops = m.hop_count + 1
        installed = self._maybe_install(m.dest, frm, hops, m.dest_seq,
                                        m.path_min_power,
                                        lifetime_us=m.lifetime_us or None)
        if not installed:
            return
        if m.origin == self.node:
            if m.dest in self.repairs:
                self._repair_succeeded(m.dest)
            st = self.discovery.pop(m.dest, None)
            if st is not None and st.handle is not None:
                st.handle.cancel()
            self._flush_buffer(m.dest)
            return
        rev = self.active_route(m.origin)
        if rev is None:
            self.env.count("reply_drop_no_reverse")
            return
        fwd = type(m)(origin=m.origin, dest=m.dest, dest_seq=m.dest_seq,
                      hop_count=hops, lifetime_us=m.lifetime_us,
                      path_min_power=min(m.path_min_power, self._power()))
        if self.env.unicast(self.node, rev.next_hop, fwd):
            ev = "RRPR_TX" if isinstance(m, RRpr) else "RREP_TX"
            self.env.trace(self.node, ev, dest=m.dest, hops=hops,
                           nh=rev.next_hop)
            e = self.routes.get(m.dest)
            if e is not None:
                e.precursors.add(rev.next_hop)
            rev.precursors.add(frm)

    # -- link breaks and local repair --------------------------------------

    def _on_link_break(self, e: RouteEntry, d: Data) -> None:
        broken = e.next_hop
        self.env.count("link_breaks")
        self.env.trace(self.node, "LINK_BREAK", dest=e.dest, nh=broken,
                       flow=d.flow, seq=d.seq)
        self._forget_neighbor(broken)
        e.state = RouteState.UNDER_REPAIR
        e.dest_seq += 1  # repair must find a route at least this fresh
        e.last_known_hop_count = e.hop_count
        if self.cfg.vn_learning:
            # the stalled packet goes out one hop flagged for alternate routing
            self.env.broadcast(self.node, replace(d, alternate_candidate=True))
        self._buffer_push(d)
        if e.last_known_hop_count <= self.cfg.max_repair_distance:
            if self._start_local_repair(e, d):
                return
        self._repair_failed(e, reason="no_candidates")

    def _forget_neighbor(self, broken: int) -> None:
        now_gone = broken
        for e in self.routes.values():
            if now_gone in e.virtual_nodes:
                del e.virtual_nodes[now_gone]
                self.env.trace(self.node, "VN_EVICT", dest=e.dest, vn=now_gone)
        for alts in self.alternates.values():
            alts.pop(now_gone, None)

    def _start_local_repair(self, e: RouteEntry, d: Data) -> bool:
        dest = e.dest
        if dest in self.repairs:
            return True
        if self.cfg.vn_learning:
            exclude = (self.node, e.next_hop)
            while True:
                cands = []
                for v in sorted(e.virtual_nodes):
                    if not self.env.alive_in_range(self.node, v):
                        continue
                    ctx = self.env.repair_context_of(v, dest, exclude)
                    cands.append((v, ctx, self.env.zone_of(v)))
                choice = select_repair_next_hop(cands)
                if choice is None:
                    return False
                ctx = next(c for n, c, _ in cands if n == choice)
                ttl = math.ceil(repair_score(ctx))
                r = self._new_rreq(dest, ttl, repair=True)
                self.env.count("rreq_tx")
                if self.env.unicast(self.node, choice, r):
                    break
                # candidate moved between selection and transmit: try the next
                del e.virtual_nodes[choice]
        else:
            origin_e = self.routes.get(d.origin)
            hops_back = origin_e.hop_count if origin_e is not None else 0
            ttl = math.ceil(max(e.last_known_hop_count, 0.5 * hops_back)
                            + self.cfg.baseline_repair_ttl_const)
            r = self._new_rreq(dest, ttl, repair=True)
            self.env.count("rreq_tx")
            self.env.broadcast(self.node, r)
        self.env.count("repairs_attempted")
        self.env.trace(self.node, "REPAIR_START", dest=dest, ttl=r.ttl)
        handle = self.env.timer(self.node, self.cfg.repair_discovery_period_us,
                                lambda: self._repair_timeout(dest),
                                periodic=False)
        self.repairs[dest] = _Repair(handle, e.last_known_hop_count)
        return True

    def _repair_succeeded(self, dest: int) -> None:
        st = self.repairs.pop(dest, None)
        if st is not None and st.handle is not None:
            st.handle.cancel()
        e = self.routes[dest]
        self.env.count("repairs_succeeded")
        longer = int(st is not None and e.hop_count > st.prev_hops)
        self.env.trace(self.node, "REPAIR_OK", dest=dest, hops=e.hop_count,
                       longer=longer)
        e.last_known_hop_count = e.hop_count

    def _repair_timeout(self, dest: int) -> None:
        if dest not in self.repairs:
            return
        del self.repairs[dest]
        e = self.routes.get(dest)
        if e is None or e.state is not RouteState.UNDER_REPAIR:
            return
        self._repair_failed(e, reason="timeout")

    def _repair_failed(self, e: RouteEntry, reason: str) -> None:
        e.state = RouteState.INVALID
        self.env.on_table_change(self.node, e.dest)
        self.env.trace(self.node, "REPAIR_FAIL", dest=e.dest, reason=reason)
        if self.cfg.vn_learning:
            # hand the stranded packets to any neighbor with an alternate
            # route instead of dropping them outright
            q = self.buffers.get(e.dest)
            while q:
                d = q.popleft()
                self.env.count("salvage_flush")
                self.env.broadcast(self.node, replace(d, alternate_candidate=True))
        else:
            self._drop_buffer(e.dest, "repair_failed")
        self._emit_err([(e.dest, e.dest_seq)])

    # -- errors ------------------------------------------------------------

    def _emit_err(self, unreachable: list[tuple[int, int]]) -> None:
        if not unreachable:
            return
        self.env.broadcast(self.node, Err(tuple(unreachable)))
        self.env.count("err_tx")
        self.env.trace(self.node, "ERR_TX",
                       dests=",".join(str(d) for d, _ in unreachable))

    def _on_err(self, frm: int, msg: Err) -> None:
        affected: list[tuple[int, int]] = []
        for dest, seq in msg.unreachable:
            e = self.routes.get(dest)
            if e is None or e.state is not RouteState.ACTIVE or e.next_hop != frm:
                continue
            e.state = RouteState.INVALID
            e.dest_seq = max(e.dest_seq + 1, seq)
            self.env.on_table_change(self.node, dest)
            affected.append((dest, e.dest_seq))
        for dest, _ in affected:
            if self.buffers.get(dest):
                # a fresh discovery may find a route around the failure
                self._ensure_discovery(dest)
        if affected:
            self._emit_err(affected)

    # -- periodic upkeep ---------------------------------------------------

    def _sweep(self) -> None:
        now = self._now()
        for e in self.routes.values():
            if e.state is RouteState.ACTIVE and e.expires_at <= now:
                self._invalidate(e)
        horizon = now - self.cfg.seen_rreq_lifetime_us
        stale = [k for k, t in self.seen_rreq.items() if t < horizon]
        for k in stale:
            del self.seen_rreq[k]
            self.reply_best.pop(k, None)
        # alternates age out on the same clock as primary routes
        for dest, alts in self.alternates.items():
            gone = [n for n, a in alts.items()
                    if a.learned_at + self.cfg.active_route_timeout_us <= now]
            for n in gone:
                del alts[n]
        self.env.timer(self.node, self.cfg.sweep_interval_us, self._sweep)

    def _refresh_virtual_nodes(self) -> None:
        now = self._now()
        limit = 2 * self.cfg.vn_refresh_interval_us
        for e in self.routes.values():
            for v in list(e.virtual_nodes):
                rec = e.virtual_nodes[v]
                if self.env.alive_in_range(self.node, v):
                    rec.power = self.env.power_of(v)
                    rec.learned_at = now
                elif now - rec.learned_at > limit:
                    del e.virtual_nodes[v]
                    self.env.trace(self.node, "VN_EVICT", dest=e.dest, vn=v)
        self.env.timer(self.node, self.cfg.vn_refresh_interval_us,
                       self._refresh_virtual_nodes)
