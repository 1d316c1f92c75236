"""Routing state machine units: repair scoring, candidate selection, the
sequence-guarded install rule, and the power gate."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srvnp.energy import PowerZone
from srvnp.messages import Data, Err, RRep, RReq
from srvnp.routing import (RepairContext, RouteState, RoutingConfig,
                           RoutingNode, repair_score, select_repair_next_hop)

# (vn, min_ttl, hops, power) -> expected score, re-derived by hand
SCORE_ROWS = {
    "L": ((3, 3, 1, 9.0), 15.0),
    "M": ((4, 2, 2, 8.5), 14.5),
    "G": ((3, 1, 3, 8.0), 12.0),
    "P": ((3, 1, 2, 4.0), 8.0),
    "Q": ((3, 1, 3, 3.0), 7.0),
    "P1": ((1, 4, 1, 7.0), 12.0),
    "P2": ((2, 3, 2, 7.0), 12.0),
    "G1": ((2, 1, 4, 7.5), 10.5),
    "L1": ((1, 3, 2, 8.0), 12.0),
}


def ctx(vn, min_ttl, hops, power):
    return RepairContext(min_rpr_ttl=min_ttl, vn_count=vn,
                         hops_to_sender=hops, power=power)


def test_score_rows_exact():
    for name, (args, want) in SCORE_ROWS.items():
        assert repair_score(ctx(*args)) == want, name


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 20), st.integers(0, 20), st.integers(1, 20),
       st.floats(0, 10))
def test_score_formula_oracle(vn, ttl, hops, power):
    got = repair_score(ctx(vn, ttl, hops, power))
    assert got == max(ttl + vn, 0.5 * hops) + power


def test_selection_prefers_highest_score():
    cands = [(1, ctx(3, 3, 1, 9.0), PowerZone.ACTIVE),
             (2, ctx(1, 4, 1, 7.0), PowerZone.ACTIVE)]
    assert select_repair_next_hop(cands) == 1  # 15 beats 12


def test_selection_rejects_non_active_even_with_top_score():
    cands = [(1, ctx(9, 9, 1, 4.0), PowerZone.CRITICAL),
             (2, ctx(0, 1, 1, 6.0), PowerZone.ACTIVE),
             (3, ctx(9, 9, 1, 1.0), PowerZone.DANGER)]
    assert select_repair_next_hop(cands) == 2


def test_selection_tie_breaks_fewer_hops_then_id():
    # equal scores 10: min_ttl 2 beats 4
    cands = [(5, ctx(2, 4, 1, 4.0), PowerZone.ACTIVE),
             (6, ctx(4, 2, 1, 4.0), PowerZone.ACTIVE)]
    assert select_repair_next_hop(cands) == 6
    # fully equal contexts: smaller id
    cands = [(9, ctx(1, 2, 1, 5.0), PowerZone.ACTIVE),
             (4, ctx(1, 2, 1, 5.0), PowerZone.ACTIVE)]
    assert select_repair_next_hop(cands) == 4


def test_selection_empty_and_all_filtered():
    assert select_repair_next_hop([]) is None
    assert select_repair_next_hop(
        [(1, ctx(1, 1, 1, 1.0), PowerZone.DANGER)]) is None


def test_baseline_config_disables_gate_and_learning():
    cfg = RoutingConfig.baseline()
    assert not cfg.power_gate and not cfg.vn_learning
    assert RoutingConfig().power_gate and RoutingConfig().vn_learning


class StubEnv:
    """Minimal environment for exercising a single RoutingNode."""

    def __init__(self):
        self.t = 0
        self.sent = []       # (kind, src?, dst, msg)
        self.powers = {}
        self.zones = {}

    def now(self):
        return self.t

    def timer(self, node, delay_us, fn, periodic=False):
        class H:
            def cancel(self):
                pass
        return H()

    def power_of(self, node):
        return self.powers.get(node, 9.0)

    def zone_of(self, node):
        return self.zones.get(node, PowerZone.ACTIVE)

    def alive_in_range(self, a, b):
        return True

    def repair_context_of(self, cand, dest, exclude=()):
        return RepairContext(1, 0, 1, self.power_of(cand))

    def count(self, name, inc=1):
        pass

    def trace(self, node, ev, **kv):
        self.sent.append(("trace", ev, kv))

    def deliver_data(self, node, d):
        self.sent.append(("deliver", node, d))

    def on_table_change(self, node, dest):
        pass

    def unicast(self, src, dst, msg):
        self.sent.append(("uni", dst, msg))
        return True

    def broadcast(self, src, msg):
        self.sent.append(("bcast", msg))
        return []


def make_node(node_id=0, **cfg_kw):
    env = StubEnv()
    return RoutingNode(node_id, env, RoutingConfig(**cfg_kw)), env


def rreq(origin=1, dest=9, id=1, hops=0, ttl=10, pmp=9.0, seq=1, known=0):
    return RReq(id=id, origin=origin, origin_seq=seq, dest=dest,
                hop_count=hops, ttl=ttl, path_min_power=pmp,
                dest_seq_known=known)


def uni_msgs(env, cls):
    return [m for kind, _, m in [e for e in env.sent if e[0] == "uni"]
            if isinstance(m, cls)]


def bcast_msgs(env, cls):
    return [m for kind, m in [e for e in env.sent if e[0] == "bcast"]
            if isinstance(m, cls)]


def test_duplicate_request_dropped_at_intermediates():
    n, env = make_node(5)
    n._on_rreq(frm=1, r=rreq())
    first = len(bcast_msgs(env, RReq))
    n._on_rreq(frm=2, r=rreq(hops=1))  # same (origin, id) over another path
    assert len(bcast_msgs(env, RReq)) == first == 1


def test_request_installs_reverse_route_with_backward_learning():
    n, env = make_node(5)
    n._on_rreq(frm=3, r=rreq(origin=1, hops=2, seq=4))
    e = n.routes[1]
    assert (e.next_hop, e.hop_count, e.dest_seq) == (3, 3, 4)
    assert e.state is RouteState.ACTIVE


def test_destination_replies_and_again_on_strictly_better_copy():
    n, env = make_node(9)
    n._on_rreq(frm=3, r=rreq(dest=9, hops=4))
    assert len(uni_msgs(env, RRep)) == 1
    n._on_rreq(frm=4, r=rreq(dest=9, hops=4))   # equal path: no new reply
    assert len(uni_msgs(env, RRep)) == 1
    n._on_rreq(frm=5, r=rreq(dest=9, hops=2))   # fewer hops: reply again
    replies = uni_msgs(env, RRep)
    assert len(replies) == 2
    assert replies[1].dest_seq > replies[0].dest_seq


def test_destination_reply_meets_requested_freshness():
    n, env = make_node(9)
    n._on_rreq(frm=3, r=rreq(dest=9, known=41))
    assert uni_msgs(env, RRep)[0].dest_seq >= 42


def test_power_gated_node_neither_forwards_nor_replies():
    n, env = make_node(5)
    env.zones[5] = PowerZone.CRITICAL
    # give it a perfectly good route to the destination
    n._maybe_install(9, next_hop=7, hop_count=1, dest_seq=3,
                     path_min_power=9.0)
    env.sent.clear()
    n._on_rreq(frm=1, r=rreq(dest=9))
    assert uni_msgs(env, RRep) == []
    assert bcast_msgs(env, RReq) == []


def test_gated_destination_still_replies():
    n, env = make_node(9)
    env.zones[9] = PowerZone.DANGER
    n._on_rreq(frm=3, r=rreq(dest=9))
    assert len(uni_msgs(env, RRep)) == 1


def test_baseline_forwards_regardless_of_zone():
    env = StubEnv()
    n = RoutingNode(5, env, RoutingConfig.baseline())
    env.zones[5] = PowerZone.DANGER
    n._on_rreq(frm=1, r=rreq(dest=9))
    assert len(bcast_msgs(env, RReq)) == 1


def test_ttl_exhaustion_stops_flood():
    n, env = make_node(5)
    n._on_rreq(frm=1, r=rreq(ttl=1))
    assert bcast_msgs(env, RReq) == []


def test_stale_reply_not_installed():
    n, env = make_node(0)
    n._maybe_install(9, next_hop=2, hop_count=2, dest_seq=10, path_min_power=8.0)
    n._on_reply(frm=3, m=RRep(origin=0, dest=9, dest_seq=9, hop_count=0,
                              lifetime_us=0, path_min_power=9.0))
    assert n.routes[9].next_hop == 2  # the seq-9 reply lost


def test_equal_seq_longer_route_not_installed():
    n, env = make_node(0)
    n._maybe_install(9, 2, 2, 10, 8.0)
    assert not n._maybe_install(9, 3, 4, 10, 9.9)
    assert n.routes[9].next_hop == 2


def test_equal_seq_equal_hops_prefers_stronger_bottleneck():
    n, env = make_node(0)
    n._maybe_install(9, 2, 2, 10, 3.0)
    assert n._maybe_install(9, 4, 2, 10, 8.0)
    assert n.routes[9].next_hop == 4
    assert not n._maybe_install(9, 5, 2, 10, 2.0)  # weaker: rejected


def test_invalidation_bumps_sequence_number():
    n, env = make_node(0)
    n._maybe_install(9, 2, 2, 10, 8.0)
    env.t = n.routes[9].expires_at + 1
    assert n.active_route(9) is None  # lazy expiry
    assert n.routes[9].state is RouteState.INVALID
    assert n.routes[9].dest_seq == 11
    # stale equal-seq information can no longer resurrect the route
    assert not n._maybe_install(9, 3, 5, 10, 9.0)


def test_error_invalidates_only_matching_next_hop():
    n, env = make_node(0)
    n._maybe_install(7, 2, 2, 5, 8.0)
    n._maybe_install(8, 3, 2, 5, 8.0)
    n._on_err(frm=2, msg=Err(unreachable=((7, 6), (8, 6))))
    assert n.routes[7].state is RouteState.INVALID
    assert n.routes[7].dest_seq >= 6
    assert n.routes[8].state is RouteState.ACTIVE  # next hop 3, not 2


def test_error_repropagates_once_when_routes_die():
    n, env = make_node(0)
    n._maybe_install(7, 2, 2, 5, 8.0)
    n._on_err(frm=2, msg=Err(unreachable=((7, 6),)))
    assert len(bcast_msgs(env, Err)) == 1
    env.sent.clear()
    n._on_err(frm=2, msg=Err(unreachable=((7, 6),)))  # nothing left to kill
    assert bcast_msgs(env, Err) == []


def test_data_for_self_is_delivered_not_forwarded():
    n, env = make_node(9)
    d = Data(flow=0, seq=0, origin=1, dest=9, payload_bytes=10, gen_us=0)
    n._on_data(frm=3, d=d)
    assert ("deliver", 9, d) in env.sent


def test_origin_without_route_buffers_and_discovers():
    n, env = make_node(1)
    d = Data(flow=0, seq=0, origin=1, dest=9, payload_bytes=10, gen_us=0)
    n.send(d)
    assert d in n.buffers[9]
    assert len(bcast_msgs(env, RReq)) == 1
    assert 9 in n.discovery


def test_buffer_drop_oldest_at_capacity():
    n, env = make_node(1, buffer_capacity=3)
    for seq in range(5):
        n._buffer_push(Data(flow=0, seq=seq, origin=1, dest=9,
                            payload_bytes=1, gen_us=0))
    assert [d.seq for d in n.buffers[9]] == [2, 3, 4]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 6),
                          st.integers(1, 20), st.floats(0, 10)),
                min_size=1, max_size=30))
def test_install_rule_never_worsens_active_entry(installs):
    n, env = make_node(0)
    best = None
    for next_hop, hops, seq, pmp in installs:
        n._maybe_install(9, next_hop, hops, seq, pmp)
        e = n.routes[9]
        key = (e.dest_seq, -e.hop_count)
        if best is not None:
            assert key >= best
        best = key
