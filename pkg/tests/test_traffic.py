"""Metric arithmetic against hand-computed values and synthetic flows."""
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srvnp.traffic import (FlowSpec, FlowStats, UndefinedMetricError,
                           build_report, delivery_ratio, mean_delay_s,
                           throughput_Bps)
from srvnp.sim import US_PER_S, to_us


def flow(sent_recv, delays_s=(), payload=100):
    sent, recv = sent_recv
    f = FlowStats()
    for s in range(sent):
        f.on_send(s, 0)
    for s in range(recv):
        d = delays_s[s] if s < len(delays_s) else 0.01
        f.on_receive(s, to_us(d), payload)
    return f


def test_delivery_ratio_hand_value():
    # {9/10, 1/2} -> (0.9 + 0.5) / 2 = 0.7 exactly
    assert delivery_ratio([flow((10, 9)), flow((2, 1))]) == 0.7


def test_delivery_ratio_is_mean_of_ratios_not_ratio_of_totals():
    flows = [flow((100, 100)), flow((2, 0))]
    assert delivery_ratio(flows) == 0.5          # mean of 1.0 and 0.0
    assert (100 + 0) / (100 + 2) != 0.5          # the other reading differs


def test_delivery_ratio_skips_flows_that_never_sent():
    assert delivery_ratio([flow((4, 2)), FlowStats()]) == 0.5


def test_delivery_ratio_undefined_for_no_traffic():
    with pytest.raises(UndefinedMetricError):
        delivery_ratio([FlowStats()])


def test_mean_delay_hand_value_to_1e12():
    flows = [flow((1, 1), delays_s=[0.05]), flow((1, 1), delays_s=[0.15])]
    assert math.isclose(mean_delay_s(flows), 0.10, abs_tol=1e-12)


def test_mean_delay_counts_only_delivered():
    flows = [flow((5, 2), delays_s=[0.1, 0.3])]
    assert math.isclose(mean_delay_s(flows), 0.2, abs_tol=1e-12)


def test_mean_delay_undefined_with_no_deliveries():
    with pytest.raises(UndefinedMetricError):
        mean_delay_s([flow((3, 0))])


def test_throughput_two_denominators():
    f = flow((4, 4), delays_s=[0.5, 0.5, 0.5, 0.5], payload=250)
    std, paper = throughput_Bps([f], sim_duration_s=10.0)
    assert std == 1000 / 10.0          # bytes over simulated seconds
    assert paper == 1000 / 2.0         # bytes over summed delay seconds


def test_throughput_zero_bytes_and_zero_duration():
    assert throughput_Bps([flow((1, 0))], 5.0) == (0.0, 0.0)
    with pytest.raises(UndefinedMetricError):
        throughput_Bps([flow((1, 1))], 0.0)


def test_duplicate_deliveries_counted_once():
    f = FlowStats()
    f.on_send(0, 0)
    f.on_receive(0, 100, 50)
    f.on_receive(0, 300, 50)
    assert (f.received, f.duplicates, f.bytes_received) == (1, 1, 50)
    assert f.delays_us() == [100]


def test_build_report_aggregates():
    flows = [flow((10, 9)), flow((2, 1))]
    rep = build_report(flows, sim_duration_s=10.0, counters={"rreq_tx": 3})
    assert rep.delivery_ratio == 0.7
    assert rep.sent == 12 and rep.received == 10
    assert rep.counters["rreq_tx"] == 3


def test_flow_spec_validation():
    with pytest.raises(ValueError):
        FlowSpec(0, 1, 2, rate_pps=0, payload_bytes=1, start_us=0, stop_us=1)
    with pytest.raises(ValueError):
        FlowSpec(0, 1, 2, rate_pps=1, payload_bytes=1, start_us=5, stop_us=5)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 50), st.integers(0, 50)), min_size=1,
                max_size=10))
def test_delivery_ratio_matches_brute_force(pairs):
    pairs = [(s, min(s, r)) for s, r in pairs]
    flows = [flow(p) for p in pairs]
    want = sum(r / s for s, r in pairs) / len(pairs)
    assert math.isclose(delivery_ratio(flows), want, rel_tol=1e-12)
    assert 0.0 <= delivery_ratio(flows) <= 1.0
