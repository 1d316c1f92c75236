"""Deterministic WSN simulator for SRVNP stable on-demand routing with
virtual-node local repair, plus an AODV-like baseline."""

from .energy import Battery, PowerZone, classify_zone
from .routing import (RepairContext, RoutingConfig, repair_score,
                      select_repair_next_hop)
from .runner import run_scenario, sweep
from .scenario import ScenarioConfig, parse_scenario
from .sim import Rng, Simulator
from .traffic import (FlowSpec, FlowStats, delivery_ratio, mean_delay_s,
                      throughput_Bps)

__version__ = "0.1.0"

__all__ = [
    "Battery", "PowerZone", "classify_zone",
    "RepairContext", "RoutingConfig", "repair_score", "select_repair_next_hop",
    "run_scenario", "sweep",
    "ScenarioConfig", "parse_scenario",
    "Rng", "Simulator",
    "FlowSpec", "FlowStats", "delivery_ratio", "mean_delay_s", "throughput_Bps",
    "__version__",
]
