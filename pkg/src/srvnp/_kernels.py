"""Hot numeric kernels: neighbor masks and waypoint motion.

Compiled with numba when available; set SRVNP_PURE_NUMPY=1 to force the plain
numpy implementations (the two paths are numerically identical and are compared
in benchmarks/bench_kernels.py).
"""
from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("SRVNP_PURE_NUMPY", "").lower()
USE_NUMBA = _env not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _range_mask_py(xs, ys, px, py, range_sq, alive):
    dx = xs - px
    dy = ys - py
    return ((dx * dx + dy * dy) <= range_sq) & alive


def _project_py(xs, ys, wx, wy, speed, paused_until, t0, t1, out_x, out_y):
    n = xs.shape[0]
    for i in range(n):
        start = t0 if t0 > paused_until[i] else paused_until[i]
        dt = (t1 - start) * 1e-6
        if dt <= 0.0:
            out_x[i] = xs[i]
            out_y[i] = ys[i]
            continue
        dx = wx[i] - xs[i]
        dy = wy[i] - ys[i]
        d = (dx * dx + dy * dy) ** 0.5
        step = speed[i] * dt
        if step >= d or d == 0.0:
            out_x[i] = wx[i]
            out_y[i] = wy[i]
        else:
            out_x[i] = xs[i] + dx / d * step
            out_y[i] = ys[i] + dy / d * step


def _advance_py(xs, ys, wx, wy, speed, paused_until, t0, t1, arrived):
    n = xs.shape[0]
    for i in range(n):
        start = t0 if t0 > paused_until[i] else paused_until[i]
        dt = (t1 - start) * 1e-6
        if dt <= 0.0:
            continue
        dx = wx[i] - xs[i]
        dy = wy[i] - ys[i]
        d = (dx * dx + dy * dy) ** 0.5
        step = speed[i] * dt
        if step >= d or d == 0.0:
            xs[i] = wx[i]
            ys[i] = wy[i]
            arrived[i] = True
        else:
            xs[i] += dx / d * step
            ys[i] += dy / d * step


if USE_NUMBA:
    range_mask = njit(cache=True)(_range_mask_py)
    project_positions = njit(cache=True)(_project_py)
    advance_positions = njit(cache=True)(_advance_py)
else:
    range_mask = _range_mask_py
    project_positions = _project_py
    advance_positions = _advance_py
