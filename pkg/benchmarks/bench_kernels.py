"""Benchmark the compiled motion/geometry kernels against the numpy fallback.

The fallback functions here are the exact implementations selected when
SRVNP_PURE_NUMPY=1 is set, so this compares both code paths in one process
and also cross-checks that they agree numerically.

Usage: python3 benchmarks/bench_kernels.py [node_count] [repeats]
"""
import sys
import timeit

import numpy as np

from srvnp._kernels import (USE_NUMBA, _advance_py, _project_py,
                            _range_mask_py, advance_positions,
                            project_positions, range_mask)


def make_state(n, rng):
    xs = rng.uniform(0, 1000, n)
    ys = rng.uniform(0, 1000, n)
    wx = rng.uniform(0, 1000, n)
    wy = rng.uniform(0, 1000, n)
    speed = rng.uniform(0.5, 10.0, n)
    paused = rng.integers(0, 5_000_000, n).astype(np.float64)
    alive = rng.random(n) > 0.05
    return xs, ys, wx, wy, speed, paused, alive


def bench(label, fn, repeats):
    best = min(timeit.repeat(fn, number=1, repeat=repeats))
    print(f"  {label:<28s} {best * 1e6:10.1f} us/call")
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    repeats = int(sys.argv[2]) if len(sys.argv) > 2 else 200
    rng = np.random.default_rng(12345)
    xs, ys, wx, wy, speed, paused, alive = make_state(n, rng)
    out_x, out_y = np.empty(n), np.empty(n)
    ref_x, ref_y = np.empty(n), np.empty(n)
    t0, t1 = 1_000_000.0, 3_500_000.0

    # agreement check between the two paths
    range_mask(xs, ys, 500.0, 500.0, 250.0**2, alive)
    project_positions(xs, ys, wx, wy, speed, paused, t0, t1, out_x, out_y)
    _project_py(xs, ys, wx, wy, speed, paused, t0, t1, ref_x, ref_y)
    assert np.allclose(out_x, ref_x) and np.allclose(out_y, ref_y)
    m_sel = range_mask(xs, ys, 500.0, 500.0, 250.0**2, alive)
    m_ref = _range_mask_py(xs, ys, 500.0, 500.0, 250.0**2, alive)
    assert np.array_equal(np.asarray(m_sel), m_ref)
    print(f"paths agree on {n} nodes; "
          f"selected path: {'numba' if USE_NUMBA else 'pure numpy'}")

    print(f"\nrange_mask ({n} nodes, best of {repeats}):")
    t_sel = bench("selected", lambda: range_mask(
        xs, ys, 500.0, 500.0, 250.0**2, alive), repeats)
    t_ref = bench("numpy fallback", lambda: _range_mask_py(
        xs, ys, 500.0, 500.0, 250.0**2, alive), repeats)
    print(f"  speedup: {t_ref / t_sel:.2f}x")

    print(f"\nproject_positions ({n} nodes, best of {repeats}):")
    t_sel = bench("selected", lambda: project_positions(
        xs, ys, wx, wy, speed, paused, t0, t1, out_x, out_y), repeats)
    t_ref = bench("numpy fallback", lambda: _project_py(
        xs, ys, wx, wy, speed, paused, t0, t1, ref_x, ref_y), repeats)
    print(f"  speedup: {t_ref / t_sel:.2f}x")

    print(f"\nadvance_positions ({n} nodes, best of {repeats}):")
    arrived = np.zeros(n, dtype=np.bool_)
    cx, cy = xs.copy(), ys.copy()
    rx, ry = xs.copy(), ys.copy()
    t_sel = bench("selected", lambda: advance_positions(
        cx, cy, wx, wy, speed, paused, t0, t1, arrived), repeats)
    t_ref = bench("numpy fallback", lambda: _advance_py(
        rx, ry, wx, wy, speed, paused, t0, t1, arrived), repeats)
    print(f"  speedup: {t_ref / t_sel:.2f}x")


if __name__ == "__main__":
    main()
