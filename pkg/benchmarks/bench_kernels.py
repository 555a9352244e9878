"""Time the table kernels: compiled path vs plain numpy path.

Builds the per-scenario value and interference tables for a few group
counts on a realistic scenario shape and reports the per-build time of
both paths plus the speedup. The two paths produce bit-identical tables
(asserted here on every shape); MGSHARE_NO_NUMBA=1 would force the plain
path package-wide, this script instead toggles the flag around each
timing block.

Run:  python3 benchmarks/bench_kernels.py
"""

import os
import time

import numpy as np

from mgshare import kernels
from mgshare.allocation import build_context
from mgshare.geometry import generate_scenario
from mgshare.params import SimParams


def _inputs(num_groups: int, seed_index: int = 0):
    p = SimParams(num_groups=num_groups)
    for idx in range(seed_index, seed_index + 50):
        s = generate_scenario(p, idx)
        if not s.degenerate and len(s.groups) == num_groups:
            break
    ctx = build_context(s)
    value_args = (
        ctx.base_I_rx,
        ctx.u_contrib_rx * ctx.p_gk[:, None, :],
        ctx.sig_cu,
        ctx.u_contrib_bs * ctx.p_gk,
        ctx.links.offsets,
        ctx.links.group_sizes,
        ctx.params.mg_sir_threshold,
        ctx.params.cu_sir_threshold,
        ctx.params.bandwidth_hz,
        10.0**6.0,
    )
    stage2_args = (
        ctx.params.max_cu_power_w * ctx._g_cu_rx,
        ctx.params.max_mg_power_w * ctx._g_mg_rx,
        ctx.links.rx_group,
    )
    return ctx, value_args, stage2_args


def _time(fn, args, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    if not kernels._HAVE_NUMBA:
        print("numba is not installed; only the plain path can be timed")
    print(f"{'G':>3} {'rx':>5} {'table':>8} {'numba_ms':>9} {'numpy_ms':>9} {'speedup':>8}")
    for num_groups in (5, 7, 9):
        ctx, value_args, stage2_args = _inputs(num_groups)
        for label, fn, args in (
            ("value", kernels.build_value_table, value_args),
            ("stage2", kernels.build_stage2_table, stage2_args),
        ):
            os.environ.pop("MGSHARE_NO_NUMBA", None)
            fn(*args)  # warm the compile cache outside the timing loop
            fast = _time(fn, args, 5) if kernels._HAVE_NUMBA else float("nan")
            ref_fast = fn(*args)
            os.environ["MGSHARE_NO_NUMBA"] = "1"
            slow = _time(fn, args, 3)
            ref_slow = fn(*args)
            os.environ.pop("MGSHARE_NO_NUMBA", None)
            fast_parts = ref_fast if isinstance(ref_fast, tuple) else (ref_fast,)
            slow_parts = ref_slow if isinstance(ref_slow, tuple) else (ref_slow,)
            assert all(
                np.array_equal(a, b) for a, b in zip(fast_parts, slow_parts)
            ), "paths diverged"
            speedup = slow / fast if fast > 0 else float("nan")
            print(
                f"{num_groups:>3} {ctx.links.num_rx:>5} {label:>8} "
                f"{fast * 1e3:>9.2f} {slow * 1e3:>9.2f} {speedup:>7.1f}x"
            )


if __name__ == "__main__":
    main()
