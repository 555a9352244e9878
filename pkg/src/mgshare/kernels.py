"""Hot per-scenario table builds, compiled with numba when available.

Two tables drive every allocation search. The value table holds, for each
channel k and each bitmask m over active groups, the throughput of channel k
when exactly the groups in m share it with the CU, along with the sub-mask
of m that clears the decode threshold at those powers. The co-channel
interference table holds, for the same (k, m) grid, the worst sum
interference any member of m's groups would see, evaluated at maximum powers
with unit fading, which is what the assignment heuristic ranks channels by.

Both builds walk masks in increasing order and extend the interference sums
from mask minus its lowest set bit, so the cost is one vector add per mask
instead of a fresh sum. A receiver's own-group term is excluded by reading
the row at the mask with that bit cleared, never by subtracting it back out
of the inclusive sum: the own term dominates by orders of magnitude and the
subtraction would wipe out the co-channel digits. The numba and numpy paths
run the same function body and therefore produce bit-identical tables; set
MGSHARE_NO_NUMBA=1 to force the plain path (the benchmark script times one
against the other).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - exercised via the env flag in tests
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def _value_table_impl(
    base_I_rx, contrib_rx, sig_cu, contrib_bs, offsets, sizes, mg_th, cu_th, bw, cap
):
    C, n = base_I_rx.shape
    G = contrib_rx.shape[0]
    M = 1 << G
    out = np.zeros((C, M))
    passing = np.zeros((C, M), dtype=np.int64)
    I_rx = np.zeros((M, n))
    I_bs = np.zeros(M)
    for k in range(C):
        for j in range(n):
            I_rx[0, j] = base_I_rx[k, j]
        I_bs[0] = 0.0
        out[k, 0] = bw * math.log2(1.0 + cap) if cap >= cu_th else 0.0
        for m in range(1, M):
            b = m & (-m)
            g = 0
            while (1 << g) != b:
                g += 1
            prev = m ^ b
            for j in range(n):
                I_rx[m, j] = I_rx[prev, j] + contrib_rx[g, j, k]
            I_bs[m] = I_bs[prev] + contrib_bs[g, k]
            den = I_bs[m]
            if den <= 0.0:
                gam = cap
            else:
                gam = sig_cu[k] / den
                if gam > cap:
                    gam = cap
            total = bw * math.log2(1.0 + gam) if gam >= cu_th else 0.0
            ok = 0
            mm = m
            while mm:
                bb = mm & (-mm)
                g2 = 0
                while (1 << g2) != bb:
                    g2 += 1
                mm ^= bb
                worst = math.inf
                excl = m ^ bb
                for t in range(sizes[g2]):
                    j = offsets[g2] + t
                    sig = contrib_rx[g2, j, k]
                    den_r = I_rx[excl, j]
                    if den_r <= 0.0:
                        gr = cap
                    else:
                        gr = sig / den_r
                        if gr > cap:
                            gr = cap
                    if gr < worst:
                        worst = gr
                if worst >= mg_th:
                    total += bw * math.log2(1.0 + worst)
                    ok |= bb
            out[k, m] = total
            passing[k, m] = ok
    return out, passing


def _stage2_table_impl(cu_victim, mg_victim, rx_group):
    C, n = cu_victim.shape
    G = mg_victim.shape[0]
    M = 1 << G
    tot = np.zeros((M, n))
    out = np.zeros((C, M))
    for m in range(1, M):
        b = m & (-m)
        g = 0
        while (1 << g) != b:
            g += 1
        prev = m ^ b
        for j in range(n):
            tot[m, j] = tot[prev, j] + mg_victim[g, j]
    for k in range(C):
        for m in range(1, M):
            worst = 0.0
            for j in range(n):
                bit = 1 << rx_group[j]
                if m & bit:
                    v = cu_victim[k, j] + tot[m ^ bit, j]
                    if v > worst:
                        worst = v
            out[k, m] = worst
    return out


_value_table_numba = njit(cache=True)(_value_table_impl) if _HAVE_NUMBA else None
_stage2_table_numba = njit(cache=True)(_stage2_table_impl) if _HAVE_NUMBA else None


def numba_active() -> bool:
    """True when the compiled path will be used for the next table build."""
    return _HAVE_NUMBA and not os.environ.get("MGSHARE_NO_NUMBA")


def build_value_table(
    base_I_rx, contrib_rx, sig_cu, contrib_bs, offsets, sizes, mg_th, cu_th, bw, cap
):
    """Per-channel score and decode pass-mask for every co-channel group mask.

    Returns a (C, 2^G) float table and a (C, 2^G) int64 table. Entry [k, m]
    of the second holds the sub-bitmask of m whose groups clear the worst
    member SIR threshold when all of m transmits on channel k, which is what
    the one-shot silencing step in the allocator keys off.
    """
    args = (
        np.ascontiguousarray(base_I_rx, dtype=np.float64),
        np.ascontiguousarray(contrib_rx, dtype=np.float64),
        np.ascontiguousarray(sig_cu, dtype=np.float64),
        np.ascontiguousarray(contrib_bs, dtype=np.float64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(sizes, dtype=np.int64),
        float(mg_th),
        float(cu_th),
        float(bw),
        float(cap),
    )
    if numba_active():
        return _value_table_numba(*args)
    return _value_table_impl(*args)


def build_stage2_table(cu_victim, mg_victim, rx_group) -> np.ndarray:
    """(C, 2^G) worst member sum interference at max power, unit fading."""
    args = (
        np.ascontiguousarray(cu_victim, dtype=np.float64),
        np.ascontiguousarray(mg_victim, dtype=np.float64),
        np.ascontiguousarray(rx_group, dtype=np.int64),
    )
    if numba_active():
        return _stage2_table_numba(*args)
    return _stage2_table_impl(*args)
