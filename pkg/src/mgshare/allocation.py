"""Channel allocation schemes: exhaustive subset-family search and the
greedy minimum-interference heuristic, over shared per-scenario tables.

The search space is a family of disjoint group subsets (one candidate
subset per channel) crossed with the ways of matching subsets to channels.
Families come from the combinatorics module per selection mode; matchings
include partial ones, so leaving a channel to its CU alone is always a
candidate and the search proves rather than assumes that sharing helps.

Every candidate is scored through the same precomputed value table, so the
dominance relations between schemes (larger search space never loses) hold
exactly in floating point, not merely up to re-summation noise.

Powers follow the closed-form feasibility interval: each assigned group
transmits at the top of its interval on its channel, and a group whose
interval is empty is muted (kept in the subset at zero power, zero rate)
rather than vetoing the whole subset. The optional grid policy then runs a
small coordinate ascent downward from that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .combinatorics import enumerate_families, enumerate_size_vectors, parse_mode
from .kernels import build_stage2_table, build_value_table
from .outage import outage_cu, outage_mg
from .params import SIR_CAP
from .power import power_interval
from .radio import PowerVector, draw_fading, path_gain, scenario_links, sum_throughput
from .seeds import rng_for

# Stream tag for the fading draw derived from a scenario's seed; the harness
# uses the same tag so allocation and reporting see one realization.
FADING_STREAM = 1


@dataclass(eq=True)
class Assignment:
    """Channels mapped to disjoint sets of active-group indices.

    ``cu_only_channels`` lists channels the heuristic's availability stage
    closed to sharing; ``unassigned_subsets`` keeps the family subsets that
    ended up without a channel.
    """

    channel_to_groups: dict
    cu_only_channels: frozenset = frozenset()
    unassigned_subsets: tuple = ()

    def __post_init__(self):
        seen = set()
        for gs in self.channel_to_groups.values():
            if seen & set(gs):
                raise ValueError("a group appears on two channels")
            seen |= set(gs)

    @property
    def assigned_groups(self) -> frozenset:
        out = set()
        for gs in self.channel_to_groups.values():
            out |= set(gs)
        return frozenset(out)

    def as_array(self, num_groups: int) -> np.ndarray:
        arr = np.full(num_groups, -1, dtype=np.int64)
        for k, gs in self.channel_to_groups.items():
            for g in gs:
                arr[g] = k
        return arr

    def channel_masks(self, num_channels: int) -> list[int]:
        out = [0] * num_channels
        for k, gs in self.channel_to_groups.items():
            for g in gs:
                out[k] |= 1 << g
        return out


@dataclass
class SchemeConfig:
    """What to search (selection_mode), how to assign (method), how to power."""

    selection_mode: str = "all"
    assignment_method: str = "exhaustive"
    power_policy: str = "max_feasible"
    throughput_mode: str = "instantaneous"
    search_guard: tuple = (10, 5)
    allow_large: bool = False

    def __post_init__(self):
        parse_mode(self.selection_mode)
        if self.assignment_method not in ("exhaustive", "greedy"):
            raise ValueError(f"unknown assignment method {self.assignment_method!r}")
        _parse_policy(self.power_policy)
        if self.throughput_mode not in ("instantaneous", "analytic"):
            raise ValueError(f"unknown throughput mode {self.throughput_mode!r}")


def _parse_policy(policy: str):
    if policy == "max_feasible":
        return "max_feasible", None
    if policy.startswith("grid(") and policy.endswith(")"):
        n = int(policy[5:-1])
        if n < 1:
            raise ValueError("grid policy needs at least one point")
        return "grid", n
    raise ValueError(f"unknown power policy {policy!r}")


# ---------------------------------------------------------------------------
# per-scenario evaluation context


class EvalContext:
    """Link gains, feasible powers, and score tables for one scenario.

    Built once per (scenario, fading, throughput mode); the allocation
    searches then run on table lookups. Tables are lazy: the heuristic's
    interference table is only built when the heuristic runs.
    """

    def __init__(self, scenario, fading=None, throughput_mode="instantaneous"):
        self.scenario = scenario
        self.params = scenario.params
        self.links = scenario_links(scenario)
        if fading is None:
            fading = draw_fading(self.links, rng_for(scenario.scenario_seed, FADING_STREAM))
        self.fading = fading
        self.throughput_mode = throughput_mode
        p = self.params
        L = self.links
        self.C = p.num_channels
        self.G = L.num_groups
        alpha = p.path_loss_exponent
        self.cu_power_w = np.full(self.C, p.max_cu_power_w)

        g_cu_bs = path_gain(L.d_cu_bs, alpha)
        g_mg_bs = path_gain(L.d_mg_bs, alpha) if self.G else np.zeros(0)
        g_cu_rx = path_gain(L.d_cu_rx, alpha) if L.num_rx else np.zeros((self.C, 0))
        g_mg_rx = path_gain(L.d_mg_rx, alpha) if L.num_rx else np.zeros((self.G, 0))

        # feasible power interval per (group, channel): the floor binds at the
        # group's farthest member, the cap at the channel CU's distance
        self.worst_d = np.array(
            [
                float(L.d_mg_rx[g, L.offsets[g] : L.offsets[g] + L.group_sizes[g]].max())
                for g in range(self.G)
            ]
        )
        self.p_inf = np.zeros(self.G)
        self.p_sup_k = np.zeros((self.G, self.C))
        self.p_gk = np.zeros((self.G, self.C))
        for g in range(self.G):
            for k in range(self.C):
                b = power_interval(
                    p.cu_density_per_m2,
                    p.group_density_per_m2,
                    p.max_cu_power_w,
                    p.exclusion_radius_m,
                    self.worst_d[g],
                    p.mg_sir_threshold,
                    p.mg_outage_budget,
                    L.d_cu_bs[k],
                    p.cu_sir_threshold,
                    p.cu_outage_budget,
                    p.max_mg_power_w,
                    alpha,
                )
                self.p_inf[g] = b.p_inf_w
                self.p_sup_k[g, k] = b.p_sup_w
                if b.feasible:
                    self.p_gk[g, k] = b.p_sup_w

        # unit-power link strengths (powers multiply in afterwards)
        n = L.num_rx
        self.sig_cu = self.cu_power_w * fading.h_cu_bs * g_cu_bs
        self.base_I_rx = self.cu_power_w[:, None] * fading.h_cu_rx * g_cu_rx
        self.u_contrib_rx = fading.h_mg_rx * g_mg_rx[:, :, None] if self.G else np.zeros((0, n, self.C))
        self.u_contrib_bs = fading.h_mg_bs * g_mg_bs[:, None] if self.G else np.zeros((0, self.C))

        self._value = None
        self._surv = None
        self._stage2 = None
        self._avail = None
        self._g_mg_bs = g_mg_bs
        self._g_cu_rx = g_cu_rx
        self._g_mg_rx = g_mg_rx
        self._g_cu_bs = g_cu_bs

    # -- tables ---------------------------------------------------------------

    @property
    def value(self) -> np.ndarray:
        """(C, 2^G) channel score for every co-channel group mask.

        Instantaneous mode layers a one-shot silencing step on the raw
        table. Every granted group transmits at the top of its feasible
        interval; a group whose realized worst member SIR still misses the
        decode threshold at those powers earns nothing while interfering
        with everyone else, so it is muted. Muting can only raise the
        remaining SIRs, hence nobody new fails and one pass settles. The
        silenced score is therefore just the raw entry at the surviving
        sub-mask, which keeps the kernel the single arithmetic authority.
        """
        if self._value is None:
            if self.throughput_mode == "instantaneous":
                contrib_rx = self.u_contrib_rx * self.p_gk[:, None, :]
                contrib_bs = self.u_contrib_bs * self.p_gk
                raw, surv = build_value_table(
                    self.base_I_rx,
                    contrib_rx,
                    self.sig_cu,
                    contrib_bs,
                    self.links.offsets,
                    self.links.group_sizes,
                    self.params.mg_sir_threshold,
                    self.params.cu_sir_threshold,
                    self.params.bandwidth_hz,
                    SIR_CAP,
                )
                self._surv = surv
                self._value = np.take_along_axis(raw, surv, axis=1)
            else:
                self._value = self._analytic_table()
        return self._value

    def survivor_mask(self, k: int, mask: int) -> int:
        """Sub-mask of `mask` still transmitting after the silencing pass."""
        _ = self.value
        if self._surv is None:  # analytic scores carry no realized fading to gate on
            return mask
        return int(self._surv[k, mask])

    def _analytic_table(self) -> np.ndarray:
        p = self.params
        bw = p.bandwidth_hz
        c_th, g_th = p.cu_sir_threshold, p.mg_sir_threshold
        alpha = p.path_loss_exponent
        M = 1 << self.G
        grate = np.zeros((self.G, self.C))
        for g in range(self.G):
            for k in range(self.C):
                pw = self.p_gk[g, k]
                if pw <= 0.0:
                    continue
                succ = 1.0 - outage_mg(
                    p.cu_density_per_m2, p.group_density_per_m2,
                    p.max_cu_power_w, pw, p.exclusion_radius_m,
                    self.worst_d[g], g_th, alpha,
                )
                grate[g, k] = p.group_density_per_m2 * bw * math.log2(1.0 + g_th) * succ
        cu_log = p.cu_density_per_m2 * bw * math.log2(1.0 + c_th)
        out = np.zeros((self.C, M))
        for k in range(self.C):
            for m in range(M):
                live = [g for g in range(self.G) if (m >> g) & 1 and self.p_gk[g, k] > 0.0]
                if live:
                    p_field = float(np.mean([self.p_gk[g, k] for g in live]))
                    succ_c = 1.0 - outage_cu(
                        p.group_density_per_m2, p_field, p.max_cu_power_w,
                        self.links.d_cu_bs[k], c_th, alpha,
                    )
                else:
                    succ_c = 1.0
                total = cu_log * succ_c
                for g in live:
                    total += grate[g, k]
                out[k, m] = total
        return out

    @property
    def stage2(self) -> np.ndarray:
        if self._stage2 is None:
            p = self.params
            cu_victim = p.max_cu_power_w * self._g_cu_rx
            mg_victim = p.max_mg_power_w * self._g_mg_rx
            self._stage2 = build_stage2_table(cu_victim, mg_victim, self.links.rx_group)
        return self._stage2

    @property
    def avail(self) -> np.ndarray:
        """Stage-1 channel availability: some group alone could keep the CU
        decodable at maximum powers under unit fading."""
        if self._avail is None:
            p = self.params
            out = np.zeros(self.C, dtype=bool)
            for k in range(self.C):
                sig = p.max_cu_power_w * self._g_cu_bs[k]
                for g in range(self.G):
                    den = p.max_mg_power_w * self._g_mg_bs[g]
                    if den <= 0.0 or sig / den >= p.cu_sir_threshold:
                        out[k] = True
                        break
            self._avail = out
        return self._avail

    @property
    def baseline(self) -> float:
        """Throughput with every channel CU-only."""
        return float(self.value[:, 0].sum())

    def pattern_value(self, masks_by_channel) -> float:
        total = self.baseline
        for k, m in enumerate(masks_by_channel):
            if m:
                total += float(self.value[k, m]) - float(self.value[k, 0])
        return total

    def channel_value(self, k: int, mask: int, mg_power_w: np.ndarray) -> float:
        """Recompute one channel's score for arbitrary group powers.

        Same formula as the value table, used by the grid power ascent where
        powers leave the precomputed operating point.
        """
        p = self.params
        bw, cap = p.bandwidth_hz, SIR_CAP
        live = [g for g in range(self.G) if (mask >> g) & 1]
        I_bs = 0.0
        for g in live:
            I_bs += mg_power_w[g] * self.u_contrib_bs[g, k]
        gam = cap if I_bs <= 0.0 else min(self.sig_cu[k] / I_bs, cap)
        total = bw * math.log2(1.0 + gam) if gam >= p.cu_sir_threshold else 0.0
        L = self.links
        for g in live:
            worst = math.inf
            for t in range(L.group_sizes[g]):
                j = L.offsets[g] + t
                sig = mg_power_w[g] * self.u_contrib_rx[g, j, k]
                den = self.base_I_rx[k, j]
                for g2 in live:
                    if g2 != g:
                        den += mg_power_w[g2] * self.u_contrib_rx[g2, j, k]
                gr = cap if den <= 0.0 else min(sig / den, cap)
                worst = min(worst, gr)
            if worst >= p.mg_sir_threshold:
                total += bw * math.log2(1.0 + worst)
        return total


def build_context(scenario, fading=None, throughput_mode="instantaneous") -> EvalContext:
    return EvalContext(scenario, fading, throughput_mode)


# ---------------------------------------------------------------------------
# candidate enumeration (cached: same shapes recur across scenarios)


@lru_cache(maxsize=None)
def assignment_patterns(n_subsets: int, num_channels: int) -> tuple:
    """Injective partial matchings of subset slots to channels.

    Complete matchings come first (lexicographic), then patterns with one
    dropped subset, and so on; each pattern is a tuple of (slot, channel)
    pairs sorted by slot. The all-dropped pattern is last and stands for a
    fully CU-only cell.
    """
    pats = []
    slots = tuple(range(n_subsets))
    for n_drop in range(n_subsets + 1):
        r = n_subsets - n_drop
        if r > num_channels:
            continue
        for dropped in combinations(slots, n_drop):
            kept = tuple(s for s in slots if s not in dropped)
            for chans in permutations(range(num_channels), r):
                pats.append(tuple(zip(kept, chans)))
    return tuple(pats)


@lru_cache(maxsize=None)
def _family_mask_array(G: int, C: int, mode: str):
    """All families for (G, C, mode) as bitmask rows, canonical order."""
    rows = []
    for sizes in enumerate_size_vectors(G, C, mode):
        for fam in enumerate_families(tuple(range(G)), tuple(sizes)):
            rows.append(tuple(sum(1 << g for g in blk) for blk in fam))
    if not rows:
        return np.zeros((0, C), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def _masks_to_subsets(masks) -> tuple:
    return tuple(frozenset(g for g in range(64) if (int(m) >> g) & 1) for m in masks)


# ---------------------------------------------------------------------------
# greedy heuristic (availability, interference ranking, greedy matching)


def greedy_match(matrix: np.ndarray, row_ok) -> tuple:
    """Repeatedly take the globally smallest entry among free rows/columns.

    Ties break toward the lower row (channel), then the lower column
    (subset). Returns (col, row) pairs sorted by column. At most
    min(rows, cols) rounds of a full scan, so the work grows like C cubed.
    """
    C, S = matrix.shape
    rows = [k for k in range(C) if row_ok[k]]
    cols = list(range(S))
    pairs = []
    while rows and cols:
        best_v, best_k, best_s = math.inf, None, None
        for k in rows:
            for s in cols:
                if matrix[k, s] < best_v:
                    best_v, best_k, best_s = matrix[k, s], k, s
        pairs.append((best_s, best_k))
        rows.remove(best_k)
        cols.remove(best_s)
    return tuple(sorted(pairs))


def _stage2_matrix_direct(ctx: EvalContext, subset_masks) -> np.ndarray:
    """Worst member sum interference per (channel, subset), from scratch.

    Entry (k, s): max over members r of s's groups of the interference r
    would collect from s's other groups plus channel k's CU, everything at
    maximum power with unit fading.
    """
    p = ctx.params
    L = ctx.links
    out = np.zeros((ctx.C, len(subset_masks)))
    for s, mask in enumerate(subset_masks):
        groups = [g for g in range(ctx.G) if (int(mask) >> g) & 1]
        victims = [
            int(L.offsets[g]) + t for g in groups for t in range(int(L.group_sizes[g]))
        ]
        for k in range(ctx.C):
            worst = 0.0
            for j in victims:
                tot = p.max_cu_power_w * ctx._g_cu_rx[k, j]
                for g2 in groups:
                    if g2 != L.rx_group[j]:
                        tot += p.max_mg_power_w * ctx._g_mg_rx[g2, j]
                worst = max(worst, tot)
            out[k, s] = worst
    return out


def greedy_assign(scenario, subsets, p_c_w=None, p_g_w=None) -> Assignment:
    """Three-stage heuristic assignment of subsets to channels.

    Stage 1 closes channels whose CU could not decode next to even the
    friendliest single group at maximum powers. Stage 2 scores each
    (channel, subset) pair by the worst sum interference a member would see.
    Stage 3 greedily matches smallest scores first. Subsets left over when
    channels run out are returned unassigned.

    ``p_c_w`` / ``p_g_w`` override the maximum powers the stages assume.
    """
    ctx = scenario if isinstance(scenario, EvalContext) else EvalContext(scenario)
    if p_c_w is not None or p_g_w is not None:
        # rebuild the premise powers on a scratch copy of the parameters
        import copy

        scn = ctx.scenario
        kw = {}
        if p_c_w is not None:
            kw["max_cu_power_dbm"] = 10.0 * math.log10(p_c_w) + 30.0
        if p_g_w is not None:
            kw["max_mg_power_dbm"] = 10.0 * math.log10(p_g_w) + 30.0
        scn2 = copy.copy(scn)
        scn2.params = scn.params.copy_with(**kw)
        ctx = EvalContext(scn2)
    masks = [sum(1 << g for g in s) for s in subsets]
    matrix = _stage2_matrix_direct(ctx, masks)
    pairs = greedy_match(matrix, ctx.avail)
    return _pairs_to_assignment(ctx, masks, pairs)


def _pairs_to_assignment(ctx: EvalContext, masks, pairs) -> Assignment:
    chan_map = {k: frozenset() for k in range(ctx.C)}
    taken = set()
    for s, k in pairs:
        chan_map[k] = _masks_to_subsets([masks[s]])[0]
        taken.add(s)
    unassigned = tuple(
        _masks_to_subsets([masks[s]])[0] for s in range(len(masks)) if s not in taken
    )
    return Assignment(
        channel_to_groups=chan_map,
        cu_only_channels=frozenset(int(k) for k in range(ctx.C) if not ctx.avail[k]),
        unassigned_subsets=unassigned,
    )


# ---------------------------------------------------------------------------
# exhaustive search


def _guard_check(scheme: SchemeConfig, G: int, C: int) -> None:
    gmax, cmax = scheme.search_guard
    if (G > gmax or C > cmax) and not scheme.allow_large:
        raise ValueError(
            f"exhaustive search refused for G={G}, C={C} "
            f"(guard {scheme.search_guard}); set allow_large=True to override"
        )


def exhaustive_assign(
    scenario,
    subsets,
    power_policy: str = "max_feasible",
    throughput_mode: str = "instantaneous",
    fading=None,
    search_guard: tuple = (10, 5),
    allow_large: bool = False,
):
    """Best matching of the given subsets to channels, with drops allowed.

    Scores every injective partial matching through the value table and
    returns (Assignment, throughput). Ties keep the earliest pattern, i.e.
    the first complete matching in lexicographic channel order.
    """
    ctx = scenario if isinstance(scenario, EvalContext) else EvalContext(scenario, fading, throughput_mode)
    if ctx.G > search_guard[0] or ctx.C > search_guard[1]:
        if not allow_large:
            raise ValueError(
                f"exhaustive search refused for G={ctx.G}, C={ctx.C} "
                f"(guard {search_guard}); set allow_large=True to override"
            )
    masks = [sum(1 << g for g in s) for s in subsets]
    if len(masks) > ctx.C:
        raise ValueError("more subsets than channels")
    best_v, best_pat = -math.inf, None
    for pat in assignment_patterns(len(masks), ctx.C):
        chan_masks = [0] * ctx.C
        for s, k in pat:
            chan_masks[k] = masks[s]
        v = ctx.pattern_value(chan_masks)
        if v > best_v:
            best_v, best_pat = v, pat
    assignment = _pairs_to_assignment_plain(ctx.C, masks, best_pat)
    return assignment, best_v


def _pairs_to_assignment_plain(C, masks, pairs) -> Assignment:
    chan_map = {k: frozenset() for k in range(C)}
    taken = set()
    for s, k in pairs:
        chan_map[k] = _masks_to_subsets([masks[s]])[0]
        taken.add(s)
    unassigned = tuple(
        _masks_to_subsets([masks[s]])[0] for s in range(len(masks)) if s not in taken
    )
    return Assignment(channel_to_groups=chan_map, unassigned_subsets=unassigned)


# ---------------------------------------------------------------------------
# full per-scenario allocation


def _exhaustive_best(ctx: EvalContext, fam_masks: np.ndarray):
    F, S = fam_masks.shape
    pats = assignment_patterns(S, ctx.C)
    value = ctx.value
    base = ctx.baseline
    gain = np.empty((ctx.C, S, F))
    for k in range(ctx.C):
        for s in range(S):
            gain[k, s] = value[k, fam_masks[:, s]] - value[k, 0]
    tv = np.full((F, len(pats)), base)
    for pi, pat in enumerate(pats):
        for s, k in pat:
            tv[:, pi] += gain[k, s]
    flat = int(np.argmax(tv))
    best_v = tv.ravel()[flat]
    ties = np.flatnonzero(tv.ravel() == best_v)
    if len(ties) > 1:
        # exact ties are common: a muted group contributes zero rate and
        # zero interference, so families differing only in where they put
        # it evaluate bitwise equal. Prefer the candidate serving the most
        # groups, keeping enumeration order among equals.
        union = np.bitwise_or.reduce(fam_masks, axis=1)
        cov = np.array([int(u).bit_count() for u in union])
        flat = int(ties[np.argmax(cov[ties // len(pats)])])
    fi, pi = divmod(flat, len(pats))
    return fi, pats[pi], float(tv[fi, pi])


def _greedy_best(ctx: EvalContext, fam_masks: np.ndarray):
    I2 = ctx.stage2
    avail = ctx.avail
    value = ctx.value
    base = ctx.baseline
    best = (-math.inf, None, None)
    for fi in range(fam_masks.shape[0]):
        masks = fam_masks[fi]
        matrix = I2[:, masks]
        pairs = greedy_match(matrix, avail)
        v = base
        for s, k in pairs:
            v += float(value[k, masks[s]]) - float(value[k, 0])
        if v > best[0]:
            best = (v, fi, pairs)
    return best[1], best[2], best[0]


def _grid_refine(ctx: EvalContext, masks_by_channel, mg_power: np.ndarray, n_points: int, sweeps: int = 3):
    """Coordinate ascent over a geometric power grid, starting at the top of
    each feasible interval (so the result never falls below max_feasible)."""
    mg_power = mg_power.copy()
    chan_of = {}
    for k, m in enumerate(masks_by_channel):
        for g in range(ctx.G):
            if (int(m) >> g) & 1:
                chan_of[g] = k
    vals = [ctx.channel_value(k, int(m), mg_power) for k, m in enumerate(masks_by_channel)]
    for _ in range(sweeps):
        improved = False
        for g in sorted(chan_of):
            k = chan_of[g]
            hi = mg_power[g] if mg_power[g] > 0.0 else ctx.p_gk[g, k]
            if hi <= 0.0:
                continue  # muted group stays muted
            lo = max(ctx.p_inf[g], hi * 1e-3)
            cands = [hi] + [
                lo ** (1.0 - t) * hi**t
                for t in ((i + 1.0) / (n_points + 1.0) for i in range(n_points))
            ]
            cur = mg_power[g]
            for cand in cands:
                if cand == cur:
                    continue
                mg_power[g] = cand
                new_v = ctx.channel_value(k, int(masks_by_channel[k]), mg_power)
                if new_v > vals[k]:
                    vals[k] = new_v
                    cur = cand
                    improved = True
                else:
                    mg_power[g] = cur
        if not improved:
            break
    return mg_power, float(sum(vals))


def _silence_gate_failures(ctx: EvalContext, assignment, mg_power: np.ndarray) -> np.ndarray:
    """Zero the powers the one-shot silencing step decided against.

    Keeps the returned PowerVector consistent with the table-backed score:
    feeding these powers to the radio layer reproduces the reported value.
    """
    if ctx.throughput_mode != "instantaneous":
        return mg_power
    for k, m in enumerate(assignment.channel_masks(ctx.C)):
        dead = int(m) & ~ctx.survivor_mask(k, int(m))
        while dead:
            b = dead & (-dead)
            mg_power[b.bit_length() - 1] = 0.0
            dead ^= b
    return mg_power


def allocate(scenario, scheme: SchemeConfig, fading=None):
    """Run one scheme on one scenario: (Assignment, PowerVector, throughput).

    Iterates every family the selection mode admits, assigns each by the
    configured method, and keeps the highest-scoring candidate; the fully
    CU-only outcome is always in the running, so an infeasible cell degrades
    to CU-only rather than failing.
    """
    ctx = scenario if isinstance(scenario, EvalContext) else EvalContext(
        scenario, fading, scheme.throughput_mode
    )
    C = ctx.C
    policy, grid_n = _parse_policy(scheme.power_policy)
    if ctx.G == 0:
        assignment = Assignment(
            channel_to_groups={k: frozenset() for k in range(C)},
            cu_only_channels=frozenset(range(C)),
        )
        return assignment, PowerVector(ctx.cu_power_w.copy(), np.zeros(0)), ctx.baseline

    if scheme.assignment_method == "exhaustive":
        _guard_check(scheme, ctx.G, C)
    C_eff = min(C, ctx.G)
    fam_masks = _family_mask_array(ctx.G, C_eff, scheme.selection_mode)
    if fam_masks.shape[0] == 0:
        # the mode admits no family at this (G, C); degrade to CU-only
        assignment = Assignment(
            channel_to_groups={k: frozenset() for k in range(C)},
            cu_only_channels=frozenset(range(C)),
        )
        return assignment, PowerVector(ctx.cu_power_w.copy(), np.zeros(ctx.G)), ctx.baseline

    if scheme.assignment_method == "exhaustive":
        fi, pat, tv = _exhaustive_best(ctx, fam_masks)
        masks = fam_masks[fi]
        assignment = _pairs_to_assignment_plain(C, list(masks), pat)
    else:
        fi, pairs, tv = _greedy_best(ctx, fam_masks)
        masks = fam_masks[fi]
        assignment = _pairs_to_assignment(ctx, list(masks), pairs)

    arr = assignment.as_array(ctx.G)
    mg_power = np.array(
        [ctx.p_gk[g, arr[g]] if arr[g] >= 0 else 0.0 for g in range(ctx.G)]
    )
    mg_power = _silence_gate_failures(ctx, assignment, mg_power)
    if policy == "grid":
        chan_masks = assignment.channel_masks(C)
        mg_power, tv = _grid_refine(ctx, chan_masks, mg_power, grid_n)
    return assignment, PowerVector(ctx.cu_power_w.copy(), mg_power), tv


def evaluate(scenario, assignment: Assignment, power_policy="max_feasible",
             throughput_mode="instantaneous", fading=None) -> float:
    """Score a given assignment directly through the radio layer."""
    ctx = scenario if isinstance(scenario, EvalContext) else EvalContext(
        scenario, fading, throughput_mode
    )
    policy, grid_n = _parse_policy(power_policy)
    arr = assignment.as_array(ctx.G)
    mg_power = np.array(
        [ctx.p_gk[g, arr[g]] if arr[g] >= 0 else 0.0 for g in range(ctx.G)]
    )
    mg_power = _silence_gate_failures(ctx, assignment, mg_power)
    if policy == "grid":
        mg_power, _ = _grid_refine(ctx, assignment.channel_masks(ctx.C), mg_power, grid_n)
    powers = PowerVector(ctx.cu_power_w.copy(), mg_power)
    return sum_throughput(ctx.links, ctx.fading, powers, arr, mode=throughput_mode)
