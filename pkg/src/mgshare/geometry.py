"""Random network scenarios: disk placement, exclusion holes, association.

A scenario lives in a disk cell of radius R centered on the base station.
Cellular users (one per channel) and multicast transmitters are dropped
uniformly; candidate receivers come from a Poisson count and are thinned by
the exclusion disks of radius D around every cellular user, which turns the
receiver field into a hole process. Surviving receivers attach to the
transmitter with the strongest mean received power, provided that power
clears the association threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import MIN_LINK_DISTANCE_M, SimParams
from .seeds import child_seed, rng_for


def sample_uniform_disk(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """n i.i.d. uniform points in the disk of the given radius, shape (n, 2).

    Radial inversion: r = radius * sqrt(u) makes the area element uniform.
    """
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return np.empty((0, 2))
    r = radius * np.sqrt(rng.random(n))
    theta = rng.random(n) * (2.0 * np.pi)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def sample_poisson_count(intensity: float, area_m2: float, rng: np.random.Generator) -> int:
    """Poisson count with mean intensity * area."""
    if intensity < 0.0 or area_m2 < 0.0:
        raise ValueError("intensity and area must be nonnegative")
    return int(rng.poisson(intensity * area_m2))


def _positions_of(cus) -> np.ndarray:
    """Accept CellularUser sequences or bare (n, 2) arrays of positions."""
    seq = list(cus) if not isinstance(cus, np.ndarray) else cus
    if len(seq) == 0:
        return np.empty((0, 2))
    if hasattr(seq[0], "position"):
        return np.vstack([c.position for c in seq])
    return np.atleast_2d(np.asarray(seq, dtype=float))


def apply_exclusion(candidates, cus, exclusion_radius_m: float):
    """Drop candidates lying strictly inside any exclusion disk.

    Returns (kept, removed_count). Order is preserved; a candidate exactly on
    a disk boundary (distance == D) survives.
    """
    if exclusion_radius_m < 0.0:
        raise ValueError("exclusion radius must be nonnegative")
    pts = np.atleast_2d(np.asarray(candidates, dtype=float)) if len(candidates) else np.empty((0, 2))
    centers = _positions_of(cus)
    if len(pts) == 0 or len(centers) == 0 or exclusion_radius_m == 0.0:
        return pts, 0
    d2 = ((pts[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    keep = d2.min(axis=1) >= exclusion_radius_m ** 2
    return pts[keep], int(len(pts) - keep.sum())


@dataclass(eq=False)
class CellularUser:
    id: int
    channel_index: int
    position: np.ndarray
    dist_to_bs_m: float


@dataclass(eq=False)
class MulticastGroup:
    """A transmitter with the receivers that associated to it.

    ``id`` is the transmitter's index in the original drop, so ids stay
    stable when empty groups are dropped from a scenario.
    """

    id: int
    tx_position: np.ndarray
    receivers: np.ndarray
    tx_rx_dists_m: np.ndarray

    @property
    def num_receivers(self) -> int:
        return len(self.receivers)


@dataclass(eq=False)
class NetworkScenario:
    params: SimParams
    cus: list
    groups: list
    excluded_receiver_count: int
    scenario_seed: int
    candidate_receiver_count: int = 0

    @property
    def degenerate(self) -> bool:
        """True when no group retained any receiver."""
        return len(self.groups) == 0


def form_groups(
    tx_positions,
    receivers,
    tx_power_w: float,
    assoc_min_rx_power_w: float,
    alpha: float,
) -> list[MulticastGroup]:
    """Attach each receiver to its strongest transmitter.

    Mean received power is tx_power * d^-alpha with the link distance floored
    at MIN_LINK_DISTANCE_M; fading plays no part in association. Receivers
    whose best power falls below the association threshold join no group, and
    ties go to the lowest transmitter index. Transmitters left with no
    receivers are omitted from the result.
    """
    txs = np.atleast_2d(np.asarray(tx_positions, dtype=float))
    if len(txs) == 0:
        raise ValueError("need at least one transmitter")
    rx = np.atleast_2d(np.asarray(receivers, dtype=float)) if len(receivers) else np.empty((0, 2))
    if len(rx) == 0:
        return []
    d = np.sqrt(((rx[:, None, :] - txs[None, :, :]) ** 2).sum(axis=2))
    d_eff = np.maximum(d, MIN_LINK_DISTANCE_M)
    power = tx_power_w * d_eff ** (-alpha)
    best = power.argmax(axis=1)  # first max wins: lowest transmitter id
    best_power = power[np.arange(len(rx)), best]
    attached = best_power >= assoc_min_rx_power_w
    groups = []
    for g in range(len(txs)):
        members = attached & (best == g)
        if not members.any():
            continue
        groups.append(
            MulticastGroup(
                id=g,
                tx_position=txs[g],
                receivers=rx[members],
                tx_rx_dists_m=d[members, g],
            )
        )
    return groups


def generate_scenario(params: SimParams, index: int) -> NetworkScenario:
    """Draw one scenario, deterministic in (params.master_seed, index).

    Draw order is part of the contract (it pins reproducibility): CU
    positions, transmitter positions, candidate count, candidate positions.
    Parameter validation belongs to the config surface, not here; passing an
    exclusion radius larger than the cell is allowed and simply yields a
    degenerate scenario.
    """
    seed = child_seed(params.master_seed, index)
    rng = rng_for(params.master_seed, index)
    R = params.cell_radius_m
    C = params.num_channels
    cu_pos = sample_uniform_disk(C, R, rng)
    cus = [
        CellularUser(
            id=k,
            channel_index=k,
            position=cu_pos[k],
            dist_to_bs_m=float(np.hypot(cu_pos[k, 0], cu_pos[k, 1])),
        )
        for k in range(C)
    ]
    tx_pos = sample_uniform_disk(params.num_groups, R, rng) if params.num_groups else np.empty((0, 2))
    n_cand = sample_poisson_count(params.receiver_density_per_m2, params.cell_area_m2, rng)
    candidates = sample_uniform_disk(n_cand, R, rng)
    kept, removed = apply_exclusion(candidates, cu_pos, params.exclusion_radius_m)
    if len(tx_pos):
        groups = form_groups(
            tx_pos,
            kept,
            params.assoc_ref_power_w,
            params.assoc_min_rx_power_w,
            params.path_loss_exponent,
        )
    else:
        groups = []
    return NetworkScenario(
        params=params,
        cus=cus,
        groups=groups,
        excluded_receiver_count=removed,
        scenario_seed=seed,
        candidate_receiver_count=n_cand,
    )
