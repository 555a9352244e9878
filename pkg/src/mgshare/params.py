"""Simulation parameters and unit helpers.

All distances are metres, powers are watts internally (dBm at the config
surface), densities are per square metre. Rates are in bit/s/Hz unless a
bandwidth other than 1 Hz is configured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace


def db_to_linear(x_db):
    """10^(x/10)."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x):
    return 10.0 * math.log10(x)


def dbm_to_watt(x_dbm):
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watt_to_dbm(x_w):
    return 10.0 * math.log10(x_w) + 30.0


# Receivers closer than this to a transmitter see the d = D_MIN gain
# (keeps the singular path loss model bounded).
MIN_LINK_DISTANCE_M = 1.0

# SIR ceiling applied everywhere a ratio is turned into a rate. An
# interference-free link (e.g. a CU alone on its channel) would otherwise
# have infinite SIR; the cap models the receiver's finite dynamic range.
SIR_CAP_DB = 40.0
SIR_CAP = db_to_linear(SIR_CAP_DB)


@dataclass
class SimParams:
    """Scenario and experiment parameters with the artifact defaults.

    The closed-form field densities (``cu_density``, ``group_density``) are
    deliberately decoupled from the finite per-cell counts ``num_channels``
    and ``num_groups``: the closed forms describe infinite Poisson fields,
    the simulated cell holds a fixed small population.
    """

    # Geometry
    cell_radius_m: float = 500.0
    exclusion_radius_m: float = 50.0
    num_channels: int = 3
    num_groups: int = 7
    receiver_density_per_m2: float = 8.0e-3
    assoc_min_rx_power_dbm: float = -12.4
    # Association is a coverage-planning decision, so it references a fixed
    # pilot power rather than the operational transmit limit; sweeping
    # max_mg_power_dbm therefore leaves group membership untouched.
    assoc_ref_power_dbm: float = 30.0

    # Radio
    path_loss_exponent: float = 4.0
    max_cu_power_dbm: float = 30.0
    max_mg_power_dbm: float = 30.0
    cu_sir_threshold_db: float = 0.0
    mg_sir_threshold_db: float = 25.0
    cu_min_rate_bps_hz: float = 0.0
    bandwidth_hz: float = 1.0

    # Outage budgets and analytic field densities
    cu_outage_budget: float = 0.1
    mg_outage_budget: float = 0.1
    cu_density_per_m2: float = 2.0e-6
    group_density_per_m2: float = 1.0e-5

    # Experiment control
    master_seed: int = 20240817
    num_scenarios: int = 100

    # -- derived conveniences -------------------------------------------------

    @property
    def cell_area_m2(self) -> float:
        return math.pi * self.cell_radius_m ** 2

    @property
    def max_cu_power_w(self) -> float:
        return dbm_to_watt(self.max_cu_power_dbm)

    @property
    def max_mg_power_w(self) -> float:
        return dbm_to_watt(self.max_mg_power_dbm)

    @property
    def cu_sir_threshold(self) -> float:
        """Effective linear CU SIR threshold.

        A configured minimum CU rate tightens the plain SIR threshold to
        whichever is harder to meet: gamma >= max(th, 2^(Rmin/Bw) - 1).
        """
        th = db_to_linear(self.cu_sir_threshold_db)
        if self.cu_min_rate_bps_hz > 0.0:
            th = max(th, 2.0 ** (self.cu_min_rate_bps_hz / self.bandwidth_hz) - 1.0)
        return th

    @property
    def mg_sir_threshold(self) -> float:
        return db_to_linear(self.mg_sir_threshold_db)

    @property
    def assoc_min_rx_power_w(self) -> float:
        return dbm_to_watt(self.assoc_min_rx_power_dbm)

    @property
    def assoc_ref_power_w(self) -> float:
        return dbm_to_watt(self.assoc_ref_power_dbm)

    def copy_with(self, **kw) -> "SimParams":
        return replace(self, **kw)

    def validate(self) -> None:
        if self.cell_radius_m <= 0 or self.exclusion_radius_m < 0:
            raise ValueError("radii must be positive")
        if self.exclusion_radius_m >= self.cell_radius_m:
            raise ValueError("exclusion radius must be smaller than the cell radius")
        if self.num_channels < 1 or self.num_groups < 0:
            raise ValueError("need at least one channel and a nonnegative group count")
        if not (0.0 < self.cu_outage_budget < 1.0 and 0.0 < self.mg_outage_budget < 1.0):
            raise ValueError("outage budgets must lie in (0, 1)")
        if self.path_loss_exponent <= 2.0:
            raise ValueError("path loss exponent must exceed 2 for finite interference")


# Config keys that may be set from key=value files / CLI overrides, with the
# parser used for each. Booleans or lists are not part of this surface.
_INT_KEYS = {"num_channels", "num_groups", "master_seed", "num_scenarios"}


def param_names() -> list[str]:
    return [f.name for f in fields(SimParams)]


def parse_param(key: str, raw: str):
    if key not in param_names():
        raise KeyError(f"unknown parameter {key!r}")
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)
