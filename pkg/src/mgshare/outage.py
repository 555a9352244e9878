"""Closed-form outage probabilities and their Monte Carlo oracle.

The interference field has two parts: co-channel cellular uplink
transmitters, which receivers keep a guard distance D away from (exclusion
zones), and co-channel multicast transmitters, which can be anywhere. Under
Rayleigh fading and a d^-alpha power law, each part contributes a Laplace
functional factor to the success probability of the tagged link. The closed
forms below are written for alpha = 4; for other exponents only the Monte
Carlo estimator applies.

The guard-zone factor is offered in three arrangements. `annulus_laplace` is
the exact evaluation of the guard-zone integral and is the one used by
`outage_mg`; it is monotone in every parameter and stays in (0, 1]. The two
alternates reproduce historical arrangements of the same derivation (one
leaves the boundary term outside the density scaling, the other folds it
inside after a half-angle rewrite); they are kept for comparison because
neither satisfies the monotonicity/normalization contracts everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_ALPHA_CLOSED = 4.0


def _require_alpha4(alpha: float) -> None:
    if not math.isclose(alpha, _ALPHA_CLOSED, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("closed forms are only valid for path loss exponent 4")


def _check_nonneg(**kw: float) -> None:
    for name, v in kw.items():
        if v < 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")


def plane_laplace(density: float, power: float, s: float, alpha: float = 4.0) -> float:
    """Interference Laplace functional of a full-plane field at argument s.

    exp(-density * (pi^2/2) * sqrt(power * s)) for alpha = 4. `power` is the
    per-interferer transmit power; `s` is the Laplace argument, typically
    threshold * d^alpha / signal_power.
    """
    _require_alpha4(alpha)
    _check_nonneg(density=density, power=power, s=s)
    return math.exp(-density * (math.pi**2 / 2.0) * math.sqrt(power * s))


def annulus_laplace(
    density: float, power: float, s: float, guard: float, alpha: float = 4.0
) -> float:
    """Interference Laplace functional of a field kept outside radius `guard`.

    Exact alpha = 4 evaluation:
        exp(-density * pi * sqrt(power*s) * arctan(sqrt(power*s) / guard^2)).
    In (0, 1]; nonincreasing in density, power and s; nondecreasing in guard.
    """
    _require_alpha4(alpha)
    _check_nonneg(density=density, power=power, s=s)
    if guard <= 0:
        raise ValueError("guard radius must be positive")
    ps = power * s
    if ps == 0.0 or density == 0.0:
        return 1.0
    root = math.sqrt(ps)
    return math.exp(-density * math.pi * root * math.atan(root / guard**2))


def annulus_laplace_alt(
    density: float,
    power: float,
    s: float,
    guard: float,
    alpha: float = 4.0,
    form: str = "bracket_sum",
    tx_power: float | None = None,
) -> float:
    """Alternate arrangements of the guard-zone factor, for comparison only.

    form="bracket_sum": exponent -density*pi*sqrt(power*s)*(arctan(sqrt(Y)) +
    sqrt(Y)/(1+Y)) - Y*guard^2/(1+Y), with Y = power*s/guard^alpha. The
    boundary term sits outside the density scaling, so the value collapses
    toward 0 whenever Y*guard^2 is large and is not monotone in guard.

    form="condensed": exponent -density*pi*(sqrt(power*s)*(pi/2 -
    arctan(1/Y) + sqrt(Y)/(1+Y)) - s*tx_power*guard^(2-alpha)/(1+Y)).
    Requires the tagged link's transmit power; can exceed 1 when tx_power >
    power.
    """
    _require_alpha4(alpha)
    _check_nonneg(density=density, power=power, s=s)
    if guard <= 0:
        raise ValueError("guard radius must be positive")
    ps = power * s
    if ps == 0.0 or density == 0.0:
        return 1.0
    y1 = ps / guard**alpha
    root = math.sqrt(ps)
    if form == "bracket_sum":
        bracket = math.atan(math.sqrt(y1)) + math.sqrt(y1) / (1.0 + y1)
        expo = -density * math.pi * root * bracket - y1 * guard**2 / (1.0 + y1)
        return math.exp(expo)
    if form == "condensed":
        if tx_power is None:
            raise ValueError("condensed form needs the tagged link's tx_power")
        bracket = (
            math.pi / 2.0 - math.atan(1.0 / y1) + math.sqrt(y1) / (1.0 + y1)
        )
        boundary = s * tx_power * guard ** (2.0 - alpha) / (1.0 + y1)
        return math.exp(-density * math.pi * (root * bracket - boundary))
    raise ValueError(f"unknown form {form!r}")


def outage_mg(
    cu_density: float,
    mg_density: float,
    p_c: float,
    p_g: float,
    guard: float,
    link_d: float,
    threshold: float,
    alpha: float = 4.0,
    variant: str = "annulus",
) -> float:
    """Outage probability of a multicast receiver at distance `link_d` from
    its transmitter, with co-channel CU and multicast interference fields.

    1 - guard_zone_factor * plane_factor, evaluated at
    s = threshold * link_d^alpha / p_g. The plane factor is independent of
    p_g (the interferer and signal powers cancel). `variant` selects the
    guard-zone arrangement; anything but the default "annulus" is for
    comparison and may leave [0, 1].
    """
    _require_alpha4(alpha)
    _check_nonneg(
        cu_density=cu_density,
        mg_density=mg_density,
        p_c=p_c,
        p_g=p_g,
        link_d=link_d,
        threshold=threshold,
    )
    if p_g <= 0:
        return 1.0 if threshold > 0 else 0.0
    s = threshold * link_d**alpha / p_g
    # interferer and signal powers cancel in the plane factor; evaluating the
    # cancelled form keeps it bitwise constant across p_g
    l_plane = plane_laplace(mg_density, 1.0, threshold * link_d**alpha, alpha)
    if variant == "annulus":
        l_guard = annulus_laplace(cu_density, p_c, s, guard, alpha)
    else:
        l_guard = annulus_laplace_alt(
            cu_density, p_c, s, guard, alpha, form=variant, tx_power=p_g
        )
    return 1.0 - l_guard * l_plane


def outage_cu(
    mg_density: float,
    p_g: float,
    p_c: float,
    d_cb: float,
    threshold: float,
    alpha: float = 4.0,
) -> float:
    """Outage probability of a cellular uplink at distance `d_cb` from the
    base station under the co-channel multicast interference field.

    1 - exp(-mg_density * (pi^2/2) * sqrt(p_g * threshold * d_cb^alpha /
    p_c)). Nondecreasing in p_g and mg_density, nonincreasing in p_c. The
    p_c -> 0 limit is 1.
    """
    _require_alpha4(alpha)
    _check_nonneg(
        mg_density=mg_density, p_g=p_g, p_c=p_c, d_cb=d_cb, threshold=threshold
    )
    if p_c <= 0:
        return 1.0 if threshold > 0 and mg_density > 0 and p_g > 0 else 0.0
    s = threshold * d_cb**alpha / p_c
    return 1.0 - plane_laplace(mg_density, p_g, s, alpha)


# ---------------------------------------------------------------------------
# Monte Carlo oracle


@dataclass(frozen=True)
class MCLink:
    """Description of one tagged link for the Monte Carlo estimator.

    kind "mg": receiver at the origin, serving multicast transmitter at
    `link_d`; CU interferers form a Poisson field confined to the annulus
    [guard, sim_radius] (the receiver sits outside every exclusion zone);
    multicast interferers form an unrestricted Poisson field in the disk.

    kind "cu": base station at the origin, tagged CU at `link_d`; multicast
    interferers form an unrestricted Poisson field in the disk.

    No distance clamping is applied: the estimator mirrors the analytic
    field model exactly, including the singular power law near the origin.
    """

    kind: str  # "mg" | "cu"
    cu_density: float = 0.0
    mg_density: float = 0.0
    p_c: float = 1.0
    p_g: float = 1.0
    guard: float = 1.0
    link_d: float = 1.0
    threshold: float = 10.0
    alpha: float = 4.0
    sim_radius: float = 3000.0


@dataclass(frozen=True)
class MCEstimate:
    outage: float
    halfwidth95: float
    n_trials: int

    def brackets(self, value: float, widen: float = 1.0) -> bool:
        return abs(value - self.outage) <= widen * self.halfwidth95


def _field_interference(
    rng: np.random.Generator,
    n_trials: int,
    density: float,
    power: float,
    r_min: float,
    r_max: float,
    alpha: float,
) -> np.ndarray:
    """Per-trial interference sums from a Poisson field in [r_min, r_max]."""
    out = np.zeros(n_trials)
    if density <= 0 or power <= 0 or r_max <= r_min:
        return out
    area = math.pi * (r_max**2 - r_min**2)
    counts = rng.poisson(density * area, size=n_trials)
    total = int(counts.sum())
    if total == 0:
        return out
    # radii with density proportional to r on [r_min, r_max]
    u = rng.random(total)
    r2 = r_min**2 + u * (r_max**2 - r_min**2)
    fading = rng.standard_exponential(total)
    contrib = power * fading * r2 ** (-alpha / 2.0)
    idx = np.repeat(np.arange(n_trials), counts)
    np.add.at(out, idx, contrib)
    return out


def mc_outage(
    link: MCLink,
    n_trials: int,
    rng: np.random.Generator,
    chunk: int = 4000,
) -> MCEstimate:
    """Empirical outage fraction over independent field + fading draws,
    with a 95% binomial confidence halfwidth."""
    if n_trials < 1:
        raise ValueError("need at least one trial")
    if link.kind not in ("mg", "cu"):
        raise ValueError(f"unknown link kind {link.kind!r}")
    failures = 0
    done = 0
    while done < n_trials:
        m = min(chunk, n_trials - done)
        sig_power = link.p_g if link.kind == "mg" else link.p_c
        fading = rng.standard_exponential(m)
        signal = sig_power * fading * link.link_d ** (-link.alpha)
        interference = np.zeros(m)
        if link.kind == "mg":
            interference += _field_interference(
                rng, m, link.cu_density, link.p_c, link.guard, link.sim_radius,
                link.alpha,
            )
            interference += _field_interference(
                rng, m, link.mg_density, link.p_g, 0.0, link.sim_radius,
                link.alpha,
            )
        else:
            interference += _field_interference(
                rng, m, link.mg_density, link.p_g, 0.0, link.sim_radius,
                link.alpha,
            )
        with np.errstate(divide="ignore"):
            sir = np.where(interference > 0, signal / interference, np.inf)
        failures += int(np.count_nonzero(sir < link.threshold))
        done += m
    p_hat = failures / n_trials
    hw = 1.96 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n_trials)
    return MCEstimate(outage=p_hat, halfwidth95=hw, n_trials=n_trials)
