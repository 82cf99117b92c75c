"""Full link description and the analytic evaluation pipeline.

A scenario fixes everything except the symbol duration: geometry of the
relay and destination, medium, pulse family and its molecule or energy
budget, priors, noise, and the interference memory length.  Evaluating a
scenario at a symbol duration produces the per-hop statistics, detection
thresholds, and closed-form error probabilities the sweeps and the
optimizer consume.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

from .ber import BerResult, direct_ber, relay_ber
from .channel import (
    ArrivalTable,
    ChannelParams,
    SphereReceiver,
    Vec3,
    arrival_table,
    second_hop_params,
)
from .energy import EnergyParams, total_energy
from .errors import NoThresholdError
from .modulation import PulseShape, ShapeFamily, make_pulse, scale_to_energy
from .reception import (
    LinkStats,
    NoiseParams,
    Priors,
    detection_probabilities,
    link_stats,
    solve_threshold,
)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to evaluate the relay link at a symbol duration."""

    drift: Vec3
    relay: SphereReceiver
    destination: SphereReceiver
    pulse_family: ShapeFamily
    subslots: int = 10
    diffusion_t: float = 4e-9
    diffusion_u: float = 4e-9
    n_total: int | None = None
    energy_budget: float | None = None  # J; exclusive with n_total
    energy: EnergyParams = field(default_factory=EnergyParams)
    priors: Priors = field(default_factory=Priors)
    noise_sr: NoiseParams = field(default_factory=NoiseParams)
    noise_rd: NoiseParams = field(default_factory=NoiseParams)
    isi_length: int = 10
    relay_prior_mode: str = "equal"  # or "exact"

    def __post_init__(self):
        if (self.n_total is None) == (self.energy_budget is None):
            raise ValueError("specify exactly one of n_total and energy_budget")
        if self.relay_prior_mode not in ("equal", "exact"):
            raise ValueError(f"unknown relay prior mode {self.relay_prior_mode!r}")


@dataclass(frozen=True)
class LinkEvaluation:
    """Analytic state of the link at one symbol duration."""

    t_s: float
    pulse: PulseShape
    table_sr: ArrivalTable
    table_rd: ArrivalTable
    table_sd: ArrivalTable
    stats_sr: LinkStats
    stats_rd: LinkStats
    stats_sd: LinkStats
    relay_priors: Priors
    ber_direct: BerResult
    ber_relay: BerResult
    energy_per_bit: float


@functools.lru_cache(maxsize=512)
def _energy_budget_total(
    family: ShapeFamily, subslots: int, budget: float, energy: EnergyParams
) -> int:
    # The molecule total funded by a budget does not depend on t_s.
    return scale_to_energy(family, subslots, 1.0, budget, energy).total


def resolve_pulse(scenario: Scenario, t_s: float) -> PulseShape:
    """Pulse shape at this symbol duration, honoring the configured budget."""
    if scenario.n_total is not None:
        n = scenario.n_total
    else:
        n = _energy_budget_total(
            scenario.pulse_family, scenario.subslots, scenario.energy_budget, scenario.energy
        )
    return make_pulse(scenario.pulse_family, scenario.subslots, n, t_s)


def hop_channels(scenario: Scenario) -> tuple[ChannelParams, ChannelParams, ChannelParams]:
    """Channel parameters for the S->R, R->D and S->D links."""
    sr = ChannelParams(
        diffusion=scenario.diffusion_t, drift=scenario.drift, receiver=scenario.relay
    )
    rd = second_hop_params(
        relay_center=scenario.relay.center,
        dest_center=scenario.destination.center,
        dest_radius=scenario.destination.radius,
        diffusion=scenario.diffusion_u,
        drift=scenario.drift,
    )
    sd = ChannelParams(
        diffusion=scenario.diffusion_t, drift=scenario.drift, receiver=scenario.destination
    )
    return sr, rd, sd


def relay_priors(scenario: Scenario, stats_sr: LinkStats) -> Priors:
    """Effective priors of the bit stream the relay retransmits."""
    if scenario.relay_prior_mode == "equal":
        return scenario.priors
    p_det, p_fa = detection_probabilities(stats_sr)
    pi1 = scenario.priors.pi1 * p_det + scenario.priors.pi0 * p_fa
    return Priors(pi1=min(max(pi1, 0.0), 1.0))


def _solve_or_degenerate(stats: LinkStats, priors: Priors) -> LinkStats:
    """Solve the detection threshold, tolerating an unreachable hop.

    When no molecule arrives in time the two conditional distributions
    coincide and any threshold errs with probability one half; placing it
    at the mean makes the closed-form error expressions yield exactly 1/2.
    """
    try:
        return solve_threshold(stats, priors)
    except NoThresholdError:
        return stats.with_threshold(stats.mu0)


def evaluate_link(scenario: Scenario, t_s: float) -> LinkEvaluation:
    """Analytic pipeline: tables, moments, thresholds, error probabilities."""
    pulse = resolve_pulse(scenario, t_s)
    ch_sr, ch_rd, ch_sd = hop_channels(scenario)
    j = scenario.isi_length

    table_sr = arrival_table(ch_sr, t_s, scenario.subslots, j)
    table_rd = arrival_table(ch_rd, t_s, scenario.subslots, j)
    table_sd = arrival_table(ch_sd, t_s, scenario.subslots, j)

    stats_sr = _solve_or_degenerate(
        link_stats(pulse, table_sr, scenario.priors, scenario.noise_sr), scenario.priors
    )
    priors_r = relay_priors(scenario, stats_sr)
    stats_rd = _solve_or_degenerate(
        link_stats(pulse, table_rd, priors_r, scenario.noise_rd), priors_r
    )
    stats_sd = _solve_or_degenerate(
        link_stats(pulse, table_sd, scenario.priors, scenario.noise_rd), scenario.priors
    )

    return LinkEvaluation(
        t_s=t_s,
        pulse=pulse,
        table_sr=table_sr,
        table_rd=table_rd,
        table_sd=table_sd,
        stats_sr=stats_sr,
        stats_rd=stats_rd,
        stats_sd=stats_sd,
        relay_priors=priors_r,
        ber_direct=direct_ber(stats_sd),
        ber_relay=relay_ber(stats_sr, stats_rd),
        energy_per_bit=total_energy(pulse, scenario.energy),
    )
