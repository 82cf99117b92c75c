"""Independent oracles: particle sampling, quadrature, and bit-level simulation.

Nothing here reuses the closed-form arrival approximation or the Gaussian
count algebra being checked (beyond sharing the arrival tables that both
sides are defined on), so agreement is meaningful evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .channel import ArrivalTable, ChannelParams, pdf_at_point  # noqa: F401 (re-export context)
from .errors import ConvergenceError
from .modulation import PulseShape
from .reception import LinkStats, NoiseParams, Priors, link_stats
from .scenario import Scenario, evaluate_link


@dataclass(frozen=True)
class RngConfig:
    seed: int
    streams: int = 1

    def __post_init__(self):
        if self.streams < 1:
            raise ValueError(f"stream count must be >= 1, got {self.streams}")

    def generators(self) -> list[np.random.Generator]:
        children = np.random.SeedSequence(self.seed).spawn(self.streams)
        return [np.random.Generator(np.random.PCG64(c)) for c in children]


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    trials: int

    def agrees_with(self, reference: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - reference) <= n_sigma * self.std_error


def _binomial(rng: np.random.Generator, n: int, p: float, size: int) -> np.ndarray:
    """Binomial draws, switching to the normal approximation for large n*p.

    The analytic pipeline itself runs on the normal approximation, so the
    switchover does not bias the comparison; it keeps million-bit runs fast.
    """
    if size == 0:
        return np.zeros(0)
    if n == 0 or p <= 0.0:
        return np.zeros(size)
    if p >= 1.0:
        return np.full(size, float(n))
    mean = n * p
    if mean < 30.0 or n - mean < 30.0:
        return rng.binomial(n, p, size).astype(float)
    draws = np.rint(rng.normal(mean, math.sqrt(mean * (1.0 - p)), size))
    return np.clip(draws, 0.0, float(n))


def mc_presence_probability(
    params: ChannelParams, t: float, trials: int, rng: RngConfig
) -> McEstimate:
    """Fraction of simulated molecules inside the receiver sphere at time t.

    The time-t displacement of drifting Brownian motion is exactly
    Gaussian, so positions are sampled directly instead of stepping paths.
    """
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials}")
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")

    center = params.receiver.center.as_array()
    mean = params.drift.as_array() * t
    sigma = math.sqrt(2.0 * params.diffusion * t)
    r2 = params.receiver.radius**2

    per_stream = [trials // rng.streams] * rng.streams
    for k in range(trials % rng.streams):
        per_stream[k] += 1

    hits = 0
    for gen, n_k in zip(rng.generators(), per_stream):
        if n_k == 0:
            continue
        pos = gen.normal(mean, sigma, size=(n_k, 3))
        hits += int(np.count_nonzero(np.sum((pos - center) ** 2, axis=1) <= r2))
    p_hat = hits / trials
    se = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return McEstimate(value=p_hat, std_error=se, trials=trials)


def quadrature_presence_probability(params: ChannelParams, t: float, order: int = 32) -> float:
    """Gauss-Legendre integration of the occupancy density over the sphere.

    Tensor-product rule in spherical coordinates around the receiver
    center, with order doubling until the relative change is below 1e-8.
    """
    if order < 16:
        raise ValueError(f"order must be >= 16, got {order}")
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")

    center = params.receiver.center.as_array()
    mean = params.drift.as_array() * t
    radius = params.receiver.radius
    four_dt = 4.0 * params.diffusion * t
    norm = (math.pi * four_dt) ** -1.5

    def integrate(n: int) -> float:
        nodes, weights = leggauss(n)
        rho = (nodes + 1.0) * 0.5 * radius
        w_rho = weights * radius * 0.5
        theta = (nodes + 1.0) * 0.5 * math.pi
        w_theta = weights * math.pi * 0.5
        phi = (nodes + 1.0) * math.pi
        w_phi = weights * math.pi
        st, ct = np.sin(theta), np.cos(theta)
        x = center[0] + rho[:, None, None] * st[None, :, None] * np.cos(phi)[None, None, :]
        y = center[1] + rho[:, None, None] * st[None, :, None] * np.sin(phi)[None, None, :]
        z = center[2] + rho[:, None, None] * ct[None, :, None] * np.ones(n)[None, None, :]
        expo = -((x - mean[0]) ** 2 + (y - mean[1]) ** 2 + (z - mean[2]) ** 2) / four_dt
        dens = norm * np.exp(np.maximum(expo, -745.0))
        jac = rho[:, None, None] ** 2 * st[None, :, None]
        wgt = w_rho[:, None, None] * w_theta[None, :, None] * w_phi[None, None, :]
        return float(np.sum(dens * jac * wgt))

    prev = integrate(order)
    n = order
    while n <= 1024:
        n *= 2
        cur = integrate(n)
        if abs(cur - prev) <= 1e-8 * max(abs(cur), 1e-300) or max(abs(cur), abs(prev)) < 1e-30:
            return cur
        prev = cur
    raise ConvergenceError(f"sphere quadrature did not converge by order {n}")


def _hop_counts(
    gen: np.random.Generator,
    tx_bits: np.ndarray,
    pulse: PulseShape,
    table: ArrivalTable,
    noise: NoiseParams,
    stats: LinkStats,
) -> np.ndarray:
    """Simulated end-of-slot counts at one receiving node for a bit stream."""
    n_slots = len(tx_bits)
    counts = np.zeros(n_slots)
    g = pulse.g
    p1 = table.p_current

    ones = np.flatnonzero(tx_bits == 1)
    for i in range(pulse.subslots):
        counts[ones] += _binomial(gen, g[i], float(p1[i]), len(ones))

    for j in range(1, table.isi_length + 1):
        # Slot n hears the tail of the bit sent j slots earlier.
        prev_ones = np.flatnonzero(tx_bits[: n_slots - j] == 1) + j
        for i in range(pulse.subslots):
            counts[prev_ones] += _binomial(gen, g[i], float(table.q[j - 1, i]), len(prev_ones))

    counts += gen.normal(noise.mean, math.sqrt(noise.variance), n_slots)
    # Counting noise: zero-mean Gaussian whose variance is the conditional
    # mean count under the transmitted bit.
    cond_mean = np.where(tx_bits == 1, stats.mu1, stats.mu0)
    counts += gen.standard_normal(n_slots) * np.sqrt(cond_mean)
    return np.maximum(counts, 0.0)


def mc_link_ber(scenario: Scenario, t_s: float, bits: int, rng: RngConfig) -> McEstimate:
    """Empirical end-to-end error rate of the decode-and-forward chain."""
    if bits < 1000:
        raise ValueError(f"need at least 1000 bits, got {bits}")
    ev = evaluate_link(scenario, t_s)
    gen = rng.generators()[0]
    warmup = scenario.isi_length + 1
    n_slots = bits + warmup + 1

    x_s = (gen.random(n_slots) < scenario.priors.pi1).astype(np.int8)

    counts_r = _hop_counts(gen, x_s, ev.pulse, ev.table_sr, scenario.noise_sr, ev.stats_sr)
    x_r_hat = (counts_r >= ev.stats_sr.threshold).astype(np.int8)

    # The relay retransmits its decision in the next slot.
    x_r = np.zeros(n_slots, dtype=np.int8)
    x_r[1:] = x_r_hat[:-1]

    counts_d = _hop_counts(gen, x_r, ev.pulse, ev.table_rd, scenario.noise_rd, ev.stats_rd)
    x_d_hat = (counts_d >= ev.stats_rd.threshold).astype(np.int8)

    # Destination's decision in slot n+1 estimates the source bit of slot n.
    decided = x_d_hat[warmup + 1 :]
    sent = x_s[warmup:-1]
    errors = int(np.count_nonzero(decided != sent))
    n_compared = len(sent)
    p_hat = errors / n_compared
    se = math.sqrt(max(p_hat * (1.0 - p_hat), 1e-30) / n_compared)
    return McEstimate(value=p_hat, std_error=se, trials=n_compared)


def mc_count_moments(
    pulse: PulseShape,
    table: ArrivalTable,
    priors: Priors,
    noise: NoiseParams,
    trials: int,
    rng: RngConfig,
) -> dict:
    """Empirical conditional count moments, keyed mean0/var0/mean1/var1.

    Samples the exact binomial mixture (random interfering bits, ambient
    noise, counting noise) conditioned on the current bit.
    """
    if trials < 10_000:
        raise ValueError(f"need at least 10^4 trials, got {trials}")
    gen = rng.generators()[0]
    stats = link_stats(pulse, table, priors, noise)
    g = pulse.g
    p1 = table.p_current

    out = {}
    for bit in (0, 1):
        counts = np.zeros(trials)
        if bit == 1:
            for i in range(pulse.subslots):
                counts += _binomial(gen, g[i], float(p1[i]), trials)
        for j in range(table.isi_length):
            active = np.flatnonzero(gen.random(trials) < priors.pi1)
            for i in range(pulse.subslots):
                counts[active] += _binomial(gen, g[i], float(table.q[j, i]), len(active))
        counts += gen.normal(noise.mean, math.sqrt(noise.variance), trials)
        cond_mean = stats.mu1 if bit == 1 else stats.mu0
        counts += gen.standard_normal(trials) * math.sqrt(cond_mean)

        mean = float(np.mean(counts))
        var = float(np.var(counts, ddof=1))
        centered = counts - mean
        m4 = float(np.mean(centered**4))
        se_mean = math.sqrt(var / trials)
        se_var = math.sqrt(max(m4 - var**2, 0.0) / trials)
        out[f"mean{bit}"] = McEstimate(value=mean, std_error=se_mean, trials=trials)
        out[f"var{bit}"] = McEstimate(value=var, std_error=se_var, trials=trials)
    return out
