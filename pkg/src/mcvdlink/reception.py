"""Conditional count statistics and detection at a receiving node.

The molecule count at the end of a slot decomposes into the current-slot
arrivals, interference from the J previous slots, ambient source noise,
and counting noise whose variance equals the conditional mean count.
With the binomial arrival terms approximated as Gaussians, the count is
conditionally normal under either transmitted bit, and the detector is a
threshold solving the prior-weighted likelihood equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

from .channel import ArrivalTable
from .errors import NoThresholdError, ThresholdUnsetError
from .modulation import PulseShape


@dataclass(frozen=True)
class Priors:
    """Prior probability of transmitting bit "1"."""

    pi1: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.pi1 <= 1.0:
            raise ValueError(f"prior must be in [0, 1], got {self.pi1}")

    @property
    def pi0(self) -> float:
        return 1.0 - self.pi1


@dataclass(frozen=True)
class NoiseParams:
    """Gaussian ambient noise from foreign molecule sources."""

    mean: float = 100.0
    variance: float = 100.0

    def __post_init__(self):
        if self.mean < 0 or self.variance < 0:
            raise ValueError("noise mean and variance must be non-negative")


@dataclass(frozen=True)
class LinkStats:
    """Conditional Gaussian count parameters of one hop, plus its threshold."""

    mu0: float
    var0: float
    mu1: float
    var1: float
    threshold: float | None = None

    def with_threshold(self, tau: float) -> "LinkStats":
        return replace(self, threshold=tau)


def _check_dims(pulse: PulseShape, table: ArrivalTable):
    if table.subslots != pulse.subslots:
        raise ValueError(
            f"arrival table has {table.subslots} sub-slots, pulse has {pulse.subslots}"
        )


def isi_moments(pulse: PulseShape, table: ArrivalTable, priors: Priors) -> tuple[float, float]:
    """Mean and variance of the interference count from previous slots.

    Each previous slot contributes a Bernoulli(pi1) mixture of a Gaussian
    arrival count; the mixture adds a pi0*pi1*(sum g q)^2 spread term on
    top of the averaged binomial variance.
    """
    _check_dims(pulse, table)
    g = pulse.as_array()
    mean = 0.0
    var = 0.0
    for j in range(table.isi_length):
        qj = table.q[j]
        slot_mean = float(np.dot(g, qj))
        slot_binom = float(np.dot(g, qj * (1.0 - qj)))
        mean += priors.pi1 * slot_mean
        var += priors.pi1 * slot_binom + priors.pi0 * priors.pi1 * slot_mean**2
    return mean, var


def link_stats(
    pulse: PulseShape,
    table: ArrivalTable,
    priors: Priors,
    noise: NoiseParams,
) -> LinkStats:
    """Conditional count moments of one hop (threshold left unset).

    The counting-noise variance equals the conditional mean count, which
    is why each conditional variance carries a trailing +mu term.
    """
    _check_dims(pulse, table)
    g = pulse.as_array()
    p1 = table.p_current
    isi_mean, isi_var = isi_moments(pulse, table, priors)

    current_mean = float(np.dot(g, p1))
    current_var = float(np.dot(g, p1 * (1.0 - p1)))

    mu0 = isi_mean + noise.mean
    mu1 = mu0 + current_mean
    var0 = isi_var + noise.variance + mu0
    var1 = isi_var + current_var + noise.variance + mu1
    return LinkStats(mu0=mu0, var0=var0, mu1=mu1, var1=var1)


def _ber_at(tau, stats: LinkStats):
    """Equal-prior error probability of thresholding at ``tau`` (vectorized)."""
    a = erf((tau - stats.mu1) / math.sqrt(2.0 * stats.var1))
    b = erf((tau - stats.mu0) / math.sqrt(2.0 * stats.var0))
    return 0.5 + 0.25 * (a - b)


def _grid_refine_threshold(stats: LinkStats) -> float:
    """Fallback threshold search minimizing the closed-form error probability."""
    lo = stats.mu0 - 6.0 * math.sqrt(stats.var0)
    hi = stats.mu1 + 6.0 * math.sqrt(stats.var1)
    if hi <= lo:
        lo, hi = hi, lo
    grid = np.linspace(lo, hi, 2001)
    best = float(grid[np.argmin(_ber_at(grid, stats))])
    step = (hi - lo) / 2000.0
    fine = np.linspace(best - step, best + step, 201)
    return float(fine[np.argmin(_ber_at(fine, stats))])


def map_threshold(stats: LinkStats, priors: Priors) -> float:
    """Count threshold equating the prior-weighted conditional densities.

    The log-density equality is quadratic in the threshold; with two real
    roots the one between the conditional means is the detector boundary.
    Degenerate quadratics fall back to a numeric error-minimizing search.
    """
    if stats.var0 <= 0 or stats.var1 <= 0:
        raise ValueError("conditional variances must be positive")
    if stats.mu0 == stats.mu1 and stats.var0 == stats.var1:
        raise NoThresholdError("conditional distributions are identical")
    if priors.pi1 in (0.0, 1.0):
        raise NoThresholdError("degenerate prior leaves a single hypothesis")

    a = 0.5 / stats.var0 - 0.5 / stats.var1
    b = stats.mu1 / stats.var1 - stats.mu0 / stats.var0
    c = (
        stats.mu0**2 / (2.0 * stats.var0)
        - stats.mu1**2 / (2.0 * stats.var1)
        + math.log(priors.pi1 / priors.pi0)
        + 0.5 * math.log(stats.var0 / stats.var1)
    )

    if abs(a) < 1e-300:
        if b == 0.0:
            raise NoThresholdError("conditional distributions are identical")
        return -c / b

    disc = b * b - 4.0 * a * c
    if disc < 0:
        return _grid_refine_threshold(stats)
    sq = math.sqrt(disc)
    roots = sorted(((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)))
    lo, hi = sorted((stats.mu0, stats.mu1))
    inside = [r for r in roots if lo < r < hi]
    if inside:
        return inside[0]
    return _grid_refine_threshold(stats)


def solve_threshold(stats: LinkStats, priors: Priors) -> LinkStats:
    """Convenience: return a copy of ``stats`` with its threshold filled in."""
    return stats.with_threshold(map_threshold(stats, priors))


def detection_probabilities(stats: LinkStats) -> tuple[float, float]:
    """(detection probability given "1", false alarm probability given "0")."""
    if stats.threshold is None:
        raise ThresholdUnsetError("link stats have no detection threshold")
    if stats.var0 <= 0 or stats.var1 <= 0:
        raise ValueError("conditional variances must be positive")
    tau = stats.threshold
    p_det = 0.5 * (1.0 - math.erf((tau - stats.mu1) / math.sqrt(2.0 * stats.var1)))
    p_fa = 0.5 * (1.0 - math.erf((tau - stats.mu0) / math.sqrt(2.0 * stats.var0)))
    return p_det, p_fa
