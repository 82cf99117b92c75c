"""Closed-form bit error probabilities for direct and relayed transmission."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ThresholdUnsetError
from .reception import LinkStats


@dataclass(frozen=True)
class BerResult:
    p_e: float
    mode: str  # "direct" or "relay"

    def __post_init__(self):
        if not 0.0 <= self.p_e <= 1.0:
            raise ValueError(f"error probability out of range: {self.p_e}")


def _erf_bracket(stats: LinkStats) -> tuple[float, float]:
    if stats.threshold is None:
        raise ThresholdUnsetError("link stats have no detection threshold")
    tau = stats.threshold
    e1 = math.erf((tau - stats.mu1) / math.sqrt(2.0 * stats.var1))
    e0 = math.erf((tau - stats.mu0) / math.sqrt(2.0 * stats.var0))
    return e1, e0


def direct_ber(stats_sd: LinkStats) -> BerResult:
    """Error probability of the single-hop link with equal bit priors."""
    e1, e0 = _erf_bracket(stats_sd)
    p_e = 0.5 + 0.25 * (e1 - e0)
    return BerResult(p_e=min(max(p_e, 0.0), 1.0), mode="direct")


def relay_ber(stats_sr: LinkStats, stats_rd: LinkStats) -> BerResult:
    """Error probability of the two-hop decode-and-forward link.

    Each hop contributes an erf bracket in [-2, 0]; their product scaled
    by 1/8 offsets the 1/2 baseline, vanishing when both hops separate
    perfectly.
    """
    e1_sr, e0_sr = _erf_bracket(stats_sr)
    e1_rd, e0_rd = _erf_bracket(stats_rd)
    p_e = 0.5 + 0.125 * (e1_sr - e0_sr) * (e0_rd - e1_rd)
    return BerResult(p_e=min(max(p_e, 0.0), 1.0), mode="relay")


def success_probability(p_e: float, bits_per_symbol: int = 1) -> float:
    """Probability that a symbol's bits all get through.

    An error probability above one half is relabeled to its complement
    (the detector's decisions can always be inverted).
    """
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"error probability out of range: {p_e}")
    if bits_per_symbol < 1:
        raise ValueError("bits per symbol must be >= 1")
    p = min(p_e, 1.0 - p_e)
    return (1.0 - 2.0 * p) ** bits_per_symbol
