"""Pulse shapes for non-uniform concentration shift keying.

Bit "1" is transmitted by releasing molecules spread over the I sub-slots
of a symbol, with per-sub-slot counts g(i) drawn from a shape family.
Bit "0" releases nothing.  Counts are integers; a largest-remainder
apportionment keeps the total exactly at the requested budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBudgetError

_FAMILIES = ("uniform", "exponential", "sinc", "cosine")


@dataclass(frozen=True)
class ShapeFamily:
    """Weight profile used to distribute molecules over sub-slots."""

    kind: str
    rate: float = 0.5  # decay rate of the exponential profile

    def __post_init__(self):
        if self.kind not in _FAMILIES:
            raise ValueError(f"unknown shape family {self.kind!r}; choose from {_FAMILIES}")
        if not math.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"exponential rate must be finite and >= 0, got {self.rate}")

    def weights(self, subslots: int) -> np.ndarray:
        i = np.arange(subslots, dtype=float)
        if self.kind == "uniform":
            w = np.ones(subslots)
        elif self.kind == "exponential":
            w = np.exp(-self.rate * i)
        elif self.kind == "sinc":
            # Offset by half a sub-slot so the first lobe does not collapse
            # onto the removable singularity; negative lobes are folded up
            # because molecule counts cannot be negative.
            arg = math.pi * (i + 0.5) / subslots
            w = np.abs(np.sin(arg) / arg)
        else:  # cosine
            w = np.cos(math.pi * i / (2.0 * subslots))
        return w


@dataclass(frozen=True)
class PulseShape:
    """Molecule release counts per sub-slot for one transmitted "1"."""

    g: tuple  # length I, non-negative ints
    t_s: float
    subslots: int

    def __post_init__(self):
        if len(self.g) != self.subslots:
            raise ValueError("pulse length does not match sub-slot count")
        if any(v < 0 for v in self.g):
            raise ValueError("molecule counts must be non-negative")

    @property
    def total(self) -> int:
        return int(sum(self.g))

    def as_array(self) -> np.ndarray:
        return np.array(self.g, dtype=float)


def largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integerize ``total * weights / sum(weights)`` preserving the sum exactly."""
    if total == 0:
        return np.zeros(len(weights), dtype=int)
    shares = total * weights / weights.sum()
    counts = np.floor(shares).astype(int)
    short = total - int(counts.sum())
    if short > 0:
        remainders = shares - counts
        # Ties broken by sub-slot order for determinism.
        order = np.lexsort((np.arange(len(weights)), -remainders))
        counts[order[:short]] += 1
    return counts


def make_pulse(family: ShapeFamily, subslots: int, n_total: int, t_s: float) -> PulseShape:
    """Pulse with exactly ``n_total`` molecules apportioned by the family weights."""
    if subslots < 1:
        raise ValueError(f"sub-slot count must be >= 1, got {subslots}")
    if n_total < 0:
        raise ValueError(f"molecule total must be non-negative, got {n_total}")
    counts = largest_remainder(family.weights(subslots), n_total)
    return PulseShape(g=tuple(int(c) for c in counts), t_s=t_s, subslots=subslots)


def scale_to_energy(
    family: ShapeFamily,
    subslots: int,
    t_s: float,
    budget: float,
    energy: "EnergyParams",
) -> PulseShape:
    """Largest pulse of the family whose transmit energy fits the budget.

    Transmit energy grows with the molecule total, so the total is found
    by bisection on N followed by a short local scan that absorbs the
    (rare) non-monotonicity introduced by integer apportionment.
    """
    from .energy import total_energy

    def cost(n: int) -> float:
        return total_energy(make_pulse(family, subslots, n, t_s), energy)

    if budget < cost(1):
        raise InfeasibleBudgetError(
            f"budget {budget:.3e} J is below the cheapest single-molecule pulse ({cost(1):.3e} J)"
        )

    lo, hi = 1, 2
    while cost(hi) <= budget:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cost(mid) <= budget:
            lo = mid
        else:
            hi = mid
    # Apportionment can reshuffle counts between slots, so double-check a
    # small neighborhood for the true boundary.
    best = lo
    for n in range(max(1, lo - 4), lo + 5):
        if cost(n) <= budget and n > best:
            best = n
    return make_pulse(family, subslots, best, t_s)
