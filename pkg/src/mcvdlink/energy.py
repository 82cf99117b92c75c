"""Exocytosis energy model for protein messenger molecules.

Each non-empty sub-slot packs its g(i) molecules into one secretory
vesicle whose radius grows with the cube root of its load, is carried to
the membrane, and released.  Costs are per the exocytosis step budget:
amino-acid chain synthesis, vesicle membrane synthesis (per nm^2 of
surface), phosphorylation-driven transport, and release.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .modulation import PulseShape

ZJ = 1e-21  # zepto-Joule


@dataclass(frozen=True)
class EnergyParams:
    """Energy model constants.

    ``e_sy`` multiplies a vesicle surface area expressed in nm^2, and
    ``r_unit_nm`` is the transmitter radius in nanometers; both units
    follow the source energy-model convention and reproduce femtojoule
    per-bit budgets.
    """

    e_am: float = 202.88 * ZJ  # add one amino acid to a chain
    e_sy: float = 415.0 * ZJ  # membrane synthesis, per nm^2
    e_ph: float = 83.0 * ZJ  # one phosphorylation
    e_e: float = 830.0 * ZJ  # vesicle release
    n_aa: int = 51  # amino acids per messenger protein
    r_mm: float = 2.5e-9  # messenger molecule radius, m
    r_unit_nm: float = 1.0e4  # transmitter radius, nm (10 um)

    def __post_init__(self):
        if min(self.e_am, self.e_sy, self.e_ph, self.e_e, self.r_mm, self.r_unit_nm) <= 0:
            raise ValueError("energy constants must be positive")
        if self.n_aa < 2:
            raise ValueError(f"amino acid count must be >= 2, got {self.n_aa}")


@dataclass(frozen=True)
class EnergyBreakdown:
    synthesis: float
    vesicle: float
    carry: float
    release: float

    @property
    def total(self) -> float:
        return self.synthesis + self.vesicle + self.carry + self.release


def vesicle_radius(g_i: int, r_mm: float) -> float:
    """Radius (m) of the vesicle holding ``g_i`` messenger molecules."""
    if g_i < 1:
        raise ValueError(f"vesicle load must be >= 1, got {g_i}")
    return math.sqrt(3.0) * r_mm * g_i ** (1.0 / 3.0)


def vesicle_capacity(r_v: float, r_mm: float) -> float:
    """Number of molecules a vesicle of radius ``r_v`` holds (inverse of the radius law)."""
    if r_v <= 0 or r_mm <= 0:
        raise ValueError("radii must be positive")
    return (r_v / (r_mm * math.sqrt(3.0))) ** 3


def subslot_energy(g_i: int, params: EnergyParams) -> EnergyBreakdown:
    """Energy to synthesize, pack, carry and release one sub-slot's molecules.

    An empty sub-slot produces no vesicle and costs nothing.
    """
    if g_i < 0:
        raise ValueError(f"molecule count must be non-negative, got {g_i}")
    if g_i == 0:
        return EnergyBreakdown(0.0, 0.0, 0.0, 0.0)
    synthesis = params.e_am * (params.n_aa - 1) * g_i
    r_v_nm = vesicle_radius(g_i, params.r_mm) * 1e9
    vesicle = params.e_sy * 4.0 * math.pi * r_v_nm**2
    carry = params.e_ph * math.ceil((params.r_unit_nm / 2.0) / 8.0)
    return EnergyBreakdown(synthesis, vesicle, carry, params.e_e)


def total_energy(pulse: PulseShape, params: EnergyParams) -> float:
    """Total energy (J) to transmit one bit "1" with the given pulse."""
    return sum(subslot_energy(g, params).total for g in pulse.g)
