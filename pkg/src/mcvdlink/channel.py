"""Analytic arrival probabilities for 3-D diffusion with drift.

A point source at the origin releases molecules that undergo Brownian
motion biased by a constant 3-D drift.  The receiver is a passive sphere
that counts molecules inside its volume without absorbing them.  This
module evaluates the Gaussian occupancy density and the closed-form
approximation of the probability that a molecule sits inside the sphere
at time t, plus the per-slot arrival tables the detection statistics are
built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

# Probabilities below this are flushed to zero so downstream products
# cannot underflow to subnormals.
_FLUSH = 1e-300


@dataclass(frozen=True)
class Vec3:
    """A point or velocity in 3-D Cartesian coordinates (SI units)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError("Vec3 components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, factor: float) -> "Vec3":
        return Vec3(self.x * factor, self.y * factor, self.z * factor)


@dataclass(frozen=True)
class SphereReceiver:
    """Passive spherical receiver, center relative to the releasing node."""

    center: Vec3
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError(f"receiver radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class ChannelParams:
    """One hop of the diffusion channel: medium plus receiver geometry."""

    diffusion: float  # m^2/s
    drift: Vec3  # m/s
    receiver: SphereReceiver

    def __post_init__(self):
        if self.diffusion <= 0:
            raise ValueError(f"diffusion coefficient must be positive, got {self.diffusion}")


@dataclass(frozen=True)
class ArrivalTable:
    """Per-(slot, sub-slot) arrival probabilities.

    ``p[j, i]`` is the probability that a molecule released at sub-slot i
    has arrived by the end of slot j+1 (row 0 is the current slot).
    ``q[j, i]`` is the incremental probability of arriving during the
    (j+1)-th slot after release, clamped at zero.  ``clamp_count`` records
    how many raw increments were negative before clamping.
    """

    p: np.ndarray  # shape (J+1, I)
    q: np.ndarray  # shape (J, I)
    clamp_count: int

    @property
    def subslots(self) -> int:
        return self.p.shape[1]

    @property
    def isi_length(self) -> int:
        return self.q.shape[0]

    @property
    def p_current(self) -> np.ndarray:
        """Arrival probabilities for the current slot (j = 1)."""
        return self.p[0]


def pdf_at_point(params: ChannelParams, point: Vec3, t: float) -> float:
    """Occupancy density (1/m^3) at ``point`` (absolute coordinates) at time t."""
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    d, v = params.diffusion, params.drift
    norm = (4.0 * math.pi * d * t) ** -1.5
    # Molecule position is Gaussian around the drift displacement V*t;
    # ``point`` is in absolute coordinates (origin at the releasing node).
    dx = point.x - v.x * t
    dy = point.y - v.y * t
    dz = point.z - v.z * t
    return norm * math.exp(-(dx * dx + dy * dy + dz * dz) / (4.0 * d * t))


def _slab_sum(params: ChannelParams, t: np.ndarray) -> np.ndarray:
    """Weighted sum of the y-slab terms of the closed-form arrival probability."""
    d = params.diffusion
    v = params.drift
    c = params.receiver.center
    r = params.receiver.radius
    four_dt = 4.0 * d * t
    denom = 2.0 * np.sqrt(d * t)

    def slab(offset_frac: float) -> np.ndarray:
        y_off = offset_frac * r
        gauss = np.exp(np.maximum(-((y_off + c.y - v.y * t) ** 2) / four_dt, -745.0))
        if offset_frac != 0.0:
            # Off-center slabs come in +/- pairs; the center one is single.
            gauss = gauss + np.exp(
                np.maximum(-((-y_off + c.y - v.y * t) ** 2) / four_dt, -745.0)
            )
        half_width = math.sqrt(max(1.0 - offset_frac**2, 0.0)) * r
        bracket = erf((half_width - v.x * t + c.x) / denom) - erf(
            (-half_width - v.x * t + c.x) / denom
        )
        return gauss * bracket

    alpha = sum(slab((2 * k + 1) / 8.0) for k in range(4))
    beta = sum(slab(k / 4.0) for k in (1, 2, 3))
    phi = slab(0.0)
    return 4.0 * alpha + 2.0 * beta + 2.0 * phi


def _raw_many(params: ChannelParams, t: np.ndarray) -> np.ndarray:
    """Unclamped closed-form arrival probabilities at an array of times."""
    d = params.diffusion
    v = params.drift
    c = params.receiver.center
    r = params.receiver.radius
    pre = (r * r) / (144.0 * math.pi * d * t)
    z_arg = -((c.z - v.z * t) ** 2) / (4.0 * d * t)
    out = pre * np.exp(np.maximum(z_arg, -745.0)) * _slab_sum(params, t)
    return np.where(z_arg < -700.0, 0.0, out)


def presence_probability_raw(params: ChannelParams, t: float) -> float:
    """Closed-form arrival probability before clamping to [0, 1].

    The slab decomposition is an approximation and can leave [0, 1];
    callers needing a probability should use :func:`presence_probability`.
    """
    if t <= 0:
        raise ValueError(f"time must be positive, got {t}")
    return float(_raw_many(params, np.asarray([t], dtype=float))[0])


def _clamp_many(raw: np.ndarray) -> np.ndarray:
    value = np.clip(raw, 0.0, 1.0)
    value[value < _FLUSH] = 0.0
    return value


def presence_probability(params: ChannelParams, t: float) -> float:
    """Probability that a molecule released at t=0 occupies the sphere at time t."""
    raw = presence_probability_raw(params, t)
    return float(_clamp_many(np.asarray([raw]))[0])


def second_hop_params(
    relay_center: Vec3,
    dest_center: Vec3,
    dest_radius: float,
    diffusion: float,
    drift: Vec3,
) -> ChannelParams:
    """Channel parameters for the relay-to-destination hop.

    The relay releases its own molecule species, so the hop reuses the
    same arrival formula with the receiver center shifted to the
    destination's position relative to the relay.
    """
    shifted = dest_center - relay_center
    return ChannelParams(
        diffusion=diffusion,
        drift=drift,
        receiver=SphereReceiver(center=shifted, radius=dest_radius),
    )


def arrival_table(params: ChannelParams, t_s: float, subslots: int, isi_length: int) -> ArrivalTable:
    """Arrival probability matrices over slots 1..J+1 and sub-slots 0..I-1.

    Sub-slot i releases at i*t_s/I into its slot, so the elapsed time at
    the end of slot j is t_{j,i} = j*t_s - i*t_s/I.
    """
    if t_s <= 0:
        raise ValueError(f"slot duration must be positive, got {t_s}")
    if subslots < 1:
        raise ValueError(f"sub-slot count must be >= 1, got {subslots}")
    if not 0 <= isi_length <= 30:
        raise ValueError(f"ISI length must be in [0, 30], got {isi_length}")

    j = np.arange(1, isi_length + 2, dtype=float)[:, None]
    i = np.arange(subslots, dtype=float)[None, :]
    times = (j * t_s - i * t_s / subslots).ravel()
    p = _clamp_many(_raw_many(params, times)).reshape(isi_length + 1, subslots)

    raw_q = p[1:] - p[:-1]
    clamp_count = int(np.count_nonzero(raw_q < 0.0))
    q = np.maximum(raw_q, 0.0)
    q[q < _FLUSH] = 0.0
    return ArrivalTable(p=p, q=q, clamp_count=clamp_count)
