"""Shared builders for the test suite."""

import numpy as np
import pytest

from mcvdlink import (
    ChannelParams,
    Priors,
    Scenario,
    ShapeFamily,
    SphereReceiver,
    Vec3,
)

UM = 1e-6
MS = 1e-3
FJ = 1e-15


def standard_channel(
    distance_um=100.0,
    offset_frac=(0.12, 0.14),
    drift_um_s=(100.0, 40.0, 40.0),
    radius_um=50.0,
    diffusion=4e-9,
) -> ChannelParams:
    """One hop with the receiver offset diagonally from the release point."""
    d = distance_um
    center = Vec3(d * UM, d * offset_frac[0] * UM, d * offset_frac[1] * UM)
    return ChannelParams(
        diffusion=diffusion,
        drift=Vec3(*(c * UM for c in drift_um_s)),
        receiver=SphereReceiver(center, radius_um * UM),
    )


def standard_scenario(
    distance_um=100.0,
    drift_um_s=(100.0, 40.0, 40.0),
    family="exponential",
    n_total=None,
    energy_budget_fj=1000.0,
    noise_variance=100.0,
    isi_length=10,
    relay_center_um=None,
) -> Scenario:
    """Relay link with the destination at twice the relay displacement."""
    if relay_center_um is None:
        d = distance_um
        relay_center_um = (d, 0.12 * d, 0.14 * d)
    rc = Vec3(*(c * UM for c in relay_center_um))
    kwargs = (
        {"n_total": n_total}
        if n_total is not None
        else {"energy_budget": energy_budget_fj * FJ}
    )
    from mcvdlink import NoiseParams

    noise = NoiseParams(mean=100.0, variance=noise_variance)
    return Scenario(
        drift=Vec3(*(c * UM for c in drift_um_s)),
        relay=SphereReceiver(rc, 50.0 * UM),
        destination=SphereReceiver(rc.scaled(2.0), 50.0 * UM),
        pulse_family=ShapeFamily(family),
        isi_length=isi_length,
        noise_sr=noise,
        noise_rd=noise,
        priors=Priors(0.5),
        **kwargs,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
