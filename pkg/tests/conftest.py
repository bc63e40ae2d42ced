"""Shared fixtures: the canonical corner-station hall and band profiles."""

import pytest

from irlspos import LinkState, emulate_measurement_set
from irlspos.presets import cband_profile, corner_stations

AOI_W = 29.0
AOI_H = 25.0


@pytest.fixture
def stations():
    return list(corner_stations())


@pytest.fixture
def band():
    return cband_profile()


def exact_measurements(ue, stations, band, biases=None, schedule_period_s=0.0):
    """Noise-free measurement set; ``biases`` maps station id -> excess meters."""
    biases = biases or {}
    links = [
        LinkState(s.id, is_los=(biases.get(s.id, 0.0) == 0.0), nlos_bias_m=biases.get(s.id, 0.0))
        for s in stations
    ]
    return emulate_measurement_set(
        ue,
        stations,
        links,
        band,
        rng_seed=0,
        schedule_period_s=schedule_period_s,
        noise_std_m=0.0,
    )
