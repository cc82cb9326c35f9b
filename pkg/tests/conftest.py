import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from thzlink.absorption import ConstantAbsorption
from thzlink.channel import AlphaMuParams, Environment, LinkParams, derive_misalignment


def geometry_for_xi(aperture_m: float, beam_radius_m: float, xi: float):
    """Misalignment geometry with the jitter chosen to hit a target xi."""
    probe = derive_misalignment(aperture_m, beam_radius_m, 1.0)
    sigma = math.sqrt(probe.w_eq**2 / (4.0 * xi))
    return derive_misalignment(aperture_m, beam_radius_m, sigma)


def link_with_delta(delta: float, kappa: float = 0.0) -> LinkParams:
    """Link whose deterministic SNR gain (with the given constant kappa)
    equals delta exactly."""
    base = LinkParams(freq_hz=300e9, distance_m=40.0, gain_tx=10**5.5,
                      gain_rx=10**5.5, snr0=1.0)
    from thzlink.channel import absorption_gain, free_space_gain

    h_l = free_space_gain(base) * absorption_gain(kappa, base.distance_m)
    return LinkParams(freq_hz=base.freq_hz, distance_m=base.distance_m,
                      gain_tx=base.gain_tx, gain_rx=base.gain_rx,
                      snr0=delta / (h_l * h_l))


@pytest.fixture
def default_env():
    return Environment()


@pytest.fixture
def vacuum():
    return ConstantAbsorption(0.0)


@pytest.fixture
def default_link():
    # 300 GHz, 40 m, 55 dBi antennas, P/No = 25 dB
    return LinkParams(freq_hz=300e9, distance_m=40.0, gain_tx=10**5.5,
                      gain_rx=10**5.5, snr0=10**2.5)


@pytest.fixture
def default_fading():
    return AlphaMuParams(alpha=2.0, mu=4.0)
