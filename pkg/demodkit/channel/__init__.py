"""
Channel impairments: AWGN, generalized Gaussian noise, carrier frequency
offset and flat Rayleigh fading.
"""

from ._noise import (
    NoiseSpec,
    add_aggn,
    add_awgn,
    aggn_variance,
    sample_aggn,
    scaled_aggn,
    sigma2_from_ebn0,
)
from ._impairments import (
    FadingSpec,
    apply_frequency_offset,
    rayleigh_flat_fade,
    rayleigh_gains,
)
from ._scenario import Scenario
