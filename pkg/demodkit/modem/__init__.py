"""
Constellations, bit-to-symbol mapping and hard demodulation.
"""

from ._constellation import (
    BITS_PER_SYMBOL,
    Constellation,
    build_constellation,
    check_bits,
    gray_levels,
    label_bits,
    modulate,
)
from ._demod import (
    hard_demodulate_min_distance,
    hard_decision_from_soft,
    squared_distances,
)

MODULATIONS = list(BITS_PER_SYMBOL)
