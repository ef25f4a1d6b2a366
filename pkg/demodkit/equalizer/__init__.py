"""
Least-mean-squares adaptive equalization driven by a known training prefix.
"""

from ._lms import (
    LmsEqualizer,
    lms_equalize,
    training_sequence,
    TRAINING_SYMBOLS,
)
