"""
demodkit is a link-level simulation toolkit for comparing classical soft
demodulation (exact and max-log LLRs) with DemodNet, a small fully
convolutional network trained on hard bits whose outputs are used as log
probability ratios by a soft Viterbi decoder.
"""

# This is the top level module for demodkit, it's what you get when you `import demodkit`.
# Python won't import submodules by itself, so every subpackage is imported here.

# The [`sampling`](ref:demodkit.sampling.__init__) submodule holds the seeded random
# sources every stochastic stage draws from.
from demodkit import sampling

# The physical layer: Gray-mapped constellations, channel impairments,
# classical LLR computation and the LMS equalizer for fading links.
from demodkit import modem
from demodkit import channel
from demodkit import llr
from demodkit import equalizer

# The [`nn`](ref:demodkit.nn.__init__) submodule is a small numpy network library
# (convolutions, batch norm, losses, Adam) on which [`demodnet`](ref:demodkit.demodnet.__init__)
# builds, trains and persists the learned demodulator.
from demodkit import nn
from demodkit import demodnet

# Convolutional coding, Viterbi decoding and theoretical BER curves.
from demodkit import fec

# The [`harness`](ref:demodkit.harness.__init__) submodule runs BER sweeps and
# reproduces the published figures.
from demodkit import harness

# These modules contain additional utilities.
from demodkit import monitor
from demodkit import utils
from demodkit import logging

# Before leaving, let's setup logging (`DEMODKIT_LOG_LEVEL`, or warnings only).
logging.setup()
