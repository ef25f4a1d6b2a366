"""
Convolutional coding: the rate 1/2, constraint length 7 (171, 133) encoder,
soft and hard Viterbi decoding, and theoretical uncoded error rates.
"""

from ._conv import TrellisSpec, conv_encode
from ._viterbi import TRACEBACK_DEPTH, viterbi_decode, viterbi_decode_hard
from ._theory import theoretical_ber, theory_curve
