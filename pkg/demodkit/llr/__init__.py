"""
Exact and max-log log-likelihood ratios computed under the AWGN assumption.
"""

from ._exact import (
    LLR_MODES,
    exact_llr,
    exact_llr_op_counts,
    llr_sequence,
    maxlog_llr,
)
