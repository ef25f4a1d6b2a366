# # `demodkit.llr._exact`

"""
Soft demodulation under the AWGN assumption.

For a received symbol `r`, bit position `i` and total complex noise variance
`sigma2`, the log-likelihood ratio is

    llr_i = log sum_{s in S_i^0} exp(-|r - s|**2 / sigma2)
          - log sum_{s in S_i^1} exp(-|r - s|**2 / sigma2)

Positive values favor bit 0. Both log-sums are evaluated with
`scipy.special.logsumexp`, so the result stays finite at high SNR. The
max-log variant keeps only the nearest point of each subset.
"""

from typing import Dict

import numpy as np
from scipy.special import logsumexp

from demodkit.modem import Constellation, squared_distances


# Symbols processed per block; bounds the `(block, 2**k)` distance matrix.
BLOCK_SYMBOLS = 8192

LLR_MODES = ("exact", "maxlog")


def _check_sigma2(sigma2: float):
    if not sigma2 > 0:
        raise ValueError(f"Noise variance must be positive, got sigma2={sigma2}")


def _block_llr(rx, c: Constellation, sigma2: float, mode: str) -> np.ndarray:
    metrics = -squared_distances(rx, c) / sigma2
    # (n, k, 2, 2**(k-1)) metrics grouped by bit position and bit value
    grouped = metrics[:, c.subsets]

    if mode == "exact":
        totals = logsumexp(grouped, axis=-1)
    else:
        totals = grouped.max(axis=-1)

    return totals[:, :, 0] - totals[:, :, 1]


def llr_sequence(rx, c: Constellation, sigma2: float, mode: str = "exact") -> np.ndarray:
    """
    LLRs of every bit carried by `rx`, in transmit order (`k * len(rx)` values).

    ##### Examples

    ```python
    >>> from demodkit.modem import build_constellation
    >>> llr_sequence([0.5, -0.25], build_constellation("bpsk"), 1.0).tolist()
    [2.0, -1.0]
    >>> llr_sequence([0.5], build_constellation("bpsk"), 0.0)
    Traceback (most recent call last):
        ...
    ValueError: Noise variance must be positive, got sigma2=0.0

    ```
    """
    _check_sigma2(sigma2)

    if mode not in LLR_MODES:
        raise ValueError(f"Unknown LLR mode '{mode}', must be one of: {', '.join(LLR_MODES)}.")

    rx = np.asarray(rx, dtype=np.complex128).ravel()
    result = np.empty((len(rx), c.k), dtype=np.float64)

    for start in range(0, len(rx), BLOCK_SYMBOLS):
        block = rx[start : start + BLOCK_SYMBOLS]
        result[start : start + len(block)] = _block_llr(block, c, sigma2, mode)

    return result.ravel()


def exact_llr(r: complex, c: Constellation, sigma2: float) -> np.ndarray:
    """
    The `k` exact LLRs of a single received symbol.

    ##### Examples

    ```python
    >>> from demodkit.modem import build_constellation
    >>> exact_llr(0.5 + 0j, build_constellation("bpsk"), 1.0).tolist()
    [2.0]
    >>> exact_llr(0.3j, build_constellation("bpsk"), 1.0).tolist()
    [0.0]

    ```
    """
    return llr_sequence([r], c, sigma2, "exact")


def maxlog_llr(r: complex, c: Constellation, sigma2: float) -> np.ndarray:
    """The `k` max-log LLRs of a single received symbol."""
    return llr_sequence([r], c, sigma2, "maxlog")


def exact_llr_op_counts(c: Constellation) -> Dict[str, int]:
    """
    Arithmetic operations per symbol spent by the exact LLR demodulator.

    Each of the `M = 2**k` squared distances costs 3 multiplications and
    3 additions (two differences and one sum), and its scaled exponent costs
    one exponential. Each bit then adds `M/2 - 1` terms to both partial sums,
    divides them (one multiplication) and takes one logarithm.

    ##### Examples

    ```python
    >>> from demodkit.modem import build_constellation
    >>> exact_llr_op_counts(build_constellation("qam64"))
    {'mult': 198, 'add': 564, 'exp_log': 70}

    ```
    """
    m, k = c.size, c.k
    return {
        "mult": 3 * m + k,
        "add": 3 * m + 2 * k * (m // 2 - 1),
        "exp_log": m + k,
    }
