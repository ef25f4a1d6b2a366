import numpy as np
from scipy.special import erfc

from demodkit.modem import BITS_PER_SYMBOL


def theoretical_ber(modulation: str, ebn0_db) -> np.ndarray:
    """
    Uncoded bit error probability of Gray-mapped BPSK, QPSK or square QAM over
    AWGN, using the exact per-bit-position expression for square QAM.

    ##### Examples

    ```python
    >>> round(float(theoretical_ber("bpsk", 0)), 5)
    0.07865
    >>> round(float(theoretical_ber("bpsk", 6)), 5)
    0.00239
    >>> bool(np.isclose(theoretical_ber("qpsk", 4), theoretical_ber("bpsk", 4)))
    True
    >>> theoretical_ber("8psk", 0)
    Traceback (most recent call last):
        ...
    ValueError: Unknown modulation '8psk', must be one of: bpsk, qpsk, qam16, qam64, qam256.

    ```
    """
    if modulation not in BITS_PER_SYMBOL:
        raise ValueError(
            f"Unknown modulation '{modulation}', must be one of: {', '.join(BITS_PER_SYMBOL)}."
        )

    ebn0 = 10 ** (np.asarray(ebn0_db, dtype=np.float64) / 10)
    k = BITS_PER_SYMBOL[modulation]

    if k == 1:
        return 0.5 * erfc(np.sqrt(ebn0))

    order = 1 << k
    side = 1 << (k // 2)
    argument = np.sqrt(3 * k * ebn0 / (2 * (order - 1)))
    total = np.zeros_like(ebn0)

    for position in range(1, k // 2 + 1):
        weight = 1 << (position - 1)
        terms = int((1 - 2.0 ** -position) * side)

        for i in range(terms):
            sign = -1 if (i * weight // side) % 2 else 1
            multiplicity = weight - (2 * i * weight + side) // (2 * side)
            total = total + sign * multiplicity * erfc((2 * i + 1) * argument) / side

    return total / (k // 2)


def theory_curve(modulation: str, grid) -> "list":
    """`(ebn0_db, ber)` pairs of `theoretical_ber` over `grid`."""
    return [(float(x), float(theoretical_ber(modulation, x))) for x in grid]

