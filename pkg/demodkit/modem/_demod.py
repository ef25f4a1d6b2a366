import numpy as np

from ._constellation import Constellation


# Symbols processed per block when building the distance matrix.
BLOCK_SYMBOLS = 4096


def squared_distances(rx, c: Constellation) -> np.ndarray:
    """`(n, 2**k)` matrix of `|rx[n] - c.points[m]|**2`."""
    rx = np.asarray(rx, dtype=np.complex128).ravel()
    diff = rx[:, None] - c.points[None, :]
    return diff.real ** 2 + diff.imag ** 2


def hard_demodulate_min_distance(rx, c: Constellation) -> np.ndarray:
    """
    Bit labels of the Euclidean-nearest constellation points.

    Ties go to the lowest point index.

    ##### Examples

    ```python
    >>> from demodkit.modem import build_constellation
    >>> hard_demodulate_min_distance([0.1 + 0j], build_constellation("bpsk")).tolist()
    [0]

    ```
    """
    rx = np.asarray(rx, dtype=np.complex128).ravel()
    nearest = np.empty(len(rx), dtype=np.int64)

    for start in range(0, len(rx), BLOCK_SYMBOLS):
        block = rx[start : start + BLOCK_SYMBOLS]
        nearest[start : start + len(block)] = np.argmin(
            squared_distances(block, c), axis=1
        )

    return c.labels[nearest].ravel()


def hard_decision_from_soft(soft) -> np.ndarray:
    """
    Bit decisions from LLR-like soft values: 0 when positive, 1 otherwise.

    ##### Examples

    ```python
    >>> hard_decision_from_soft([2.3, -0.1, 0.0]).tolist()
    [0, 1, 1]

    ```
    """
    return (np.asarray(soft).ravel() <= 0).astype(np.uint8)
