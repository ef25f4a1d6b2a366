# # `demodkit.modem._constellation`

"""
Square Gray-mapped constellations and the bit-to-symbol mapper.
"""

import functools
from typing import Dict

import numpy as np

from demodkit.utils import nice_repr


BITS_PER_SYMBOL: Dict[str, int] = {
    "bpsk": 1,
    "qpsk": 2,
    "qam16": 4,
    "qam64": 6,
    "qam256": 8,
}

DISPLAY_NAMES = {
    "bpsk": "BPSK",
    "qpsk": "QPSK",
    "qam16": "16QAM",
    "qam64": "64QAM",
    "qam256": "256QAM",
}


@nice_repr
class Constellation:
    """
    Symbol table of a modulation.

    * `name`: one of `bpsk`, `qpsk`, `qam16`, `qam64`, `qam256`.
    * `k`: bits per symbol.
    * `points`: `2**k` complex symbols; `points[label]` is the symbol whose
      k-bit Gray label has integer value `label` (first bit most significant).
    * `labels`: `(2**k, k)` array with the bits of each label.
    * `subsets`: `(k, 2, 2**(k-1))` array, `subsets[i, d]` holds the indices of
      the points whose bit `i` equals `d`.

    Instances are immutable; the arrays are flagged read-only.
    """

    def __init__(self, name: str, k: int, points: np.ndarray):
        self.name = name
        self.k = k
        self.points = np.asarray(points, dtype=np.complex128)

        if self.points.shape != (1 << k,):
            raise ValueError(
                f"A constellation with k={k} needs {1 << k} points, got {self.points.shape}"
            )

        self.labels = label_bits(k)
        self.subsets = np.stack(
            [
                np.stack([np.flatnonzero(self.labels[:, i] == d) for d in (0, 1)])
                for i in range(k)
            ]
        )

        for array in (self.points, self.labels, self.subsets):
            array.setflags(write=False)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self.name]

    def __nice_repr_hook__(self, names, values):
        index = names.index("points")
        names.pop(index)
        values.pop(index)


def label_bits(k: int) -> np.ndarray:
    """
    Bits of every integer label `0..2**k - 1`, most significant first.

    ##### Examples

    ```python
    >>> label_bits(2).tolist()
    [[0, 0], [0, 1], [1, 0], [1, 1]]

    ```
    """
    labels = np.arange(1 << k)
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def gray_levels(m: int) -> np.ndarray:
    """
    Unnormalized amplitude of each `m`-bit axis label under the reflected
    Gray code, with label 0 at the largest positive amplitude.

    ##### Examples

    ```python
    >>> gray_levels(1).tolist()
    [1, -1]
    >>> gray_levels(2).tolist()
    [3, 1, -3, -1]

    ```
    """
    n = 1 << m
    positions = np.arange(n)
    gray = positions ^ (positions >> 1)
    amplitudes = (n - 1) - 2 * positions
    levels = np.empty(n, dtype=np.int64)
    levels[gray] = amplitudes
    return levels


@functools.lru_cache()
def build_constellation(name: str) -> Constellation:
    """
    Builds the unit-energy Gray constellation named `name`.

    BPSK maps bit 0 to `+1`. Square QAM maps the first `k/2` bits to the
    in-phase axis and the remaining `k/2` bits to quadrature, each with a
    reflected Gray code over the levels `±1, ±3, ...`, then scales so that the
    average symbol energy is 1.

    ##### Examples

    ```python
    >>> build_constellation("bpsk").points.tolist()
    [(1+0j), (-1+0j)]
    >>> c = build_constellation("qam16")
    >>> c.k, round(float(np.mean(np.abs(c.points) ** 2)), 12)
    (4, 1.0)
    >>> build_constellation("8psk")
    Traceback (most recent call last):
        ...
    ValueError: Unknown modulation '8psk', must be one of: bpsk, qpsk, qam16, qam64, qam256.

    ```
    """
    if name not in BITS_PER_SYMBOL:
        raise ValueError(
            f"Unknown modulation '{name}', must be one of: {', '.join(BITS_PER_SYMBOL)}."
        )

    k = BITS_PER_SYMBOL[name]

    if k == 1:
        return Constellation(name, k, np.array([1.0, -1.0]))

    m = k // 2
    levels = gray_levels(m).astype(np.float64)
    labels = np.arange(1 << k)
    points = levels[labels >> m] + 1j * levels[labels & ((1 << m) - 1)]
    points /= np.sqrt(np.mean(np.abs(points) ** 2))

    return Constellation(name, k, points)


def check_bits(bits) -> np.ndarray:
    """
    Returns `bits` as a flat `uint8` array, rejecting values other than 0 and 1.
    """
    array = np.asarray(bits).ravel()

    if array.size and not np.isin(array, (0, 1)).all():
        raise ValueError("A bit stream may only contain the values 0 and 1.")

    return array.astype(np.uint8)


def modulate(bits, c: Constellation) -> np.ndarray:
    """
    Maps consecutive groups of `c.k` bits to constellation points.

    ##### Examples

    ```python
    >>> modulate([0, 1, 0], build_constellation("bpsk")).real.tolist()
    [1.0, -1.0, 1.0]

    ```
    """
    bits = check_bits(bits).astype(np.int64)

    if len(bits) % c.k:
        raise ValueError(
            f"Cannot modulate {len(bits)} bits with {c.display_name}: "
            f"length must be a multiple of k={c.k}."
        )

    weights = 1 << np.arange(c.k - 1, -1, -1)
    labels = bits.reshape(-1, c.k) @ weights
    return c.points[labels]
