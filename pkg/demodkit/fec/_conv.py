# # `demodkit.fec._conv`

"""
Feed-forward convolutional codes of rate `1/n`.

The encoder register holds the `constraint_length - 1` previous input bits,
most recent bit most significant. On input `u` in state `s` the full register
is `reg = (u << (K - 1)) | s`, output bit `g` is the parity of
`reg & generators[g]` and the next state is `reg >> 1`.
"""

from typing import Tuple

import numpy as np

from demodkit.modem import check_bits
from demodkit.utils import nice_repr


@nice_repr
class TrellisSpec:
    """
    Trellis of a feed-forward convolutional code, by default the rate 1/2,
    constraint length 7 code with octal generators 171 and 133.

    ##### Examples

    ```python
    >>> t = TrellisSpec()
    >>> t.n_states, t.rate, t.memory
    (64, 0.5, 6)
    >>> t.output_bits[0].tolist()
    [[0, 0], [1, 1]]

    ```
    """

    def __init__(self, constraint_length: int = 7, generators_octal: Tuple[int, ...] = (171, 133)):
        if constraint_length < 2:
            raise ValueError(f"Constraint length must be at least 2, got {constraint_length}")

        generators = tuple(int(str(g), 8) for g in generators_octal)

        if not generators or any(g <= 0 or g >= (1 << constraint_length) for g in generators):
            raise ValueError(
                f"Generators {generators_octal} do not fit a constraint length of {constraint_length}"
            )

        self.constraint_length = constraint_length
        self.generators_octal = tuple(generators_octal)
        self.generators = generators
        self.memory = constraint_length - 1
        self.n_states = 1 << self.memory
        self.n_outputs = len(generators)
        self.rate = 1 / self.n_outputs

        states = np.arange(self.n_states)
        registers = (np.arange(2)[None, :] << self.memory) | states[:, None]
        # (state, input) -> next state
        self.next_state = registers >> 1
        # (state, input, generator) -> coded bit
        self.output_bits = np.stack(
            [_parity(registers & g) for g in generators], axis=-1
        ).astype(np.uint8)
        # every next state has two predecessors, differing in their oldest bit
        half = self.n_states >> 1
        self.predecessors = ((states[:, None] & (half - 1)) << 1) | np.arange(2)[None, :]
        self.state_input = states >> (self.memory - 1)

        for array in (self.next_state, self.output_bits, self.predecessors, self.state_input):
            array.setflags(write=False)

    def taps(self) -> np.ndarray:
        """`(n_outputs, constraint_length)` tap bits; tap `j` weights the input delayed by `j`."""
        delays = np.arange(self.constraint_length)
        return np.array(
            [(g >> (self.memory - delays)) & 1 for g in self.generators], dtype=np.int64
        )


def _parity(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.int64)
    result = np.zeros_like(x)

    while x.any():
        result ^= x & 1
        x >>= 1

    return result


def conv_encode(info, t: TrellisSpec = None) -> np.ndarray:
    """
    Encodes `info` from the zero state and terminates the trellis with
    `t.memory` zero flush bits. The output has `n_outputs * (len(info) + memory)`
    bits, the outputs of each stage adjacent.

    ##### Examples

    ```python
    >>> conv_encode([1]).tolist()
    [1, 1, 1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 1]

    ```
    """
    t = t or TrellisSpec()
    info = check_bits(info).astype(np.int64)
    stream = np.concatenate([info, np.zeros(t.memory, dtype=np.int64)])

    coded = np.stack(
        [np.convolve(stream, taps)[: len(stream)] & 1 for taps in t.taps()], axis=-1
    )
    return coded.ravel().astype(np.uint8)
