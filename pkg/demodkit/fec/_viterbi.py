import numpy as np

from demodkit.modem import check_bits

from ._conv import TrellisSpec


TRACEBACK_DEPTH = 32


def _branch_signs(t: TrellisSpec) -> np.ndarray:
    """`(next_state, predecessor choice, generator)` array of `1 - 2 * coded bit`."""
    inputs = t.state_input[:, None]
    bits = t.output_bits[t.predecessors, inputs]
    return 1.0 - 2.0 * bits


def _trace(decisions, t: TrellisSpec, states, start: int, stop: int) -> np.ndarray:
    """
    Follows survivors from `states` at stage `stop` back to stage `start` and
    returns the `(rows, stop - start)` input bits along the way.
    """
    rows = np.arange(len(states))
    bits = np.empty((len(states), stop - start), dtype=np.uint8)

    for stage in range(stop - 1, start - 1, -1):
        bits[:, stage - start] = t.state_input[states]
        states = t.predecessors[states, decisions[stage, rows, states]]

    return bits


def viterbi_decode(soft, t: TrellisSpec = None, traceback: int = TRACEBACK_DEPTH) -> np.ndarray:
    """
    Maximum-likelihood decoding of a terminated codeword from soft values.

    `soft` holds one value per coded bit with the LLR sign convention (positive
    favors bit 0). The decoder maximizes `sum_j soft_j * (1 - 2 c_j)` over
    codewords `c`. Decisions are committed with a sliding window: whenever
    `2 * traceback` stages are pending, the survivor of the best state is traced
    back and the oldest `traceback` decisions are emitted. At the end of the
    stream the remaining decisions are traced back from the zero state. The
    flush bits are removed from the output.

    A 2-D `soft` array decodes one codeword per row.

    ##### Examples

    ```python
    >>> from demodkit.fec import conv_encode
    >>> bits = np.array([1, 0, 1, 1, 0, 0, 1])
    >>> soft = 5.0 * (1 - 2.0 * conv_encode(bits))
    >>> viterbi_decode(soft).tolist()
    [1, 0, 1, 1, 0, 0, 1]

    ```
    """
    t = t or TrellisSpec()
    soft = np.asarray(soft, dtype=np.float64)
    single = soft.ndim == 1
    soft = np.atleast_2d(soft)

    if traceback < 1:
        raise ValueError(f"Traceback depth must be positive, got {traceback}")

    if soft.shape[1] % t.n_outputs:
        raise ValueError(
            f"Soft input length {soft.shape[1]} is not a multiple of {t.n_outputs} coded bits per stage"
        )

    stages = soft.shape[1] // t.n_outputs

    if stages < t.memory:
        raise ValueError(
            f"A terminated codeword needs at least {t.memory} stages, got {stages}"
        )

    rows = soft.shape[0]
    received = soft.reshape(rows, stages, t.n_outputs)
    signs = _branch_signs(t)

    metrics = np.full((rows, t.n_states), -np.inf)
    metrics[:, 0] = 0.0
    decisions = np.empty((stages, rows, t.n_states), dtype=np.uint8)
    decoded = np.empty((rows, stages), dtype=np.uint8)
    emitted = 0

    for stage in range(stages):
        # (rows, next_state, choice)
        branch = np.einsum("rg,scg->rsc", received[:, stage], signs)
        candidates = metrics[:, t.predecessors] + branch
        choice = np.argmax(candidates, axis=2)
        decisions[stage] = choice
        metrics = np.take_along_axis(candidates, choice[:, :, None], axis=2)[:, :, 0]
        metrics -= metrics.max(axis=1, keepdims=True)

        pending = stage + 1 - emitted

        if pending == 2 * traceback:
            best = np.argmax(metrics, axis=1)
            bits = _trace(decisions, t, best, emitted, stage + 1)
            decoded[:, emitted : emitted + traceback] = bits[:, :traceback]
            emitted += traceback

    final = np.zeros(rows, dtype=np.int64)
    decoded[:, emitted:] = _trace(decisions, t, final, emitted, stages)

    info = decoded[:, : stages - t.memory]
    return info[0] if single else info


def viterbi_decode_hard(hard_bits, t: TrellisSpec = None, traceback: int = TRACEBACK_DEPTH):
    """
    Hard-input decoding: bits become `±1` pseudo-LLRs (bit 0 maps to `+1`).

    ##### Examples

    ```python
    >>> from demodkit.fec import conv_encode
    >>> coded = conv_encode([0, 1, 1, 0, 1])
    >>> coded[3] ^= 1
    >>> viterbi_decode_hard(coded).tolist()
    [0, 1, 1, 0, 1]

    ```
    """
    hard_bits = np.asarray(hard_bits)
    bits = check_bits(hard_bits).reshape(hard_bits.shape)
    return viterbi_decode(1.0 - 2.0 * bits, t, traceback)
