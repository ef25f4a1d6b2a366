import functools

import numpy as np

from demodkit.sampling import Rng


TRAINING_SYMBOLS = 500
TRAINING_SEED = 0x5EED


@functools.lru_cache()
def training_sequence(length: int = TRAINING_SYMBOLS, seed: int = TRAINING_SEED):
    """
    The fixed QPSK training prefix shared by transmitter and receiver.

    ##### Examples

    ```python
    >>> seq = training_sequence()
    >>> len(seq), bool(np.allclose(np.abs(seq), 1))
    (500, True)

    ```
    """
    rng = Rng(seed)
    symbols = (rng.signs(length) + 1j * rng.signs(length)) / np.sqrt(2)
    symbols.setflags(write=False)
    return symbols


class LmsEqualizer:
    """
    Complex LMS linear equalizer with `n_taps` taps.

    Taps start as a center spike and adapt only over the training prefix with
    step size `step_fraction * 2 / (n_taps * P)`, where `P` is the measured mean
    power of the received prefix. After `train` the taps are frozen.

    The output at index `n` is `sum_i taps[i] * rx[n + center - i]`, so the
    center tap carries no delay.
    """

    def __init__(self, n_taps: int = 5, step_fraction: float = 0.1):
        if n_taps < 1:
            raise ValueError(f"The equalizer needs at least one tap, got {n_taps}")

        if not step_fraction > 0:
            raise ValueError(f"Step fraction must be positive, got {step_fraction}")

        self.n_taps = n_taps
        self.step_fraction = step_fraction
        self.center = n_taps // 2
        self.taps = np.zeros(n_taps, dtype=np.complex128)
        self.taps[self.center] = 1.0
        self.step_size = None
        self.training_errors = None
        self._frozen_taps = None

    @property
    def frozen(self) -> bool:
        return self._frozen_taps is not None

    def train(self, rx, training_symbols) -> "LmsEqualizer":
        """
        Adapts the taps over the first `len(training_symbols)` samples of `rx`
        and freezes them. Samples of `rx` past the prefix are only read as
        look-ahead for the last regressors.
        """
        rx = np.asarray(rx, dtype=np.complex128)
        training_symbols = np.asarray(training_symbols, dtype=np.complex128)
        n_train = len(training_symbols)

        if len(rx) < n_train:
            raise ValueError(
                f"Received burst has {len(rx)} samples, shorter than the {n_train}-symbol training prefix"
            )

        if self.frozen:
            raise TypeError("This equalizer is already trained; its taps are frozen.")

        power = float(np.mean(np.abs(rx[:n_train]) ** 2))
        self.step_size = self.step_fraction * 2 / (self.n_taps * max(power, 1e-12))

        padded = np.concatenate(
            [np.zeros(self.n_taps, dtype=np.complex128), rx, np.zeros(self.n_taps, dtype=np.complex128)]
        )
        offsets = self.n_taps + self.center - np.arange(self.n_taps)
        errors = np.empty(n_train)
        taps = self.taps

        for n in range(n_train):
            regressor = padded[offsets + n]
            error = training_symbols[n] - taps @ regressor
            taps = taps + self.step_size * error * np.conj(regressor)
            errors[n] = abs(error) ** 2

        self.taps = taps
        self.training_errors = errors
        self._frozen_taps = taps.copy()
        return self

    def apply(self, rx) -> np.ndarray:
        """Filters `rx` with the frozen taps; output has the same length."""
        if not self.frozen:
            raise TypeError("The equalizer must be trained before it can be applied.")

        assert np.array_equal(self.taps, self._frozen_taps), "Taps changed after training"

        rx = np.asarray(rx, dtype=np.complex128)
        return np.convolve(rx, self.taps)[self.center : self.center + len(rx)]

    def equalize(self, rx, training_symbols) -> np.ndarray:
        """Trains on the prefix of `rx` and returns the equalized payload."""
        self.train(rx, training_symbols)
        return self.apply(rx)[len(training_symbols) :]


def lms_equalize(rx, training_symbols=None, n_taps: int = 5, step_fraction: float = 0.1):
    """
    Equalizes a burst that starts with the channel image of `training_symbols`
    (the standard 500-symbol prefix when omitted) and returns the payload with
    the prefix stripped.
    """
    if training_symbols is None:
        training_symbols = training_sequence()

    return LmsEqualizer(n_taps, step_fraction).equalize(rx, training_symbols)
