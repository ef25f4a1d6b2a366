import numpy as np

from demodkit.sampling import Rng, as_rng
from demodkit.utils import nice_repr


# Samples generated per block in the sum-of-sinusoids generator.
BLOCK_SAMPLES = 1 << 16


def apply_frequency_offset(tx, delta_f: float) -> np.ndarray:
    """
    Rotates the sequence by `exp(j 2π delta_f n)`, `n` counted from 0 along the
    last axis, with `delta_f` normalized to the symbol rate.

    ##### Examples

    ```python
    >>> out = apply_frequency_offset([1, 1, 1, 1], 0.25)
    >>> bool(np.allclose(out, [1, 1j, -1, -1j], atol=1e-12))
    True

    ```
    """
    tx = np.asarray(tx, dtype=np.complex128)
    n = np.arange(tx.shape[-1])
    return tx * np.exp(2j * np.pi * delta_f * n)


@nice_repr
class FadingSpec:
    """
    Flat Rayleigh fading parameters: maximum Doppler shift and symbol rate in Hz,
    and number of oscillators of the sum-of-sinusoids generator.
    """

    def __init__(
        self, max_doppler_hz: float = 30.0, symbol_rate_hz: float = 1e6, n_oscillators: int = 32
    ):
        if max_doppler_hz < 0:
            raise ValueError(f"Maximum Doppler must be non-negative, got {max_doppler_hz}")

        if symbol_rate_hz <= 0:
            raise ValueError(f"Symbol rate must be positive, got {symbol_rate_hz}")

        if n_oscillators < 8:
            raise ValueError(f"At least 8 oscillators are required, got {n_oscillators}")

        if max_doppler_hz / symbol_rate_hz >= 0.5:
            raise ValueError(
                f"Normalized Doppler {max_doppler_hz / symbol_rate_hz} must be below 0.5"
            )

        self.max_doppler_hz = max_doppler_hz
        self.symbol_rate_hz = symbol_rate_hz
        self.n_oscillators = n_oscillators

    @property
    def normalized_doppler(self) -> float:
        return self.max_doppler_hz / self.symbol_rate_hz


def rayleigh_gains(n: int, spec: FadingSpec, rng: Rng = None) -> np.ndarray:
    """
    One realization of a Clarke fading process over `n` symbols.

    Each oscillator has a uniform arrival angle (Doppler `fd cos(angle)`) and a
    circular Gaussian weight of variance `1 / n_oscillators`, so every sample is
    exactly `CN(0, 1)` and `E[|h|**2] = 1`.
    """
    rng = as_rng(rng)
    m = spec.n_oscillators
    angles = rng.uniform(m, 0, 2 * np.pi)
    weights = (rng.normal(m) + 1j * rng.normal(m)) / np.sqrt(2 * m)
    frequencies = spec.normalized_doppler * np.cos(angles)

    gains = np.empty(n, dtype=np.complex128)

    for start in range(0, n, BLOCK_SAMPLES):
        t = np.arange(start, min(n, start + BLOCK_SAMPLES))
        gains[start : start + len(t)] = np.exp(
            2j * np.pi * np.outer(t, frequencies)
        ) @ weights

    return gains


def rayleigh_flat_fade(tx, spec: FadingSpec, rng: Rng = None):
    """
    Multiplies the sequence by a Rayleigh fading process.

    Returns `(faded, gains)`; the gains are only meant for diagnostics.
    """
    tx = np.asarray(tx, dtype=np.complex128)
    gains = rayleigh_gains(len(tx), spec, rng)
    return tx * gains, gains
