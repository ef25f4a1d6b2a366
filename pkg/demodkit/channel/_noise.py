import math

import numpy as np
from scipy.special import gamma as gamma_fn

from demodkit.sampling import Rng, as_rng
from demodkit.utils import nice_repr


def sigma2_from_ebn0(ebn0_db: float, k: int, code_rate: float = 1.0) -> float:
    """
    Total complex noise variance `N0` for unit-energy symbols carrying `k` coded
    bits at code rate `code_rate`.

    ##### Examples

    ```python
    >>> sigma2_from_ebn0(0, 1)
    1.0
    >>> sigma2_from_ebn0(0, 2, 0.5)
    1.0
    >>> round(sigma2_from_ebn0(3.0103, 1), 6)
    0.5

    ```
    """
    if k < 1:
        raise ValueError(f"Bits per symbol must be at least 1, got k={k}")

    if not 0 < code_rate <= 1:
        raise ValueError(f"Code rate must lie in (0, 1], got {code_rate}")

    return 1.0 / (k * code_rate * 10 ** (ebn0_db / 10))


@nice_repr
class NoiseSpec:
    """
    Additive noise model.

    * `kind="awgn"`: circular complex Gaussian noise with total variance `sigma2`.
    * `kind="aggn"`: generalized Gaussian noise with mean `mu`, scale `gamma`
      and shape `rho`, drawn independently on I and Q.
    """

    def __init__(
        self, kind: str = "awgn", sigma2: float = 1.0, mu=0.0, gamma=1.0, rho=2.0
    ):
        if kind not in ("awgn", "aggn"):
            raise ValueError(f"Unknown noise kind '{kind}', must be 'awgn' or 'aggn'.")

        if sigma2 <= 0:
            raise ValueError(f"Noise variance must be positive, got sigma2={sigma2}")

        if gamma <= 0 or rho <= 0:
            raise ValueError(
                f"Generalized Gaussian scale and shape must be positive, got gamma={gamma}, rho={rho}"
            )

        self.kind = kind
        self.sigma2 = sigma2
        self.mu = mu
        self.gamma = gamma
        self.rho = rho

    @classmethod
    def matched(cls, kind: str, sigma2: float, mu: float = 0.0, rho: float = 2.0) -> "NoiseSpec":
        """
        Noise of total power `sigma2`. For `aggn` the scale is chosen so that
        each dimension has variance `sigma2 / 2`, as `scaled_aggn` does.

        ##### Examples

        ```python
        >>> round(NoiseSpec.matched("aggn", 1.0, rho=2).gamma, 12)
        1.0
        >>> NoiseSpec.matched("awgn", 0.5).sigma2
        0.5

        ```
        """
        if sigma2 <= 0:
            raise ValueError(f"Noise variance must be positive, got sigma2={sigma2}")

        if kind == "awgn":
            return cls("awgn", sigma2)

        gamma = math.sqrt(sigma2 / 2 / aggn_variance(1.0, rho))
        return cls(kind, sigma2, mu=mu, gamma=gamma, rho=rho)

    def apply(self, tx, rng: Rng = None) -> np.ndarray:
        if self.kind == "awgn":
            return add_awgn(tx, self.sigma2, rng)

        return add_aggn(tx, self.mu, self.gamma, self.rho, rng)


def add_awgn(tx, sigma2: float, rng: Rng = None) -> np.ndarray:
    """
    Adds circular complex Gaussian noise of total variance `sigma2`
    (`sigma2 / 2` per real dimension).
    """
    if sigma2 <= 0:
        raise ValueError(f"Noise variance must be positive, got sigma2={sigma2}")

    rng = as_rng(rng)
    tx = np.asarray(tx, dtype=np.complex128)
    scale = math.sqrt(sigma2 / 2)
    return tx + scale * (rng.normal(tx.shape) + 1j * rng.normal(tx.shape))


def aggn_variance(gamma: float, rho: float) -> float:
    """
    Variance of the generalized Gaussian distribution.

    ##### Examples

    ```python
    >>> aggn_variance(1, 1)
    2.0
    >>> round(aggn_variance(1, 2), 12)
    0.5

    ```
    """
    return float(gamma ** 2 * gamma_fn(3 / rho) / gamma_fn(1 / rho))


def sample_aggn(n, mu: float, gamma: float, rho: float, rng: Rng = None) -> np.ndarray:
    """
    Draws `n` i.i.d. samples with density `rho / (2 gamma Γ(1/rho)) exp(-|(w - mu) / gamma|**rho)`.

    A Gamma(1/rho) variate raised to `1/rho` gives the magnitude, a fair sign
    flip the side, then scaling by `gamma` and shifting by `mu`.
    """
    if gamma <= 0 or rho <= 0:
        raise ValueError(
            f"Generalized Gaussian scale and shape must be positive, got gamma={gamma}, rho={rho}"
        )

    rng = as_rng(rng)
    magnitude = rng.gamma(1 / rho, n) ** (1 / rho)
    return mu + gamma * rng.signs(n) * magnitude


def add_aggn(tx, mu: float, gamma: float, rho: float, rng: Rng = None) -> np.ndarray:
    """Adds generalized Gaussian noise independently to I and Q."""
    rng = as_rng(rng)
    tx = np.asarray(tx, dtype=np.complex128)
    noise_i = sample_aggn(tx.shape, mu, gamma, rho, rng)
    noise_q = sample_aggn(tx.shape, mu, gamma, rho, rng)
    return tx + noise_i + 1j * noise_q


def scaled_aggn(tx, sigma2: float, rho: float, rng: Rng = None, mu: float = 0.0):
    """
    Adds shape-`rho` generalized Gaussian noise whose per-dimension variance
    is `sigma2 / 2`, the same power as `add_awgn` at that `sigma2`.
    """
    return NoiseSpec.matched("aggn", sigma2, mu=mu, rho=rho).apply(tx, rng)
