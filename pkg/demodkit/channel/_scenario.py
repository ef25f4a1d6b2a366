# # `demodkit.channel._scenario`

"""
Channel scenarios as they appear in experiment configs and result files.

A scenario is written as one of:

* `awgn`
* `aggn(mu,gamma,rho)`
* `awgn+cfo(delta_f)`
* `rayleigh(max_doppler_hz,symbol_rate_hz)+awgn`

and is applied row by row to arrays of shape `(rows, symbols)`. Frequency
offset phase restarts at every row. Under fading each row is one frame: a
single training prefix followed by the row, faded by one continuous process
and equalized as a whole.
"""

import re

import numpy as np

from demodkit.equalizer import LmsEqualizer, training_sequence
from demodkit.sampling import Rng, as_rng

from ._impairments import FadingSpec, apply_frequency_offset, rayleigh_flat_fade
from ._noise import NoiseSpec


_NUMBER = r"\s*([-+0-9.eE]+)\s*"
_PATTERNS = {
    "awgn": re.compile(r"^awgn$"),
    "aggn": re.compile(rf"^aggn\({_NUMBER},{_NUMBER},{_NUMBER}\)$"),
    "cfo": re.compile(rf"^awgn\+cfo\({_NUMBER}\)$"),
    "rayleigh": re.compile(rf"^rayleigh\({_NUMBER},{_NUMBER}\)\+awgn$"),
}


def _fmt(x: float) -> str:
    return "%g" % x


class Scenario:
    """
    A parsed channel scenario.

    ##### Examples

    ```python
    >>> Scenario.parse("awgn+cfo(0.005)")
    Scenario('awgn+cfo(0.005)')
    >>> Scenario.parse("rayleigh(30, 1e6)+awgn").fading.normalized_doppler
    3e-05
    >>> Scenario.parse("awgn+cfo")
    Traceback (most recent call last):
        ...
    ValueError: Invalid channel scenario 'awgn+cfo'. Expected one of: awgn | aggn(mu,gamma,rho) | awgn+cfo(delta_f) | rayleigh(max_doppler_hz,symbol_rate_hz)+awgn

    ```
    """

    def __init__(
        self,
        kind: str = "awgn",
        mu: float = 0.0,
        gamma: float = 1.0,
        rho: float = 2.0,
        delta_f: float = 0.0,
        fading: FadingSpec = None,
        n_taps: int = 5,
        step_fraction: float = 0.1,
    ):
        if kind not in _PATTERNS:
            raise ValueError(f"Unknown scenario kind '{kind}'")

        if kind == "aggn" and (gamma <= 0 or rho <= 0):
            raise ValueError(f"AGGN needs gamma > 0 and rho > 0, got gamma={gamma}, rho={rho}")

        self.kind = kind
        self.mu = mu
        self.gamma = gamma
        self.rho = rho
        self.delta_f = delta_f
        self.fading = fading or (FadingSpec() if kind == "rayleigh" else None)
        self.n_taps = n_taps
        self.step_fraction = step_fraction

    @classmethod
    def parse(cls, text) -> "Scenario":
        if isinstance(text, Scenario):
            return text

        compact = str(text).strip().lower().replace(" ", "")

        for kind, pattern in _PATTERNS.items():
            match = pattern.match(compact)

            if match is None:
                continue

            values = [float(v) for v in match.groups()]

            if kind == "aggn":
                return cls(kind, mu=values[0], gamma=values[1], rho=values[2])
            if kind == "cfo":
                return cls(kind, delta_f=values[0])
            if kind == "rayleigh":
                return cls(kind, fading=FadingSpec(values[0], values[1]))

            return cls(kind)

        raise ValueError(
            f"Invalid channel scenario '{text}'. Expected one of: awgn | aggn(mu,gamma,rho) "
            "| awgn+cfo(delta_f) | rayleigh(max_doppler_hz,symbol_rate_hz)+awgn"
        )

    def __str__(self):
        if self.kind == "aggn":
            return f"aggn({_fmt(self.mu)},{_fmt(self.gamma)},{_fmt(self.rho)})"
        if self.kind == "cfo":
            return f"awgn+cfo({_fmt(self.delta_f)})"
        if self.kind == "rayleigh":
            return (
                f"rayleigh({_fmt(self.fading.max_doppler_hz)},"
                f"{_fmt(self.fading.symbol_rate_hz)})+awgn"
            )
        return "awgn"

    def __repr__(self):
        return f"Scenario({str(self)!r})"

    def __eq__(self, other):
        return isinstance(other, Scenario) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    @property
    def slug(self) -> str:
        """File-name friendly version of the scenario string."""
        return re.sub(r"[^a-z0-9.]+", "_", str(self)).strip("_")

    @property
    def equalized(self) -> bool:
        return self.kind == "rayleigh"

    def noise(self, sigma2: float) -> NoiseSpec:
        """Additive noise of total power `sigma2` under this scenario."""
        if self.kind == "aggn":
            return NoiseSpec.matched("aggn", sigma2, mu=self.mu, rho=self.rho)

        return NoiseSpec.matched("awgn", sigma2)

    def add_noise(self, tx, sigma2: float, rng: Rng) -> np.ndarray:
        return self.noise(sigma2).apply(tx, rng)

    def apply(self, bursts, sigma2: float, rng: Rng = None) -> np.ndarray:
        """
        Passes the rows of `bursts` (shape `(rows, symbols)`) through the
        channel and adds noise of total variance `sigma2`. Under fading every
        row is sent behind one training prefix through one continuous fade and
        equalized. Returns the received payloads with the same shape as `bursts`.
        """
        rng = as_rng(rng)
        bursts = np.atleast_2d(np.asarray(bursts, dtype=np.complex128))

        if self.kind == "cfo":
            return self.add_noise(apply_frequency_offset(bursts, self.delta_f), sigma2, rng)

        if self.kind == "rayleigh":
            return np.stack([self._fade_and_equalize(frame, sigma2, rng) for frame in bursts])

        return self.add_noise(bursts, sigma2, rng)

    def _fade_and_equalize(self, frame, sigma2, rng):
        prefix = training_sequence()
        faded, _ = rayleigh_flat_fade(np.concatenate([prefix, frame]), self.fading, rng)
        rx = self.add_noise(faded, sigma2, rng)
        equalizer = LmsEqualizer(self.n_taps, self.step_fraction)
        return equalizer.equalize(rx, prefix)
