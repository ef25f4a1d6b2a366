from typing import Iterable

import numpy as np
from tqdm import tqdm

from demodkit.channel import Scenario, sigma2_from_ebn0
from demodkit.llr import llr_sequence
from demodkit.modem import build_constellation, modulate
from demodkit.sampling import Rng

from ._model import features_from_symbols


class Dataset:
    """
    Training pairs of received symbol blocks and the bits they carry.

    * `received`: `(samples, symbols)` complex64 channel outputs.
    * `labels`: `(samples, k * symbols)` transmitted bits.
    * `ebn0_db`, `sigma2`: per-sample Eb/N0 and the matching noise variance.

    `features` stacks real and imaginary parts of `received` into the
    `(samples, 2, symbols)` network input.
    """

    def __init__(
        self,
        received,
        labels,
        ebn0_db,
        sigma2,
        modulation: str,
        scenario="awgn",
        seed: int = 0,
        code_rate: float = 1.0,
    ):
        self.received = np.asarray(received, dtype=np.complex64)
        self.labels = np.asarray(labels, dtype=np.uint8)
        self.ebn0_db = np.asarray(ebn0_db, dtype=np.float64)
        self.sigma2 = np.asarray(sigma2, dtype=np.float64)
        self.constellation = build_constellation(modulation)
        self.modulation = modulation
        self.scenario = Scenario.parse(scenario)
        self.seed = seed
        self.code_rate = code_rate
        self._features = None

        n = len(self.received)

        if self.labels.shape != (n, self.k * self.received.shape[1]):
            raise ValueError(
                f"Labels of shape {self.labels.shape} do not match {self.received.shape} "
                f"received symbols at k={self.k}"
            )

        if self.ebn0_db.shape != (n,) or self.sigma2.shape != (n,):
            raise ValueError("Eb/N0 and noise variance need one value per sample")

    def __len__(self):
        return len(self.received)

    def __repr__(self):
        return (
            f"Dataset(modulation={self.modulation!r}, scenario='{self.scenario}', "
            f"samples={len(self)}, symbols={self.symbols_per_sample})"
        )

    @property
    def k(self) -> int:
        return self.constellation.k

    @property
    def symbols_per_sample(self) -> int:
        return self.received.shape[1]

    @property
    def features(self) -> np.ndarray:
        if self._features is None:
            self._features = features_from_symbols(self.received)

        return self._features

    def subset(self, indices) -> "Dataset":
        return Dataset(
            self.received[indices],
            self.labels[indices],
            self.ebn0_db[indices],
            self.sigma2[indices],
            self.modulation,
            self.scenario,
            self.seed,
            self.code_rate,
        )

    def llr_targets(self, mode: str = "exact") -> np.ndarray:
        """
        AWGN-assumption LLRs of every labelled bit, `(samples, k * symbols)`,
        computed with each sample's own noise variance whatever the channel.
        """
        targets = np.empty(self.labels.shape, dtype=np.float32)

        for sigma2 in np.unique(self.sigma2):
            rows = np.flatnonzero(self.sigma2 == sigma2)
            llrs = llr_sequence(self.received[rows].ravel(), self.constellation, sigma2, mode)
            targets[rows] = llrs.reshape(len(rows), -1)

        return targets


def generate_dataset(
    modulation: str,
    scenario="awgn",
    ebn0_list_db: Iterable[float] = tuple(range(9)),
    samples_per_ebn0: int = 5000,
    symbols_per_sample: int = 100,
    seed: int = 0,
    code_rate: float = 1.0,
    progress: bool = False,
) -> Dataset:
    """
    Draws uniform random bits, modulates them and passes every sample through
    the channel scenario as its own frame, for each Eb/N0 in `ebn0_list_db`.
    Fading samples get their own training prefix and are equalized exactly as
    in evaluation.

    `code_rate` only enters the Eb/N0 to noise variance conversion, so a model
    meant for a coded link sees the noise levels of that link.

    ##### Examples

    ```python
    >>> data = generate_dataset("qpsk", ebn0_list_db=[0, 4], samples_per_ebn0=3, symbols_per_sample=40)
    >>> len(data), data.features.shape, data.labels.shape
    (6, (6, 2, 40), (6, 80))

    ```
    """
    ebn0_list_db = [float(x) for x in ebn0_list_db]

    if not ebn0_list_db:
        raise ValueError("At least one Eb/N0 value is required")

    if samples_per_ebn0 < 1 or symbols_per_sample < 1:
        raise ValueError(
            f"Sample count and length must be positive, got {samples_per_ebn0} x {symbols_per_sample}"
        )

    c = build_constellation(modulation)
    scenario = Scenario.parse(scenario)
    root = Rng(seed)
    received, labels, ebn0s, sigma2s = [], [], [], []

    for index, ebn0 in enumerate(tqdm(ebn0_list_db, desc=f"{modulation} dataset", disable=not progress)):
        rng = root.spawn("dataset", index)
        bits = rng.bits(samples_per_ebn0 * symbols_per_sample * c.k)
        tx = modulate(bits, c).reshape(samples_per_ebn0, symbols_per_sample)
        sigma2 = sigma2_from_ebn0(ebn0, c.k, code_rate)

        received.append(scenario.apply(tx, sigma2, rng))
        labels.append(bits.reshape(samples_per_ebn0, -1))
        ebn0s.append(np.full(samples_per_ebn0, ebn0))
        sigma2s.append(np.full(samples_per_ebn0, sigma2))

    return Dataset(
        np.concatenate(received),
        np.concatenate(labels),
        np.concatenate(ebn0s),
        np.concatenate(sigma2s),
        modulation,
        scenario,
        seed,
        code_rate,
    )
