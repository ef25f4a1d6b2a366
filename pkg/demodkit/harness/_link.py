# # `demodkit.harness._link`

"""
Monte Carlo simulation of one point of a BER curve.

Each batch of frames goes through

    info bits -> [convolutional encoder] -> filler to whole bursts -> modulator
    -> channel (+ LMS equalizer for fading) -> demodulator -> [Viterbi] -> errors

Every frame is padded to whole bursts on its own. Frequency offset restarts
at each burst, while a fading frame goes through one continuous fade behind
a single training prefix. Filler bits and the prefix never reach the error
count, and neither do the encoder flush bits, which the decoder strips.
"""

import functools

import numpy as np

from demodkit.channel import Scenario, sigma2_from_ebn0
from demodkit.demodnet import DemodNetModel, features_from_symbols, load_checkpoint, lpr, predict_logits
from demodkit.fec import TrellisSpec, conv_encode, viterbi_decode, viterbi_decode_hard
from demodkit.llr import llr_sequence
from demodkit.modem import (
    build_constellation,
    hard_decision_from_soft,
    hard_demodulate_min_distance,
    modulate,
)
from demodkit.sampling import Rng
from demodkit.utils import nice_repr

from ._config import LEARNED, ExperimentConfig


# Information bits simulated per batch before the stopping rule is checked.
BATCH_BITS = 100_000

# Bursts fed to the network at once.
INFERENCE_BURSTS = 512


@nice_repr
class BerRecord:
    """
    One measured point of a BER curve.

    ##### Examples

    ```python
    >>> BerRecord("bpsk", "awgn", 4.0, "min-distance", "none", 20000, 250, seed=1).ber
    0.0125

    ```
    """

    FIELDS = [
        "modulation",
        "scenario",
        "ebn0_db",
        "demodulator",
        "decoder",
        "bits_counted",
        "bit_errors",
        "ber",
        "seed",
    ]

    def __init__(
        self,
        modulation: str,
        scenario: str,
        ebn0_db: float,
        demodulator: str,
        decoder: str,
        bits_counted: int,
        bit_errors: int,
        ber: float = None,
        seed: int = 0,
    ):
        if bits_counted < 1:
            raise ValueError(f"A BER point needs at least one counted bit, got {bits_counted}")

        if not 0 <= bit_errors <= bits_counted:
            raise ValueError(
                f"Bit errors must lie in [0, {bits_counted}], got {bit_errors}"
            )

        self.modulation = modulation
        self.scenario = scenario
        self.ebn0_db = float(ebn0_db)
        self.demodulator = demodulator
        self.decoder = decoder
        self.bits_counted = int(bits_counted)
        self.bit_errors = int(bit_errors)
        self.ber = self.bit_errors / self.bits_counted
        self.seed = int(seed)

    def as_dict(self) -> dict:
        return {field: getattr(self, field) for field in self.FIELDS}


@functools.lru_cache(maxsize=16)
def cached_model(path: str) -> DemodNetModel:
    return load_checkpoint(path)


def cell_seed(cfg: ExperimentConfig, index: int) -> int:
    """
    Seed of the `index`-th grid point. It does not depend on the demodulator,
    so every demodulator sees the same bits and noise at a given Eb/N0.
    """
    return Rng(cfg.seed).spawn(cfg.modulation, cfg.scenario, cfg.coding, index).seed


def _network_outputs(model: DemodNetModel, rx: np.ndarray) -> np.ndarray:
    outputs = [
        predict_logits(model, features_from_symbols(rx[start : start + INFERENCE_BURSTS]))
        for start in range(0, len(rx), INFERENCE_BURSTS)
    ]
    return np.concatenate(outputs).ravel().astype(np.float64)


def transmit(frames, scenario: Scenario, sigma2: float, rng: Rng, burst_symbols: int):
    """
    Sends `frames` (shape `(frames, symbols)`, a whole number of bursts per
    frame) through `scenario` and returns the received bursts, shape
    `(bursts, burst_symbols)`.

    Fading frames are faded and equalized as a whole; every other scenario
    sees the bursts independently.
    """
    frames = np.asarray(frames, dtype=np.complex128)

    if frames.shape[1] % burst_symbols:
        raise ValueError(
            f"Frames of {frames.shape[1]} symbols do not split into bursts of {burst_symbols}"
        )

    if scenario.equalized:
        return scenario.apply(frames, sigma2, rng).reshape(-1, burst_symbols)

    return scenario.apply(frames.reshape(-1, burst_symbols), sigma2, rng)


def demodulate(demodulator: str, rx, c, sigma2: float, model: DemodNetModel = None):
    """
    Applies `demodulator` to received bursts `rx` of shape `(bursts, symbols)`.

    Returns `(hard, soft)`: hard bit decisions and, for soft demodulators, the
    LLR-like values they were derived from (`None` for hard demodulators).
    """
    if demodulator == "min-distance":
        return hard_demodulate_min_distance(rx.ravel(), c), None

    if demodulator in ("exact-llr", "maxlog-llr"):
        soft = llr_sequence(rx.ravel(), c, sigma2, demodulator.split("-")[0])
    elif demodulator in LEARNED:
        if model is None:
            raise ValueError(f"Demodulator '{demodulator}' needs a trained model")

        outputs = _network_outputs(model, rx)
        soft = lpr(logits=outputs) if model.head == "sigmoid" else outputs
    else:
        raise ValueError(f"Unknown demodulator '{demodulator}'")

    return hard_decision_from_soft(soft), soft


def _check_model(cfg: ExperimentConfig, demodulator: str, model: DemodNetModel):
    if model.modulation != cfg.modulation:
        raise ValueError(
            f"Checkpoint for '{demodulator}' was trained for {model.modulation}, not {cfg.modulation}"
        )

    if model.head != LEARNED[demodulator]:
        raise ValueError(
            f"Demodulator '{demodulator}' needs a '{LEARNED[demodulator]}' head, the checkpoint has '{model.head}'"
        )


def simulate_point(
    cfg: ExperimentConfig, index: int, demodulator: str, model: DemodNetModel = None, progress=None
) -> BerRecord:
    """
    Simulates the `index`-th Eb/N0 of `cfg` with `demodulator` until the
    stopping rule holds: at least `target_errors` errors over at least
    `bit_floor` bits, or `bits_per_point` bits in total.
    """
    ebn0_db = cfg.ebn0_db[index]
    c = build_constellation(cfg.modulation)
    scenario = Scenario.parse(cfg.scenario)
    trellis = TrellisSpec() if cfg.coded else None
    decoder = cfg.decoder_for(demodulator)
    sigma2 = sigma2_from_ebn0(ebn0_db, c.k, cfg.code_rate)
    seed = cell_seed(cfg, index)
    root = Rng(seed)

    if demodulator in LEARNED:
        if model is None:
            model = cached_model(str(cfg.checkpoints[demodulator]))

        _check_model(cfg, demodulator, model)

    frames = max(1, min(cfg.bits_per_point, BATCH_BITS) // cfg.frame_bits)
    per_burst = c.k * cfg.burst_symbols
    bits = errors = 0
    batch = 0

    while True:
        rng = root.spawn("batch", batch)
        info = rng.bits(frames * cfg.frame_bits).reshape(frames, cfg.frame_bits)

        if cfg.coded:
            coded = np.stack([conv_encode(row, trellis) for row in info])
        else:
            coded = info

        width = coded.shape[1]
        filler = rng.bits(frames * ((-width) % per_burst)).reshape(frames, -1)
        padded = np.concatenate([coded, filler], axis=1)
        symbols = modulate(padded.ravel(), c).reshape(frames, -1)
        rx = transmit(symbols, scenario, sigma2, rng, cfg.burst_symbols)

        hard, soft = demodulate(demodulator, rx, c, sigma2, model)
        hard = hard.reshape(frames, -1)[:, :width]

        if decoder == "none":
            decided = hard
        elif decoder == "viterbi-hard":
            decided = viterbi_decode_hard(hard, trellis)
        else:
            decided = viterbi_decode(soft.reshape(frames, -1)[:, :width], trellis)

        errors += int(np.count_nonzero(decided != info))
        bits += info.size
        batch += 1

        if progress is not None:
            progress(info.size)

        if bits >= cfg.bits_per_point:
            break

        if errors >= cfg.target_errors and bits >= cfg.bit_floor:
            break

    return BerRecord(
        cfg.modulation, cfg.scenario, ebn0_db, demodulator, decoder, bits, errors, seed=seed
    )
