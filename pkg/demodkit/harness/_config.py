# # `demodkit.harness._config`

"""
Experiment configuration and scale presets.

An `ExperimentConfig` is stored as TOML:

```toml
name = "fig3-qam16"
modulation = "qam16"
scenario = "awgn"
ebn0_db = [0.0, 2.0, 4.0]
demodulators = ["exact-llr", "demodnet-lpr"]
coding = "conv(171,133)"
decoding = "soft"
equalizer = "none"
bits_per_point = 1000000
bit_floor = 100000
target_errors = 500
frame_bits = 2000
burst_symbols = 100
seed = 0

[checkpoints]
demodnet-lpr = "output/models/qam16_awgn_coded_sigmoid_desk.dmn"
```
"""

import inspect
from typing import Dict, List

import toml

from demodkit.channel import Scenario
from demodkit.demodnet import MIN_SYMBOLS
from demodkit.modem import BITS_PER_SYMBOL
from demodkit.utils import nice_repr


DEMODULATORS = ["min-distance", "exact-llr", "maxlog-llr", "demodnet-lpr", "llrnet"]
LEARNED = {"demodnet-lpr": "sigmoid", "llrnet": "linear"}
HARD_DEMODULATORS = ["min-distance"]
DECODERS = ["none", "viterbi-soft", "viterbi-hard"]
CODINGS = {"none": 1.0, "conv(171,133)": 0.5}
DECODINGS = ["soft", "hard"]
EQUALIZERS = ["auto", "none", "lms"]

MIN_BITS_PER_POINT = 10_000


class ExperimentConfig:
    """
    One BER sweep: a modulation and channel scenario, an Eb/N0 grid and the
    demodulators to compare on identical random data.

    ##### Examples

    ```python
    >>> cfg = ExperimentConfig("qam16", ebn0_db=[4, 6], demodulators=["exact-llr"])
    >>> cfg.code_rate, cfg.decoder_for("exact-llr"), cfg.equalizer
    (1.0, 'none', 'none')
    >>> ExperimentConfig("qam16", ebn0_db=[4], bits_per_point=5000)
    Traceback (most recent call last):
        ...
    ValueError: bits_per_point must be at least 10000, got 5000

    ```
    """

    def __init__(
        self,
        modulation: str,
        scenario: str = "awgn",
        ebn0_db: List[float] = (),
        demodulators: List[str] = ("min-distance",),
        coding: str = "none",
        decoding: str = "soft",
        equalizer: str = "auto",
        bits_per_point: int = 1_000_000,
        bit_floor: int = 100_000,
        target_errors: int = 500,
        frame_bits: int = 2000,
        burst_symbols: int = 100,
        seed: int = 0,
        checkpoints: Dict[str, str] = None,
        name: str = None,
    ):
        if modulation not in BITS_PER_SYMBOL:
            raise ValueError(
                f"Unknown modulation '{modulation}', must be one of: {', '.join(BITS_PER_SYMBOL)}."
            )

        self.modulation = modulation
        self.scenario = str(Scenario.parse(scenario))
        self.ebn0_db = [float(x) for x in ebn0_db]
        self.demodulators = list(demodulators)
        self.coding = coding
        self.decoding = decoding
        self.bits_per_point = int(bits_per_point)
        self.bit_floor = int(bit_floor)
        self.target_errors = int(target_errors)
        self.frame_bits = int(frame_bits)
        self.burst_symbols = int(burst_symbols)
        self.seed = int(seed)
        self.checkpoints = dict(checkpoints or {})
        self.name = name or f"{modulation}-{Scenario.parse(scenario).slug}"

        if not self.ebn0_db:
            raise ValueError("The Eb/N0 grid must not be empty")

        if not self.demodulators:
            raise ValueError("At least one demodulator is required")

        for demodulator in self.demodulators:
            if demodulator not in DEMODULATORS:
                raise ValueError(
                    f"Unknown demodulator '{demodulator}', must be one of: {', '.join(DEMODULATORS)}."
                )

        if coding not in CODINGS:
            raise ValueError(f"Unknown coding '{coding}', must be one of: {', '.join(CODINGS)}.")

        if decoding not in DECODINGS:
            raise ValueError(
                f"Unknown decoding '{decoding}', must be one of: {', '.join(DECODINGS)}."
            )

        if self.bits_per_point < MIN_BITS_PER_POINT:
            raise ValueError(
                f"bits_per_point must be at least {MIN_BITS_PER_POINT}, got {self.bits_per_point}"
            )

        if not 0 < self.bit_floor <= self.bits_per_point:
            raise ValueError(
                f"bit_floor must lie in (0, bits_per_point={self.bits_per_point}], got {self.bit_floor}"
            )

        if self.target_errors < 1 or self.frame_bits < 1:
            raise ValueError("target_errors and frame_bits must be positive")

        if self.burst_symbols < MIN_SYMBOLS:
            raise ValueError(
                f"burst_symbols must be at least {MIN_SYMBOLS}, got {self.burst_symbols}"
            )

        fading = Scenario.parse(self.scenario).equalized

        if equalizer not in EQUALIZERS:
            raise ValueError(
                f"Unknown equalizer '{equalizer}', must be one of: {', '.join(EQUALIZERS)}."
            )

        if equalizer == "lms" and not fading:
            raise ValueError(
                f"The LMS equalizer is only used with fading scenarios, not '{self.scenario}'"
            )

        if equalizer == "none" and fading:
            raise ValueError(f"The fading scenario '{self.scenario}' requires the LMS equalizer")

        self.equalizer = "lms" if fading else "none"

    def __repr__(self):
        return f"ExperimentConfig(name={self.name!r}, modulation={self.modulation!r}, scenario={self.scenario!r})"

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self.as_dict() == other.as_dict()

    @property
    def k(self) -> int:
        return BITS_PER_SYMBOL[self.modulation]

    @property
    def code_rate(self) -> float:
        return CODINGS[self.coding]

    @property
    def coded(self) -> bool:
        return self.coding != "none"

    def decoder_for(self, demodulator: str) -> str:
        if not self.coded:
            return "none"

        if demodulator in HARD_DEMODULATORS or self.decoding == "hard":
            return "viterbi-hard"

        return "viterbi-soft"

    def as_dict(self) -> dict:
        """Every field, defaults included, in TOML-ready form."""
        return dict(
            name=self.name,
            modulation=self.modulation,
            scenario=self.scenario,
            ebn0_db=list(self.ebn0_db),
            demodulators=list(self.demodulators),
            coding=self.coding,
            decoding=self.decoding,
            equalizer=self.equalizer,
            bits_per_point=self.bits_per_point,
            bit_floor=self.bit_floor,
            target_errors=self.target_errors,
            frame_bits=self.frame_bits,
            burst_symbols=self.burst_symbols,
            seed=self.seed,
            checkpoints=dict(self.checkpoints),
        )

    @classmethod
    def from_dict(cls, values: dict) -> "ExperimentConfig":
        values = dict(values)
        unknown = set(values) - set(inspect.signature(cls).parameters)

        if unknown:
            raise ValueError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")

        if "modulation" not in values:
            raise ValueError("The configuration must name a modulation")

        return cls(**values)

    def save(self, fp):
        toml.dump(self.as_dict(), fp)

    @classmethod
    def load(cls, fp) -> "ExperimentConfig":
        try:
            values = toml.load(fp)
        except toml.TomlDecodeError as e:
            raise ValueError(f"Malformed configuration file: {e}") from e

        return cls.from_dict(values)


@nice_repr
class ScalePreset:
    """
    Sizes that trade fidelity for run time: training set and schedule, network
    width, Eb/N0 grid density and per-point bit budgets.

    Only `paper` builds the full network (64 channels, kernel 31). The narrower
    `desk` network (16 channels, kernel 15, 5000 samples per Eb/N0) learns more
    slowly: on noiseless BPSK it ends its second epoch around 0.017 per bit
    instead of below 0.01, so its curves sit closer to min-distance at low
    Eb/N0. `smoke` only checks that everything runs.
    """

    def __init__(
        self,
        name: str,
        samples_per_ebn0: int,
        max_epochs: int,
        hidden_channels: int,
        hidden_kernel: int,
        grid_step_db: float,
        bits_per_point: int,
        bit_floor: int,
        symbols_per_sample: int = 100,
        batch_size: int = 128,
        frame_bits: int = 2000,
        target_errors: int = 500,
    ):
        self.name = name
        self.samples_per_ebn0 = samples_per_ebn0
        self.max_epochs = max_epochs
        self.hidden_channels = hidden_channels
        self.hidden_kernel = hidden_kernel
        self.grid_step_db = grid_step_db
        self.bits_per_point = bits_per_point
        self.bit_floor = bit_floor
        self.symbols_per_sample = symbols_per_sample
        self.batch_size = batch_size
        self.frame_bits = frame_bits
        self.target_errors = target_errors

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in inspect.signature(type(self)).parameters}


SCALES = {
    "paper": ScalePreset(
        "paper",
        samples_per_ebn0=100_000,
        max_epochs=15,
        hidden_channels=64,
        hidden_kernel=31,
        grid_step_db=1.0,
        bits_per_point=10_000_000,
        bit_floor=1_000_000,
    ),
    "desk": ScalePreset(
        "desk",
        samples_per_ebn0=5000,
        max_epochs=6,
        hidden_channels=16,
        hidden_kernel=15,
        grid_step_db=2.0,
        bits_per_point=1_000_000,
        bit_floor=100_000,
    ),
    "smoke": ScalePreset(
        "smoke",
        samples_per_ebn0=64,
        max_epochs=1,
        hidden_channels=4,
        hidden_kernel=5,
        grid_step_db=4.0,
        bits_per_point=10_000,
        bit_floor=10_000,
        batch_size=32,
        frame_bits=500,
        target_errors=100,
    ),
}


def get_scale(name: str) -> ScalePreset:
    if name not in SCALES:
        raise ValueError(f"Unknown scale '{name}', must be one of: {', '.join(SCALES)}.")

    return SCALES[name]
