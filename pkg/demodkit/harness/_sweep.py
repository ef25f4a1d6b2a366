from pathlib import Path
from typing import List

import pandas as pd

import demodkit.logging
from demodkit.exceptions import MissingCheckpointError
from demodkit.monitor import as_logger
from demodkit.utils import run_parallel

from ._config import LEARNED, ExperimentConfig
from ._link import BerRecord, simulate_point


def check_checkpoints(cfg: ExperimentConfig):
    """
    Raises `MissingCheckpointError` unless every learned demodulator of `cfg`
    has a checkpoint file on disk.
    """
    for demodulator in cfg.demodulators:
        if demodulator not in LEARNED:
            continue

        path = cfg.checkpoints.get(demodulator)

        if path is None or not Path(path).is_file():
            raise MissingCheckpointError(demodulator, path)


class _SweepCell:
    def __init__(self, values: dict):
        self.values = values

    def __call__(self, item):
        index, demodulator = item
        return simulate_point(ExperimentConfig.from_dict(self.values), index, demodulator)


def run_sweep(cfg: ExperimentConfig, workers: int = 1, logger=None) -> List[BerRecord]:
    """
    Simulates every `(demodulator, Eb/N0)` cell of `cfg` and returns the
    records ordered by demodulator, then by grid position.

    Cells are independent: each one draws from its own seed, shared by all
    demodulators at the same grid point, so the result does not depend on
    `workers`. With `workers=1` progress is reported per batch of frames,
    otherwise per finished cell.

    ##### Examples

    ```python
    >>> cfg = ExperimentConfig("bpsk", ebn0_db=[40], bits_per_point=10_000, bit_floor=10_000)
    >>> [(r.ber, r.bits_counted) for r in run_sweep(cfg)]
    [(0.0, 10000)]

    ```
    """
    check_checkpoints(cfg)
    logger = as_logger(logger)

    cells = [
        (index, demodulator)
        for demodulator in cfg.demodulators
        for index in range(len(cfg.ebn0_db))
    ]

    logger.begin(len(cells) * cfg.bits_per_point, f"Sweep {cfg.name}")
    demodkit.logging.logger().info(
        "Sweeping %s: %i cells, %s", cfg.name, len(cells), ", ".join(cfg.demodulators)
    )

    try:
        if workers == 1:
            records = []

            for index, demodulator in cells:
                record = simulate_point(cfg, index, demodulator, progress=logger.update)
                logger.record(record)
                records.append(record)
        else:
            records = run_parallel(_SweepCell(cfg.as_dict()), cells, workers)

            for record in records:
                logger.update(record.bits_counted)
                logger.record(record)
    except Exception as e:
        logger.error(e)
        raise

    logger.end()
    return records


def records_frame(records: List[BerRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.as_dict() for r in records], columns=BerRecord.FIELDS)


def write_records(records: List[BerRecord], path) -> Path:
    """Writes `records` as CSV with the `BerRecord` columns, in order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records).to_csv(path, index=False)
    return path


def read_records(path) -> List[BerRecord]:
    frame = pd.read_csv(path, dtype={"scenario": str, "decoder": str}, keep_default_na=False)
    return [BerRecord(**row) for row in frame.to_dict("records")]
