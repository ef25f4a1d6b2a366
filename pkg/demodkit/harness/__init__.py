"""
Experiment orchestration: configurations, Monte Carlo BER sweeps, figure
recipes and their CSV, gnuplot and manifest outputs.
"""

from ._config import (
    CODINGS,
    DECODERS,
    DEMODULATORS,
    LEARNED,
    MIN_BITS_PER_POINT,
    SCALES,
    ExperimentConfig,
    ScalePreset,
    get_scale,
)
from ._link import BerRecord, cell_seed, demodulate, simulate_point, transmit
from ._sweep import check_checkpoints, read_records, records_frame, run_sweep, write_records
from ._reproduce import (
    FIGURES,
    OUT_OF_SCOPE,
    FigureRecipe,
    ensure_model,
    figure_configs,
    get_figure,
    model_path,
    model_specs,
    read_manifest,
    reproduce,
    write_dat,
)
