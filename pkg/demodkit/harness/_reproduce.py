# # `demodkit.harness._reproduce`

"""
Recipes for the published BER figures.

`reproduce(figure, scale)` resolves a figure into one `ExperimentConfig` per
modulation, trains (or reuses) the networks its learned demodulators need,
runs the sweeps and writes, under `<output>/<figure>/`:

* one CSV per curve, named `<modulation>_<demodulator>.csv`, with the
  `BerRecord` columns;
* `<figure>.dat`, an Eb/N0 column followed by one BER column per curve,
  ready for gnuplot;
* `theory_<modulation>.csv` for the uncoded AWGN figure;
* `manifest.toml`, every resolved experiment, model and schedule.

Passing that manifest back to `reproduce` re-runs exactly the same
experiments and rewrites byte-identical CSVs.
"""

from pathlib import Path
from typing import Dict, List

import numpy as np
import pandas as pd
import toml

import demodkit.logging
from demodkit.channel import Scenario
from demodkit.demodnet import (
    TrainSchedule,
    build_demodnet,
    generate_dataset,
    train,
    train_llrnet_baseline,
)
from demodkit.fec import theory_curve
from demodkit.sampling import Rng
from demodkit.utils import nice_repr

from ._config import LEARNED, ExperimentConfig, ScalePreset, get_scale
from ._link import cached_model
from ._sweep import records_frame, run_sweep, write_records


OUT_OF_SCOPE = {"fig5b": "out of scope: turbo code"}


@nice_repr
class FigureRecipe:
    """
    A figure: one scenario and coding, an Eb/N0 range per modulation and the
    demodulators drawn on every panel.
    """

    def __init__(
        self,
        name: str,
        scenario: str,
        coding: str,
        ranges: Dict[str, tuple],
        demodulators: List[str],
        theory: bool = False,
    ):
        self.name = name
        self.scenario = scenario
        self.coding = coding
        self.ranges = ranges
        self.demodulators = demodulators
        self.theory = theory

    def grid(self, modulation: str, step_db: float) -> List[float]:
        lo, hi = self.ranges[modulation]
        return [round(float(x), 6) for x in np.arange(lo, hi + 1e-9, step_db)]


FIGURES = {
    "fig2": FigureRecipe(
        "fig2",
        "awgn",
        "none",
        dict(bpsk=(0, 8), qpsk=(0, 8), qam16=(0, 12), qam64=(0, 16), qam256=(0, 20)),
        ["min-distance", "demodnet-lpr"],
        theory=True,
    ),
    "fig3": FigureRecipe(
        "fig3",
        "awgn",
        "conv(171,133)",
        dict(bpsk=(0, 6), qam16=(0, 10), qam64=(4, 14)),
        ["exact-llr", "demodnet-lpr"],
    ),
    "fig4": FigureRecipe(
        "fig4",
        "awgn+cfo(0.005)",
        "conv(171,133)",
        dict(bpsk=(0, 10), qam16=(2, 14)),
        ["exact-llr", "demodnet-lpr"],
    ),
    "fig5a": FigureRecipe(
        "fig5a",
        "aggn(0,1,1)",
        "conv(171,133)",
        dict(bpsk=(0, 10), qam16=(2, 14)),
        ["exact-llr", "demodnet-lpr", "llrnet"],
    ),
    "fig6": FigureRecipe(
        "fig6",
        "rayleigh(30,1e6)+awgn",
        "conv(171,133)",
        dict(qam16=(4, 24), qam64=(8, 28)),
        ["exact-llr", "demodnet-lpr"],
    ),
}


def get_figure(name: str) -> FigureRecipe:
    if name in OUT_OF_SCOPE:
        raise ValueError(f"Figure '{name}' is {OUT_OF_SCOPE[name]}")

    if name not in FIGURES:
        raise ValueError(f"Unknown figure '{name}', must be one of: {', '.join(FIGURES)}.")

    return FIGURES[name]


def model_path(output, modulation: str, scenario: str, coding: str, head: str, scale: str) -> Path:
    coded = "uncoded" if coding == "none" else "coded"
    slug = Scenario.parse(scenario).slug
    return Path(output) / "models" / f"{modulation}_{slug}_{coded}_{head}_{scale}.dmn"


def figure_configs(figure: str, scale: str = "desk", output="output", seed: int = 0) -> List[ExperimentConfig]:
    """
    The resolved experiments of `figure` at `scale`, one per modulation.

    ##### Examples

    ```python
    >>> [(c.modulation, c.ebn0_db) for c in figure_configs("fig4", "smoke")]
    [('bpsk', [0.0, 4.0, 8.0]), ('qam16', [2.0, 6.0, 10.0, 14.0])]
    >>> figure_configs("fig5b")
    Traceback (most recent call last):
        ...
    ValueError: Figure 'fig5b' is out of scope: turbo code

    ```
    """
    recipe = get_figure(figure)
    preset = get_scale(scale)
    configs = []

    for modulation in recipe.ranges:
        checkpoints = {
            demodulator: str(model_path(output, modulation, recipe.scenario, recipe.coding, head, scale))
            for demodulator, head in LEARNED.items()
            if demodulator in recipe.demodulators
        }
        configs.append(
            ExperimentConfig(
                modulation,
                scenario=recipe.scenario,
                ebn0_db=recipe.grid(modulation, preset.grid_step_db),
                demodulators=recipe.demodulators,
                coding=recipe.coding,
                bits_per_point=preset.bits_per_point,
                bit_floor=preset.bit_floor,
                target_errors=preset.target_errors,
                frame_bits=preset.frame_bits,
                burst_symbols=preset.symbols_per_sample,
                seed=seed,
                checkpoints=checkpoints,
                name=f"{figure}-{modulation}",
            )
        )

    return configs


def model_specs(cfg: ExperimentConfig, preset: ScalePreset) -> List[dict]:
    """
    Everything needed to rebuild the networks of `cfg`: dataset, architecture,
    schedule and checkpoint path, one entry per learned demodulator. Networks
    are trained on the evaluation grid at the code rate of the link.
    """
    specs = []

    for demodulator in cfg.demodulators:
        if demodulator not in LEARNED:
            continue

        head = LEARNED[demodulator]
        rng = Rng(cfg.seed).spawn(cfg.modulation, cfg.scenario, cfg.coding, head)
        schedule = TrainSchedule(
            batch_size=preset.batch_size,
            max_epochs=preset.max_epochs,
            seed=rng.spawn("shuffle").seed,
        )
        specs.append(
            dict(
                demodulator=demodulator,
                checkpoint=cfg.checkpoints[demodulator],
                modulation=cfg.modulation,
                scenario=cfg.scenario,
                head=head,
                code_rate=cfg.code_rate,
                hidden_channels=preset.hidden_channels,
                hidden_kernel=preset.hidden_kernel,
                init_seed=rng.spawn("init").seed,
                dataset_seed=rng.spawn("dataset").seed,
                ebn0_list_db=list(cfg.ebn0_db),
                samples_per_ebn0=preset.samples_per_ebn0,
                symbols_per_sample=preset.symbols_per_sample,
                schedule=schedule.as_dict(),
            )
        )

    return specs


def ensure_model(spec: dict, logger=None, retrain: bool = False) -> Path:
    """
    Trains the network described by `spec` unless its checkpoint already exists.
    """
    path = Path(spec["checkpoint"])

    if path.is_file() and not retrain:
        demodkit.logging.logger().info("Reusing %s", path)
        return path

    demodkit.logging.logger().info("Training %s for %s", spec["demodulator"], path)

    dataset = generate_dataset(
        spec["modulation"],
        spec["scenario"],
        spec["ebn0_list_db"],
        samples_per_ebn0=spec["samples_per_ebn0"],
        symbols_per_sample=spec["symbols_per_sample"],
        seed=spec["dataset_seed"],
        code_rate=spec["code_rate"],
    )
    schedule = TrainSchedule(**spec["schedule"])

    if spec["head"] == "linear":
        train_llrnet_baseline(
            spec["modulation"],
            dataset,
            schedule,
            hidden_channels=spec["hidden_channels"],
            hidden_kernel=spec["hidden_kernel"],
            seed=spec["init_seed"],
            logger=logger,
            checkpoint=path,
        )
    else:
        model = build_demodnet(
            spec["modulation"],
            spec["hidden_channels"],
            spec["hidden_kernel"],
            seed=spec["init_seed"],
            head=spec["head"],
        )
        train(model, dataset, schedule, logger=logger, checkpoint=path)

    cached_model.cache_clear()
    return path


def write_dat(frame: pd.DataFrame, path) -> Path:
    """Writes one BER column per `(modulation, demodulator)` curve against Eb/N0."""
    frame = frame.assign(curve=frame["modulation"] + "_" + frame["demodulator"])
    table = frame.pivot_table(index="ebn0_db", columns="curve", values="ber", sort=False)
    table = table.sort_index()
    path = Path(path)

    with path.open("w") as fp:
        fp.write("# ebn0_db " + " ".join(table.columns) + "\n")
        table.to_csv(fp, sep=" ", header=False, na_rep="NaN")

    return path


def write_theory(modulation: str, grid, path) -> Path:
    frame = pd.DataFrame(theory_curve(modulation, grid), columns=["ebn0_db", "ber"])
    frame.insert(0, "modulation", modulation)
    frame.to_csv(path, index=False)
    return Path(path)


def write_manifest(path, figure: str, preset: ScalePreset, configs, specs) -> Path:
    manifest = dict(
        figure=figure,
        scale=preset.name,
        preset=preset.as_dict(),
        experiments=[cfg.as_dict() for cfg in configs],
        models=specs,
    )

    with Path(path).open("w") as fp:
        toml.dump(manifest, fp)

    return Path(path)


def read_manifest(path) -> dict:
    try:
        manifest = toml.load(str(path))
    except toml.TomlDecodeError as e:
        raise ValueError(f"Malformed manifest {path}: {e}") from e

    for key in ("figure", "scale", "preset", "experiments"):
        if key not in manifest:
            raise ValueError(f"Manifest {path} has no '{key}' entry")

    return manifest


def reproduce(
    figure: str = None,
    scale: str = "desk",
    output="output",
    workers: int = 1,
    manifest=None,
    seed: int = 0,
    logger=None,
) -> Dict[str, List[Path]]:
    """
    Reproduces `figure` at `scale`, or re-runs the experiments of a previous
    `manifest`. Returns the written files grouped as `curves`, `theory`,
    `dat` and `manifest`.
    """
    if manifest is not None:
        values = read_manifest(manifest)
        figure = values["figure"]
        preset = ScalePreset(**values["preset"])
        configs = [ExperimentConfig.from_dict(cfg) for cfg in values["experiments"]]
        specs = values.get("models", [])
    else:
        if figure is None:
            raise ValueError("Either a figure or a manifest is required")

        preset = get_scale(scale)
        configs = figure_configs(figure, scale, output, seed)
        specs = [spec for cfg in configs for spec in model_specs(cfg, preset)]

    recipe = get_figure(figure)
    folder = Path(output) / figure
    folder.mkdir(parents=True, exist_ok=True)
    written = dict(curves=[], theory=[], dat=[], manifest=[])

    demodkit.logging.logger().info(
        "Reproducing %s at %s scale into %s", figure, preset.name, folder
    )

    for spec in specs:
        ensure_model(spec, logger)

    all_records = []

    for cfg in configs:
        records = run_sweep(cfg, workers=workers, logger=logger)
        all_records.extend(records)

        for demodulator in cfg.demodulators:
            curve = [r for r in records if r.demodulator == demodulator]
            path = folder / f"{cfg.modulation}_{demodulator}.csv"
            written["curves"].append(write_records(curve, path))

        if recipe.theory:
            path = folder / f"theory_{cfg.modulation}.csv"
            written["theory"].append(write_theory(cfg.modulation, cfg.ebn0_db, path))

    written["dat"].append(write_dat(records_frame(all_records), folder / f"{figure}.dat"))
    written["manifest"].append(
        write_manifest(folder / "manifest.toml", figure, preset, configs, specs)
    )

    return written
