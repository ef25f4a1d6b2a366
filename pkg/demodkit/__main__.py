import functools
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
import typer
from rich.console import Console
from rich.table import Table

import demodkit.logging
from demodkit.channel import Scenario, sigma2_from_ebn0
from demodkit.demodnet import (
    HEADS,
    TrainSchedule,
    build_demodnet,
    generate_dataset,
    load_checkpoint,
    train as train_model,
)
from demodkit.harness import (
    LEARNED,
    ExperimentConfig,
    reproduce as reproduce_figure,
    run_sweep,
    write_records,
)
from demodkit.llr import exact_llr_op_counts, llr_sequence
from demodkit.modem import build_constellation, modulate
from demodkit.monitor import RichLogger
from demodkit.nn import count_ops
from demodkit.sampling import Rng
from demodkit.utils import datapath


logger = demodkit.logging.logger()
console = Console()


app = typer.Typer(name="demodkit")


@app.callback()
def main(
    log_level: str = typer.Option(
        None, help="DEBUG, INFO, WARNING or ERROR. Defaults to DEMODKIT_LOG_LEVEL."
    )
):
    """
    📡 Simulate classical and learned soft demodulation from the CLI.
    """
    demodkit.logging.setup(log_level)


def guarded(command):
    """
    Turns any failure of `command` into a single `error: <Type>: <message>`
    line on stderr and exit status 1.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (typer.Exit, typer.Abort):
            raise
        except Exception as e:
            message = " ".join(str(e).split())
            typer.echo(f"error: {type(e).__name__}: {message}", err=True)
            logger.debug("Command failed", exc_info=True)
            raise typer.Exit(1)

    return wrapper


def _records_table(records, title: str) -> Table:
    table = Table("Modulation", "Eb/N0 (dB)", "Demodulator", "Decoder", "Errors", "Bits", "BER", title=title)

    for r in records:
        table.add_row(
            r.modulation,
            f"{r.ebn0_db:g}",
            r.demodulator,
            r.decoder,
            str(r.bit_errors),
            str(r.bits_counted),
            f"{r.ber:.3e}",
        )

    return table


@app.command()
@guarded
def train(
    modulation: str = typer.Argument(..., help="bpsk, qpsk, qam16, qam64 or qam256."),
    output: Path = typer.Option(Path("demodnet.dmn"), help="Checkpoint file to write."),
    scenario: str = "awgn",
    ebn0: List[float] = typer.Option(
        [0, 1, 2, 3, 4, 5, 6, 7, 8], help="Training Eb/N0 values in dB, repeat the flag for each."
    ),
    samples: int = typer.Option(5000, help="Training samples per Eb/N0."),
    symbols: int = typer.Option(100, help="Symbols per training sample."),
    code_rate: float = 1.0,
    head: str = typer.Option("sigmoid", help=f"Output head: {', '.join(HEADS)}."),
    channels: int = 64,
    kernel: int = 31,
    epochs: int = 15,
    batch_size: int = 128,
    lr: float = 0.003,
    halving_period: int = 3,
    seed: int = 0,
    quiet: bool = False,
):
    """
    🏋️ Train a DemodNet (or the LLR regression baseline) and save a checkpoint.
    """
    dataset = generate_dataset(
        modulation,
        scenario,
        ebn0,
        samples_per_ebn0=samples,
        symbols_per_sample=symbols,
        seed=seed,
        code_rate=code_rate,
        progress=not quiet,
    )
    model = build_demodnet(modulation, channels, kernel, seed=seed, head=head)
    schedule = TrainSchedule(batch_size, epochs, lr, halving_period, seed=seed)

    console.print(f"🏋️ Training {model!r} on {len(dataset)} samples.")
    model, losses = train_model(
        model, dataset, schedule, logger=None if quiet else RichLogger(), checkpoint=output
    )

    console.print(f"📉 Final loss per bit: [blue]{losses[-1]:.5f}[/]")
    console.print(f"💾 Saving model to [green]{output.absolute()}[/].")


@app.command()
@guarded
def evaluate(
    checkpoint: Path = typer.Argument(..., help="DemodNet checkpoint to evaluate."),
    scenario: str = "awgn",
    ebn0: List[float] = typer.Option([0, 2, 4, 6, 8], help="Eb/N0 grid in dB."),
    compare: List[str] = typer.Option(["exact-llr"], help="Classical demodulators to compare with."),
    coding: str = "none",
    decoding: str = "soft",
    bits: int = typer.Option(1_000_000, help="Bit budget per Eb/N0 point."),
    bit_floor: int = 100_000,
    target_errors: int = 500,
    seed: int = 0,
    workers: int = 1,
    output: Path = typer.Option(None, help="Optional CSV file for the records."),
    quiet: bool = False,
):
    """
    📈 Measure the BER of a checkpoint against classical demodulators.
    """
    model = load_checkpoint(checkpoint)
    learned = [name for name, head in LEARNED.items() if head == model.head][0]
    cfg = ExperimentConfig(
        model.modulation,
        scenario=scenario,
        ebn0_db=ebn0,
        demodulators=[learned] + [d for d in compare if d != learned],
        coding=coding,
        decoding=decoding,
        bits_per_point=bits,
        bit_floor=min(bit_floor, bits),
        target_errors=target_errors,
        seed=seed,
        checkpoints={learned: str(checkpoint)},
        name=checkpoint.stem,
    )
    records = run_sweep(cfg, workers=workers, logger=None if quiet else RichLogger())
    console.print(_records_table(records, f"📈 {cfg.name}"))

    if output is not None:
        write_records(records, output)
        console.print(f"💾 Records saved to [blue]{output.absolute()}[/]")


@app.command()
@guarded
def sweep(
    config: Path = typer.Argument(..., help="TOML experiment configuration."),
    output: Path = typer.Option(Path("sweep.csv"), help="CSV file for the records."),
    workers: int = 1,
    quiet: bool = False,
):
    """
    🧮 Run the BER sweep described by a configuration file.
    """
    with config.open() as fp:
        cfg = ExperimentConfig.load(fp)

    records = run_sweep(cfg, workers=workers, logger=None if quiet else RichLogger())
    write_records(records, output)

    if not quiet:
        console.print(_records_table(records, f"🧮 {cfg.name}"))

    console.print(f"💾 {len(records)} records saved to [blue]{output.absolute()}[/]")


@app.command()
@guarded
def reproduce(
    figure: str = typer.Argument(None, help="fig2, fig3, fig4, fig5a or fig6."),
    scale: str = typer.Option("desk", help="paper, desk or smoke."),
    output: Path = typer.Option(datapath("output"), help="Folder for curves and trained models."),
    manifest: Path = typer.Option(None, help="Re-run the experiments of a previous manifest."),
    workers: int = 1,
    seed: int = 0,
    quiet: bool = False,
):
    """
    🖼️ Reproduce the BER curves of a figure, training missing models first.
    """
    written = reproduce_figure(
        figure,
        scale,
        output,
        workers=workers,
        manifest=manifest,
        seed=seed,
        logger=None if quiet else RichLogger(),
    )

    for kind, paths in written.items():
        for path in paths:
            console.print(f"💾 {kind}: [blue]{path}[/]")


@app.command("dump-llr")
@guarded
def dump_llr(
    modulation: str = typer.Argument(..., help="bpsk, qpsk, qam16, qam64 or qam256."),
    ebn0: float = 6.0,
    scenario: str = "awgn",
    symbols: int = 1000,
    seed: int = 0,
    output: Path = typer.Option(Path("llr.csv"), help="CSV file to write."),
):
    """
    🔬 Write received symbols with their exact and max-log LLRs to CSV.
    """
    c = build_constellation(modulation)
    rng = Rng(seed)
    sigma2 = sigma2_from_ebn0(ebn0, c.k)
    bits = rng.bits(symbols * c.k)
    rx = Scenario.parse(scenario).apply(modulate(bits, c)[None, :], sigma2, rng).ravel()

    frame = pd.DataFrame(
        dict(
            symbol_index=np.repeat(np.arange(symbols), c.k),
            bit_index=np.tile(np.arange(c.k), symbols),
            re=np.repeat(rx.real, c.k),
            im=np.repeat(rx.imag, c.k),
            llr_exact=llr_sequence(rx, c, sigma2, "exact"),
            llr_maxlog=llr_sequence(rx, c, sigma2, "maxlog"),
        )
    )
    frame.to_csv(output, index=False)
    console.print(f"💾 {len(frame)} LLRs saved to [blue]{output.absolute()}[/]")


@app.command()
@guarded
def info(checkpoint: Path = typer.Argument(..., help="DemodNet checkpoint to inspect.")):
    """
    🔍 Inspect a checkpoint: architecture, parameters and operation counts.
    """
    model = load_checkpoint(checkpoint)

    console.print(f"🔍 Inspecting [green]{checkpoint.absolute()}[/]")
    console.print(f"modulation: {model.modulation}")
    console.print(f"k: {model.k}")
    console.print(f"C: {model.hidden_channels}")
    console.print(f"kernel: {model.hidden_kernel}")
    console.print(f"head: {model.head}")
    console.print(f"parameters: {model.parameter_count}")

    report = count_ops(model)
    table = Table("Layer", *report.COLUMNS, title="Operations per symbol")

    for row in report.layers.itertuples(index=False):
        table.add_row(*[str(value) for value in row])

    table.add_row("[bold]DemodNet total[/]", *[str(v) for v in report.totals.values()])
    exact = exact_llr_op_counts(model.constellation)
    table.add_row(
        "[bold]ExactLLR[/]",
        str(exact["mult"]),
        str(exact["add"]),
        "0",
        str(exact["exp_log"]),
    )
    console.print(table)


def run():
    app(prog_name="demodkit")


if __name__ == "__main__":
    run()
