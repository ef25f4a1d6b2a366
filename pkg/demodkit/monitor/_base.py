import datetime
import time

import enlighten
import termcolor
from rich.panel import Panel
from rich.progress import Progress

import demodkit.logging


class Logger:
    """
    Hooks invoked by long-running jobs: network training and BER sweeps.

    Training calls `begin`, then `start_epoch`/`update`/`finish_epoch` per epoch,
    and `end`. Sweeps call `begin`, `update` per simulated frame and `record`
    once per finished `BerRecord`. Every hook is a no-op here.
    """

    def begin(self, total, desc):
        pass

    def end(self):
        pass

    def start_epoch(self, epoch, learning_rate):
        pass

    def finish_epoch(self, epoch, loss):
        pass

    def update(self, n=1):
        pass

    def record(self, record):
        pass

    def error(self, e: Exception):
        pass


class ConsoleLogger(Logger):
    def begin(self, total, desc):
        print(self.emph(f"Starting {desc}: total={total}"))
        self.start_time = time.time()

    @staticmethod
    def emph(text):
        return termcolor.colored(text, color="white", attrs=["bold"])

    @staticmethod
    def success(text):
        return termcolor.colored(text, color="green")

    @staticmethod
    def primary(text):
        return termcolor.colored(text, color="blue")

    @staticmethod
    def err(text):
        return termcolor.colored(text, color="red")

    def start_epoch(self, epoch, learning_rate):
        elapsed = datetime.timedelta(seconds=int(time.time() - self.start_time))
        print(
            self.emph(f"Epoch {epoch} started"),
            self.primary(f"lr={learning_rate:.3g}"),
            self.primary(f"elapsed={elapsed}"),
        )

    def finish_epoch(self, epoch, loss):
        print(self.success(f"Epoch {epoch} finished: loss={loss:.5f}"))

    def record(self, record):
        print(
            self.primary(f"{record.demodulator}@{record.ebn0_db:g}dB"),
            self.success(f"ber={record.ber:.3e}"),
            f"({record.bit_errors}/{record.bits_counted})",
        )

    def error(self, e: Exception):
        print(self.err("(!) Error: %s" % e))

    def end(self):
        print(self.emph("Done."))


class ProgressLogger(Logger):
    def begin(self, total, desc):
        self.manager = enlighten.get_manager()
        self.counter = self.manager.counter(
            total=total, unit="steps", leave=True, desc=desc
        )

    def update(self, n=1):
        self.counter.update(n)

    def finish_epoch(self, epoch, loss):
        self.counter.desc = f"Epoch {epoch}: loss={loss:.4f}"
        self.counter.update(0, force=True)

    def end(self):
        self.counter.close()
        self.manager.stop()


class RichLogger(Logger):
    def __init__(self) -> None:
        self.console = demodkit.logging.console()
        self.logger = demodkit.logging.logger()

    def begin(self, total, desc):
        self.progress = Progress(console=self.console)
        self.task = self.progress.add_task(desc, total=total)
        self.progress.start()
        self.console.rule(f"{desc} starting", style="blue")

    def update(self, n=1):
        self.progress.advance(self.task, n)

    def start_epoch(self, epoch, learning_rate):
        self.console.rule(f"Epoch {epoch} - lr={learning_rate:.3g}")

    def finish_epoch(self, epoch, loss):
        self.console.print(Panel(f"📉 Loss=[blue]{loss:.5f}"))

    def record(self, record):
        self.console.print(
            f"📈 [bold]{record.modulation}[/] {record.demodulator} "
            f"@ {record.ebn0_db:g} dB: BER=[green bold]{record.ber:.3e}[/] "
            f"({record.bit_errors}/{record.bits_counted})"
        )

    def error(self, e: Exception):
        self.console.print(f"⚠️[red bold]Error:[/] {e}")

    def end(self):
        self.progress.stop()
        self.console.rule("Finished", style="red")


class MemoryLogger(Logger):
    def __init__(self):
        self.losses = []
        self.learning_rates = []
        self.records = []

    def start_epoch(self, epoch, learning_rate):
        self.learning_rates.append(learning_rate)

    def finish_epoch(self, epoch, loss):
        self.losses.append(loss)

    def record(self, record):
        self.records.append(record)


class MultiLogger(Logger):
    def __init__(self, *loggers):
        self.loggers = loggers

    def run(self, name, *args, **kwargs):
        for logger in self.loggers:
            getattr(logger, name)(*args, **kwargs)

    def begin(self, *args, **kwargs):
        self.run("begin", *args, **kwargs)

    def end(self, *args, **kwargs):
        self.run("end", *args, **kwargs)

    def start_epoch(self, *args, **kwargs):
        self.run("start_epoch", *args, **kwargs)

    def finish_epoch(self, *args, **kwargs):
        self.run("finish_epoch", *args, **kwargs)

    def update(self, *args, **kwargs):
        self.run("update", *args, **kwargs)

    def record(self, *args, **kwargs):
        self.run("record", *args, **kwargs)

    def error(self, *args, **kwargs):
        self.run("error", *args, **kwargs)


def as_logger(logger=None) -> Logger:
    if logger is None:
        return Logger()

    if isinstance(logger, (list, tuple)):
        return MultiLogger(*logger)

    return logger
