from ._base import (
    Logger,
    ConsoleLogger,
    ProgressLogger,
    RichLogger,
    MemoryLogger,
    MultiLogger,
    as_logger,
)
