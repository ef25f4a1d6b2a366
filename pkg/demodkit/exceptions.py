class TrainingDivergedError(RuntimeError):
    def __init__(self, epoch: int, batch: int, last_good_state, checkpoint=None) -> None:
        message = f"Training diverged (non-finite loss) at epoch {epoch}, batch {batch}"

        if checkpoint is not None:
            message += f"; last good parameters saved to {checkpoint}"

        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.last_good_state = last_good_state
        self.checkpoint = checkpoint


class MissingCheckpointError(ValueError):
    def __init__(self, demodulator: str, path) -> None:
        super().__init__(
            f"Demodulator '{demodulator}' needs a trained checkpoint, but none was found at {path}"
        )
        self.demodulator = demodulator
        self.path = path
