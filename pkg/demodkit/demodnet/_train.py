import math
from typing import List, Tuple

import numpy as np

import demodkit.logging
from demodkit.exceptions import TrainingDivergedError
from demodkit.monitor import as_logger
from demodkit.nn import AdamState, bce_with_logits, mse_loss
from demodkit.sampling import Rng
from demodkit.utils import nice_repr

from ._dataset import Dataset
from ._model import DemodNetModel, save_checkpoint


@nice_repr
class TrainSchedule:
    """
    Mini-batch Adam schedule. The learning rate starts at `lr0` and halves
    every `lr_halving_period` epochs.

    ##### Examples

    ```python
    >>> schedule = TrainSchedule()
    >>> [schedule.learning_rate(e) for e in (1, 3, 4, 7)]
    [0.003, 0.003, 0.0015, 0.00075]

    ```
    """

    def __init__(
        self,
        batch_size: int = 128,
        max_epochs: int = 15,
        lr0: float = 0.003,
        lr_halving_period: int = 3,
        seed: int = 0,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        if batch_size < 1 or max_epochs < 1 or lr_halving_period < 1:
            raise ValueError(
                f"Batch size, epochs and halving period must be positive, got "
                f"{batch_size}, {max_epochs}, {lr_halving_period}"
            )

        if not lr0 > 0:
            raise ValueError(f"Initial learning rate must be positive, got {lr0}")

        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.lr0 = lr0
        self.lr_halving_period = lr_halving_period
        self.seed = seed
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps

    def learning_rate(self, epoch: int) -> float:
        """Learning rate of the 1-based `epoch`."""
        if epoch < 1:
            raise ValueError(f"Epochs are counted from 1, got {epoch}")

        return self.lr0 * 0.5 ** ((epoch - 1) // self.lr_halving_period)

    def as_dict(self) -> dict:
        return dict(
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            lr0=self.lr0,
            lr_halving_period=self.lr_halving_period,
            seed=self.seed,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
        )


def train(
    model: DemodNetModel,
    dataset: Dataset,
    schedule: TrainSchedule = None,
    logger=None,
    checkpoint=None,
) -> Tuple[DemodNetModel, List[float]]:
    """
    Trains `model` on `dataset` and returns it in infer mode, together with the
    mean loss per bit of every epoch.

    Sigmoid-head models minimize binary cross-entropy against the bit labels;
    linear-head models minimize squared error against the exact LLRs of the
    dataset. Batches are reshuffled every epoch with a generator seeded by
    `schedule.seed`.

    When a batch produces a non-finite loss the parameters of the last completed
    epoch are restored, written to `checkpoint` when given, and
    `TrainingDivergedError` is raised. On success the final model is written
    to `checkpoint` as well.
    """
    schedule = schedule or TrainSchedule()
    logger = as_logger(logger)

    if dataset.modulation != model.modulation:
        raise ValueError(
            f"Dataset modulation '{dataset.modulation}' does not match the model's '{model.modulation}'"
        )

    if dataset.symbols_per_sample < 1 or len(dataset) < 1:
        raise ValueError("Cannot train on an empty dataset")

    if model.head == "sigmoid":
        targets, loss_fn = dataset.labels, bce_with_logits
    else:
        targets, loss_fn = dataset.llr_targets("exact"), mse_loss

    features = dataset.features
    n = len(dataset)
    bits_per_sample = targets.shape[1]
    batches = math.ceil(n / schedule.batch_size)
    shuffler = Rng(schedule.seed).spawn("shuffle")
    state = AdamState(schedule.lr0, schedule.beta1, schedule.beta2, schedule.eps)
    losses = []

    model.train()
    last_good = model.state()
    logger.begin(schedule.max_epochs * batches, f"Training {model!r}")

    for epoch in range(1, schedule.max_epochs + 1):
        state.lr = schedule.learning_rate(epoch)
        logger.start_epoch(epoch, state.lr)
        order = shuffler.permutation(n)
        total = 0.0

        for batch in range(batches):
            rows = order[batch * schedule.batch_size : (batch + 1) * schedule.batch_size]
            logits = model.forward(features[rows])[:, 0, :]
            loss, grad = loss_fn(logits, targets[rows])

            if not np.isfinite(loss):
                model.restore(last_good)
                model.eval()
                path = save_checkpoint(model, checkpoint) if checkpoint else None
                error = TrainingDivergedError(epoch, batch, last_good, path)
                logger.error(error)
                raise error

            model.backward(grad[:, None, :])
            model.step(state)
            total += loss * len(rows)
            logger.update()

        epoch_loss = total / n / bits_per_sample
        losses.append(epoch_loss)
        last_good = model.state()
        logger.finish_epoch(epoch, epoch_loss)
        demodkit.logging.logger().info("Epoch %i: loss=%.5f per bit", epoch, epoch_loss)

    logger.end()
    model.eval()

    if checkpoint:
        save_checkpoint(model, checkpoint)

    return model, losses


def train_llrnet_baseline(
    modulation: str,
    dataset: Dataset,
    schedule: TrainSchedule = None,
    hidden_channels: int = 64,
    hidden_kernel: int = 31,
    seed: int = 0,
    logger=None,
    checkpoint=None,
) -> Tuple[DemodNetModel, List[float]]:
    """
    Trains the LLR regression baseline: the DemodNet skeleton with a linear
    output, fitted by squared error to the exact LLRs of `dataset` computed
    under the AWGN assumption, whatever channel produced the data.
    """
    model = DemodNetModel(
        modulation, hidden_channels, hidden_kernel, head="linear", seed=seed
    )
    return train(model, dataset, schedule, logger=logger, checkpoint=checkpoint)
