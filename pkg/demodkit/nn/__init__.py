"""
A small neural-network substrate for 1-D signals: convolution, transposed
convolution, batch normalization, activations, losses and the Adam optimizer,
all with explicit backward passes over numpy arrays.
"""

from ._layers import (
    INIT_STD,
    BatchNorm1d,
    Conv1d,
    Deconv1d,
    Layer,
    ReLU,
    Sigmoid,
    sigmoid,
)
from ._loss import bce_loss, bce_with_logits, mse_loss
from ._optim import AdamState, adam_step
from ._model import ComplexityReport, Sequential, count_ops
