from typing import Dict, List

import numpy as np
import pandas as pd

from demodkit.utils import nice_repr

from ._layers import Layer
from ._optim import AdamState, adam_step


class Sequential:
    """
    An ordered stack of layers trained end to end.

    Parameters are addressed by `"<layer index>.<name>"`, e.g. `"0.weight"`.

    ##### Examples

    ```python
    >>> from demodkit.nn import Conv1d, ReLU
    >>> net = Sequential([Conv1d(2, 4, 3), ReLU(4), Conv1d(4, 1, 3)])
    >>> net.forward(np.zeros((5, 2, 40))).shape
    (5, 1, 40)
    >>> net.parameter_count
    41

    ```
    """

    def __init__(self, layers: List[Layer]):
        self.layers = list(layers)
        self.mode = "train"

    def __repr__(self):
        return "Sequential([%s])" % ", ".join(repr(layer) for layer in self.layers)

    def set_mode(self, mode: str) -> "Sequential":
        for layer in self.layers:
            layer.set_mode(mode)

        self.mode = mode
        return self

    def train(self) -> "Sequential":
        return self.set_mode("train")

    def eval(self) -> "Sequential":
        return self.set_mode("infer")

    def forward(self, x) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)

        return x

    def backward(self, grad_out) -> np.ndarray:
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)

        return grad_out

    def output_length(self, length: int) -> int:
        for layer in self.layers:
            length = layer.output_length(length)

        return length

    def parameters(self) -> Dict[str, np.ndarray]:
        return {
            f"{i}.{name}": value
            for i, layer in enumerate(self.layers)
            for name, value in layer.params.items()
        }

    def gradients(self) -> Dict[str, np.ndarray]:
        return {
            f"{i}.{name}": value
            for i, layer in enumerate(self.layers)
            for name, value in layer.grads.items()
        }

    @property
    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters().values())

    def step(self, state: AdamState):
        """Applies one Adam update using the gradients of the last backward pass."""
        adam_step(self.parameters(), self.gradients(), state)

    def state(self) -> List[Dict[str, object]]:
        """A deep copy of every parameter and running statistic."""
        snapshot = []

        for layer in self.layers:
            entry = {name: value.copy() for name, value in layer.params.items()}

            if layer.kind == "bn":
                entry["running_mean"] = _copy(layer.running_mean)
                entry["running_var"] = _copy(layer.running_var)
                entry["num_batches_tracked"] = layer.num_batches_tracked

            snapshot.append(entry)

        return snapshot

    def restore(self, snapshot: List[Dict[str, object]]):
        if len(snapshot) != len(self.layers):
            raise ValueError(
                f"Snapshot has {len(snapshot)} layers, the model has {len(self.layers)}"
            )

        for layer, entry in zip(self.layers, snapshot):
            for name in layer.params:
                layer.params[name] = entry[name].copy()

            if layer.kind == "bn":
                layer.running_mean = _copy(entry["running_mean"])
                layer.running_var = _copy(entry["running_var"])
                layer.num_batches_tracked = entry["num_batches_tracked"]

    def inference_layers(self) -> List[Layer]:
        """Layers evaluated when the model runs on a received stream."""
        return self.layers


def _copy(value):
    return None if value is None else value.copy()


@nice_repr
class ComplexityReport:
    """
    Exact operation counts of a model for an input of `symbols` symbols.

    `layers` is a table with one row per layer and the columns `layer`, `mult`,
    `add`, `compare` and `exp_log`.
    """

    COLUMNS = ["mult", "add", "compare", "exp_log"]

    def __init__(self, layers: pd.DataFrame, symbols: int = 1):
        self.layers = layers
        self.symbols = symbols

    def __nice_repr_hook__(self, names, values):
        index = names.index("layers")
        names.pop(index)
        values.pop(index)

    @property
    def totals(self) -> Dict[str, int]:
        return {column: int(self.layers[column].sum()) for column in self.COLUMNS}

    def per_symbol(self) -> Dict[str, float]:
        return {column: value / self.symbols for column, value in self.totals.items()}


def count_ops(model: Sequential, symbols: int = 1) -> ComplexityReport:
    """
    Counts the multiplications, additions, comparisons and exponentials or
    logarithms spent by `model` on an input of `symbols` symbols.

    Every count is linear in the input length, so the default `symbols=1`
    yields the per-symbol cost.

    ##### Examples

    ```python
    >>> from demodkit.nn import Conv1d, ReLU
    >>> report = count_ops(Sequential([Conv1d(1, 1, 31), ReLU(1)]), symbols=10)
    >>> report.totals
    {'mult': 310, 'add': 310, 'compare': 10, 'exp_log': 0}

    ```
    """
    if symbols < 1:
        raise ValueError(f"At least one symbol is needed, got {symbols}")

    rows = []
    length = symbols

    for layer in model.inference_layers():
        rows.append(dict(layer=repr(layer), **layer.ops(length)))
        length = layer.output_length(length)

    frame = pd.DataFrame(rows, columns=["layer"] + ComplexityReport.COLUMNS)
    return ComplexityReport(frame, symbols)
