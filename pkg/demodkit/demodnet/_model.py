# # `demodkit.demodnet._model`

"""
The DemodNet network and its soft outputs.

The network is fully convolutional. Received symbols enter as two channels
(real and imaginary parts). A transposed convolution with stride `k` expands
them to one position per bit, three hidden convolution blocks follow, and a
final single-kernel convolution of length 31 produces one logit per bit:

    deconv(2 -> C, stride k) -> BN -> ReLU
    [conv(C -> C, hidden_kernel) -> BN -> ReLU] x 3
    conv(C -> 1, 31) -> sigmoid

Every layer is local, so any input of at least 31 symbols yields `k` outputs
per symbol. The `linear` head drops the sigmoid and regresses LLR values
directly.
"""

import io
import math
import struct
from pathlib import Path
from typing import Tuple

import numpy as np

from demodkit.modem import build_constellation
from demodkit.nn import BatchNorm1d, Conv1d, Deconv1d, ReLU, Sequential, Sigmoid, sigmoid
from demodkit.sampling import as_rng


HEADS = ("sigmoid", "linear")
FINAL_KERNEL = 31
HIDDEN_BLOCKS = 3
MIN_SYMBOLS = 31

# Symbols per chunk in `forward_stream`.
STREAM_CHUNK = 4096

MAGIC = b"DEMODNET"
FORMAT_VERSION = 1


class DemodNetModel(Sequential):
    """
    A DemodNet (or, with `head="linear"`, an LLR regression network) for one
    modulation.

    ##### Examples

    ```python
    >>> model = DemodNetModel("qpsk", hidden_channels=4, hidden_kernel=5)
    >>> model.k, len(model.layers), model.output_length(100)
    (2, 13, 200)
    >>> DemodNetModel("qpsk", head="softmax")
    Traceback (most recent call last):
        ...
    ValueError: Unknown output head 'softmax', must be one of: sigmoid, linear.

    ```
    """

    def __init__(
        self,
        modulation: str,
        hidden_channels: int = 64,
        hidden_kernel: int = 31,
        head: str = "sigmoid",
        seed: int = 0,
        dtype=np.float32,
    ):
        if hidden_channels < 1:
            raise ValueError(f"Hidden channels must be positive, got {hidden_channels}")

        if hidden_kernel < 1:
            raise ValueError(f"Hidden kernel length must be positive, got {hidden_kernel}")

        if head not in HEADS:
            raise ValueError(f"Unknown output head '{head}', must be one of: {', '.join(HEADS)}.")

        self.constellation = build_constellation(modulation)
        self.modulation = modulation
        self.hidden_channels = hidden_channels
        self.hidden_kernel = hidden_kernel
        self.head = head
        self.seed = seed

        rng = as_rng(seed)
        c = hidden_channels
        layers = [
            Deconv1d(2, c, self.k, rng=rng.spawn("layer", 0), dtype=dtype),
            BatchNorm1d(c, dtype=dtype),
            ReLU(c, dtype=dtype),
        ]

        for block in range(1, HIDDEN_BLOCKS + 1):
            layers += [
                Conv1d(c, c, hidden_kernel, rng=rng.spawn("layer", block), dtype=dtype),
                BatchNorm1d(c, dtype=dtype),
                ReLU(c, dtype=dtype),
            ]

        layers.append(
            Conv1d(c, 1, FINAL_KERNEL, rng=rng.spawn("layer", HIDDEN_BLOCKS + 1), dtype=dtype)
        )
        super().__init__(layers)

    def __repr__(self):
        return (
            f"DemodNetModel(modulation={self.modulation!r}, hidden_channels={self.hidden_channels}, "
            f"hidden_kernel={self.hidden_kernel}, head={self.head!r})"
        )

    @property
    def k(self) -> int:
        return self.constellation.k

    @property
    def margin_symbols(self) -> int:
        """Symbols on each side beyond which an input sample cannot affect an output bit."""
        reach = sum(
            layer.kernel_size - 1 for layer in self.layers if isinstance(layer, Conv1d)
        )
        return math.ceil(reach / self.k) + 1

    def inference_layers(self):
        if self.head == "sigmoid":
            return self.layers + [Sigmoid(1)]

        return self.layers

    def save(self, fp: io.BufferedIOBase):
        """
        Writes a versioned binary checkpoint: magic string, format version,
        modulation, `k`, `C`, hidden kernel and head, then one record per layer
        with its kind and its arrays as little-endian 32-bit floats.
        """
        fp.write(MAGIC)
        fp.write(struct.pack("<H", FORMAT_VERSION))
        _write_str(fp, self.modulation)
        fp.write(struct.pack("<BHH", self.k, self.hidden_channels, self.hidden_kernel))
        _write_str(fp, self.head)
        fp.write(struct.pack("<H", len(self.layers)))

        for layer in self.layers:
            _write_str(fp, layer.kind)
            arrays = dict(layer.params)

            if layer.kind == "bn" and layer.initialized:
                arrays["running_mean"] = layer.running_mean
                arrays["running_var"] = layer.running_var

            fp.write(struct.pack("<B", len(arrays)))

            for name, array in arrays.items():
                _write_array(fp, name, array)

            if layer.kind == "bn":
                fp.write(struct.pack("<Q", layer.num_batches_tracked))

    @classmethod
    def load(cls, fp: io.BufferedIOBase) -> "DemodNetModel":
        """Reads a checkpoint written by `save`; the model comes back in infer mode."""
        if fp.read(len(MAGIC)) != MAGIC:
            raise ValueError("The file is not a DemodNet checkpoint (bad magic string).")

        (version,) = _read(fp, "<H")

        if version != FORMAT_VERSION:
            raise ValueError(
                f"Unsupported checkpoint format version {version}, expected {FORMAT_VERSION}"
            )

        modulation = _read_str(fp)
        k, channels, hidden_kernel = _read(fp, "<BHH")
        head = _read_str(fp)
        model = cls(modulation, channels, hidden_kernel, head)

        if model.k != k:
            raise ValueError(f"Checkpoint stores k={k}, but {modulation} carries {model.k} bits")

        (n_layers,) = _read(fp, "<H")

        if n_layers != len(model.layers):
            raise ValueError(
                f"Checkpoint has {n_layers} layers, the architecture needs {len(model.layers)}"
            )

        for index, layer in enumerate(model.layers):
            kind = _read_str(fp)

            if kind != layer.kind:
                raise ValueError(f"Layer {index} is '{kind}' in the checkpoint, expected '{layer.kind}'")

            (n_arrays,) = _read(fp, "<B")
            arrays = dict(_read_array(fp) for _ in range(n_arrays))

            for name, value in layer.params.items():
                if name not in arrays or arrays[name].shape != value.shape:
                    raise ValueError(
                        f"Layer {index} ({kind}) is missing '{name}' of shape {value.shape}"
                    )

                layer.params[name] = arrays[name]

            if kind == "bn":
                layer.running_mean = arrays.get("running_mean")
                layer.running_var = arrays.get("running_var")
                (layer.num_batches_tracked,) = _read(fp, "<Q")

        return model.eval()


def _write_str(fp, text: str):
    data = text.encode("ascii")
    fp.write(struct.pack("<B", len(data)))
    fp.write(data)


def _read(fp, fmt: str):
    size = struct.calcsize(fmt)
    data = fp.read(size)

    if len(data) != size:
        raise ValueError("Truncated DemodNet checkpoint.")

    return struct.unpack(fmt, data)


def _read_str(fp) -> str:
    (length,) = _read(fp, "<B")
    data = fp.read(length)

    if len(data) != length:
        raise ValueError("Truncated DemodNet checkpoint.")

    return data.decode("ascii")


def _write_array(fp, name: str, array: np.ndarray):
    _write_str(fp, name)
    fp.write(struct.pack("<B", array.ndim))
    fp.write(struct.pack(f"<{array.ndim}I", *array.shape))
    fp.write(np.ascontiguousarray(array, dtype="<f4").tobytes())


def _read_array(fp) -> Tuple[str, np.ndarray]:
    name = _read_str(fp)
    (ndim,) = _read(fp, "<B")
    shape = _read(fp, f"<{ndim}I")
    count = int(np.prod(shape))
    data = fp.read(4 * count)

    if len(data) != 4 * count:
        raise ValueError("Truncated DemodNet checkpoint.")

    array = np.frombuffer(data, dtype="<f4").astype(np.float32).reshape(shape)
    return name, array


def build_demodnet(
    modulation: str,
    hidden_channels: int = 64,
    hidden_kernel: int = 31,
    seed: int = 0,
    head: str = "sigmoid",
) -> DemodNetModel:
    """
    Builds an untrained DemodNet with Gaussian weights (std 0.05) and zero biases.

    ##### Examples

    ```python
    >>> a = build_demodnet("bpsk", hidden_channels=4, hidden_kernel=5, seed=3)
    >>> b = build_demodnet("bpsk", hidden_channels=4, hidden_kernel=5, seed=3)
    >>> all(np.array_equal(a.parameters()[n], b.parameters()[n]) for n in a.parameters())
    True

    ```
    """
    return DemodNetModel(modulation, hidden_channels, hidden_kernel, head=head, seed=seed)


def save_checkpoint(model: DemodNetModel, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with path.open("wb") as fp:
        model.save(fp)

    return path


def load_checkpoint(path) -> DemodNetModel:
    with Path(path).open("rb") as fp:
        return DemodNetModel.load(fp)


def features_from_symbols(rx) -> np.ndarray:
    """
    Stacks real and imaginary parts into `(batch, 2, symbols)` network input.
    A 1-D sequence becomes a batch of one.
    """
    rx = np.asarray(rx)

    if rx.ndim == 1:
        rx = rx[None, :]

    return np.stack([rx.real, rx.imag], axis=1).astype(np.float32)


def _check_mode(model: DemodNetModel):
    if model.mode != "infer":
        raise TypeError("The model is in train mode; call `model.eval()` before inference.")


def predict_logits(model: DemodNetModel, features) -> np.ndarray:
    """Logits of shape `(batch, k * symbols)` for a `(batch, 2, symbols)` feature array."""
    _check_mode(model)
    return model.forward(features)[:, 0, :]


def forward(model: DemodNetModel, rx) -> Tuple[np.ndarray, np.ndarray]:
    """
    Runs the model over one received sequence and returns `(probs, logits)`,
    both of length `k * len(rx)`.
    """
    rx = np.asarray(rx).ravel()

    if len(rx) < MIN_SYMBOLS:
        raise ValueError(
            f"DemodNet needs at least {MIN_SYMBOLS} received symbols, got {len(rx)}"
        )

    logits = predict_logits(model, features_from_symbols(rx))[0]
    return sigmoid(logits.astype(np.float64)), logits


def forward_stream(model: DemodNetModel, rx, chunk_symbols: int = STREAM_CHUNK):
    """
    Same result as `forward` on arbitrarily long sequences, evaluated chunk by
    chunk. Each chunk is extended by `model.margin_symbols` on both sides so
    that its own outputs are unaffected by the chunk borders.
    """
    rx = np.asarray(rx).ravel()

    if len(rx) < MIN_SYMBOLS:
        raise ValueError(
            f"DemodNet needs at least {MIN_SYMBOLS} received symbols, got {len(rx)}"
        )

    if chunk_symbols < 1:
        raise ValueError(f"Chunk length must be positive, got {chunk_symbols}")

    k, margin = model.k, model.margin_symbols
    logits = np.empty(k * len(rx), dtype=np.float32)

    for start in range(0, len(rx), chunk_symbols):
        stop = min(len(rx), start + chunk_symbols)
        lo, hi = max(0, start - margin), min(len(rx), stop + margin)
        window = predict_logits(model, features_from_symbols(rx[lo:hi]))[0]
        logits[k * start : k * stop] = window[k * (start - lo) : k * (stop - lo)]

    return sigmoid(logits.astype(np.float64)), logits


def lpr(probs=None, logits=None) -> np.ndarray:
    """
    Log probability ratio `log((1 - p) / p)` of the network outputs.

    When logits are available the ratio is exactly their negation, which is
    the preferred path. Positive values favor bit 0, as with LLRs.

    ##### Examples

    ```python
    >>> lpr(probs=[0.5, 0.9]).round(4).tolist()
    [0.0, -2.1972]
    >>> lpr(logits=[2.0]).tolist()
    [-2.0]

    ```
    """
    if logits is not None:
        return -np.asarray(logits)

    if probs is None:
        raise ValueError("Either probabilities or logits are required.")

    probs = np.asarray(probs, dtype=np.float64)
    return np.log((1 - probs) / probs)
