# # `demodkit.nn._layers`

"""
One-dimensional layers with hand-written backward passes.

Every layer works on `(batch, channels, length)` arrays. A layer caches what
its backward pass needs during `forward`, and `backward(grad_out)` fills
`layer.grads` (same keys as `layer.params`) and returns the gradient with
respect to the layer input.

Parameters live in the layer `dtype` (`float32` unless stated otherwise);
reductions over the batch accumulate in `float64`.
"""

from typing import Dict

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from demodkit.sampling import Rng, as_rng


# Standard deviation of the Gaussian weight initialization.
INIT_STD = 0.05

MODES = ("train", "infer")


def _check_input(x, channels: int, layer) -> np.ndarray:
    x = np.asarray(x)

    if x.ndim != 3:
        raise ValueError(
            f"{layer} expects a (batch, channels, length) array, got shape {x.shape}"
        )

    if x.shape[1] != channels:
        raise ValueError(
            f"{layer} expects {channels} input channels, got {x.shape[1]} (input shape {x.shape})"
        )

    return x


class Layer:
    """
    Base class of all layers.

    Subclasses define `kind`, fill `params` with their trainable arrays and
    implement `forward`, `backward` and `ops`.
    """

    kind = None

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.mode = "train"

    def set_mode(self, mode: str):
        if mode not in MODES:
            raise ValueError(f"Unknown mode '{mode}', must be one of: {', '.join(MODES)}.")

        self.mode = mode

    def forward(self, x) -> np.ndarray:
        raise NotImplementedError()

    def backward(self, grad_out) -> np.ndarray:
        raise NotImplementedError()

    def output_length(self, length: int) -> int:
        return length

    def ops(self, length: int) -> Dict[str, int]:
        """Exact operation counts for an input of `length` samples (batch of 1)."""
        return dict(mult=0, add=0, compare=0, exp_log=0)

    def _check_cache(self, name="_x"):
        if getattr(self, name, None) is None:
            raise TypeError(f"{self} must run forward before backward.")

    def __repr__(self):
        return f"{self.__class__.__name__}()"


class Conv1d(Layer):
    """
    Stride-1 convolution (cross-correlation) with "same" zero padding.

    Output sample `n` of channel `o` is
    `bias[o] + sum_{c, j} weight[o, c, j] * x[c, n + j - left]`, where
    `left = (kernel_size - 1) // 2`.

    ##### Examples

    ```python
    >>> conv = Conv1d(1, 1, 3, dtype=np.float64)
    >>> conv.params["weight"][:] = 1.0
    >>> conv.forward(np.array([[[1.0, 2.0, 3.0]]])).tolist()
    [[[3.0, 6.0, 5.0]]]

    ```
    """

    kind = "conv"

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        rng: Rng = None,
        dtype=np.float32,
    ):
        super().__init__(dtype)

        if min(in_channels, out_channels, kernel_size) < 1:
            raise ValueError(
                f"Channels and kernel size must be positive, got in={in_channels}, "
                f"out={out_channels}, kernel={kernel_size}"
            )

        rng = as_rng(rng)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.left = (kernel_size - 1) // 2
        self.right = kernel_size - 1 - self.left
        self.params = {
            "weight": rng.normal((out_channels, in_channels, kernel_size), INIT_STD).astype(
                self.dtype
            ),
            "bias": np.zeros(out_channels, dtype=self.dtype),
        }
        self._windows = None

    def __repr__(self):
        return f"Conv1d({self.in_channels}, {self.out_channels}, kernel_size={self.kernel_size})"

    def forward(self, x) -> np.ndarray:
        x = _check_input(x, self.in_channels, self).astype(self.dtype, copy=False)
        padded = np.pad(x, ((0, 0), (0, 0), (self.left, self.right)))
        # (batch, in, length, kernel)
        self._windows = sliding_window_view(padded, self.kernel_size, axis=2)
        out = np.tensordot(self._windows, self.params["weight"], axes=([1, 3], [1, 2]))
        return out.transpose(0, 2, 1) + self.params["bias"][None, :, None]

    def backward(self, grad_out) -> np.ndarray:
        self._check_cache("_windows")
        grad_out = np.asarray(grad_out, dtype=self.dtype)
        length = grad_out.shape[2]

        self.grads = {
            "weight": np.tensordot(grad_out, self._windows, axes=([0, 2], [0, 2])).astype(
                self.dtype
            ),
            "bias": grad_out.sum(axis=(0, 2), dtype=np.float64).astype(self.dtype),
        }

        k = self.kernel_size
        padded = np.pad(grad_out, ((0, 0), (0, 0), (k - 1, k - 1)))
        windows = sliding_window_view(padded, k, axis=2)
        flipped = self.params["weight"][:, :, ::-1]
        grad_padded = np.tensordot(windows, flipped, axes=([1, 3], [0, 2])).transpose(0, 2, 1)
        return grad_padded[:, :, self.left : self.left + length]

    def ops(self, length: int):
        macs = self.in_channels * self.kernel_size * self.out_channels * length
        return dict(mult=macs, add=macs, compare=0, exp_log=0)


class Deconv1d(Layer):
    """
    Transposed convolution with kernel length and stride both equal to
    `stride`, so the output is exactly `stride` times longer than the input.

    `out[o, n * stride + j] = bias[o] + sum_c x[c, n] * weight[o, c, j]`.

    ##### Examples

    ```python
    >>> deconv = Deconv1d(1, 1, 2, dtype=np.float64)
    >>> deconv.params["weight"][:] = 1.0
    >>> deconv.forward(np.array([[[1.0, 2.0]]])).tolist()
    [[[1.0, 1.0, 2.0, 2.0]]]

    ```
    """

    kind = "deconv"

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        stride: int,
        rng: Rng = None,
        dtype=np.float32,
    ):
        super().__init__(dtype)

        if min(in_channels, out_channels, stride) < 1:
            raise ValueError(
                f"Channels and stride must be positive, got in={in_channels}, "
                f"out={out_channels}, stride={stride}"
            )

        rng = as_rng(rng)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.stride = stride
        self.params = {
            "weight": rng.normal((out_channels, in_channels, stride), INIT_STD).astype(
                self.dtype
            ),
            "bias": np.zeros(out_channels, dtype=self.dtype),
        }
        self._x = None

    def __repr__(self):
        return f"Deconv1d({self.in_channels}, {self.out_channels}, stride={self.stride})"

    def output_length(self, length: int) -> int:
        return length * self.stride

    def forward(self, x) -> np.ndarray:
        x = _check_input(x, self.in_channels, self).astype(self.dtype, copy=False)
        self._x = x
        batch, _, length = x.shape
        out = np.einsum("bcn,ocj->bonj", x, self.params["weight"])
        out = out.reshape(batch, self.out_channels, length * self.stride)
        return out + self.params["bias"][None, :, None]

    def backward(self, grad_out) -> np.ndarray:
        self._check_cache()
        grad_out = np.asarray(grad_out, dtype=self.dtype)
        batch, _, length = self._x.shape
        grouped = grad_out.reshape(batch, self.out_channels, length, self.stride)

        self.grads = {
            "weight": np.einsum("bonj,bcn->ocj", grouped, self._x),
            "bias": grad_out.sum(axis=(0, 2), dtype=np.float64).astype(self.dtype),
        }
        return np.einsum("bonj,ocj->bcn", grouped, self.params["weight"])

    def ops(self, length: int):
        macs = self.in_channels * self.out_channels * self.stride * length
        return dict(mult=macs, add=macs, compare=0, exp_log=0)


class BatchNorm1d(Layer):
    """
    Per-channel batch normalization followed by the affine map `gamma * x + beta`.

    In train mode the statistics are taken over batch and length, and the running
    statistics are updated with `momentum`. The running statistics start unset;
    the first train step initializes them to zero mean and unit variance before
    applying the update. In infer mode the running statistics normalize the input,
    and using infer mode before any train step raises `TypeError`.
    """

    kind = "bn"

    def __init__(
        self, channels: int, momentum: float = 0.1, eps: float = 1e-5, dtype=np.float32
    ):
        super().__init__(dtype)

        if channels < 1:
            raise ValueError(f"Channels must be positive, got {channels}")

        if not 0 < momentum <= 1:
            raise ValueError(f"Momentum must lie in (0, 1], got {momentum}")

        self.channels = channels
        self.momentum = momentum
        self.eps = eps
        self.params = {
            "gamma": np.ones(channels, dtype=self.dtype),
            "beta": np.zeros(channels, dtype=self.dtype),
        }
        self.running_mean = None
        self.running_var = None
        self.num_batches_tracked = 0
        self._xhat = None
        self._inv_std = None

    def __repr__(self):
        return f"BatchNorm1d({self.channels})"

    @property
    def initialized(self) -> bool:
        return self.running_mean is not None

    def forward(self, x) -> np.ndarray:
        x = _check_input(x, self.channels, self).astype(self.dtype, copy=False)

        if self.mode == "train":
            mean = x.mean(axis=(0, 2), dtype=np.float64)
            var = x.var(axis=(0, 2), dtype=np.float64)
            self._update_running(mean, var, x.shape[0] * x.shape[2])
        else:
            if not self.initialized:
                raise TypeError(
                    "Batch normalization has no running statistics yet; run at least one train step before inference."
                )

            mean, var = self.running_mean, self.running_var

        inv_std = (1.0 / np.sqrt(var + self.eps)).astype(self.dtype)
        self._inv_std = inv_std
        self._xhat = (x - mean[None, :, None].astype(self.dtype)) * inv_std[None, :, None]
        return self._xhat * self.params["gamma"][None, :, None] + self.params["beta"][None, :, None]

    def _update_running(self, mean, var, count):
        if not self.initialized:
            self.running_mean = np.zeros(self.channels, dtype=self.dtype)
            self.running_var = np.ones(self.channels, dtype=self.dtype)

        unbiased = var * count / max(count - 1, 1)
        m = self.momentum
        self.running_mean = ((1 - m) * self.running_mean + m * mean).astype(self.dtype)
        self.running_var = ((1 - m) * self.running_var + m * unbiased).astype(self.dtype)
        self.num_batches_tracked += 1

    def backward(self, grad_out) -> np.ndarray:
        self._check_cache("_xhat")
        grad_out = np.asarray(grad_out, dtype=self.dtype)
        xhat = self._xhat
        gamma = self.params["gamma"][None, :, None]

        self.grads = {
            "gamma": (grad_out * xhat).sum(axis=(0, 2), dtype=np.float64).astype(self.dtype),
            "beta": grad_out.sum(axis=(0, 2), dtype=np.float64).astype(self.dtype),
        }

        grad_xhat = grad_out * gamma
        inv_std = self._inv_std[None, :, None]

        if self.mode != "train":
            return grad_xhat * inv_std

        count = xhat.shape[0] * xhat.shape[2]
        sum_grad = grad_xhat.sum(axis=(0, 2), keepdims=True, dtype=np.float64)
        sum_grad_xhat = (grad_xhat * xhat).sum(axis=(0, 2), keepdims=True, dtype=np.float64)
        grad_x = (count * grad_xhat - sum_grad - xhat * sum_grad_xhat) * (inv_std / count)
        return grad_x.astype(self.dtype)

    def ops(self, length: int):
        # folded into one scale and one shift per element at inference
        elements = self.channels * length
        return dict(mult=elements, add=elements, compare=0, exp_log=0)


class ReLU(Layer):
    """
    ##### Examples

    ```python
    >>> ReLU(channels=1).forward(np.array([[[-1.0, 0.0, 2.0]]])).tolist()
    [[[0.0, 0.0, 2.0]]]

    ```
    """

    kind = "relu"

    def __init__(self, channels: int, dtype=np.float32):
        super().__init__(dtype)
        self.channels = channels
        self._mask = None

    def __repr__(self):
        return f"ReLU({self.channels})"

    def forward(self, x) -> np.ndarray:
        x = _check_input(x, self.channels, self)
        self._mask = x > 0
        return np.where(self._mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, grad_out) -> np.ndarray:
        self._check_cache("_mask")
        return np.where(self._mask, grad_out, 0)

    def ops(self, length: int):
        return dict(mult=0, add=0, compare=self.channels * length, exp_log=0)


def sigmoid(z) -> np.ndarray:
    """
    The logistic function `1 / (1 + exp(-z))`, stable for large `|z|`.

    ##### Examples

    ```python
    >>> float(sigmoid(0.0))
    0.5

    ```
    """
    return expit(z)


class Sigmoid(Layer):
    kind = "sigmoid"

    def __init__(self, channels: int = 1, dtype=np.float32):
        super().__init__(dtype)
        self.channels = channels
        self._y = None

    def __repr__(self):
        return f"Sigmoid({self.channels})"

    def forward(self, x) -> np.ndarray:
        x = _check_input(x, self.channels, self)
        self._y = sigmoid(x)
        return self._y

    def backward(self, grad_out) -> np.ndarray:
        self._check_cache("_y")
        return grad_out * self._y * (1 - self._y)

    def ops(self, length: int):
        # one exponential, one addition and one division per element
        elements = self.channels * length
        return dict(mult=elements, add=elements, compare=0, exp_log=elements)
