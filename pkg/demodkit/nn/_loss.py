"""
Loss functions. Each returns `(loss, grad)` where `grad` has the shape of the
prediction. Losses are summed over the bits of a sample and averaged over the
batch (the leading axis; 1-D inputs count as a single sample).
"""

import numpy as np
from scipy.special import expit

# Probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] before taking logs.
PROB_EPS = 1e-7


def _check_labels(y) -> np.ndarray:
    y = np.asarray(y)

    if y.size and not np.isin(y, (0, 1)).all():
        raise ValueError("Binary cross-entropy labels must be 0 or 1.")

    return y.astype(np.float64)


def _batch_size(x) -> int:
    return x.shape[0] if x.ndim > 1 else 1


def bce_loss(y_hat, y):
    """
    Binary cross-entropy of probabilities `y_hat` against bit labels `y`.

    ##### Examples

    ```python
    >>> loss, grad = bce_loss([0.5], [1])
    >>> round(loss, 4)
    0.6931

    ```
    """
    y = _check_labels(y)
    y_hat = np.clip(np.asarray(y_hat, dtype=np.float64), PROB_EPS, 1 - PROB_EPS)

    if y_hat.shape != y.shape:
        raise ValueError(f"Predictions {y_hat.shape} and labels {y.shape} differ in shape")

    batch = _batch_size(y_hat)
    loss = -np.sum(y * np.log(y_hat) + (1 - y) * np.log1p(-y_hat)) / batch
    grad = (y_hat - y) / (y_hat * (1 - y_hat)) / batch
    return float(loss), grad


def bce_with_logits(logits, y):
    """
    Binary cross-entropy evaluated directly on logits, fusing the sigmoid.

    The per-bit loss is `max(z, 0) - z * y + log(1 + exp(-|z|))` and its
    gradient is `sigmoid(z) - y`.

    ##### Examples

    ```python
    >>> loss, grad = bce_with_logits([0.0], [1])
    >>> round(loss, 4), grad.tolist()
    (0.6931, [-0.5])

    ```
    """
    y = _check_labels(y)
    z = np.asarray(logits, dtype=np.float64)

    if z.shape != y.shape:
        raise ValueError(f"Logits {z.shape} and labels {y.shape} differ in shape")

    batch = _batch_size(z)
    loss = np.sum(np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))) / batch
    grad = (expit(z) - y) / batch
    return float(loss), grad


def mse_loss(prediction, target):
    """
    Squared error summed over each sample and averaged over the batch.

    ##### Examples

    ```python
    >>> loss, grad = mse_loss([[1.0, 2.0]], [[0.0, 4.0]])
    >>> loss, grad.tolist()
    (5.0, [[2.0, -4.0]])

    ```
    """
    prediction = np.asarray(prediction, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)

    if prediction.shape != target.shape:
        raise ValueError(
            f"Predictions {prediction.shape} and targets {target.shape} differ in shape"
        )

    batch = _batch_size(prediction)
    diff = prediction - target
    return float(np.sum(diff ** 2) / batch), 2 * diff / batch
