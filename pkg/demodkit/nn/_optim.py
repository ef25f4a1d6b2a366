from typing import Dict

import numpy as np

from demodkit.utils import nice_repr


@nice_repr
class AdamState:
    """
    Hyper-parameters and moment accumulators of the Adam optimizer.

    `m` and `v` map parameter names to first and second moment estimates and
    are created lazily on the first step; `t` counts the steps taken.
    """

    def __init__(
        self, lr: float = 0.003, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8
    ):
        if not lr > 0:
            raise ValueError(f"Learning rate must be positive, got {lr}")

        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise ValueError(f"Betas must lie in [0, 1), got beta1={beta1}, beta2={beta2}")

        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0


def adam_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamState):
    """
    Applies one bias-corrected Adam update to `params` in place.

    Returns `(params, state)`.

    ##### Examples

    ```python
    >>> w = {"w": np.array([0.0])}
    >>> _ = adam_step(w, {"w": np.array([1.0])}, AdamState(lr=0.1))
    >>> round(float(w["w"][0]), 6)
    -0.1

    ```
    """
    for name, param in params.items():
        if name not in grads:
            raise ValueError(f"Missing gradient for parameter '{name}'")

        if np.shape(grads[name]) != param.shape:
            raise ValueError(
                f"Gradient of '{name}' has shape {np.shape(grads[name])}, parameter has {param.shape}"
            )

    state.t += 1
    correction1 = 1 - state.beta1 ** state.t
    correction2 = 1 - state.beta2 ** state.t

    for name, param in params.items():
        grad = np.asarray(grads[name], dtype=np.float64)
        m = state.m.get(name)
        v = state.v.get(name)

        if m is None or m.shape != param.shape:
            m = np.zeros(param.shape, dtype=np.float64)
            v = np.zeros(param.shape, dtype=np.float64)

        m = state.beta1 * m + (1 - state.beta1) * grad
        v = state.beta2 * v + (1 - state.beta2) * grad ** 2
        state.m[name], state.v[name] = m, v

        update = state.lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        param -= update.astype(param.dtype)

    return params, state
