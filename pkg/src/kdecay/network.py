"""A small fully connected classifier with hand-written backprop.

The forward/backward pass is the analytic gradient of the mean softmax
cross-entropy over a batch; ``gradient_check`` verifies it against central
finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .errors import DivergenceError, DomainError

__all__ = [
    "MlpModel",
    "ModelSpec",
    "init_mlp",
    "forward_logits",
    "forward_backward",
    "gradient_check",
    "evaluate_error",
]

ACTIVATIONS = ("relu", "tanh")


@dataclass
class MlpModel:
    """Layer dimensions plus per-layer weight matrices and bias vectors."""

    dims: tuple[int, ...]
    weights: list[np.ndarray]  # weights[i]: (dims[i], dims[i+1])
    biases: list[np.ndarray]  # biases[i]: (dims[i+1],)
    activation: str = "tanh"

    def __post_init__(self):
        if len(self.dims) < 2:
            raise DomainError("model needs at least an input and an output layer")
        if self.activation not in ACTIVATIONS:
            raise DomainError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.dims[i], self.dims[i + 1]) or b.shape != (self.dims[i + 1],):
                raise DomainError(f"layer {i} parameter shapes inconsistent with dims {self.dims}")

    def copy(self) -> "MlpModel":
        return MlpModel(
            self.dims,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.activation,
        )

    def num_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass(frozen=True)
class ModelSpec:
    """Hidden-layer widths and activation; input/output widths come from the data."""

    hidden: tuple[int, ...] = (32, 32)
    activation: str = "tanh"

    def build(self, num_features: int, num_classes: int, seed: int) -> MlpModel:
        return init_mlp((num_features, *self.hidden, num_classes), self.activation, seed)


def init_mlp(dims, activation: str = "tanh", seed: int = 0) -> MlpModel:
    """Deterministic init: weights uniform in +/- sqrt(6/(fan_in+fan_out)), zero biases."""
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(dims, weights, biases, activation)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    return np.maximum(z, 0.0) if kind == "relu" else np.tanh(z)


def forward_logits(model: MlpModel, inputs: np.ndarray) -> np.ndarray:
    """Forward pass up to the (un-normalized) class scores."""
    if inputs.ndim != 2 or inputs.shape[1] != model.dims[0]:
        raise DomainError(
            f"inputs of shape {inputs.shape} do not match model input width {model.dims[0]}"
        )
    a = inputs
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = _activate(z, model.activation) if i < len(model.weights) - 1 else z
    return a


def forward_backward(model: MlpModel, inputs: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch and its exact parameter gradients.

    Returns ``(loss, grads)`` where ``grads`` is a list of ``(dW, db)``
    pairs matching the model's layers. Raises ``DivergenceError`` when the
    loss is non-finite.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels)
    if inputs.ndim != 2 or inputs.shape[1] != model.dims[0]:
        raise DomainError(
            f"inputs of shape {inputs.shape} do not match model input width {model.dims[0]}"
        )
    if labels.shape != (inputs.shape[0],):
        raise DomainError(f"labels shape {labels.shape} does not match batch of {inputs.shape[0]}")
    if labels.min() < 0 or labels.max() >= model.dims[-1]:
        raise DomainError("labels outside the model's class range")

    batch = inputs.shape[0]
    last = len(model.weights) - 1

    # Overflow here means the run is diverging; that is reported through
    # DivergenceError below rather than numpy warnings.
    with np.errstate(over="ignore", invalid="ignore"):
        # forward, caching post-activation values per layer
        activations = [inputs]
        a = inputs
        for i, (w, b) in enumerate(zip(model.weights, model.biases)):
            z = a @ w + b
            a = _activate(z, model.activation) if i < last else z
            activations.append(a)
        logits = activations[-1]

        # stable log-softmax cross-entropy
        shifted = logits - logits.max(axis=1, keepdims=True)
        log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_probs = shifted - log_norm
        loss = float(-log_probs[np.arange(batch), labels].mean())
    if not math.isfinite(loss):
        raise DivergenceError(f"non-finite loss {loss}")

    with np.errstate(over="ignore", invalid="ignore"):
        probs = np.exp(log_probs)
        delta = probs
        delta[np.arange(batch), labels] -= 1.0
        delta /= batch

        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(model.weights)
        for i in range(last, -1, -1):
            a_prev = activations[i]
            grads[i] = (a_prev.T @ delta, delta.sum(axis=0))
            if i > 0:
                delta = delta @ model.weights[i].T
                a_prev_act = activations[i]
                if model.activation == "relu":
                    delta = delta * (a_prev_act > 0.0)
                else:
                    delta = delta * (1.0 - a_prev_act**2)
    return loss, grads


def gradient_check(model: MlpModel, inputs, labels, num_checks: int = 50, seed: int = 0, step: float = 1e-5):
    """Compare analytic gradients against central finite differences.

    Samples ``num_checks`` parameter coordinates and returns the maximum
    relative error, with denominators floored at 1e-6 to keep near-zero
    coordinates from dominating.
    """
    rng = np.random.default_rng(seed)
    _, grads = forward_backward(model, inputs, labels)
    arrays = []
    for i, (dw, db) in enumerate(grads):
        arrays.append((model.weights[i], dw))
        arrays.append((model.biases[i], db))

    max_rel = 0.0
    for _ in range(num_checks):
        which = int(rng.integers(0, len(arrays)))
        param, grad = arrays[which]
        flat = int(rng.integers(0, param.size))
        idx = np.unravel_index(flat, param.shape)
        original = param[idx]
        param[idx] = original + step
        loss_plus, _ = forward_backward(model, inputs, labels)
        param[idx] = original - step
        loss_minus, _ = forward_backward(model, inputs, labels)
        param[idx] = original
        fd = (loss_plus - loss_minus) / (2.0 * step)
        analytic = grad[idx]
        rel = abs(analytic - fd) / max(abs(analytic), abs(fd), 1e-6)
        max_rel = max(max_rel, rel)
    return max_rel


def evaluate_error(model: MlpModel, dataset: Dataset, split: str) -> float:
    """Misclassification fraction under argmax; ties go to the lowest class index."""
    idx = dataset.split(split)
    if idx.size == 0:
        raise DomainError(f"split {split!r} is empty")
    logits = forward_logits(model, dataset.inputs[idx])
    predicted = np.argmax(logits, axis=1)  # argmax returns the first (lowest) index on ties
    return float(np.mean(predicted != dataset.labels[idx]))
