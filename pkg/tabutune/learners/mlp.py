from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from scipy.special import expit

from tabutune.dataset import Dataset
from tabutune.learners.base import FitError, Learner, TrainedModel, check_binary
from tabutune.learners.params import MlpParams

logger = logging.getLogger(__name__)

# inputs beyond this magnitude were not min-max scaled
MAX_INPUT = 10.

Layer = tuple[np.ndarray, np.ndarray]


def init_layers(sizes: list[int], rng: np.random.Generator) -> list[Layer]:
    """
    Weights uniform in +-1/sqrt(fan_in), biases zero.
    """
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1 / math.sqrt(fan_in)
        weights = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        layers.append((weights, np.zeros(fan_out)))
    return layers


def forward(layers: list[Layer], rows: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
    """
    Activations of every layer (input first) and the output pre-activation.
    """
    activations = [rows]
    z = rows
    for index, (weights, bias) in enumerate(layers):
        z = activations[-1] @ weights + bias
        if index < len(layers) - 1:
            activations.append(expit(z))
    return activations, z[:, 0]


def loss_and_gradient(layers: list[Layer], rows: np.ndarray, labels: np.ndarray, alpha: float) -> tuple[float, list[Layer]]:
    """
    Mean cross-entropy plus alpha/2 * squared weight norm (biases unpenalized),
    the penalty taken per sample like the cross-entropy.
    """
    n = len(rows)
    activations, z = forward(layers, rows)

    penalty = sum(float(np.sum(weights**2)) for weights, _ in layers)
    loss = float(np.sum(np.logaddexp(0., z) - labels * z) + 0.5 * alpha * penalty) / n

    delta = ((expit(z) - labels) / n).reshape(-1, 1)
    gradients: list[Layer] = []
    for index in range(len(layers) - 1, -1, -1):
        weights, _ = layers[index]
        previous = activations[index]
        gradients.append((previous.T @ delta + alpha / n * weights, delta.sum(axis=0)))
        if index > 0:
            delta = (delta @ weights.T) * previous * (1 - previous)

    gradients.reverse()
    return loss, gradients


def pack(layers: list[Layer]) -> np.ndarray:
    return np.concatenate([np.concatenate([weights.ravel(), bias]) for weights, bias in layers])


def unpack(vector: np.ndarray, like: list[Layer]) -> list[Layer]:
    layers = []
    offset = 0
    for weights, bias in like:
        size = weights.size
        new_weights = vector[offset:offset + size].reshape(weights.shape)
        offset += size
        new_bias = vector[offset:offset + bias.size]
        offset += bias.size
        layers.append((new_weights, new_bias))
    return layers


class MlpModel(TrainedModel):
    kind = "mlp"

    def __init__(self, params: MlpParams, layers: list[Layer], n_features: int, feature_names: list[str] | None=None, train_loss: list[float] | None=None):
        super().__init__(n_features, feature_names)
        self.params = params
        self.layers = [(np.asarray(w, dtype=np.float64), np.asarray(b, dtype=np.float64)) for w, b in layers]
        self.train_loss = train_loss or []

    def __json__(self) -> dict[str, Any]:
        data = self._base_json()
        data.update({
            "params": self.params,
            "layers": [[weights.tolist(), bias.tolist()] for weights, bias in self.layers],
            "train_loss": self.train_loss,
        })
        return data

    @classmethod
    def __from_json__(cls, **data: Any) -> MlpModel:
        data["layers"] = [(np.array(weights), np.array(bias)) for weights, bias in data["layers"]]
        return cls(**data)

    def predict_proba(self, rows: np.ndarray) -> np.ndarray:
        _, z = forward(self.layers, rows)
        return expit(z)


def fit_mlp(train: Dataset, params: MlpParams, seed: int=0) -> MlpModel:
    """
    Three sigmoid hidden layers trained by full-batch gradient descent with momentum.
    """
    check_binary(train, "mlp")
    rows = train.values()
    if np.any(np.abs(rows) > MAX_INPUT):
        raise FitError(f"mlp: inputs exceed {MAX_INPUT} in magnitude, normalize first")
    labels = train.labels.astype(np.float64)

    rng = np.random.default_rng(seed)
    sizes = [train.n_features, *params.hidden_sizes, 1]
    layers = init_layers(sizes, rng)
    velocity = [(np.zeros_like(w), np.zeros_like(b)) for w, b in layers]

    train_loss = []
    for _ in range(params.epochs):
        loss, gradients = loss_and_gradient(layers, rows, labels, params.alpha)
        train_loss.append(loss)

        new_layers = []
        new_velocity = []
        for (weights, bias), (v_weights, v_bias), (g_weights, g_bias) in zip(layers, velocity, gradients):
            v_weights = params.momentum * v_weights - params.learning_rate * g_weights
            v_bias = params.momentum * v_bias - params.learning_rate * g_bias
            new_layers.append((weights + v_weights, bias + v_bias))
            new_velocity.append((v_weights, v_bias))
        layers = new_layers
        velocity = new_velocity

    if not np.isfinite(train_loss[-1]):
        raise FitError("mlp: training diverged")

    return MlpModel(params, layers, train.n_features, train.feature_names, train_loss)


class MlpLearner(Learner[MlpParams]):
    name = "mlp"
    params_type = MlpParams
    needs_normalization = True

    def fit(self, train: Dataset, params: MlpParams, seed: int=0) -> MlpModel:
        return fit_mlp(train, params, seed)

    def params_from_dict(self, values: dict[str, Any]) -> MlpParams:
        if "hidden_sizes" in values:
            return MlpParams.model_validate(values)
        return MlpParams.from_flat(values)
