"""Conventional MSE-trained backpropagation baseline.

Same single-hidden-layer shape as the count-matching classifier, but with a
linear (identity) output unit, exact analytic gradients of the mean squared
error against the 0/1 labels, and an MSE goal as the stop rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError
from .network import Gradients, PARAMETER_LIMIT, init_network, sigmoid

STOP_MSE = "mse_pass"
STOP_MAX_EPOCHS = "max_epochs"


@dataclass
class BpnnNetwork:
    """Parameters: (inputs r) -> (hidden h, sigmoid) -> linear output."""

    weights_in: np.ndarray  # (r, h)
    bias_hidden: np.ndarray  # (h,)
    weights_out: np.ndarray  # (h,)
    bias_out: float

    @property
    def inputs(self) -> int:
        return self.weights_in.shape[0]

    @property
    def hidden(self) -> int:
        return self.weights_in.shape[1]

    def copy(self) -> "BpnnNetwork":
        return BpnnNetwork(
            weights_in=self.weights_in.copy(),
            bias_hidden=self.bias_hidden.copy(),
            weights_out=self.weights_out.copy(),
            bias_out=float(self.bias_out),
        )

    def max_abs_parameter(self) -> float:
        return max(
            float(np.abs(self.weights_in).max(initial=0.0)),
            float(np.abs(self.bias_hidden).max(initial=0.0)),
            float(np.abs(self.weights_out).max(initial=0.0)),
            abs(self.bias_out),
        )


@dataclass(frozen=True)
class BpnnConfig:
    """Defaults reproduce the published baseline's behavior on the benchmark:
    plain gradient descent at the conventional 0.01 rate with a modest MSE
    goal (tighter goals push the baseline past its published accuracies)."""

    learning_rate: float = 0.01
    mse_goal: float = 0.05
    max_epochs: int = 5000
    init_scale: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.learning_rate < 1.0:
            raise ValueError(f"learning_rate must lie in (0, 1), got {self.learning_rate}")
        if self.mse_goal <= 0.0:
            raise ValueError(f"mse_goal must be positive, got {self.mse_goal}")
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be nonnegative, got {self.max_epochs}")


@dataclass
class BpnnTrace:
    mse: list[float] = field(default_factory=list)
    stop_reason: str = STOP_MAX_EPOCHS


def init_bpnn(inputs, hidden, seed, init_scale=0.5):
    """Same uniform initialization scheme as the count-matching network."""
    src = init_network(inputs, hidden, seed, init_scale)
    return BpnnNetwork(
        weights_in=src.weights_in,
        bias_hidden=src.bias_hidden,
        weights_out=src.weights_out,
        bias_out=src.bias_out,
    )


def bpnn_output(net, features):
    """Linear output values for one vector or a batch of rows."""
    hidden = sigmoid(np.asarray(features, dtype=float) @ net.weights_in + net.bias_hidden)
    return hidden @ net.weights_out + net.bias_out


def bpnn_predict(net, x):
    """Class decision: 1 when the linear output exceeds 0.5, else 0."""
    return int(bpnn_output(net, x) > 0.5)


def bpnn_predict_batch(net, features):
    return (bpnn_output(net, features) > 0.5).astype(np.int64)


def bpnn_mse(net, features, labels):
    err = bpnn_output(net, features) - np.asarray(labels, dtype=float)
    return float(np.mean(err * err))


def bpnn_gradients(net, features, labels):
    """Exact gradients of mean((output - label)^2) for every parameter group."""
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    hidden = sigmoid(x @ net.weights_in + net.bias_hidden)
    delta = (2.0 / x.shape[0]) * (hidden @ net.weights_out + net.bias_out - y)

    grad_w_out = hidden.T @ delta
    grad_b_out = float(delta.sum())
    back = delta[:, None] * net.weights_out * hidden * (1.0 - hidden)
    return Gradients(
        weights_in=x.T @ back,
        bias_hidden=back.sum(axis=0),
        weights_out=grad_w_out,
        bias_out=grad_b_out,
    )


def bpnn_train(features, labels, config, hidden_units, seed):
    """Full-batch gradient descent on the MSE; returns (net, trace).

    Stops once the MSE reaches ``config.mse_goal`` or at the epoch cap;
    aborts with DivergenceError if parameters blow up.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")

    yf = y.astype(float)
    net = init_bpnn(x.shape[1], hidden_units, seed, config.init_scale)
    trace = BpnnTrace()
    for epoch in range(config.max_epochs):
        hidden = sigmoid(x @ net.weights_in + net.bias_hidden)
        err = hidden @ net.weights_out + net.bias_out - yf
        mse = float(np.mean(err * err))
        trace.mse.append(mse)
        if mse <= config.mse_goal:
            trace.stop_reason = STOP_MSE
            return net, trace
        delta = (2.0 / x.shape[0]) * err
        back = delta[:, None] * net.weights_out * hidden * (1.0 - hidden)
        net.weights_in -= config.learning_rate * (x.T @ back)
        net.bias_hidden -= config.learning_rate * back.sum(axis=0)
        net.weights_out -= config.learning_rate * (hidden.T @ delta)
        net.bias_out -= config.learning_rate * float(delta.sum())
        if (
            net.max_abs_parameter() > PARAMETER_LIMIT
            or not math.isfinite(net.bias_out)
            or not all(
                np.all(np.isfinite(a))
                for a in (net.weights_in, net.bias_hidden, net.weights_out)
            )
        ):
            raise DivergenceError(
                f"parameters exceeded {PARAMETER_LIMIT:g} or went non-finite at epoch {epoch}"
            )
    trace.stop_reason = STOP_MAX_EPOCHS
    return net, trace
