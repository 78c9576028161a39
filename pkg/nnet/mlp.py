"""Fully connected ReLU network with a (mu, sigma) output head.

Layout: input -> hidden ReLU layers -> 2 outputs (a, b) with
mu = tanh_scale * tanh(a) and sigma = softplus(b) + sigma_floor.
Weights are stored (fan_in, fan_out) so a batch X of shape (n, fan_in)
propagates as X @ W + b. All reverse-mode derivatives are written out by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import expit

from config import NN_HIDDEN, NN_INPUT_SIZE, NN_SIGMA_FLOOR, NN_TANH_SCALE
from errors import NumericFailure


class NumericError(NumericFailure):
    """Non-finite input, output or loss in the network."""


@dataclass
class MlpParams:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    tanh_scale: float = NN_TANH_SCALE
    sigma_floor: float = NN_SIGMA_FLOOR

    @property
    def layer_sizes(self) -> Tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            tanh_scale=self.tanh_scale,
            sigma_floor=self.sigma_floor,
        )

    def zeros_like(self) -> "MlpParams":
        return MlpParams(
            weights=[np.zeros_like(w) for w in self.weights],
            biases=[np.zeros_like(b) for b in self.biases],
            tanh_scale=self.tanh_scale,
            sigma_floor=self.sigma_floor,
        )

    def arrays(self) -> List[np.ndarray]:
        """Weights and biases interleaved per layer (W0, b0, W1, b1, ...)."""
        out: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.arrays())


@dataclass(frozen=True)
class MemberPrediction:
    mu: float
    sigma: float


@dataclass
class _Tape:
    inputs: List[np.ndarray] = field(default_factory=list)  # input to each layer
    pre: List[np.ndarray] = field(default_factory=list)  # pre-activation of each layer


def init_params(
    rng: np.random.Generator,
    sizes: Sequence[int] | None = None,
    *,
    tanh_scale: float = NN_TANH_SCALE,
    sigma_floor: float = NN_SIGMA_FLOOR,
) -> MlpParams:
    """He-uniform weights (bound sqrt(6 / fan_in)) and zero biases."""
    sizes = tuple(sizes) if sizes is not None else (NN_INPUT_SIZE, *NN_HIDDEN, 2)
    if len(sizes) < 2 or sizes[-1] != 2 or min(sizes) < 1:
        raise ValueError(f"layer sizes must end in the 2-unit head, got {sizes}")
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights=weights, biases=biases, tanh_scale=tanh_scale, sigma_floor=sigma_floor)


def _as_batch(x: np.ndarray, theta: MlpParams) -> np.ndarray:
    X = np.atleast_2d(np.asarray(x, dtype=float))
    if X.shape[1] != theta.weights[0].shape[0]:
        raise ValueError(f"expected {theta.weights[0].shape[0]} input features, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise NumericError("non-finite network input")
    return X


def _run(theta: MlpParams, X: np.ndarray) -> Tuple[np.ndarray, _Tape]:
    tape = _Tape()
    h = X
    last = len(theta.weights) - 1
    for i, (w, b) in enumerate(zip(theta.weights, theta.biases)):
        tape.inputs.append(h)
        z = h @ w + b
        tape.pre.append(z)
        h = z if i == last else np.maximum(z, 0.0)
    return h, tape


def _head(theta: MlpParams, out: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mu = theta.tanh_scale * np.tanh(out[:, 0])
    sigma = np.logaddexp(0.0, out[:, 1]) + theta.sigma_floor
    return mu, sigma


def forward_batch(theta: MlpParams, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """mu and sigma arrays of shape (n,) for an (n, inputs) batch."""
    out, _ = _run(theta, _as_batch(X, theta))
    return _head(theta, out)


def forward(theta: MlpParams, x: np.ndarray) -> MemberPrediction:
    mu, sigma = forward_batch(theta, x)
    return MemberPrediction(mu=float(mu[0]), sigma=float(sigma[0]))


def nll(pred: MemberPrediction, y: float) -> float:
    """Gaussian negative log-likelihood without the constant: log sigma + (y - mu)^2 / (2 sigma^2)."""
    return float(np.log(pred.sigma) + (y - pred.mu) ** 2 / (2.0 * pred.sigma**2))


def nll_batch(mu: np.ndarray, sigma: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.log(sigma) + (y - mu) ** 2 / (2.0 * sigma**2)))


def _backprop(theta: MlpParams, tape: _Tape, d_out: np.ndarray) -> Tuple[MlpParams, np.ndarray]:
    """Push d(loss)/d(pre-activation of the last layer) back through the network."""
    grad = theta.zeros_like()
    dz = d_out
    for i in range(len(theta.weights) - 1, -1, -1):
        grad.weights[i] = tape.inputs[i].T @ dz
        grad.biases[i] = dz.sum(axis=0)
        dh = dz @ theta.weights[i].T
        if i > 0:
            dz = dh * (tape.pre[i - 1] > 0.0)
    return grad, dh


def backward(theta: MlpParams, x: np.ndarray, y: np.ndarray) -> Tuple[float, MlpParams]:
    """Mean nll over the batch and its exact gradient with respect to every parameter."""
    X = _as_batch(x, theta)
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
    out, tape = _run(theta, X)
    mu, sigma = _head(theta, out)
    loss = nll_batch(mu, sigma, y)
    if not np.isfinite(loss):
        raise NumericError("non-finite training loss", {"loss": loss})

    n = X.shape[0]
    resid = y - mu
    d_mu = -resid / sigma**2 / n
    d_sigma = (1.0 / sigma - resid**2 / sigma**3) / n
    th = np.tanh(out[:, 0])
    d_out = np.empty_like(out)
    d_out[:, 0] = d_mu * theta.tanh_scale * (1.0 - th**2)
    d_out[:, 1] = d_sigma * expit(out[:, 1])
    grad, _ = _backprop(theta, tape, d_out)
    return loss, grad


def input_gradient_batch(theta: MlpParams, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """d mu / dx and d sigma / dx, each of shape (n, inputs)."""
    X = _as_batch(X, theta)
    out, tape = _run(theta, X)
    th = np.tanh(out[:, 0])
    seeds = (
        np.column_stack([theta.tanh_scale * (1.0 - th**2), np.zeros(len(X))]),
        np.column_stack([np.zeros(len(X)), expit(out[:, 1])]),
    )
    grads = []
    for d_out in seeds:
        _, dx = _backprop(theta, tape, d_out)
        grads.append(dx)
    return grads[0], grads[1]


def input_gradient(theta: MlpParams, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d_mu, d_sigma = input_gradient_batch(theta, x)
    return d_mu[0], d_sigma[0]


def min_abs_preactivation(theta: MlpParams, x: np.ndarray) -> float:
    """Distance of the nearest hidden unit from its ReLU kink at x."""
    _, tape = _run(theta, _as_batch(x, theta))
    hidden = tape.pre[:-1]
    return float(min(np.min(np.abs(z)) for z in hidden)) if hidden else float("inf")


__all__ = [
    "NumericError",
    "MlpParams",
    "MemberPrediction",
    "init_params",
    "forward",
    "forward_batch",
    "nll",
    "nll_batch",
    "backward",
    "input_gradient",
    "input_gradient_batch",
    "min_abs_preactivation",
]
