from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from nnet.mlp import MlpParams


@dataclass
class AdamState:
    """First/second moment estimates, one array per parameter array of the network."""

    m: List[np.ndarray]
    v: List[np.ndarray]
    step: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS


def adam_init(theta: MlpParams) -> AdamState:
    arrays = theta.arrays()
    return AdamState(m=[np.zeros_like(a) for a in arrays], v=[np.zeros_like(a) for a in arrays])


def adam_update(
    x: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    step: int,
    lr: float,
    beta1: float = ADAM_BETA1,
    beta2: float = ADAM_BETA2,
    eps: float = ADAM_EPS,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One bias-corrected Adam move of a single array; `step` is the 1-based step number."""
    m = beta1 * m + (1.0 - beta1) * g
    v = beta2 * v + (1.0 - beta2) * g * g
    m_hat = m / (1.0 - beta1**step)
    v_hat = v / (1.0 - beta2**step)
    return x - lr * m_hat / (np.sqrt(v_hat) + eps), m, v


def adam_step(theta: MlpParams, grad: MlpParams, state: AdamState, lr: float) -> Tuple[MlpParams, AdamState]:
    """Descend along `grad`; returns new parameters and the advanced optimizer state."""
    step = state.step + 1
    params, grads = theta.arrays(), grad.arrays()
    if [p.shape for p in params] != [g.shape for g in grads] or len(params) != len(state.m):
        raise ValueError("parameter, gradient and optimizer state shapes differ")
    new_arrays, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        p2, m2, v2 = adam_update(p, g, m, v, step, lr, state.beta1, state.beta2, state.eps)
        new_arrays.append(p2)
        new_m.append(m2)
        new_v.append(v2)
    out = MlpParams(
        weights=new_arrays[0::2],
        biases=new_arrays[1::2],
        tanh_scale=theta.tanh_scale,
        sigma_floor=theta.sigma_floor,
    )
    return out, AdamState(m=new_m, v=new_v, step=step, beta1=state.beta1, beta2=state.beta2, eps=state.eps)


__all__ = ["AdamState", "adam_init", "adam_update", "adam_step"]
