from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np

from nnet import MemberPrediction


def pool_arrays(mu: np.ndarray, sigma: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pooled mean and variance over axis 0 (members).

    var* = mean(sigma_i^2 + mu_i^2) - mu*^2, evaluated as
    mean(sigma_i^2) + mean((mu_i - mu*)^2) so it never drops below the
    mean member variance through cancellation. Members are summed in sorted
    order, so any permutation of them gives bit-identical results.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if mu.shape != sigma.shape or mu.shape[0] < 1:
        raise ValueError(f"need matching (members, ...) arrays, got {mu.shape} and {sigma.shape}")
    order = np.lexsort((sigma, mu), axis=0)
    mu = np.take_along_axis(mu, order, axis=0)
    sigma = np.take_along_axis(sigma, order, axis=0)
    mu_star = np.mean(mu, axis=0)
    var_star = np.mean(sigma**2, axis=0) + np.mean((mu - mu_star) ** 2, axis=0)
    return mu_star, var_star


def pool(members: Sequence[MemberPrediction]) -> Tuple[float, float]:
    if not members:
        raise ValueError("pool needs at least one member")
    mu_star, var_star = pool_arrays([m.mu for m in members], [m.sigma for m in members])
    return float(mu_star), float(var_star)


__all__ = ["pool", "pool_arrays"]
