"""Tensor-product Chebyshev interpolation on [-1, 1]^d.

Nodes are the Chebyshev-Gauss points cos(pi*(k + 1/2)/n). Coefficients come
from a discrete cosine transform along each axis, and evaluation contracts
one axis at a time with the Clenshaw recurrence (numpy's chebval).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from config import CHEB_NODE_CAP
from errors import ConfigError


class CapacityError(ConfigError):
    """n^d exceeds the configured node cap."""


class DomainError(ConfigError):
    """Evaluation point outside [-1, 1]^d."""


class IncompleteValuesError(ConfigError):
    """Node values missing, extra or non-finite."""


_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class ChebGrid:
    points_per_dim: int
    dimension: int

    @property
    def size(self) -> int:
        return self.points_per_dim**self.dimension

    def nodes_1d(self) -> np.ndarray:
        return chebyshev_nodes(self.points_per_dim)


@dataclass(frozen=True)
class ChebCoeffs:
    """Coefficient tensor of shape (n,) * d; entry [j1, ..., jd] multiplies T_j1(x1)...T_jd(xd)."""

    values: np.ndarray

    @property
    def points_per_dim(self) -> int:
        return self.values.shape[0]

    @property
    def dimension(self) -> int:
        return self.values.ndim


def chebyshev_nodes(n: int) -> np.ndarray:
    if n < 1:
        raise ConfigError(f"need at least one node per dimension, got {n}")
    k = np.arange(n)
    return np.cos(np.pi * (k + 0.5) / n)


def check_capacity(n: int, d: int, cap: int = CHEB_NODE_CAP) -> int:
    if n < 1 or d < 1:
        raise ConfigError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    total = n**d
    if total > cap:
        raise CapacityError(f"{n}^{d} = {total} nodes exceeds the cap of {cap}")
    return total


def tensor_nodes(n: int, d: int, *, cap: int = CHEB_NODE_CAP) -> np.ndarray:
    """All n^d nodes as an (n^d, d) array in lexicographic order (first coordinate slowest)."""
    check_capacity(n, d, cap)
    axes = np.meshgrid(*([chebyshev_nodes(n)] * d), indexing="ij")
    return np.stack([a.reshape(-1) for a in axes], axis=1)


def _transform_matrix(n: int) -> np.ndarray:
    """Maps node values to Chebyshev coefficients along one axis."""
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    m = (2.0 / n) * np.cos(np.pi * j * (k + 0.5) / n)
    m[0, :] *= 0.5
    return m


def fit(values: np.ndarray, n: int, d: int) -> ChebCoeffs:
    """Coefficients of the interpolant through `values` given at tensor_nodes(n, d), in that order."""
    v = np.asarray(values)
    if v.size != n**d:
        raise IncompleteValuesError(f"expected {n**d} node values, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise IncompleteValuesError("node values must be finite")
    coeffs = v.reshape((n,) * d)
    transform = _transform_matrix(n)
    for axis in range(d):
        coeffs = np.moveaxis(np.tensordot(transform, coeffs, axes=([1], [axis])), 0, axis)
    return ChebCoeffs(values=coeffs)


def _check_domain(x: np.ndarray, d: int) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != d:
        raise DomainError(f"points have {x.shape[1]} coordinates, interpolant has {d}")
    if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0 + _DOMAIN_SLACK):
        raise DomainError("evaluation points must lie in [-1, 1]^d")
    return np.clip(x, -1.0, 1.0)


def eval_coeffs(coeffs: ChebCoeffs, x: np.ndarray) -> np.ndarray:
    """Interpolant values at the rows of x (shape (m, d) or (d,)); returns shape (m,)."""
    pts = _check_domain(x, coeffs.dimension)
    out = np.empty(pts.shape[0], dtype=coeffs.values.dtype)
    for i, p in enumerate(pts):
        v = coeffs.values
        for xk in p:
            v = C.chebval(xk, v, tensor=True)
        out[i] = v
    return out


__all__ = [
    "CapacityError",
    "DomainError",
    "IncompleteValuesError",
    "ChebGrid",
    "ChebCoeffs",
    "chebyshev_nodes",
    "check_capacity",
    "tensor_nodes",
    "fit",
    "eval_coeffs",
]
