from __future__ import annotations

from typing import Callable, Dict

import numpy as np

from geometry import BoundsError, FrequencyId, ParamVector, normalize
from surrogate.ensemble import Ensemble

BatchFn = Callable[[np.ndarray], np.ndarray]


def finite_difference_hessian(fn: BatchFn, x0: np.ndarray, h: float) -> np.ndarray:
    """Central-difference Hessian of a scalar function.

    `fn` maps an (m, d) array of points to m values; all stencil points are
    evaluated in one call.
    """
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    eye = np.eye(d) * h
    points = [x0]
    for i in range(d):
        points += [x0 + eye[i], x0 - eye[i]]
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for i, j in pairs:
        points += [x0 + eye[i] + eye[j], x0 + eye[i] - eye[j], x0 - eye[i] + eye[j], x0 - eye[i] - eye[j]]
    values = np.asarray(fn(np.array(points)), dtype=float)

    f0 = values[0]
    H = np.empty((d, d))
    for i in range(d):
        H[i, i] = (values[1 + 2 * i] - 2.0 * f0 + values[2 + 2 * i]) / h**2
    base = 1 + 2 * d
    for k, (i, j) in enumerate(pairs):
        pp, pm, mp, mm = values[base + 4 * k : base + 4 * k + 4]
        H[i, j] = H[j, i] = (pp - pm - mp + mm) / (4.0 * h**2)
    return H


def singular_values(H: np.ndarray) -> np.ndarray:
    return np.sort(np.linalg.svd(H, compute_uv=False))[::-1]


def hessian_spectrum(e: Ensemble, p: ParamVector, f: FrequencyId, h: float = 0.05) -> Dict[str, np.ndarray]:
    """Singular values of the Hessian of mu* (per part) in normalized coordinates, sorted descending."""
    x0 = normalize(p, e.spec)
    if not h > 0:
        raise ValueError("step h must be > 0")
    if np.any(np.abs(x0) > 1.0 - h):
        raise BoundsError(f"point lies within {h} of the bounds in normalized coordinates")
    one_hot = f.one_hot()

    def _part(attr: str) -> BatchFn:
        def fn(Z: np.ndarray) -> np.ndarray:
            X = np.hstack([Z, np.tile(one_hot, (Z.shape[0], 1))])
            return getattr(e.predict_encoded(X), attr)

        return fn

    return {
        "re": singular_values(finite_difference_hessian(_part("mu_re"), x0, h)),
        "im": singular_values(finite_difference_hessian(_part("mu_im"), x0, h)),
    }


__all__ = ["finite_difference_hessian", "singular_values", "hessian_spectrum"]
