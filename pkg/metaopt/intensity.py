"""Ensemble-mean focal intensity, the worst-case objective and its gradient.

With t_cell = mu + sigma * eps and E(eps) = 0, E(eps^2) = 1:
  global   (one eps shared by all cells):  E|E|^2 = |sum G(-mu)|^2 + |sum G sigma|^2
  per_cell (independent eps per cell):     E|E|^2 = |sum G(-mu)|^2 + sum |G sigma|^2
where mu = mu_re + i mu_im and sigma = sigma_re + i sigma_im per cell.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np
from scipy.special import logsumexp, softmax

from errors import ConfigError
from geometry import ALL_FREQUENCIES, FrequencyId
from surrogate import Ensemble
from metaopt.design import MetasurfaceDesign, NoiseModel
from metaopt.field import kernel_matrix, surrogate_prediction


def _intensity(K: np.ndarray, mu: np.ndarray, sigma: np.ndarray, noise_model: NoiseModel) -> np.ndarray:
    mean_field = K @ (-mu)
    if noise_model == "global":
        spread = np.abs(K @ sigma) ** 2
    elif noise_model == "per_cell":
        spread = np.abs(K) ** 2 @ np.abs(sigma) ** 2
    else:
        raise ConfigError(f"unknown noise model '{noise_model}'")
    return np.abs(mean_field) ** 2 + spread


def expected_intensity(
    points: np.ndarray,
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    f: FrequencyId,
    *,
    noise_model: NoiseModel = "global",
) -> np.ndarray:
    pred = surrogate_prediction(design, ensemble, f)
    sigma = np.sqrt(pred.var_re) + 1j * np.sqrt(pred.var_im)
    return _intensity(kernel_matrix(points, design, f), pred.mu, sigma, noise_model)


def focal_intensities(
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    *,
    noise_model: NoiseModel = "global",
) -> np.ndarray:
    """Expected intensity at each frequency's own focal point, ordered blue, green, red."""
    return np.array(
        [
            float(expected_intensity(np.array([design.focal.point(f)]), design, ensemble, f, noise_model=noise_model)[0])
            for f in ALL_FREQUENCIES
        ]
    )


def objective(
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    *,
    noise_model: NoiseModel = "global",
) -> Tuple[float, np.ndarray]:
    """(worst case, per-wavelength focal intensities)."""
    per_wavelength = focal_intensities(design, ensemble, noise_model=noise_model)
    return float(np.min(per_wavelength)), per_wavelength


def softmin(values: np.ndarray, beta: float) -> float:
    """-(1/beta) log sum exp(-beta * values); tends to min(values) as beta grows."""
    return float(-logsumexp(-beta * np.asarray(values, dtype=float)) / beta)


def _focal_gradient(
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    f: FrequencyId,
    noise_model: NoiseModel,
) -> Tuple[float, np.ndarray]:
    """Focal intensity at f and its gradient w.r.t. the normalized widths, shape (N, layers)."""
    g = kernel_matrix(np.array([design.focal.point(f)]), design, f)[0]
    X = ensemble.encode(design.cells, [f.value] * design.n_cells)
    re, im = ensemble.gradient_encoded(X)
    mu = re.mu + 1j * im.mu
    sigma = re.sigma + 1j * im.sigma
    A = np.sum(g * (-mu))
    if noise_model == "global":
        B = np.sum(g * sigma)
        value = abs(A) ** 2 + abs(B) ** 2
        d_sig_re = 2.0 * np.real(np.conj(B) * g)
        d_sig_im = 2.0 * np.real(np.conj(B) * 1j * g)
    elif noise_model == "per_cell":
        g2 = np.abs(g) ** 2
        value = abs(A) ** 2 + float(np.sum(g2 * np.abs(sigma) ** 2))
        d_sig_re = 2.0 * g2 * re.sigma
        d_sig_im = 2.0 * g2 * im.sigma
    else:
        raise ConfigError(f"unknown noise model '{noise_model}'")
    d_mu_re = 2.0 * np.real(np.conj(A) * (-g))
    d_mu_im = 2.0 * np.real(np.conj(A) * (-1j * g))

    n_geom = design.spec.layer_count
    grad = (
        d_mu_re[:, None] * re.d_mu[:, :n_geom]
        + d_mu_im[:, None] * im.d_mu[:, :n_geom]
        + d_sig_re[:, None] * re.d_sigma[:, :n_geom]
        + d_sig_im[:, None] * im.d_sigma[:, :n_geom]
    )
    return float(value), grad


def soft_objective(
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    beta: float,
    *,
    noise_model: NoiseModel = "global",
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Softened worst case, per-wavelength intensities, and the gradient (N, layers) in normalized widths."""
    values, grads = [], []
    for f in ALL_FREQUENCIES:
        v, gr = _focal_gradient(design, ensemble, f, noise_model)
        values.append(v)
        grads.append(gr)
    intensities = np.array(values)
    weights = softmax(-beta * intensities)
    grad = np.tensordot(weights, np.stack(grads), axes=1)
    return softmin(intensities, beta), intensities, grad


def gradient(
    design: MetasurfaceDesign,
    ensemble: Ensemble,
    beta: float,
    *,
    noise_model: NoiseModel = "global",
) -> np.ndarray:
    return soft_objective(design, ensemble, beta, noise_model=noise_model)[2]


def intensity_report(per_wavelength: np.ndarray) -> Dict[str, float]:
    return {f"i_{f.label}": float(v) for f, v in zip(ALL_FREQUENCIES, per_wavelength)}


__all__ = [
    "expected_intensity",
    "focal_intensities",
    "objective",
    "softmin",
    "soft_objective",
    "gradient",
    "intensity_report",
]
