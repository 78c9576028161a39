from __future__ import annotations

from typing import Dict

import numpy as np

from errors import ConfigError


def fractional_error(estimates: np.ndarray, truths: np.ndarray) -> float:
    """||u - v||_2 / ||v||_2 for (complex) vectors u = estimates, v = truths."""
    u = np.asarray(estimates).reshape(-1)
    v = np.asarray(truths).reshape(-1)
    if u.shape != v.shape or u.size == 0:
        raise ConfigError(f"fractional error needs equal non-empty vectors, got {u.size} and {v.size}")
    denom = np.linalg.norm(v)
    if denom == 0:
        raise ConfigError("fractional error is undefined for an all-zero truth vector")
    return float(np.linalg.norm(u - v) / denom)


def fractional_errors(estimates: np.ndarray, truths: np.ndarray) -> Dict[str, float]:
    """Complex FE plus the FE of the real and imaginary parts on their own."""
    u = np.asarray(estimates, dtype=complex)
    v = np.asarray(truths, dtype=complex)
    return {
        "fe_complex": fractional_error(u, v),
        "fe_re": fractional_error(u.real, v.real),
        "fe_im": fractional_error(u.imag, v.imag),
    }


__all__ = ["fractional_error", "fractional_errors"]
