from __future__ import annotations

from typing import Sequence

import numpy as np

from errors import ConfigError
from geometry.frequency import FrequencyId
from geometry.unit_cell import UnitCellSpec

# A ParamVector is a float array of `layer_count` hole widths in nm.
ParamVector = np.ndarray

# Widths within this fraction of the range outside the bounds are treated as on the bound.
_BOUNDS_SLACK = 1e-9


class BoundsError(ConfigError):
    """A hole width lies outside the unit cell's [width_min, width_max]."""


def check_bounds(widths: np.ndarray, spec: UnitCellSpec) -> np.ndarray:
    """Validate widths (any leading shape, last axis = layers) and return them as floats."""
    w = np.asarray(widths, dtype=float)
    if w.shape[-1:] != (spec.layer_count,):
        raise BoundsError(f"expected {spec.layer_count} widths, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise BoundsError("widths must be finite")
    slack = _BOUNDS_SLACK * (spec.width_max - spec.width_min)
    if np.any(w < spec.width_min - slack) or np.any(w > spec.width_max + slack):
        bad = w[(w < spec.width_min - slack) | (w > spec.width_max + slack)]
        raise BoundsError(
            f"widths {bad.tolist()[:5]} outside [{spec.width_min}, {spec.width_max}] nm "
            f"for the {spec.variant_name} cell"
        )
    return np.clip(w, spec.width_min, spec.width_max)


def normalize(widths: np.ndarray, spec: UnitCellSpec) -> np.ndarray:
    """Affine map of widths (nm) onto [-1, 1] per dimension."""
    w = check_bounds(widths, spec)
    return 2.0 * (w - spec.width_min) / (spec.width_max - spec.width_min) - 1.0


def denormalize(x: np.ndarray, spec: UnitCellSpec) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return spec.width_min + 0.5 * (x + 1.0) * (spec.width_max - spec.width_min)


def encode_input(widths: ParamVector, f: FrequencyId, spec: UnitCellSpec) -> np.ndarray:
    """13-entry network input: normalized widths followed by the frequency one-hot."""
    return np.concatenate([normalize(widths, spec), f.one_hot()])


def encode_batch(widths: np.ndarray, freq_index: Sequence[int], spec: UnitCellSpec) -> np.ndarray:
    """Row-wise encode_input for an (n, layers) width matrix and n frequency indices."""
    x = normalize(np.atleast_2d(widths), spec)
    idx = np.asarray(freq_index, dtype=int).reshape(-1)
    if idx.shape[0] != x.shape[0]:
        raise ConfigError(f"{x.shape[0]} width rows but {idx.shape[0]} frequencies")
    one_hot = np.zeros((x.shape[0], len(FrequencyId)))
    one_hot[np.arange(x.shape[0]), idx] = 1.0
    return np.hstack([x, one_hot])


def sample_uniform(rng: np.random.Generator, n: int, spec: UnitCellSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw n in-bounds width vectors and n frequency indices, all uniform."""
    widths = rng.uniform(spec.width_min, spec.width_max, size=(n, spec.layer_count))
    freqs = rng.integers(0, len(FrequencyId), size=n)
    return widths, freqs


__all__ = [
    "ParamVector",
    "BoundsError",
    "check_bounds",
    "normalize",
    "denormalize",
    "encode_input",
    "encode_batch",
    "sample_uniform",
]
