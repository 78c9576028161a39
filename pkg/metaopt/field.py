"""Near-to-far-field synthesis from per-cell transmission amplitudes.

Each cell radiates as a line source at its center (y = 0) with amplitude
-t_cell * pitch. The 2D outgoing kernel is the large-argument form
C * exp(i k rho) / sqrt(rho) * cos(theta). C is fixed per (aperture,
wavelength, focal height) so a uniform unit-amplitude aperture gives on-axis
intensity 1 at the focal height; intensities are relative to that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Tuple, Union

import numpy as np

from errors import ConfigError
from fdfd import SolveRecord
from geometry import FrequencyId
from surrogate import Ensemble, PredictionBatch
from metaopt.design import GeometryError, MetasurfaceDesign


def greens_row(
    point: Tuple[float, float],
    x_src: np.ndarray | float,
    wavelength_um: float,
    *,
    scale: complex = 1.0,
) -> np.ndarray | complex:
    """Kernel value(s) from source x-position(s) on the surface to an observation point (µm)."""
    x, y = float(point[0]), float(point[1])
    xs = np.asarray(x_src, dtype=float)
    if not y > 0:
        raise GeometryError(f"observation point must lie above the surface, got y={y} µm")
    rho = np.hypot(x - xs, y)
    if np.any(rho < wavelength_um):
        raise GeometryError(f"observation point within one wavelength ({wavelength_um} µm) of a source")
    k = 2.0 * np.pi / wavelength_um
    g = scale * np.exp(1j * k * rho) / np.sqrt(rho) * (y / rho)
    return complex(g) if g.ndim == 0 else g


def kernel_scale(design: MetasurfaceDesign, f: FrequencyId, focal_y_um: float) -> float:
    """C such that a uniform unit aperture of this layout has intensity 1 at (0, focal_y)."""
    wl = f.wavelength_nm / 1000.0
    raw = np.sum(greens_row((0.0, focal_y_um), design.positions_um(), wl)) * design.pitch_um
    return 1.0 / float(np.abs(raw))


def kernel_matrix(points: np.ndarray, design: MetasurfaceDesign, f: FrequencyId) -> np.ndarray:
    """K[m, n] such that E(point m) = sum_n K[m, n] * (-t_n); includes C, pitch and aperture weights."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    wl = f.wavelength_nm / 1000.0
    scale = kernel_scale(design, f, design.focal.point(f)[1])
    x = design.positions_um()
    rows = [greens_row((px, py), x, wl, scale=scale) for px, py in pts]
    return np.asarray(rows) * (design.pitch_um * design.aperture_weights())[None, :]


@dataclass
class LabelTable:
    """Directly solved transmissions keyed by (widths, frequency); a stand-in for the surrogate."""

    table: Dict[Tuple[Tuple[float, ...], int], complex]

    @classmethod
    def from_records(cls, records: Iterable[SolveRecord]) -> "LabelTable":
        return cls({(tuple(r.params), r.frequency.value): r.t for r in records})

    def amplitudes(self, design: MetasurfaceDesign, f: FrequencyId) -> np.ndarray:
        out = np.empty(design.n_cells, dtype=complex)
        for i, row in enumerate(design.cells):
            key = (tuple(float(v) for v in row), f.value)
            if key not in self.table:
                raise ConfigError(f"no label for cell {i} at {f.label}")
            out[i] = self.table[key]
        return out


AmplitudeSource = Union[Ensemble, LabelTable]


def surrogate_prediction(design: MetasurfaceDesign, ensemble: Ensemble, f: FrequencyId) -> PredictionBatch:
    return ensemble.predict_encoded(ensemble.encode(design.cells, [f.value] * design.n_cells))


def cell_amplitudes(design: MetasurfaceDesign, source: AmplitudeSource, f: FrequencyId) -> np.ndarray:
    if isinstance(source, LabelTable):
        return source.amplitudes(design, f)
    return surrogate_prediction(design, source, f).mu


def field_from_amplitudes(points: np.ndarray, design: MetasurfaceDesign, t: np.ndarray, f: FrequencyId) -> np.ndarray:
    return kernel_matrix(points, design, f) @ (-np.asarray(t, dtype=complex))


def field_at(points: np.ndarray, design: MetasurfaceDesign, source: AmplitudeSource, f: FrequencyId) -> np.ndarray:
    """Complex field at observation points (µm) using surrogate means or solved labels per cell."""
    return field_from_amplitudes(points, design, cell_amplitudes(design, source, f), f)


__all__ = [
    "greens_row",
    "kernel_scale",
    "kernel_matrix",
    "LabelTable",
    "AmplitudeSource",
    "surrogate_prediction",
    "cell_amplitudes",
    "field_from_amplitudes",
    "field_at",
]
