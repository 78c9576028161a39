"""Band profiles: a cell's permittivity as horizontal bands with exact edges.

A band covers [y0, y1) in nm from the grid bottom and holds one permittivity
per grid column. The solver reads interface positions straight from the band
edges, so a layer boundary between two grid rows stays where it is instead of
snapping to a pixel edge. The first and last band extend without limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from fdfd.grid import Grid2D


@dataclass(frozen=True, eq=False)
class Band:
    y0: float
    y1: float
    eps: np.ndarray


@dataclass(frozen=True, eq=False)
class BandProfile:
    bands: Tuple[Band, ...]
    nx: int

    def __post_init__(self) -> None:
        if not self.bands:
            raise ValueError("a band profile needs at least one band")
        for lower, upper in zip(self.bands, self.bands[1:]):
            if abs(lower.y1 - upper.y0) > 1e-9 * max(1.0, abs(upper.y0)):
                raise ValueError(f"bands must be contiguous; gap at {lower.y1} / {upper.y0} nm")
        for band in self.bands:
            if band.eps.shape != (self.nx,):
                raise ValueError(f"band permittivity has shape {band.eps.shape}, expected ({self.nx},)")
            if not band.y1 > band.y0:
                raise ValueError(f"band [{band.y0}, {band.y1}) is empty")

    @property
    def edges(self) -> np.ndarray:
        return np.array([b.y0 for b in self.bands] + [self.bands[-1].y1])

    def band_index(self, y: float, *, upward: bool = True) -> int:
        """Band holding y; at an edge, the band above it when moving up, below it when moving down."""
        side = "right" if upward else "left"
        i = int(np.searchsorted(self.edges, y, side=side)) - 1
        return min(max(i, 0), len(self.bands) - 1)

    def node_eps(self, y: np.ndarray) -> np.ndarray:
        """(len(y), nx) permittivity at node heights y."""
        idx = np.clip(np.searchsorted(self.edges, y, side="right") - 1, 0, len(self.bands) - 1)
        table = np.stack([b.eps for b in self.bands])
        return table[idx]

    def max_eps(self) -> float:
        return max(float(np.max(b.eps)) for b in self.bands)

    def sample(self, grid: Grid2D, *, subpixel: bool = False) -> np.ndarray:
        """(ny, nx) permittivity map; `subpixel` averages each pixel over its row height."""
        if not subpixel:
            return self.node_eps((np.arange(grid.ny) + 0.5) * grid.dx)
        # pixel units keep fully covered fractions at exactly 1
        y_lo = np.arange(grid.ny, dtype=float)
        y_hi = y_lo + 1.0
        eps = np.zeros((grid.ny, self.nx))
        last = len(self.bands) - 1
        for i, band in enumerate(self.bands):
            lo = -np.inf if i == 0 else band.y0 / grid.dx
            hi = np.inf if i == last else band.y1 / grid.dx
            frac = np.clip(np.minimum(y_hi, hi) - np.maximum(y_lo, lo), 0.0, None)
            eps += frac[:, None] * band.eps[None, :]
        return eps

    @classmethod
    def from_rows(cls, eps: np.ndarray, dx: float) -> "BandProfile":
        """One band per run of identical rows of a (ny, nx) map."""
        eps = np.asarray(eps, dtype=float)
        bands = []
        start = 0
        for row in range(1, eps.shape[0] + 1):
            if row == eps.shape[0] or not np.array_equal(eps[row], eps[start]):
                bands.append(Band(start * dx, row * dx, eps[start].copy()))
                start = row
        return cls(tuple(bands), eps.shape[1])


def _uniform(value: float, nx: int) -> np.ndarray:
    return np.full(nx, value, dtype=float)


def stack_profile(
    layers: Sequence[Tuple[float, float]],
    grid: Grid2D,
    *,
    n_substrate: float,
    n_background: float = 1.0,
) -> BandProfile:
    """Laterally uniform layers (thickness nm, index), bottom first, starting at the structure start."""
    y = grid.structure_start * grid.dx
    bands = [Band(0.0, y, _uniform(n_substrate**2, grid.nx))]
    for thickness, index in layers:
        thickness = float(thickness)
        if thickness <= 0:
            continue
        bands.append(Band(y, y + thickness, _uniform(float(index) ** 2, grid.nx)))
        y += thickness
    bands.append(Band(y, max(grid.ny * grid.dx, y + grid.dx), _uniform(n_background**2, grid.nx)))
    return BandProfile(tuple(bands), grid.nx)


__all__ = ["Band", "BandProfile", "stack_profile"]
