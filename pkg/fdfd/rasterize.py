from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np

from config import FDFD_MIN_HOLE_PIXELS
from fdfd.grid import Grid2D, ResolutionError
from fdfd.profile import Band, BandProfile, stack_profile
from geometry import UnitCellSpec, check_bounds


def _overlap(lo: np.ndarray, hi: np.ndarray, a: float, b: float) -> np.ndarray:
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


def _hole_intervals(spec: UnitCellSpec) -> list[Tuple[float, float]]:
    pitch = spec.hole_height + spec.spacer_height
    return [(k * pitch, k * pitch + spec.hole_height) for k in range(spec.layer_count)]


def cell_profile(
    spec: UnitCellSpec,
    widths: np.ndarray,
    grid: Grid2D,
    *,
    subpixel: bool = True,
    min_hole_pixels: int = FDFD_MIN_HOLE_PIXELS,
) -> BandProfile:
    """Band profile of one unit cell; hole and spacer edges stay exact in y.

    widths[0] is the hole nearest the substrate. Holes are centered laterally.
    With `subpixel` a column partly covered by a hole takes the area-weighted
    permittivity of the column; otherwise it takes the material at its center.
    """
    w = check_bounds(widths, spec)
    if abs(grid.period - spec.period) > 1e-9 * spec.period:
        raise ResolutionError(f"grid period {grid.period} nm does not match cell period {spec.period} nm")
    narrowest = float(np.min(w))
    if narrowest / grid.dx < min_hole_pixels:
        raise ResolutionError(
            f"narrowest hole ({narrowest} nm) spans {narrowest / grid.dx:.2f} pixels at dx={grid.dx} nm; "
            f"at least {min_hole_pixels} are required"
        )

    eps_sub = spec.n_substrate**2
    eps_hole = spec.n_hole**2
    dx = grid.dx
    x_lo = np.arange(grid.nx) * dx
    x_mid = x_lo + 0.5 * dx
    center = 0.5 * spec.period
    base = grid.structure_start * dx

    solid = np.full(grid.nx, eps_sub)
    bands = [Band(0.0, base, solid)]
    y = base
    for (bottom, top), width in zip(_hole_intervals(spec), w):
        half = 0.5 * width
        lo = base + bottom
        if lo - y > 1e-9 * base:
            bands.append(Band(y, lo, solid))
        else:
            lo = y
        if subpixel:
            fx = _overlap(x_lo, x_lo + dx, center - half, center + half) / dx
        else:
            fx = (np.abs(x_mid - center) < half).astype(float)
        bands.append(Band(lo, base + top, (1.0 - fx) * eps_sub + fx * eps_hole))
        y = base + top
    bands.append(Band(y, max(grid.ny * dx, y + dx), np.full(grid.nx, spec.n_background**2)))
    return BandProfile(tuple(bands), grid.nx)


def rasterize(
    spec: UnitCellSpec,
    widths: np.ndarray,
    grid: Grid2D,
    *,
    subpixel: bool = False,
    min_hole_pixels: int = FDFD_MIN_HOLE_PIXELS,
) -> np.ndarray:
    """Relative permittivity map (ny, nx) of one unit cell.

    Substrate fills everything below the structure top that is not a hole and
    the background fills the rows above it. Without `subpixel` a pixel takes the
    material at its center, so the map holds only the material permittivities.
    """
    profile = cell_profile(spec, widths, grid, subpixel=subpixel, min_hole_pixels=min_hole_pixels)
    return profile.sample(grid, subpixel=subpixel)


def rasterize_layers(
    layers: Sequence[Tuple[float, float]],
    grid: Grid2D,
    *,
    n_substrate: float,
    n_background: float = 1.0,
) -> np.ndarray:
    """Permittivity map of laterally uniform layers (thickness nm, index), bottom first.

    Each pixel takes the material at its center; the stack starts at the structure start row.
    """
    profile = stack_profile(layers, grid, n_substrate=n_substrate, n_background=n_background)
    return profile.sample(grid)


__all__ = ["cell_profile", "rasterize", "rasterize_layers"]
