from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, field_validator

from config import (
    FDFD_MIN_HOLE_PIXELS,
    FDFD_MONITOR_WAVELENGTHS,
    FDFD_PADDING_WAVELENGTHS,
    FDFD_PIXELS_PER_PERIOD,
    FDFD_PML_POWER,
    FDFD_PML_REFLECTION,
    FDFD_PML_WAVELENGTHS,
    FDFD_SUBPIXEL,
)
from errors import ConfigError


class ResolutionError(ConfigError):
    """The grid cannot resolve the geometry it is asked to rasterize."""


class MonitorPlacementError(ConfigError):
    """A monitor row falls inside an absorbing layer or outside the grid."""


class GridSettings(BaseModel):
    """Discretization settings (the `grid` section of the run config).

    `dx_nm` overrides `pixels_per_period` when set; either way the period must
    be an integer number of pixels.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    pixels_per_period: int = FDFD_PIXELS_PER_PERIOD
    dx_nm: Optional[float] = None
    pml_wavelengths: float = FDFD_PML_WAVELENGTHS
    pml_reflection: float = FDFD_PML_REFLECTION
    pml_power: int = FDFD_PML_POWER
    padding_wavelengths: float = FDFD_PADDING_WAVELENGTHS
    monitor_wavelengths: float = FDFD_MONITOR_WAVELENGTHS
    min_hole_pixels: int = FDFD_MIN_HOLE_PIXELS
    subpixel: bool = FDFD_SUBPIXEL

    @field_validator("pixels_per_period", "pml_power", "min_hole_pixels")
    @classmethod
    def _positive_int(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("pml_wavelengths", "padding_wavelengths", "monitor_wavelengths")
    @classmethod
    def _positive_float(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("must be > 0")
        return v

    @field_validator("pml_reflection")
    @classmethod
    def _reflection_range(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("pml_reflection must be in (0, 1)")
        return v

    @field_validator("dx_nm")
    @classmethod
    def _dx_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("dx_nm must be > 0")
        return v


@dataclass(frozen=True)
class Grid2D:
    """Square-pixel grid for one (cell, wavelength) solve.

    Rows run bottom to top: absorber, substrate padding (reflection monitor,
    source row), structure, air padding (transmission monitor), absorber.
    Arrays on this grid are indexed [row, column] with shape (ny, nx).
    """

    dx: float
    nx: int
    ny: int
    pml_thickness: int
    substrate_rows: int
    structure_rows: int
    air_rows: int
    source_row: int
    reflection_row: int
    monitor_row: int
    wavelength: float
    pml_reflection: float = FDFD_PML_REFLECTION
    pml_power: int = FDFD_PML_POWER

    @property
    def period(self) -> float:
        return self.nx * self.dx

    @property
    def structure_start(self) -> int:
        return self.pml_thickness + self.substrate_rows

    @property
    def structure_stop(self) -> int:
        return self.structure_start + self.structure_rows

    def in_absorber(self, row: int) -> bool:
        return row < self.pml_thickness or row >= self.ny - self.pml_thickness

    def metadata(self) -> Dict[str, Any]:
        return {
            "dx_nm": self.dx,
            "nx": self.nx,
            "ny": self.ny,
            "pml_rows": self.pml_thickness,
            "substrate_padding_nm": self.substrate_rows * self.dx,
            "air_padding_nm": self.air_rows * self.dx,
            "monitor_offset_nm": (self.monitor_row - self.structure_stop + 0.5) * self.dx,
            "wavelength_nm": self.wavelength,
        }


def resolve_dx(period: float, settings: GridSettings) -> tuple[float, int]:
    """Pixel size and column count for a period; the period must hold a whole number of pixels."""
    if settings.dx_nm is not None:
        nx = int(round(period / settings.dx_nm))
        if nx < 1 or abs(nx * settings.dx_nm - period) > 1e-9 * period:
            raise ResolutionError(f"dx={settings.dx_nm} nm does not divide the {period} nm period")
        return float(settings.dx_nm), nx
    nx = settings.pixels_per_period
    return period / nx, nx


def make_grid(
    period: float,
    structure_height: float,
    wavelength: float,
    settings: GridSettings,
) -> Grid2D:
    """Lay out the rows for a cell of given period and stack height at one wavelength."""
    if not wavelength > 0:
        raise ConfigError(f"wavelength must be > 0, got {wavelength}")
    dx, nx = resolve_dx(period, settings)
    pml = max(int(math.ceil(settings.pml_wavelengths * wavelength / dx)), 8)
    pad = max(int(math.ceil(settings.padding_wavelengths * wavelength / dx)), 4)
    structure_rows = int(round(structure_height / dx))
    ny = 2 * pml + 2 * pad + structure_rows

    source_row = pml + pad // 2
    reflection_row = pml + pad // 4
    structure_stop = pml + pad + structure_rows
    monitor_row = structure_stop + int(round(settings.monitor_wavelengths * wavelength / dx))
    grid = Grid2D(
        dx=dx,
        nx=nx,
        ny=ny,
        pml_thickness=pml,
        substrate_rows=pad,
        structure_rows=structure_rows,
        air_rows=pad,
        source_row=source_row,
        reflection_row=reflection_row,
        monitor_row=monitor_row,
        wavelength=float(wavelength),
        pml_reflection=settings.pml_reflection,
        pml_power=settings.pml_power,
    )
    check_monitor(grid, monitor_row)
    return grid


def check_monitor(grid: Grid2D, row: int) -> None:
    if row < 0 or row >= grid.ny or grid.in_absorber(row):
        raise MonitorPlacementError(
            f"monitor row {row} lies inside an absorbing layer "
            f"(absorbers: rows < {grid.pml_thickness} and >= {grid.ny - grid.pml_thickness})"
        )


__all__ = [
    "GridSettings",
    "Grid2D",
    "ResolutionError",
    "MonitorPlacementError",
    "resolve_dx",
    "make_grid",
    "check_monitor",
]
