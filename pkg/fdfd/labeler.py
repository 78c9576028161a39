from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from config import FDFD_TOL_ENERGY
from fdfd.grid import Grid2D, GridSettings, make_grid
from fdfd.profile import stack_profile
from fdfd.rasterize import cell_profile
from fdfd.solver import SolverError, extract_transmission, solve_cell
from fdfd.transfer_matrix import Layer, bare_interface_power
from geometry import FrequencyId, UnitCellSpec, check_bounds

logger = logging.getLogger("lensctl")


@dataclass(frozen=True)
class SolveRecord:
    """One labeled sample: hole widths (nm), frequency, complex t and solve time."""

    params: Tuple[float, ...]
    frequency: FrequencyId
    t: complex
    wall_time: float


def cell_grid(spec: UnitCellSpec, f: FrequencyId, settings: GridSettings) -> Grid2D:
    return make_grid(spec.period, spec.structure_height, f.wavelength_nm, settings)


@lru_cache(maxsize=64)
def reference_field(grid: Grid2D, n_substrate: float, n_background: float) -> np.ndarray:
    """Field of the empty cell: substrate below the structure start, background above."""
    profile = stack_profile([], grid, n_substrate=n_substrate, n_background=n_background)
    field = solve_cell(profile, grid.wavelength, grid)
    field.setflags(write=False)
    return field


def check_energy(t: complex, n_substrate: float, n_background: float, tol_energy: float) -> None:
    """Transmitted power |t|^2 * T_bare must not exceed 1 + tol_energy for lossless cells."""
    power = abs(t) ** 2 * bare_interface_power(n_substrate, n_background)
    if not np.isfinite(power) or power > 1.0 + tol_energy:
        raise SolverError(
            "transmitted power exceeds the energy bound",
            {"t": complex(t), "transmitted_power": float(power), "tol_energy": tol_energy},
        )


def label(
    widths: np.ndarray,
    f: FrequencyId,
    spec: UnitCellSpec,
    settings: GridSettings | None = None,
    *,
    tol_energy: float = FDFD_TOL_ENERGY,
) -> SolveRecord:
    """Complex transmission of one unit cell at one design frequency by a direct FDFD solve."""
    settings = settings or GridSettings()
    w = check_bounds(widths, spec)
    start = time.perf_counter()
    grid = cell_grid(spec, f, settings)
    profile = cell_profile(spec, w, grid, subpixel=settings.subpixel, min_hole_pixels=settings.min_hole_pixels)
    field = solve_cell(profile, f.wavelength_nm, grid)
    t = extract_transmission(field, reference_field(grid, spec.n_substrate, spec.n_background), grid)
    check_energy(t, spec.n_substrate, spec.n_background, tol_energy)
    elapsed = time.perf_counter() - start
    logger.debug(f"[FDFD] {spec.variant_name} cell @ {f.wavelength_nm:g} nm: t={t:.6f} ({elapsed:.3f}s)")
    return SolveRecord(params=tuple(float(v) for v in w), frequency=f, t=t, wall_time=elapsed)


def solve_stack(
    layers: Sequence[Layer],
    wavelength: float,
    *,
    period: float,
    settings: GridSettings | None = None,
    n_substrate: float,
    n_background: float = 1.0,
) -> complex:
    """FDFD transmission of a laterally uniform stack, normalized like `label`; layer edges are exact."""
    settings = settings or GridSettings()
    height = sum(float(d) for d, _ in layers)
    grid = make_grid(period, height, wavelength, settings)
    profile = stack_profile(layers, grid, n_substrate=n_substrate, n_background=n_background)
    field = solve_cell(profile, wavelength, grid)
    return extract_transmission(field, reference_field(grid, n_substrate, n_background), grid)


def grid_metadata(spec: UnitCellSpec, settings: GridSettings) -> Dict[str, Any]:
    """Discretization actually used per wavelength, recorded next to every FDFD dataset."""
    meta: Dict[str, Any] = {"cell": spec.model_dump(mode="json"), "settings": settings.model_dump(mode="json")}
    meta["grids"] = {f.label: cell_grid(spec, f, settings).metadata() for f in FrequencyId}
    return meta


__all__ = [
    "SolveRecord",
    "cell_grid",
    "reference_field",
    "check_energy",
    "label",
    "solve_stack",
    "grid_metadata",
]
