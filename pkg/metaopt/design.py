"""Metasurface designs, focal specifications and optimizer settings.

Positions in this package are in µm; cell widths stay in nm like the rest of
the geometry. Cells sit side by side with pitch = period, centered on x = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config import (
    DESIGN_BETA_END,
    DESIGN_BETA_START,
    DESIGN_FOCAL_X_UM,
    DESIGN_FOCAL_Y_UM,
    DESIGN_ITERATIONS,
    DESIGN_LINE_HALF_WIDTH_UM,
    DESIGN_LINE_SAMPLES,
    DESIGN_N_CELLS,
    DESIGN_STEP,
)
from errors import ConfigError
from geometry import FrequencyId, UnitCellSpec, check_bounds

DESIGN_FORMAT = "lensctl.design/1"

NoiseModel = Literal["global", "per_cell"]


class GeometryError(ConfigError):
    """Observation point or design layout is invalid for far-field synthesis."""


class FocalSpec(BaseModel):
    """Focal point (x, y) in µm for each design frequency."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    blue: Tuple[float, float] = (DESIGN_FOCAL_X_UM["blue"], DESIGN_FOCAL_Y_UM)
    green: Tuple[float, float] = (DESIGN_FOCAL_X_UM["green"], DESIGN_FOCAL_Y_UM)
    red: Tuple[float, float] = (DESIGN_FOCAL_X_UM["red"], DESIGN_FOCAL_Y_UM)

    @field_validator("blue", "green", "red")
    @classmethod
    def _above_surface(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        if not v[1] > 0:
            raise ValueError(f"focal y must be > 0 µm, got {v[1]}")
        return v

    def point(self, f: FrequencyId) -> Tuple[float, float]:
        return getattr(self, f.label)


class DesignOptConfig(BaseModel):
    """The `design` section of the run config."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_cells: int = DESIGN_N_CELLS
    step: float = DESIGN_STEP
    iterations: int = DESIGN_ITERATIONS
    beta_start: float = DESIGN_BETA_START
    beta_end: float = DESIGN_BETA_END
    seed: int = 0
    init: Literal["random", "midpoint"] = "random"
    projection: Literal["clip"] = "clip"
    noise_model: NoiseModel = "global"
    line_half_width_um: float = DESIGN_LINE_HALF_WIDTH_UM
    line_samples: int = DESIGN_LINE_SAMPLES
    focal: FocalSpec = FocalSpec()

    @model_validator(mode="after")
    def _check(self) -> "DesignOptConfig":
        if self.n_cells < 1 or self.iterations < 0 or self.line_samples < 2:
            raise ValueError("need n_cells >= 1, iterations >= 0 and line_samples >= 2")
        if not (self.step > 0 and 0 < self.beta_start <= self.beta_end):
            raise ValueError("need step > 0 and 0 < beta_start <= beta_end")
        if not self.line_half_width_um > 0:
            raise ValueError("line_half_width_um must be > 0")
        return self

    def beta_at(self, it: int) -> float:
        """Soft-min sharpness at 0-based iteration `it`, geometric from beta_start to beta_end."""
        if self.iterations <= 1:
            return self.beta_end
        frac = min(it, self.iterations - 1) / (self.iterations - 1)
        return float(self.beta_start * (self.beta_end / self.beta_start) ** frac)


@dataclass
class MetasurfaceDesign:
    """N unit cells (widths nm, shape (N, layers)) with optional per-cell aperture weights."""

    cells: np.ndarray
    spec: UnitCellSpec
    focal: FocalSpec = field(default_factory=FocalSpec)
    weights: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        cells = np.atleast_2d(np.asarray(self.cells, dtype=float))
        if cells.shape[0] < 1:
            raise GeometryError("a design needs at least one cell")
        self.cells = check_bounds(cells, self.spec)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float).reshape(-1)
            if w.shape[0] != self.cells.shape[0] or np.any(w < 0):
                raise GeometryError("aperture weights need one non-negative entry per cell")
            self.weights = w

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    @property
    def pitch_um(self) -> float:
        return self.spec.period / 1000.0

    def positions_um(self) -> np.ndarray:
        return (np.arange(self.n_cells) - 0.5 * (self.n_cells - 1)) * self.pitch_um

    def aperture_weights(self) -> np.ndarray:
        return np.ones(self.n_cells) if self.weights is None else self.weights

    def with_cells(self, cells: np.ndarray) -> "MetasurfaceDesign":
        return MetasurfaceDesign(cells=cells, spec=self.spec, focal=self.focal, weights=self.weights)

    def mirrored(self) -> "MetasurfaceDesign":
        w = None if self.weights is None else self.weights[::-1].copy()
        return MetasurfaceDesign(cells=self.cells[::-1].copy(), spec=self.spec, focal=self.focal, weights=w)


def initial_design(spec: UnitCellSpec, cfg: DesignOptConfig) -> MetasurfaceDesign:
    if cfg.init == "midpoint":
        cells = np.full((cfg.n_cells, spec.layer_count), spec.width_mid)
    else:
        rng = np.random.default_rng(cfg.seed)
        cells = rng.uniform(spec.width_min, spec.width_max, size=(cfg.n_cells, spec.layer_count))
    return MetasurfaceDesign(cells=cells, spec=spec, focal=cfg.focal)


def design_to_dict(design: MetasurfaceDesign) -> Dict:
    return {
        "format": DESIGN_FORMAT,
        "unit_cell": design.spec.model_dump(mode="json"),
        "n_cells": design.n_cells,
        "cells_nm": [[float(v) for v in row] for row in design.cells],
        "aperture_weights": None if design.weights is None else [float(v) for v in design.weights],
        "focal": design.focal.model_dump(mode="json"),
    }


def design_from_dict(data: Dict) -> MetasurfaceDesign:
    if data.get("format") != DESIGN_FORMAT:
        raise ConfigError(f"not a design file (format={data.get('format')!r})")
    try:
        design = MetasurfaceDesign(
            cells=np.asarray(data["cells_nm"], dtype=float),
            spec=UnitCellSpec.model_validate(data["unit_cell"]),
            focal=FocalSpec.model_validate(data["focal"]),
            weights=None if data.get("aperture_weights") is None else np.asarray(data["aperture_weights"]),
        )
    except KeyError as e:
        raise ConfigError(f"design file is missing {e}") from e
    if design.n_cells != int(data.get("n_cells", design.n_cells)):
        raise ConfigError("design n_cells disagrees with the cell matrix")
    return design


def save_design(path: Path, design: MetasurfaceDesign) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(design_to_dict(design), indent=2) + "\n", encoding="utf-8")
    return path


def load_design(path: Path) -> MetasurfaceDesign:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"design file not found: {path}")
    return design_from_dict(json.loads(path.read_text(encoding="utf-8")))


__all__ = [
    "DESIGN_FORMAT",
    "NoiseModel",
    "GeometryError",
    "FocalSpec",
    "DesignOptConfig",
    "MetasurfaceDesign",
    "initial_design",
    "design_to_dict",
    "design_from_dict",
    "save_design",
    "load_design",
]
