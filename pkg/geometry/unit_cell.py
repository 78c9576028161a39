from __future__ import annotations

from typing import Dict

from pydantic import BaseModel, ConfigDict, model_validator

from config import (
    CELL_HOLE_HEIGHT_NM,
    CELL_LAYER_COUNT,
    CELL_PERIOD_NM,
    CELL_SMALL_HOLE_HEIGHT_NM,
    CELL_SPACER_HEIGHT_NM,
    CELL_WIDTH_MAX_NM,
    CELL_WIDTH_MIN_NM,
    N_AIR,
    N_SILICA,
)
from errors import ConfigError


class UnitCellSpec(BaseModel):
    """Multilayer 2D unit cell: `layer_count` rectangular holes stacked in a substrate slab.

    Lengths are nm. Holes are `hole_height` tall and separated vertically by
    `spacer_height` of substrate; each hole width is a design parameter.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    period: float = CELL_PERIOD_NM
    layer_count: int = CELL_LAYER_COUNT
    hole_height: float = CELL_HOLE_HEIGHT_NM
    spacer_height: float = CELL_SPACER_HEIGHT_NM
    width_min: float = CELL_WIDTH_MIN_NM
    width_max: float = CELL_WIDTH_MAX_NM
    n_substrate: float = N_SILICA
    n_hole: float = N_AIR
    n_background: float = N_AIR
    variant_name: str = "normal"

    @model_validator(mode="after")
    def _check_invariants(self) -> "UnitCellSpec":
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        if self.period <= 0 or self.hole_height <= 0 or self.spacer_height < 0:
            raise ValueError("period and hole_height must be > 0, spacer_height >= 0")
        if not (0 < self.width_min < self.width_max <= self.period):
            raise ValueError(
                f"need 0 < width_min < width_max <= period, got "
                f"{self.width_min}, {self.width_max}, {self.period}"
            )
        for name in ("n_substrate", "n_hole", "n_background"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        return self

    @property
    def structure_height(self) -> float:
        """Total height of the hole stack (spacers only between consecutive holes)."""
        return self.layer_count * self.hole_height + (self.layer_count - 1) * self.spacer_height

    @property
    def width_mid(self) -> float:
        return 0.5 * (self.width_min + self.width_max)


def scale_variant(spec: UnitCellSpec, factor: float, *, name: str | None = None) -> UnitCellSpec:
    """Scale every length of `spec` by `factor`; refractive indices are unchanged.

    Lengths are plain products, so composing two scalings agrees with one
    scaling by the product to within a few ulp per length.
    """
    if not factor > 0:
        raise ConfigError(f"scale factor must be > 0, got {factor}")
    return spec.model_copy(
        update={
            "period": spec.period * factor,
            "hole_height": spec.hole_height * factor,
            "spacer_height": spec.spacer_height * factor,
            "width_min": spec.width_min * factor,
            "width_max": spec.width_max * factor,
            "variant_name": name if name is not None else spec.variant_name,
        }
    )


NORMAL_CELL = UnitCellSpec()
SMALL_CELL = NORMAL_CELL.model_copy(
    update={"hole_height": CELL_SMALL_HOLE_HEIGHT_NM, "spacer_height": 0.0, "variant_name": "small"}
)
SMALLEST_CELL = scale_variant(SMALL_CELL, 0.1, name="smallest")

PRESETS: Dict[str, UnitCellSpec] = {
    "normal": NORMAL_CELL,
    "small": SMALL_CELL,
    "smallest": SMALLEST_CELL,
}


def preset(name: str) -> UnitCellSpec:
    key = (name or "").strip().lower()
    if key not in PRESETS:
        raise ConfigError(f"unknown unit cell preset '{name}' (known: {', '.join(PRESETS)})")
    return PRESETS[key]


__all__ = [
    "UnitCellSpec",
    "scale_variant",
    "NORMAL_CELL",
    "SMALL_CELL",
    "SMALLEST_CELL",
    "PRESETS",
    "preset",
]
