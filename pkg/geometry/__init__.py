from .encoding import (
    BoundsError,
    ParamVector,
    check_bounds,
    denormalize,
    encode_batch,
    encode_input,
    normalize,
    sample_uniform,
)
from .frequency import ALL_FREQUENCIES, FrequencyId
from .unit_cell import (
    NORMAL_CELL,
    PRESETS,
    SMALL_CELL,
    SMALLEST_CELL,
    UnitCellSpec,
    preset,
    scale_variant,
)

__all__ = [
    "BoundsError",
    "ParamVector",
    "check_bounds",
    "denormalize",
    "encode_batch",
    "encode_input",
    "normalize",
    "sample_uniform",
    "ALL_FREQUENCIES",
    "FrequencyId",
    "NORMAL_CELL",
    "PRESETS",
    "SMALL_CELL",
    "SMALLEST_CELL",
    "UnitCellSpec",
    "preset",
    "scale_variant",
]
