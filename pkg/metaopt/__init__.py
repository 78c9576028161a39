from .design import (
    DESIGN_FORMAT,
    DesignOptConfig,
    FocalSpec,
    GeometryError,
    MetasurfaceDesign,
    NoiseModel,
    design_from_dict,
    design_to_dict,
    initial_design,
    load_design,
    save_design,
)
from .field import (
    AmplitudeSource,
    LabelTable,
    cell_amplitudes,
    field_at,
    field_from_amplitudes,
    greens_row,
    kernel_matrix,
    kernel_scale,
    surrogate_prediction,
)
from .intensity import (
    expected_intensity,
    focal_intensities,
    gradient,
    intensity_report,
    objective,
    soft_objective,
    softmin,
)
from .optimize import TRACE_COLUMNS, OptimizationError, OptimizationTrace, TraceRow, optimize, write_trace_csv
from .validate import (
    FOCAL_LINE_COLUMNS,
    FocalLine,
    ValidationReport,
    focal_line,
    focal_line_x,
    label_design,
    read_focal_line_csv,
    relative_l2,
    validate,
    write_focal_line_csv,
    write_report,
)

__all__ = [
    "DESIGN_FORMAT",
    "DesignOptConfig",
    "FocalSpec",
    "GeometryError",
    "MetasurfaceDesign",
    "NoiseModel",
    "design_from_dict",
    "design_to_dict",
    "initial_design",
    "load_design",
    "save_design",
    "AmplitudeSource",
    "LabelTable",
    "cell_amplitudes",
    "field_at",
    "field_from_amplitudes",
    "greens_row",
    "kernel_matrix",
    "kernel_scale",
    "surrogate_prediction",
    "expected_intensity",
    "focal_intensities",
    "gradient",
    "intensity_report",
    "objective",
    "soft_objective",
    "softmin",
    "TRACE_COLUMNS",
    "OptimizationError",
    "OptimizationTrace",
    "TraceRow",
    "optimize",
    "write_trace_csv",
    "FOCAL_LINE_COLUMNS",
    "FocalLine",
    "ValidationReport",
    "focal_line",
    "focal_line_x",
    "label_design",
    "read_focal_line_csv",
    "relative_l2",
    "validate",
    "write_focal_line_csv",
    "write_report",
]
