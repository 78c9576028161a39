from .dataset import (
    append_records,
    dataset_columns,
    dataset_fingerprint,
    read_dataset,
    write_dataset,
    write_metadata,
)
from .grid import Grid2D, GridSettings, MonitorPlacementError, ResolutionError, check_monitor, make_grid, resolve_dx
from .profile import Band, BandProfile, stack_profile
from .labeler import SolveRecord, cell_grid, check_energy, grid_metadata, label, reference_field, solve_stack
from .rasterize import cell_profile, rasterize, rasterize_layers
from .solver import (
    SolverError,
    direct_transmission,
    extract_reflection,
    extract_transmission,
    helmholtz_operator,
    incident_wave,
    power_balance,
    solve_cell,
    zero_order,
)
from .transfer_matrix import (
    Layer,
    bare_interface_power,
    cell_effective_layers,
    relative_transmission,
    transfer_matrix_coefficients,
    transfer_matrix_stack,
)

__all__ = [
    "append_records",
    "dataset_columns",
    "dataset_fingerprint",
    "read_dataset",
    "write_dataset",
    "write_metadata",
    "Grid2D",
    "GridSettings",
    "MonitorPlacementError",
    "ResolutionError",
    "check_monitor",
    "make_grid",
    "resolve_dx",
    "SolveRecord",
    "cell_grid",
    "check_energy",
    "grid_metadata",
    "label",
    "reference_field",
    "solve_stack",
    "Band",
    "BandProfile",
    "stack_profile",
    "cell_profile",
    "rasterize",
    "rasterize_layers",
    "SolverError",
    "direct_transmission",
    "extract_reflection",
    "extract_transmission",
    "helmholtz_operator",
    "incident_wave",
    "power_balance",
    "solve_cell",
    "zero_order",
    "Layer",
    "bare_interface_power",
    "cell_effective_layers",
    "relative_transmission",
    "transfer_matrix_coefficients",
    "transfer_matrix_stack",
]
