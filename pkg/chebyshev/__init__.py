from .model import (
    COEFFS_FORMAT,
    ChebyshevSettings,
    ChebyshevSurrogate,
    fit_chebyshev,
    fit_from_records,
    load_coeffs,
    reduced_widths,
    save_coeffs,
)
from .tensor import (
    CapacityError,
    ChebCoeffs,
    ChebGrid,
    DomainError,
    IncompleteValuesError,
    chebyshev_nodes,
    check_capacity,
    eval_coeffs,
    fit,
    tensor_nodes,
)

__all__ = [
    "COEFFS_FORMAT",
    "ChebyshevSettings",
    "ChebyshevSurrogate",
    "fit_chebyshev",
    "fit_from_records",
    "load_coeffs",
    "reduced_widths",
    "save_coeffs",
    "CapacityError",
    "ChebCoeffs",
    "ChebGrid",
    "DomainError",
    "IncompleteValuesError",
    "chebyshev_nodes",
    "check_capacity",
    "eval_coeffs",
    "fit",
    "tensor_nodes",
]
