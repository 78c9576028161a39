from .bundle import BUNDLE_FORMAT, bundle_fingerprint, ensemble_from_dict, ensemble_to_dict, load_ensemble, save_ensemble
from .ensemble import (
    Ensemble,
    EnsembleConfig,
    PartGradient,
    PredictionBatch,
    SurrogatePrediction,
    acquisition_score,
    predict,
    predict_batch,
    train_ensemble,
    untrained_ensemble,
)
from .hessian import finite_difference_hessian, hessian_spectrum, singular_values
from .metrics import fractional_error, fractional_errors
from .pooling import pool, pool_arrays

__all__ = [
    "BUNDLE_FORMAT",
    "bundle_fingerprint",
    "ensemble_from_dict",
    "ensemble_to_dict",
    "load_ensemble",
    "save_ensemble",
    "Ensemble",
    "EnsembleConfig",
    "PartGradient",
    "PredictionBatch",
    "SurrogatePrediction",
    "acquisition_score",
    "predict",
    "predict_batch",
    "train_ensemble",
    "untrained_ensemble",
    "finite_difference_hessian",
    "hessian_spectrum",
    "singular_values",
    "fractional_error",
    "fractional_errors",
    "pool",
    "pool_arrays",
]
