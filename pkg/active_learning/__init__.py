from nnet import EmptyDatasetError

from .curves import CURVE_COLUMNS, CurvePoint, learning_curve, loglog_slope, median_by_budget, write_curve_csv
from .labeled_set import LabeledSet, OverlapError, RowKey, row_key
from .loop import (
    ALConfig,
    ALHistory,
    ALResult,
    HistoryRow,
    draw_unique,
    evaluate_fe,
    k_for_iteration,
    make_test_set,
    run_active,
    run_baseline,
    seed_streams,
    select_top_k,
    top_k_indices,
    total_budget,
)
from .oracles import (
    AnalyticSyntheticOracle,
    FdfdOracle,
    Oracle,
    OracleError,
    OracleKind,
    OracleSettings,
    TransferMatrixSyntheticOracle,
    make_oracle,
)
from .rundir import HISTORY_COLUMNS, RUN_FILES, RunDirectory, read_history

__all__ = [
    "EmptyDatasetError",
    "CURVE_COLUMNS",
    "CurvePoint",
    "learning_curve",
    "loglog_slope",
    "median_by_budget",
    "write_curve_csv",
    "LabeledSet",
    "OverlapError",
    "RowKey",
    "row_key",
    "ALConfig",
    "ALHistory",
    "ALResult",
    "HistoryRow",
    "draw_unique",
    "evaluate_fe",
    "k_for_iteration",
    "make_test_set",
    "run_active",
    "run_baseline",
    "seed_streams",
    "select_top_k",
    "top_k_indices",
    "total_budget",
    "AnalyticSyntheticOracle",
    "FdfdOracle",
    "Oracle",
    "OracleError",
    "OracleKind",
    "OracleSettings",
    "TransferMatrixSyntheticOracle",
    "make_oracle",
    "HISTORY_COLUMNS",
    "RUN_FILES",
    "RunDirectory",
    "read_history",
]
