from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple

import numpy as np

from errors import NumericFailure
from geometry import denormalize, normalize
from nnet import adam_update
from surrogate import Ensemble
from metaopt.design import DesignOptConfig, MetasurfaceDesign
from metaopt.intensity import objective, soft_objective

logger = logging.getLogger("lensctl")

TRACE_COLUMNS = ["iter", "worst_case", "i_blue", "i_green", "i_red", "beta"]


@dataclass(frozen=True)
class TraceRow:
    iter: int
    worst_case: float
    i_blue: float
    i_green: float
    i_red: float
    beta: float


@dataclass
class OptimizationTrace:
    rows: List[TraceRow] = field(default_factory=list)

    def worst_cases(self) -> np.ndarray:
        return np.array([r.worst_case for r in self.rows])


class OptimizationError(NumericFailure):
    """The objective became non-finite; `trace` holds every iteration before it."""

    def __init__(self, message: str, trace: OptimizationTrace) -> None:
        super().__init__(message, {"iterations_done": len(trace.rows)})
        self.trace = trace


def optimize(
    design0: MetasurfaceDesign,
    ensemble: Ensemble,
    cfg: DesignOptConfig,
) -> Tuple[MetasurfaceDesign, OptimizationTrace]:
    """Projected Adam ascent on the soft-min of the three focal intensities.

    - Works in normalized widths; every iterate is clipped back to [-1, 1]
    - beta follows cfg.beta_at(iteration), geometric from beta_start to beta_end
    - Trace row 0 is the starting design; row i follows the i-th step
    - Returns the iterate with the best true worst case, so it never ends below the start
    """
    spec = design0.spec
    z = normalize(design0.cells, spec)
    m = np.zeros_like(z)
    v = np.zeros_like(z)
    trace = OptimizationTrace()

    def _log_row(it: int, design: MetasurfaceDesign, beta: float) -> float:
        worst, per = objective(design, ensemble, noise_model=cfg.noise_model)
        if not np.all(np.isfinite(per)):
            raise OptimizationError(f"non-finite focal intensity at iteration {it}", trace)
        trace.rows.append(TraceRow(it, worst, float(per[0]), float(per[1]), float(per[2]), beta))
        return worst

    best_design = design0
    best = _log_row(0, design0, cfg.beta_at(0))
    design = design0
    for it in range(cfg.iterations):
        beta = cfg.beta_at(it)
        soft, _, grad = soft_objective(design, ensemble, beta, noise_model=cfg.noise_model)
        if not (np.isfinite(soft) and np.all(np.isfinite(grad))):
            raise OptimizationError(f"non-finite objective or gradient at iteration {it + 1}", trace)
        # ascent: Adam descends along -grad
        z, m, v = adam_update(z, -grad, m, v, it + 1, cfg.step)
        z = np.clip(z, -1.0, 1.0)
        design = design0.with_cells(denormalize(z, spec))
        worst = _log_row(it + 1, design, beta)
        if worst > best:
            best, best_design = worst, design
        if (it + 1) % 50 == 0:
            logger.info(f"[DESIGN] iter={it + 1} worst_case={worst:.4g} best={best:.4g} beta={beta:.3g}")
    return best_design, trace


def write_trace_csv(path: Path, trace: OptimizationTrace) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in trace.rows:
            writer.writerow([r.iter, repr(r.worst_case), repr(r.i_blue), repr(r.i_green), repr(r.i_red), repr(r.beta)])
    return path


__all__ = ["TRACE_COLUMNS", "TraceRow", "OptimizationTrace", "OptimizationError", "optimize", "write_trace_csv"]
