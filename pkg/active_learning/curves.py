from __future__ import annotations

import csv
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Sequence

import numpy as np

from errors import ConfigError
from geometry import UnitCellSpec
from surrogate import EnsembleConfig
from active_learning.loop import ALConfig, make_test_set, run_baseline
from active_learning.oracles import Oracle

logger = logging.getLogger("lensctl")

CURVE_COLUMNS = ["variant", "method", "seed", "n_train", "fe_complex", "fe_re", "fe_im"]


@dataclass(frozen=True)
class CurvePoint:
    variant: str
    method: str
    seed: int
    n_train: int
    fe_complex: float
    fe_re: float
    fe_im: float


def learning_curve(
    spec: UnitCellSpec,
    oracle_factory: Callable[[UnitCellSpec], Oracle],
    budgets: Sequence[int],
    seeds: Sequence[int],
    al_cfg: ALConfig,
    ens_cfg: EnsembleConfig,
    *,
    jobs: int = 1,
) -> List[CurvePoint]:
    """Random-sampling learning curve of one unit cell: one baseline run per (seed, budget).

    All budgets of a seed share that seed's test set.
    """
    points: List[CurvePoint] = []
    for seed in seeds:
        cfg = al_cfg.model_copy(update={"seed": int(seed)})
        oracle = oracle_factory(spec)
        test_set = make_test_set(cfg, oracle, jobs=jobs)
        for n in sorted(budgets):
            result = run_baseline(n, cfg, oracle, ens_cfg, jobs=jobs, test_set=test_set)
            row = result.history.final
            points.append(
                CurvePoint(spec.variant_name, "baseline", int(seed), row.n_train, row.fe_complex, row.fe_re, row.fe_im)
            )
            logger.info(f"[AL] {spec.variant_name} seed={seed} n={n} fe={row.fe_complex:.4g}")
    return points


def median_by_budget(points: Iterable[CurvePoint]) -> dict:
    """{(variant, method, n_train): median complex FE over seeds}."""
    groups: dict = {}
    for p in points:
        groups.setdefault((p.variant, p.method, p.n_train), []).append(p.fe_complex)
    return {k: float(np.median(v)) for k, v in groups.items()}


def loglog_slope(n_train: Sequence[float], fe: Sequence[float]) -> float:
    """Least-squares slope of log(fe) against log(n_train)."""
    n = np.asarray(n_train, dtype=float)
    e = np.asarray(fe, dtype=float)
    if n.size < 2 or np.unique(n).size < 2:
        raise ConfigError("a slope needs at least two distinct training-set sizes")
    if np.any(n <= 0) or np.any(e <= 0):
        raise ConfigError("log-log fit needs positive sizes and errors")
    slope, _ = np.polyfit(np.log(n), np.log(e), 1)
    return float(slope)


def write_curve_csv(path: Path, points: Iterable[CurvePoint]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = sorted(points, key=lambda p: (p.variant, p.method, p.n_train, p.seed))
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CURVE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for p in rows:
            writer.writerow(asdict(p))
    return path


__all__ = ["CURVE_COLUMNS", "CurvePoint", "learning_curve", "median_by_budget", "loglog_slope", "write_curve_csv"]
