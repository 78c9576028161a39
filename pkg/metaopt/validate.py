"""Re-solve every cell of a design directly and compare focal lines.

An ensemble predicts the expected intensity under `cfg.noise_model`, the
quantity the optimizer maximizes; a label table predicts |field|^2 of its
stored transmissions, as does the validated line from the solved cells.
All lines share one x grid at each frequency's focal height.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from errors import ConfigError
from geometry import ALL_FREQUENCIES
from metaopt.design import DesignOptConfig, MetasurfaceDesign, NoiseModel
from metaopt.field import AmplitudeSource, LabelTable, field_at
from metaopt.intensity import expected_intensity

logger = logging.getLogger("lensctl")

FOCAL_LINE_COLUMNS = ["x_um", "intensity_blue", "intensity_green", "intensity_red"]


@dataclass(frozen=True)
class FocalLine:
    x_um: np.ndarray
    # (3, samples), ordered blue, green, red
    intensity: np.ndarray

    def peak_x(self) -> List[float]:
        return [float(self.x_um[int(np.argmax(row))]) for row in self.intensity]

    def at_focus(self, design: MetasurfaceDesign) -> np.ndarray:
        """Sampled intensity nearest each frequency's own focal x."""
        out = []
        for f, row in zip(ALL_FREQUENCIES, self.intensity):
            fx = design.focal.point(f)[0]
            out.append(row[int(np.argmin(np.abs(self.x_um - fx)))])
        return np.array(out)


@dataclass(frozen=True)
class ValidationReport:
    predicted: FocalLine
    validated: FocalLine
    discrepancy: Dict[str, float]
    predicted_worst_case: float
    validated_worst_case: float
    solves: int
    solve_seconds: float
    predicted_kind: str = "expected_intensity"

    def summary(self, design: MetasurfaceDesign) -> Dict:
        focus = self.validated.at_focus(design)
        return {
            "n_cells": design.n_cells,
            "solves": self.solves,
            "solve_seconds": self.solve_seconds,
            "predicted_kind": self.predicted_kind,
            "discrepancy": self.discrepancy,
            "predicted_worst_case": self.predicted_worst_case,
            "validated_worst_case": self.validated_worst_case,
            "validated_focus": {f.label: float(v) for f, v in zip(ALL_FREQUENCIES, focus)},
            "validated_peak_x_um": dict(zip([f.label for f in ALL_FREQUENCIES], self.validated.peak_x())),
            "predicted_peak_x_um": dict(zip([f.label for f in ALL_FREQUENCIES], self.predicted.peak_x())),
            "normalization": "relative to on-axis focal intensity of a uniform unit aperture",
        }


def focal_line_x(cfg: DesignOptConfig) -> np.ndarray:
    return np.linspace(-cfg.line_half_width_um, cfg.line_half_width_um, cfg.line_samples)


def focal_line(
    design: MetasurfaceDesign,
    source: AmplitudeSource,
    x_um: np.ndarray,
    *,
    noise_model: NoiseModel | None = None,
) -> FocalLine:
    """Intensity along x; with an ensemble and a `noise_model`, the expected intensity."""
    x_um = np.asarray(x_um, dtype=float)
    rows = []
    for f in ALL_FREQUENCIES:
        y = design.focal.point(f)[1]
        pts = np.column_stack([x_um, np.full_like(x_um, y)])
        if noise_model is not None and not isinstance(source, LabelTable):
            rows.append(expected_intensity(pts, design, source, f, noise_model=noise_model))
        else:
            rows.append(np.abs(field_at(pts, design, source, f)) ** 2)
    return FocalLine(x_um=np.asarray(x_um, dtype=float), intensity=np.vstack(rows))


def relative_l2(estimate: np.ndarray, reference: np.ndarray) -> float:
    denom = float(np.linalg.norm(reference))
    if denom == 0.0:
        raise ConfigError("validated focal line is identically zero")
    return float(np.linalg.norm(estimate - reference) / denom)


def label_design(design: MetasurfaceDesign, oracle, *, jobs: int = 1) -> LabelTable:
    """N solves per frequency; duplicate cells are solved once."""
    unique = np.unique(design.cells, axis=0)
    widths = np.vstack([unique] * len(ALL_FREQUENCIES))
    freq_index = [f.value for f in ALL_FREQUENCIES for _ in range(unique.shape[0])]
    records = oracle.label_batch(widths, freq_index, jobs=jobs)
    return LabelTable.from_records(records)


def validate(
    design: MetasurfaceDesign,
    oracle,
    predictor: AmplitudeSource,
    cfg: DesignOptConfig,
    *,
    jobs: int = 1,
    labels: Optional[LabelTable] = None,
) -> ValidationReport:
    """Compare `predictor` focal lines (ensemble or lookup table) with directly solved ones."""
    x = focal_line_x(cfg)
    t0 = time.perf_counter()
    if labels is None:
        labels = label_design(design, oracle, jobs=jobs)
    solves = len(labels.table)
    elapsed = time.perf_counter() - t0
    logger.info(f"[VALIDATE] solved {solves} cells in {elapsed:.2f}s")

    validated = focal_line(design, labels, x)
    predicted = focal_line(design, predictor, x, noise_model=cfg.noise_model)
    discrepancy = {
        f.label: relative_l2(predicted.intensity[i], validated.intensity[i]) for i, f in enumerate(ALL_FREQUENCIES)
    }
    report = ValidationReport(
        predicted=predicted,
        validated=validated,
        discrepancy=discrepancy,
        predicted_worst_case=float(np.min(predicted.at_focus(design))),
        validated_worst_case=float(np.min(validated.at_focus(design))),
        solves=solves,
        solve_seconds=elapsed,
        predicted_kind="label_intensity" if isinstance(predictor, LabelTable) else f"expected_intensity:{cfg.noise_model}",
    )
    logger.info(
        "[VALIDATE] discrepancy "
        + " ".join(f"{k}={v:.3g}" for k, v in discrepancy.items())
        + f" worst_case predicted={report.predicted_worst_case:.4g} validated={report.validated_worst_case:.4g}"
    )
    return report


def write_focal_line_csv(path: Path, line: FocalLine) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(FOCAL_LINE_COLUMNS)
        for j, x in enumerate(line.x_um):
            writer.writerow([repr(float(x))] + [repr(float(v)) for v in line.intensity[:, j]])
    return path


def read_focal_line_csv(path: Path) -> FocalLine:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"focal line not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != FOCAL_LINE_COLUMNS:
            raise ConfigError(f"{path}: unexpected header {header}")
        data = np.array([[float(v) for v in row] for row in reader if row], dtype=float).reshape(-1, 4)
    return FocalLine(x_um=data[:, 0], intensity=data[:, 1:].T.copy())


def write_report(out_dir: Path, report: ValidationReport, design: MetasurfaceDesign) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "predicted": write_focal_line_csv(out_dir / "focal_line_predicted.csv", report.predicted),
        "validated": write_focal_line_csv(out_dir / "focal_line_validated.csv", report.validated),
        "summary": out_dir / "validation.json",
    }
    paths["summary"].write_text(json.dumps(report.summary(design), indent=2) + "\n", encoding="utf-8")
    return paths


__all__ = [
    "FOCAL_LINE_COLUMNS",
    "FocalLine",
    "ValidationReport",
    "focal_line_x",
    "focal_line",
    "relative_l2",
    "label_design",
    "validate",
    "write_focal_line_csv",
    "read_focal_line_csv",
    "write_report",
]
