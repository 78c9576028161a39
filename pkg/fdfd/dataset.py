"""Labeled-sample CSV: the interchange format between labeling and training.

Columns are `w1..wL` (nm), `wavelength_nm`, `re_t`, `im_t`, `solver_seconds`
with a mandatory header row. Floats are written with `repr`, which round-trips
f64 values exactly, so re-reading a dataset gives back the same bits.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

from config import CELL_LAYER_COUNT
from errors import ConfigError
from fdfd.labeler import SolveRecord
from geometry import FrequencyId


def dataset_columns(layer_count: int = CELL_LAYER_COUNT) -> List[str]:
    return [f"w{i + 1}" for i in range(layer_count)] + ["wavelength_nm", "re_t", "im_t", "solver_seconds"]


def _row(rec: SolveRecord, record_timings: bool) -> List[str]:
    seconds = rec.wall_time if record_timings else 0.0
    return (
        [repr(float(w)) for w in rec.params]
        + [repr(float(rec.frequency.wavelength_nm)), repr(float(rec.t.real)), repr(float(rec.t.imag))]
        + [repr(float(seconds))]
    )


def write_dataset(
    path: Path,
    records: Iterable[SolveRecord],
    *,
    layer_count: int = CELL_LAYER_COUNT,
    record_timings: bool = True,
) -> int:
    """Write a fresh dataset (header always written); returns the number of rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(dataset_columns(layer_count))
        for rec in records:
            writer.writerow(_row(rec, record_timings))
            n += 1
    return n


def append_records(
    path: Path,
    records: Iterable[SolveRecord],
    *,
    layer_count: int = CELL_LAYER_COUNT,
    record_timings: bool = True,
) -> int:
    """Append rows, writing the header first if the file is new or empty.

    Each row is flushed as it is written so an aborted labeling run keeps
    every row finished before the failure.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    new_file = not path.exists() or path.stat().st_size == 0
    n = 0
    with path.open("a", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        if new_file:
            writer.writerow(dataset_columns(layer_count))
        for rec in records:
            writer.writerow(_row(rec, record_timings))
            f.flush()
            n += 1
    return n


def read_dataset(path: Path) -> List[SolveRecord]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"dataset not found: {path}")
    out: List[SolveRecord] = []
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        fields = reader.fieldnames or []
        width_cols = [c for c in fields if c.startswith("w") and c[1:].isdigit()]
        expected = dataset_columns(len(width_cols))
        if fields != expected:
            raise ConfigError(f"{path}: unexpected header {fields}, expected {expected}")
        for line_no, row in enumerate(reader, start=2):
            try:
                out.append(
                    SolveRecord(
                        params=tuple(float(row[c]) for c in width_cols),
                        frequency=FrequencyId.from_wavelength(float(row["wavelength_nm"])),
                        t=complex(float(row["re_t"]), float(row["im_t"])),
                        wall_time=float(row["solver_seconds"]),
                    )
                )
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{path}:{line_no}: bad dataset row ({e})") from e
    return out


def dataset_fingerprint(path: Path) -> str:
    """sha256 of the dataset bytes, stored alongside checkpoints trained on it."""
    h = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{h}"


def write_metadata(path: Path, meta: Dict[str, Any]) -> Path:
    """Write `<dataset>.meta.json` next to a dataset (oracle kind, grid, seeds)."""
    target = Path(path).with_suffix(".meta.json")
    target.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


__all__ = [
    "dataset_columns",
    "write_dataset",
    "append_records",
    "read_dataset",
    "dataset_fingerprint",
    "write_metadata",
]
