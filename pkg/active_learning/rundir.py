from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterable

from errors import ConfigError
from fdfd import SolveRecord, append_records, dataset_fingerprint, write_dataset
from surrogate import Ensemble, save_ensemble

if TYPE_CHECKING:
    from active_learning.labeled_set import LabeledSet
    from active_learning.loop import ALHistory

HISTORY_COLUMNS = [
    "iter",
    "n_train",
    "fe_complex",
    "fe_re",
    "fe_im",
    "oracle_calls",
    "oracle_seconds",
    "surrogate_eval_seconds",
]

RUN_FILES = ("config.json", "train.csv", "test.csv", "history.csv", "ensemble.json")


class RunDirectory:
    """Files of one AL or baseline run.

    train.csv is appended batch by batch so an aborted run keeps every row
    labeled before the failure.
    """

    def __init__(self, root: Path, *, layer_count: int, record_timings: bool = True) -> None:
        self.root = Path(root)
        self.layer_count = layer_count
        self.record_timings = record_timings

    @property
    def config_path(self) -> Path:
        return self.root / "config.json"

    @property
    def train_path(self) -> Path:
        return self.root / "train.csv"

    @property
    def test_path(self) -> Path:
        return self.root / "test.csv"

    @property
    def history_path(self) -> Path:
        return self.root / "history.csv"

    @property
    def ensemble_path(self) -> Path:
        return self.root / "ensemble.json"

    @property
    def provenance_path(self) -> Path:
        return self.root / "provenance.csv"

    def start(self, config_echo: Dict[str, Any]) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        self.config_path.write_text(json.dumps(config_echo, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        write_dataset(self.train_path, [], layer_count=self.layer_count)

    def write_test(self, test_set: "LabeledSet") -> None:
        test_set.write_csv(self.test_path, record_timings=self.record_timings)

    def append_train(self, records: Iterable[SolveRecord]) -> None:
        append_records(self.train_path, records, layer_count=self.layer_count, record_timings=self.record_timings)

    def write_history(self, history: "ALHistory") -> None:
        with self.history_path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(HISTORY_COLUMNS)
            for row in history.rows:
                writer.writerow(row.as_csv_row())

    def write_ensemble(self, e: Ensemble) -> None:
        save_ensemble(self.ensemble_path, e, dataset_fingerprint=dataset_fingerprint(self.train_path))

    def write_provenance(self, train_set: "LabeledSet") -> None:
        train_set.write_provenance(self.provenance_path)

    def missing_files(self) -> list[str]:
        return [name for name in RUN_FILES if not (self.root / name).exists()]


def read_history(path: Path) -> list[Dict[str, float]]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"history not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != HISTORY_COLUMNS:
            raise ConfigError(f"{path}: unexpected history header {reader.fieldnames}")
        return [{k: float(v) for k, v in row.items()} for row in reader]


__all__ = ["HISTORY_COLUMNS", "RUN_FILES", "RunDirectory", "read_history"]
