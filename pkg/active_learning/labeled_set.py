from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, List, Set, Tuple

import numpy as np

from config import CELL_LAYER_COUNT
from errors import ConfigError
from fdfd import SolveRecord, read_dataset, write_dataset
from geometry import UnitCellSpec, encode_batch

RowKey = Tuple[Tuple[float, ...], int]


class OverlapError(ConfigError):
    """Test rows also appear in the training set."""


def row_key(widths: Iterable[float], freq_index: int) -> RowKey:
    return tuple(float(w) for w in widths), int(freq_index)


class LabeledSet:
    """Ordered labeled rows with a provenance tag each (`init`, `al_iter_<i>`, `baseline`, `test`).

    (widths, frequency) pairs are unique.
    """

    def __init__(self, layer_count: int) -> None:
        self.layer_count = layer_count
        self.records: List[SolveRecord] = []
        self.tags: List[str] = []
        self._keys: Set[RowKey] = set()

    def __len__(self) -> int:
        return len(self.records)

    def key_set(self) -> Set[RowKey]:
        return set(self._keys)

    def contains(self, widths: Iterable[float], freq_index: int) -> bool:
        return row_key(widths, freq_index) in self._keys

    def add(self, records: Iterable[SolveRecord], tag: str) -> None:
        for rec in records:
            key = row_key(rec.params, rec.frequency.value)
            if key in self._keys:
                raise ConfigError(f"duplicate labeled row {key}")
            self._keys.add(key)
            self.records.append(rec)
            self.tags.append(tag)

    @property
    def widths(self) -> np.ndarray:
        return np.array([r.params for r in self.records], dtype=float).reshape(-1, self.layer_count)

    @property
    def freq_index(self) -> np.ndarray:
        return np.array([r.frequency.value for r in self.records], dtype=int)

    @property
    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records], dtype=complex)

    def encoded(self, spec: UnitCellSpec) -> np.ndarray:
        return encode_batch(self.widths, self.freq_index, spec)

    def check_disjoint(self, other: "LabeledSet") -> None:
        shared = self._keys & other._keys
        if shared:
            raise OverlapError(f"{len(shared)} rows are shared between the test and training sets")

    def write_csv(self, path: Path, *, record_timings: bool = True) -> int:
        return write_dataset(path, self.records, layer_count=self.layer_count, record_timings=record_timings)

    def write_provenance(self, path: Path) -> None:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["row", "wavelength_nm", "tag"])
            for i, (rec, tag) in enumerate(zip(self.records, self.tags)):
                writer.writerow([i, repr(float(rec.frequency.wavelength_nm)), tag])

    @classmethod
    def from_csv(cls, path: Path, tag: str = "loaded") -> "LabeledSet":
        records = read_dataset(path)
        layer_count = len(records[0].params) if records else CELL_LAYER_COUNT
        out = cls(layer_count)
        out.add(records, tag)
        return out


__all__ = ["RowKey", "OverlapError", "row_key", "LabeledSet"]
