from __future__ import annotations

import json
from pathlib import Path

import pytest

from errors import ConfigError
from fdfd import (
    SolveRecord,
    append_records,
    dataset_columns,
    dataset_fingerprint,
    read_dataset,
    write_dataset,
    write_metadata,
)
from geometry import FrequencyId


def _mk_record(i: int, f: FrequencyId = FrequencyId.GREEN) -> SolveRecord:
    return SolveRecord(params=tuple(60.0 + i + k for k in range(10)), frequency=f, t=complex(0.1 * i, -0.2), wall_time=0.5)


def test_columns_are_stable():
    assert dataset_columns(3) == ["w1", "w2", "w3", "wavelength_nm", "re_t", "im_t", "solver_seconds"]


def test_write_then_read_preserves_records(tmp_path: Path):
    path = tmp_path / "data.csv"
    records = [_mk_record(i, f) for i, f in enumerate([FrequencyId.BLUE, FrequencyId.GREEN, FrequencyId.RED])]
    assert write_dataset(path, records) == 3
    back = read_dataset(path)
    assert [r.params for r in back] == [r.params for r in records]
    assert [r.frequency for r in back] == [r.frequency for r in records]
    assert [r.t for r in back] == [r.t for r in records]


def test_header_only_dataset(tmp_path: Path):
    path = tmp_path / "empty.csv"
    write_dataset(path, [])
    assert path.read_text(encoding="utf-8").strip() == ",".join(dataset_columns(10))
    assert read_dataset(path) == []


def test_append_creates_header_once(tmp_path: Path):
    path = tmp_path / "grow.csv"
    append_records(path, [_mk_record(0)])
    append_records(path, [_mk_record(1), _mk_record(2)])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("w1,")


def test_timings_zeroed_when_disabled(tmp_path: Path):
    path = tmp_path / "quiet.csv"
    write_dataset(path, [_mk_record(1)], record_timings=False)
    assert read_dataset(path)[0].wall_time == 0.0


def test_bad_row_reports_line(tmp_path: Path):
    path = tmp_path / "bad.csv"
    write_dataset(path, [_mk_record(0)])
    with path.open("a", encoding="utf-8") as f:
        f.write(",".join(["x"] * 14) + "\n")
    with pytest.raises(ConfigError, match=":3:"):
        read_dataset(path)


def test_wrong_header_rejected(tmp_path: Path):
    path = tmp_path / "other.csv"
    path.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_dataset(path)


def test_fingerprint_tracks_content(tmp_path: Path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_dataset(a, [_mk_record(1)])
    write_dataset(b, [_mk_record(1)])
    assert dataset_fingerprint(a) == dataset_fingerprint(b)
    assert dataset_fingerprint(a).startswith("sha256:")
    write_dataset(b, [_mk_record(2)])
    assert dataset_fingerprint(a) != dataset_fingerprint(b)


def test_metadata_sidecar(tmp_path: Path):
    path = tmp_path / "data.csv"
    meta_path = write_metadata(path, {"oracle": "fdfd"})
    assert meta_path.name == "data.meta.json"
    assert json.loads(meta_path.read_text(encoding="utf-8")) == {"oracle": "fdfd"}
