from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from errors import ConfigError
from fdfd import dataset_columns, read_dataset
from lensctl.cli import build_parser, main
from lensctl.runconfig import RunConfig, load_run_config


def _write_config(tmp_path: Path, **overrides) -> Path:
    data = {
        "master_seed": 3,
        "output_dir": str(tmp_path / "runs"),
        "ensemble": {"members": 2},
        "train": {"epochs": 2, "batch_size": 8, "hidden": [8, 8]},
        "al": {
            "n_init": 6,
            "oversampling": 2,
            "k": 2,
            "k_schedule": "fixed",
            "iterations": 1,
            "test_size": 6,
            "retrain_epochs": 1,
        },
        "chebyshev": {"points_per_dim": 2, "dimension": 2},
        "design": {"n_cells": 3, "iterations": 3, "line_samples": 11},
    }
    data.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def _read_rows(path: Path) -> list[dict]:
    with path.open("r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def test_parser_reads_lists_and_defaults():
    parser = build_parser()
    args = parser.parse_args(["baseline-run", "--budgets", "500,1000", "--seed-list", "1,2,3"])
    assert args.budgets == [500, 1000] and args.seed_list == [1, 2, 3]
    args = parser.parse_args(["cell-compare"])
    assert args.variants == ["normal", "small", "smallest"]
    args = parser.parse_args(["hessian", "--ensemble", "e.json"])
    assert (args.wavelength, args.point, args.h) == ("green", "mid", 0.05)
    with pytest.raises(SystemExit):
        parser.parse_args(["bench"])


def test_no_command_is_usage_error():
    assert main([]) == 2


def test_run_config_defaults_and_seed_override():
    cfg = load_run_config(None)
    assert cfg.al.seed == cfg.master_seed
    moved = cfg.with_seed(17)
    assert moved.master_seed == 17 and moved.al.seed == 17
    assert "seed" not in moved.echo()["al"]
    assert RunConfig.model_validate(moved.echo()) == moved
    assert RunConfig.model_validate({"unit_cell": "smallest"}).unit_cell.period == 40.0


def test_run_config_rejections(tmp_path: Path):
    with pytest.raises(ConfigError):
        load_run_config(_write_config(tmp_path, al={"seed": 4}))
    with pytest.raises(ConfigError):
        load_run_config(_write_config(tmp_path, schema_version=99))
    with pytest.raises(ConfigError):
        load_run_config(_write_config(tmp_path, unit_cell="giant"))
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(broken)


def test_gen_data_zero_rows_is_header_only(tmp_path: Path, capsys):
    out = tmp_path / "empty.csv"
    assert main(["gen-data", "--n", "0", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").strip() == ",".join(dataset_columns(10))
    meta = json.loads((tmp_path / "empty.meta.json").read_text(encoding="utf-8"))
    assert meta["n"] == 0 and meta["oracle"] == "analytic_synthetic"
    assert "[success]" in capsys.readouterr().out


def test_gen_data_is_seeded(tmp_path: Path):
    cfg = _write_config(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["gen-data", "--config", str(cfg), "--n", "5", "--out", str(a)]) == 0
    assert main(["gen-data", "--config", str(cfg), "--n", "5", "--out", str(b), "--oracle", "transfer_matrix_synthetic"]) == 0
    ra, rb = read_dataset(a), read_dataset(b)
    assert len(ra) == 5
    assert [r.params for r in ra] == [r.params for r in rb]
    assert [r.t for r in ra] != [r.t for r in rb]


def test_missing_config_exits_with_config_error(tmp_path: Path, capsys):
    assert main(["al-run", "--config", str(tmp_path / "nope.json")]) == 2
    assert "[error]" in capsys.readouterr().out


def test_missing_ensemble_exits_with_config_error(tmp_path: Path):
    cfg = _write_config(tmp_path)
    assert main(["design", "--config", str(cfg), "--ensemble", str(tmp_path / "none.json")]) == 2
    assert main(["bench", "--config", str(cfg), "--ensemble", str(tmp_path / "none.json")]) == 2


def test_al_run_then_design_validate_bench_and_hessian(tmp_path: Path):
    cfg = _write_config(tmp_path)
    run = tmp_path / "al"
    assert main(["al-run", "--config", str(cfg), "--out", str(run)]) == 0
    for name in ("config.json", "train.csv", "test.csv", "history.csv", "ensemble.json", "provenance.csv"):
        assert (run / name).exists(), name
    history = _read_rows(run / "history.csv")
    assert [int(r["n_train"]) for r in history] == [6, 8]
    echo = json.loads((run / "config.json").read_text(encoding="utf-8"))
    assert echo["master_seed"] == 3

    ensemble = run / "ensemble.json"
    design_dir = tmp_path / "design"
    assert main(["design", "--config", str(cfg), "--ensemble", str(ensemble), "--out", str(design_dir)]) == 0
    summary = json.loads((design_dir / "design_summary.json").read_text(encoding="utf-8"))
    assert summary["worst_case"] >= summary["initial_worst_case"]
    assert summary["dataset_fingerprint"].startswith("sha256:")
    assert len(_read_rows(design_dir / "trace.csv")) == 4

    val_dir = tmp_path / "validate"
    args = ["validate", "--config", str(cfg), "--design", str(design_dir / "design.json"), "--out", str(val_dir)]
    assert main(args + ["--ensemble", str(ensemble)]) == 0
    report = json.loads((val_dir / "validation.json").read_text(encoding="utf-8"))
    assert report["solves"] == 9
    assert len(_read_rows(val_dir / "focal_line_validated.csv")) == 11

    own = tmp_path / "validate_own"
    assert main(["validate", "--config", str(cfg), "--design", str(design_dir / "design.json"), "--out", str(own)]) == 0
    assert json.loads((own / "validation.json").read_text(encoding="utf-8"))["discrepancy"] == {
        "blue": 0.0,
        "green": 0.0,
        "red": 0.0,
    }

    bench_out = tmp_path / "bench.json"
    bench_args = ["bench", "--config", str(cfg), "--ensemble", str(ensemble), "--oracle", "analytic_synthetic"]
    assert main(bench_args + ["--n", "3", "--out", str(bench_out)]) == 0
    bench = json.loads(bench_out.read_text(encoding="utf-8"))
    assert bench["n"] == 3 and bench["surrogate_s_per_point"] > 0

    hess_out = tmp_path / "hessian.json"
    assert main(["hessian", "--config", str(cfg), "--ensemble", str(ensemble), "--out", str(hess_out)]) == 0
    hess = json.loads(hess_out.read_text(encoding="utf-8"))
    assert len(hess["singular_values_re"]) == 10
    assert hess["singular_values_re"] == sorted(hess["singular_values_re"], reverse=True)

    plots = tmp_path / "plots"
    assert main(["export-plots", str(run), str(val_dir), "--out", str(plots)]) == 2
    assert main(["export-plots", str(run), "--out", str(plots)]) == 0
    rows = _read_rows(plots / "learning_curve.csv")
    assert [int(r["n_train"]) for r in rows] == [6, 8]
    assert {r["source"] for r in rows} == {"."}
    schema = json.loads((plots / "learning_curve.schema.json").read_text(encoding="utf-8"))
    assert schema["sorted_by"] == ["n_train", "run", "source"]


def test_multi_seed_al_run_uses_seed_directories(tmp_path: Path):
    cfg = _write_config(tmp_path, al={"n_init": 4, "iterations": 0, "test_size": 4})
    root = tmp_path / "al"
    assert main(["al-run", "--config", str(cfg), "--out", str(root), "--seed-list", "1,2"]) == 0
    for seed in (1, 2):
        echo = json.loads((root / f"seed_{seed}" / "config.json").read_text(encoding="utf-8"))
        assert echo["master_seed"] == seed


def test_baseline_budgets_and_export_slope(tmp_path: Path):
    cfg = _write_config(tmp_path)
    root = tmp_path / "baseline"
    assert main(["baseline-run", "--config", str(cfg), "--out", str(root), "--budgets", "8,4"]) == 0
    assert (root / "n_4" / "ensemble.json").exists() and (root / "n_8" / "ensemble.json").exists()
    tests = [(root / n / "test.csv").read_text(encoding="utf-8") for n in ("n_4", "n_8")]
    assert tests[0] == tests[1]

    plots = tmp_path / "plots"
    assert main(["export-plots", str(root), "--out", str(plots)]) == 0
    rows = _read_rows(plots / "learning_curve.csv")
    assert [(int(r["n_train"]), r["source"]) for r in rows] == [(4, "n_4"), (8, "n_8")]
    summary = json.loads((plots / "summary.json").read_text(encoding="utf-8"))
    assert isinstance(summary["loglog_slope"]["baseline"], float)


def test_cheb_run_reports_node_budget(tmp_path: Path):
    cfg = _write_config(tmp_path)
    root = tmp_path / "cheb"
    assert main(["cheb-run", "--config", str(cfg), "--out", str(root), "--compare-nn"]) == 0
    data = json.loads((root / "cheb.json").read_text(encoding="utf-8"))
    assert data["n_train"] == 4
    assert data["node_labels"] == 12
    assert data["test_size"] == 6
    assert data["nn"]["n_train"] == 4
    assert (root / "coeffs.json").exists()

    plots = tmp_path / "plots"
    assert main(["export-plots", str(root), "--out", str(plots)]) == 0
    rows = _read_rows(plots / "learning_curve.csv")
    assert [r["source"] for r in rows] == ["chebyshev"]


def test_cell_compare_writes_curves(tmp_path: Path):
    cfg = _write_config(tmp_path)
    root = tmp_path / "cc"
    args = ["cell-compare", "--config", str(cfg), "--out", str(root), "--variants", "normal,small", "--budgets", "4,8"]
    assert main(args) == 0
    rows = _read_rows(root / "cell_compare.csv")
    assert len(rows) == 4
    summary = json.loads((root / "cell_compare.json").read_text(encoding="utf-8"))
    assert set(summary["variants"]) == {"normal", "small"}
    assert "loglog_slope" in summary["variants"]["small"]


def test_unknown_variant_is_config_error(tmp_path: Path):
    cfg = _write_config(tmp_path)
    args = ["cell-compare", "--config", str(cfg), "--out", str(tmp_path / "cc"), "--variants", "huge"]
    assert main(args) == 2


@pytest.mark.slow
def test_bench_surrogate_is_two_orders_faster_than_fdfd(tmp_path: Path):
    cfg = _write_config(tmp_path, train={"epochs": 1, "batch_size": 8})
    run = tmp_path / "al"
    assert main(["al-run", "--config", str(cfg), "--out", str(run)]) == 0
    bench_out = tmp_path / "bench.json"
    args = ["bench", "--config", str(cfg), "--ensemble", str(run / "ensemble.json"), "--oracle", "fdfd"]
    assert main(args + ["--n", "5", "--out", str(bench_out)]) == 0
    bench = json.loads(bench_out.read_text(encoding="utf-8"))
    assert bench["oracle"] == "fdfd" and bench["unit_cell"] == "normal"
    assert bench["speedup"] >= 100.0


@pytest.mark.slow
def test_smaller_cells_learn_faster_on_fdfd_labels(tmp_path: Path):
    cfg = _write_config(
        tmp_path,
        oracle="fdfd",
        ensemble={"members": 3},
        train={"hidden": [64, 64, 64]},
        al={"test_size": 500},
    )
    root = tmp_path / "cc"
    args = ["cell-compare", "--config", str(cfg), "--out", str(root), "--budgets", "500,1000,2000", "--seed-list", "1,2,3"]
    assert main(args + ["--jobs", "4"]) == 0
    medians = {
        variant: entry["median_fe"]
        for variant, entry in json.loads((root / "cell_compare.json").read_text(encoding="utf-8"))["variants"].items()
    }
    for n in ("1000", "2000"):
        assert medians["small"][n] < medians["normal"][n]
        assert medians["smallest"][n] < medians["small"][n]
