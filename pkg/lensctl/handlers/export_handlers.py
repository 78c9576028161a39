"""Plot-ready tables from finished run directories; nothing is rendered."""

from __future__ import annotations

import csv
import json
import shutil
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from errors import ConfigError
from active_learning import RUN_FILES, RunDirectory, loglog_slope, read_history
from lensctl.handlers.common import EXIT_OK, fail

CURVE_EXPORT_COLUMNS = ["n_train", "run", "source", "fe_complex", "fe_re", "fe_im"]

CURVE_SCHEMA = {
    "file": "learning_curve.csv",
    "sorted_by": ["n_train", "run", "source"],
    "columns": {
        "n_train": "labeled training rows (Chebyshev: n^d nodes per frequency)",
        "run": "name of the run directory given on the command line",
        "source": "sub-directory the row came from, '.' for the run directory itself",
        "fe_complex": "||t_hat - t|| / ||t|| on the held-out test set",
        "fe_re": "fractional error of the real part",
        "fe_im": "fractional error of the imaginary part",
    },
}


def _is_complete(path: Path) -> bool:
    return not RunDirectory(path, layer_count=0).missing_files()


def _curve_rows(run: Path) -> List[Dict]:
    """History rows of `run` or of its complete immediate sub-directories, plus any Chebyshev point."""
    name = run.name
    rows: List[Dict] = []
    sources = [run] if _is_complete(run) else sorted(p for p in run.iterdir() if p.is_dir() and _is_complete(p))
    for src in sources:
        label = "." if src == run else src.name
        for r in read_history(src / "history.csv"):
            rows.append(
                {"n_train": int(r["n_train"]), "run": name, "source": label,
                 "fe_complex": r["fe_complex"], "fe_re": r["fe_re"], "fe_im": r["fe_im"]}
            )
    cheb = run / "cheb.json"
    if cheb.exists():
        data = json.loads(cheb.read_text(encoding="utf-8"))
        rows.append(
            {"n_train": int(data["n_train"]), "run": name, "source": "chebyshev",
             "fe_complex": data["fe_complex"], "fe_re": data["fe_re"], "fe_im": data["fe_im"]}
        )
    if not rows:
        missing = RunDirectory(run, layer_count=0).missing_files()
        raise ConfigError(f"{run} is not a complete run directory (missing {', '.join(missing) or 'history'})")
    return rows


def _slope(rows: List[Dict]) -> Optional[float]:
    by_n: Dict[int, List[float]] = {}
    for r in rows:
        if r["source"] != "chebyshev":
            by_n.setdefault(r["n_train"], []).append(r["fe_complex"])
    if len(by_n) < 2:
        return None
    ns = sorted(by_n)
    return loglog_slope(ns, [float(np.median(by_n[n])) for n in ns])


def export_plots(run_dirs: Sequence[Path], out: Optional[Path]) -> int:
    try:
        runs = [Path(p) for p in run_dirs]
        for run in runs:
            if not run.is_dir():
                raise ConfigError(f"run directory not found: {run}")
        target = Path(out) if out is not None else runs[0] / "plots"
        print(f"[export-plots] {len(runs)} run(s) -> {target}")

        rows: List[Dict] = []
        slopes: Dict[str, Optional[float]] = {}
        for run in runs:
            run_rows = _curve_rows(run)
            slopes[run.name] = _slope(run_rows)
            rows += run_rows
        rows.sort(key=lambda r: (r["n_train"], r["run"], r["source"]))

        target.mkdir(parents=True, exist_ok=True)
        with (target / "learning_curve.csv").open("w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=CURVE_EXPORT_COLUMNS, lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow({**r, **{k: repr(float(r[k])) for k in ("fe_complex", "fe_re", "fe_im")}})
        (target / "learning_curve.schema.json").write_text(json.dumps(CURVE_SCHEMA, indent=2) + "\n", encoding="utf-8")

        copied = []
        for run in runs:
            for line in sorted(run.glob("**/focal_line_*.csv")):
                dest = target / f"{run.name}_{line.name}"
                shutil.copyfile(line, dest)
                copied.append(dest.name)

        summary = {"runs": [r.name for r in runs], "loglog_slope": slopes, "focal_lines": copied, "run_files": list(RUN_FILES)}
        (target / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        for name, s in slopes.items():
            print(f"[export-plots] {name}: log-log slope " + ("n/a" if s is None else f"{s:.3f}"))
        print(f"[success] Wrote {len(rows)} curve rows to {target / 'learning_curve.csv'}")
        return EXIT_OK
    except Exception as e:
        return fail("export-plots", e)


__all__ = ["CURVE_EXPORT_COLUMNS", "CURVE_SCHEMA", "export_plots"]
