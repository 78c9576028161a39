from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from errors import ConfigError
from metaopt import (
    OptimizationError,
    initial_design,
    intensity_report,
    label_design,
    load_design,
    objective,
    optimize,
    save_design,
    validate,
    write_report,
    write_trace_csv,
)
from surrogate import bundle_fingerprint, load_ensemble
from lensctl.handlers.common import EXIT_OK, fail, oracle_for, out_dir
from lensctl.runconfig import RunConfig


def design(
    cfg: RunConfig,
    ensemble_path: Path,
    out: Optional[Path],
    *,
    iterations: Optional[int] = None,
) -> int:
    root = out_dir(cfg, out, "design")
    try:
        ensemble = load_ensemble(ensemble_path)
        dcfg = cfg.design if iterations is None else cfg.design.model_copy(update={"iterations": iterations})
        design0 = initial_design(ensemble.spec, dcfg)
        print(f"[design] {dcfg.n_cells} cells, {dcfg.iterations} iterations, noise model {dcfg.noise_model} -> {root}")
        root.mkdir(parents=True, exist_ok=True)
        save_design(root / "initial_design.json", design0)
        try:
            best, trace = optimize(design0, ensemble, dcfg)
        except OptimizationError as e:
            write_trace_csv(root / "trace.csv", e.trace)
            raise
        save_design(root / "design.json", best)
        write_trace_csv(root / "trace.csv", trace)

        start_worst, _ = objective(design0, ensemble, noise_model=dcfg.noise_model)
        worst, per = objective(best, ensemble, noise_model=dcfg.noise_model)
        summary = {
            "ensemble": str(ensemble_path),
            "dataset_fingerprint": bundle_fingerprint(ensemble_path),
            "initial_worst_case": start_worst,
            "worst_case": worst,
            **intensity_report(per),
        }
        (root / "design_summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        print(f"[success] worst-case focal intensity {start_worst:.4g} -> {worst:.4g}")
        return EXIT_OK
    except Exception as e:
        return fail("design", e)


def validate_design(
    cfg: RunConfig,
    design_path: Path,
    out: Optional[Path],
    *,
    ensemble_path: Optional[Path] = None,
    jobs: int = 1,
) -> int:
    """Direct solves of every cell; without --ensemble the design is compared against its own labels."""
    root = out_dir(cfg, out, "validate")
    try:
        d = load_design(design_path)
        oracle = oracle_for(cfg, spec=d.spec)
        print(f"[validate] {d.n_cells} cells x 3 wavelengths with the {oracle.kind} oracle -> {root}")
        if ensemble_path is not None:
            predictor = load_ensemble(ensemble_path)
            if predictor.spec != d.spec:
                raise ConfigError("ensemble and design were built for different unit cells")
            report = validate(d, oracle, predictor, cfg.design, jobs=jobs)
        else:
            labels = label_design(d, oracle, jobs=jobs)
            report = validate(d, oracle, labels, cfg.design, jobs=jobs, labels=labels)
        paths = write_report(root, report, d)
        report_line = ", ".join(f"{k}={v:.3g}" for k, v in report.discrepancy.items())
        print(f"[success] discrepancy {report_line}; summary {paths['summary']}")
        return EXIT_OK
    except Exception as e:
        return fail("validate", e)


__all__ = ["design", "validate_design"]
