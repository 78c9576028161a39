from __future__ import annotations

import json
import logging
import time
from pathlib import Path
from typing import Optional

import numpy as np

from errors import ConfigError
from geometry import FrequencyId, denormalize, sample_uniform
from surrogate import hessian_spectrum, load_ensemble, predict, predict_batch
from lensctl.handlers.common import EXIT_OK, fail, oracle_for
from lensctl.runconfig import RunConfig

logger = logging.getLogger("lensctl")


def _write_json(path: Path, data: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def bench(
    cfg: RunConfig,
    ensemble_path: Path,
    out: Optional[Path],
    *,
    n: int = 20,
    oracle_kind: Optional[str] = "fdfd",
) -> int:
    """Mean wall time per point: surrogate predict (one call per point) vs. one oracle label."""
    path = Path(out) if out is not None else Path(cfg.output_dir) / "bench.json"
    try:
        if n < 1:
            raise ConfigError(f"--n must be >= 1, got {n}")
        ensemble = load_ensemble(ensemble_path)
        oracle = oracle_for(cfg, spec=ensemble.spec, kind=oracle_kind)
        widths, freqs = sample_uniform(np.random.default_rng(cfg.master_seed), n, ensemble.spec)
        print(f"[bench] {n} points, surrogate vs. {oracle.kind} oracle")

        predict(ensemble, widths[0], FrequencyId(int(freqs[0])))
        start = time.perf_counter()
        for w, f in zip(widths, freqs):
            predict(ensemble, w, FrequencyId(int(f)))
        surrogate_s = (time.perf_counter() - start) / n

        start = time.perf_counter()
        predict_batch(ensemble, widths, freqs)
        batch_s = (time.perf_counter() - start) / n

        oracle.label_batch(widths, freqs, jobs=1)
        oracle_s = oracle.seconds / n

        report = {
            "n": n,
            "oracle": oracle.kind,
            "unit_cell": ensemble.spec.variant_name,
            "surrogate_s_per_point": surrogate_s,
            "surrogate_batch_s_per_point": batch_s,
            "oracle_s_per_point": oracle_s,
            "speedup": oracle_s / surrogate_s if surrogate_s > 0 else float("inf"),
        }
        _write_json(path, report)
        logger.info(f"[BENCH] surrogate {surrogate_s:.3g}s/pt, oracle {oracle_s:.3g}s/pt")
        print(f"[success] speedup {report['speedup']:.1f}x ({path})")
        return EXIT_OK
    except Exception as e:
        return fail("bench", e)


def hessian(
    cfg: RunConfig,
    ensemble_path: Path,
    out: Optional[Path],
    *,
    wavelength: str = "green",
    point: str = "mid",
    h: float = 0.05,
) -> int:
    """Singular values of the surrogate-mean Hessian at one point, with the s3/s1 ratio per part."""
    path = Path(out) if out is not None else Path(cfg.output_dir) / "hessian.json"
    try:
        ensemble = load_ensemble(ensemble_path)
        spec = ensemble.spec
        f = FrequencyId.from_label(wavelength)
        if point == "mid":
            p = np.full(spec.layer_count, spec.width_mid)
        elif point == "random":
            z = np.random.default_rng(cfg.master_seed).uniform(-(1.0 - h), 1.0 - h, size=spec.layer_count)
            p = denormalize(z, spec)
        else:
            raise ConfigError(f"unknown point '{point}' (mid or random)")
        spectrum = hessian_spectrum(ensemble, p, f, h)
        report = {"wavelength": f.label, "point_nm": [float(v) for v in p], "h": h}
        for part, s in spectrum.items():
            report[f"singular_values_{part}"] = [float(v) for v in s]
            report[f"ratio_s3_s1_{part}"] = float(s[2] / s[0]) if s.size >= 3 and s[0] > 0 else None
        _write_json(path, report)
        print(f"[success] s3/s1 re={report['ratio_s3_s1_re']} im={report['ratio_s3_s1_im']} ({path})")
        return EXIT_OK
    except Exception as e:
        return fail("hessian", e)


__all__ = ["bench", "hessian"]
