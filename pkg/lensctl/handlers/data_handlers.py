from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from errors import ConfigError
from active_learning import OracleError, draw_unique, seed_streams
from chebyshev import fit_chebyshev, reduced_widths, save_coeffs
from fdfd import append_records, grid_metadata, write_dataset, write_metadata
from geometry import encode_batch
from surrogate import fractional_errors, predict_batch, train_ensemble
from lensctl.handlers.common import EXIT_OK, fail, oracle_for, out_dir
from lensctl.runconfig import RunConfig, save_run_config

logger = logging.getLogger("lensctl")

GEN_DATA_CHUNK = 256


def gen_data(cfg: RunConfig, n: int, out: Optional[Path], *, jobs: int = 1, oracle_kind: Optional[str] = None) -> int:
    """Label n uniform random points; rows are appended chunk by chunk so a failed run keeps its prefix."""
    path = Path(out) if out is not None else Path(cfg.output_dir) / "dataset.csv"
    try:
        if n < 0:
            raise ConfigError(f"--n must be >= 0, got {n}")
        oracle = oracle_for(cfg, kind=oracle_kind)
        spec = oracle.spec
        print(f"[gen-data] Labeling {n} points with the {oracle.kind} oracle -> {path}")
        write_dataset(path, [], layer_count=spec.layer_count)
        meta = {"oracle": oracle.kind, "master_seed": cfg.master_seed, "n": n, "unit_cell": spec.model_dump(mode="json")}
        if oracle.kind == "fdfd":
            meta["grid"] = grid_metadata(spec, cfg.grid)
        write_metadata(path, meta)
        if n == 0:
            print(f"[success] Wrote header-only dataset {path}")
            return EXIT_OK

        widths, freqs = draw_unique(np.random.default_rng(cfg.master_seed), n, spec, set())
        done = 0
        for start in range(0, n, GEN_DATA_CHUNK):
            stop = min(start + GEN_DATA_CHUNK, n)
            try:
                records = oracle.label_batch(widths[start:stop], freqs[start:stop], jobs=jobs)
            except OracleError as e:
                append_records(path, e.records, layer_count=spec.layer_count, record_timings=cfg.record_timings)
                print(f"[error] kept {done + len(e.records)} labeled rows in {path}")
                raise
            append_records(path, records, layer_count=spec.layer_count, record_timings=cfg.record_timings)
            done = stop
            logger.info(f"[FDFD] labeled {done}/{n}")
        print(f"[success] Wrote {n} rows to {path} ({oracle.seconds:.2f}s oracle time)")
        return EXIT_OK
    except Exception as e:
        return fail("gen-data", e)


def _reduced_points(rng: np.random.Generator, n: int, d: int, freq_values: list[int], spec):
    x = rng.uniform(-1.0, 1.0, size=(n, d))
    freqs = rng.choice(np.asarray(freq_values, dtype=int), size=n)
    return reduced_widths(x, spec), freqs


def cheb_run(cfg: RunConfig, out: Optional[Path], *, jobs: int = 1, compare_nn: bool = False) -> int:
    """Fit the tensor Chebyshev baseline and score it on a held-out set in the same reduced domain."""
    root = out_dir(cfg, out, f"cheb_seed{cfg.master_seed}")
    try:
        settings = cfg.chebyshev
        oracle = oracle_for(cfg)
        spec = oracle.spec
        n, d = settings.points_per_dim, settings.dimension
        print(f"[cheb-run] n={n} d={d} ({n ** d} nodes per frequency) -> {root}")
        root.mkdir(parents=True, exist_ok=True)
        save_run_config(root / "config.json", cfg)

        model = fit_chebyshev(oracle, settings, jobs=jobs)
        save_coeffs(root / "coeffs.json", model)
        node_labels = oracle.calls

        freq_values = [f.value for f in settings.frequency_ids()]
        streams = seed_streams(cfg.master_seed)
        test_w, test_f = _reduced_points(streams["test"], cfg.al.test_size, d, freq_values, spec)
        test_t = np.array([r.t for r in oracle.label_batch(test_w, test_f, jobs=jobs)])
        fe = fractional_errors(model.predict(test_w, test_f), test_t)
        summary = {
            "method": "chebyshev",
            "points_per_dim": n,
            "dimension": d,
            "n_train": model.node_count,
            "node_labels": node_labels,
            "test_size": int(test_t.size),
            **fe,
        }
        logger.info(f"[CHEB] fe={fe['fe_complex']:.4g} with {model.node_count} nodes per frequency")

        if compare_nn:
            train_w, train_f = _reduced_points(streams["init"], model.node_count, d, freq_values, spec)
            train_t = np.array([r.t for r in oracle.label_batch(train_w, train_f, jobs=jobs)])
            ens = train_ensemble(encode_batch(train_w, train_f, spec), train_t, cfg.ensemble_config(), spec, jobs=jobs)
            summary["nn"] = {"n_train": model.node_count, **fractional_errors(predict_batch(ens, test_w, test_f).mu, test_t)}

        (root / "cheb.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
        msg = f"[success] Chebyshev fe={fe['fe_complex']:.4g}"
        if compare_nn:
            msg += f", NN fe={summary['nn']['fe_complex']:.4g} at the same budget"
        print(msg)
        return EXIT_OK
    except Exception as e:
        return fail("cheb-run", e)


__all__ = ["gen_data", "cheb_run", "GEN_DATA_CHUNK"]
