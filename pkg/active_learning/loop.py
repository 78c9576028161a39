"""Variance-driven active learning and the random-sampling baseline.

One run:
  1. label `n_init` uniform random points, train the ensemble from scratch;
  2. for each iteration draw M*K uniform candidates, score them with the
     ensemble's pooled variance (no oracle calls), label the top K, and
     retrain on the augmented set (warm start by default);
  3. after every training, record the test-set fractional error.

The baseline is the same run with zero iterations and n_init = budget.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config import (
    AL_ITERATIONS,
    AL_K,
    AL_MAX_RESAMPLE_ROUNDS,
    AL_N_INIT,
    AL_OVERSAMPLING,
    AL_TEST_SIZE,
    DEFAULT_MASTER_SEED,
    TRAIN_EPOCHS,
)
from errors import ConfigError
from geometry import UnitCellSpec, encode_batch, sample_uniform
from surrogate import Ensemble, EnsembleConfig, acquisition_score, fractional_errors, train_ensemble
from active_learning.labeled_set import LabeledSet, RowKey, row_key
from active_learning.oracles import Oracle, OracleError
from active_learning.rundir import RunDirectory

logger = logging.getLogger("lensctl")


class ALConfig(BaseModel):
    """The `al` section of the run config (n_init, M, K, T, test size, master seed)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_init: int = AL_N_INIT
    oversampling: int = AL_OVERSAMPLING
    k: int = AL_K
    k_schedule: Union[Literal["fixed", "doubling"], List[int]] = "doubling"
    iterations: int = AL_ITERATIONS
    test_size: int = AL_TEST_SIZE
    retrain_epochs: int = TRAIN_EPOCHS
    warm_start: bool = True
    seed: int = DEFAULT_MASTER_SEED

    @field_validator("n_init", "oversampling", "k", "test_size", "retrain_epochs")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @model_validator(mode="after")
    def _check_schedule(self) -> "ALConfig":
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if isinstance(self.k_schedule, list):
            if len(self.k_schedule) != self.iterations:
                raise ValueError(
                    f"k_schedule lists {len(self.k_schedule)} values for {self.iterations} iterations"
                )
            if any(k < 1 for k in self.k_schedule):
                raise ValueError("every scheduled K must be >= 1")
        return self


def k_for_iteration(cfg: ALConfig, i: int) -> int:
    """Points acquired in 1-based iteration i."""
    if isinstance(cfg.k_schedule, list):
        return cfg.k_schedule[i - 1]
    if cfg.k_schedule == "doubling":
        return cfg.k * 2 ** (i - 1)
    return cfg.k


def total_budget(cfg: ALConfig) -> int:
    return cfg.n_init + sum(k_for_iteration(cfg, i) for i in range(1, cfg.iterations + 1))


@dataclass
class HistoryRow:
    iter: int
    n_train: int
    fe_complex: float
    fe_re: float
    fe_im: float
    oracle_calls: int
    oracle_seconds: float
    surrogate_eval_seconds: float

    def as_csv_row(self) -> List[str]:
        return [
            str(self.iter),
            str(self.n_train),
            repr(self.fe_complex),
            repr(self.fe_re),
            repr(self.fe_im),
            str(self.oracle_calls),
            repr(self.oracle_seconds),
            repr(self.surrogate_eval_seconds),
        ]


@dataclass
class ALHistory:
    rows: List[HistoryRow] = field(default_factory=list)

    @property
    def final(self) -> HistoryRow:
        return self.rows[-1]


@dataclass
class ALResult:
    ensemble: Ensemble
    history: ALHistory
    train_set: LabeledSet
    test_set: LabeledSet


def seed_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Independent generators for the test set, initial points, candidates and ensemble seeds."""
    names = ("test", "init", "candidates", "ensemble")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def draw_unique(
    rng: np.random.Generator,
    n: int,
    spec: UnitCellSpec,
    exclude: Set[RowKey],
) -> Tuple[np.ndarray, np.ndarray]:
    """n uniform (widths, frequency) rows, none repeating each other or a row in `exclude`."""
    widths, freqs = sample_uniform(rng, n, spec)
    seen = set(exclude)
    kept_w: List[np.ndarray] = []
    kept_f: List[int] = []
    rounds = 0
    while True:
        for w, f in zip(widths, freqs):
            key = row_key(w, f)
            if key not in seen:
                seen.add(key)
                kept_w.append(w)
                kept_f.append(int(f))
        missing = n - len(kept_w)
        if missing <= 0:
            break
        rounds += 1
        if rounds > AL_MAX_RESAMPLE_ROUNDS:
            raise ConfigError(f"could not draw {n} distinct points after {AL_MAX_RESAMPLE_ROUNDS} resampling rounds")
        logger.warning(f"[AL] Resampling {missing} duplicate candidate(s)")
        widths, freqs = sample_uniform(rng, missing, spec)
    return np.array(kept_w, dtype=float).reshape(n, spec.layer_count), np.array(kept_f, dtype=int)


def top_k_indices(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores; equal scores keep candidate order."""
    scores = np.asarray(scores, dtype=float)
    if not 1 <= k <= scores.size:
        raise ConfigError(f"cannot select {k} of {scores.size} candidates")
    return np.argsort(-scores, kind="stable")[:k]


def select_top_k(
    widths: np.ndarray,
    freq_index: np.ndarray,
    ensemble: Ensemble,
    k: int,
) -> Tuple[np.ndarray, np.ndarray]:
    scores = acquisition_score(ensemble.predict_encoded(encode_batch(widths, freq_index, ensemble.spec)))
    idx = top_k_indices(scores, k)
    return np.asarray(widths)[idx], np.asarray(freq_index)[idx]


def evaluate_fe(
    ensemble: Ensemble,
    test_set: LabeledSet,
    train_set: Optional[LabeledSet] = None,
) -> Dict[str, float]:
    """Complex and per-part fractional error of the pooled mean on the test rows."""
    if train_set is not None:
        test_set.check_disjoint(train_set)
    if len(test_set) == 0:
        raise ConfigError("test set is empty")
    pred = ensemble.predict_encoded(test_set.encoded(ensemble.spec))
    return fractional_errors(pred.mu, test_set.t)


def make_test_set(cfg: ALConfig, oracle: Oracle, *, jobs: int = 1) -> LabeledSet:
    """The held-out test set; depends only on cfg.seed, cfg.test_size and the oracle."""
    rng = seed_streams(cfg.seed)["test"]
    widths, freqs = draw_unique(rng, cfg.test_size, oracle.spec, set())
    test_set = LabeledSet(oracle.spec.layer_count)
    test_set.add(oracle.label_batch(widths, freqs, jobs=jobs), "test")
    return test_set


def _label_into(
    oracle: Oracle,
    widths: np.ndarray,
    freqs: np.ndarray,
    tag: str,
    train_set: LabeledSet,
    run_dir: Optional[RunDirectory],
    jobs: int,
) -> None:
    try:
        records = oracle.label_batch(widths, freqs, jobs=jobs)
    except OracleError as e:
        train_set.add(e.records, tag)
        if run_dir is not None:
            run_dir.append_train(e.records)
            run_dir.write_provenance(train_set)
        raise
    train_set.add(records, tag)
    if run_dir is not None:
        run_dir.append_train(records)


def run_active(
    cfg: ALConfig,
    oracle: Oracle,
    ens_cfg: EnsembleConfig,
    *,
    jobs: int = 1,
    record_timings: bool = True,
    run_dir: Optional[RunDirectory] = None,
    test_set: Optional[LabeledSet] = None,
    init_tag: str = "init",
) -> ALResult:
    """Run the acquisition loop; history gets one row per training (iterations + 1 rows)."""
    spec = oracle.spec
    streams = seed_streams(cfg.seed)
    if ens_cfg.member_seeds is None:
        ens_cfg = ens_cfg.model_copy(update={"seed": int(streams["ensemble"].integers(0, 2**63 - 1))})

    if test_set is None:
        test_set = make_test_set(cfg, oracle, jobs=jobs)
    if run_dir is not None:
        run_dir.write_test(test_set)
    base_calls = oracle.calls
    base_seconds = oracle.seconds

    def _record(i: int, ensemble: Ensemble, eval_seconds: float) -> HistoryRow:
        start = time.perf_counter()
        fe = evaluate_fe(ensemble, test_set, train_set)
        eval_seconds += time.perf_counter() - start
        row = HistoryRow(
            iter=i,
            n_train=len(train_set),
            fe_complex=fe["fe_complex"],
            fe_re=fe["fe_re"],
            fe_im=fe["fe_im"],
            oracle_calls=oracle.calls - base_calls,
            oracle_seconds=(oracle.seconds - base_seconds) if record_timings else 0.0,
            surrogate_eval_seconds=eval_seconds if record_timings else 0.0,
        )
        history.rows.append(row)
        if run_dir is not None:
            run_dir.write_history(history)
        logger.info(f"[AL] iter={i} n_train={row.n_train} fe={row.fe_complex:.4g} (re {row.fe_re:.4g}, im {row.fe_im:.4g})")
        return row

    train_set = LabeledSet(spec.layer_count)
    history = ALHistory()
    exclude = test_set.key_set()
    widths, freqs = draw_unique(streams["init"], cfg.n_init, spec, exclude)
    _label_into(oracle, widths, freqs, init_tag, train_set, run_dir, jobs)
    ensemble = train_ensemble(train_set.encoded(spec), train_set.t, ens_cfg, spec, jobs=jobs)
    _record(0, ensemble, 0.0)

    for i in range(1, cfg.iterations + 1):
        k = k_for_iteration(cfg, i)
        exclude = test_set.key_set() | train_set.key_set()
        cand_w, cand_f = draw_unique(streams["candidates"], cfg.oversampling * k, spec, exclude)
        start = time.perf_counter()
        sel_w, sel_f = select_top_k(cand_w, cand_f, ensemble, k)
        scoring_seconds = time.perf_counter() - start
        _label_into(oracle, sel_w, sel_f, f"al_iter_{i}", train_set, run_dir, jobs)
        ensemble = train_ensemble(
            train_set.encoded(spec),
            train_set.t,
            ens_cfg,
            spec,
            warm_start=ensemble if cfg.warm_start else None,
            epochs=cfg.retrain_epochs if cfg.warm_start else None,
            jobs=jobs,
        )
        _record(i, ensemble, scoring_seconds)

    if run_dir is not None:
        run_dir.write_provenance(train_set)
        run_dir.write_ensemble(ensemble)
    return ALResult(ensemble=ensemble, history=history, train_set=train_set, test_set=test_set)


def run_baseline(
    n_total: int,
    cfg: ALConfig,
    oracle: Oracle,
    ens_cfg: EnsembleConfig,
    **kwargs,
) -> ALResult:
    """Random sampling: `n_total` uniform points, one training, one history row."""
    if n_total < 1:
        raise ConfigError(f"n_total must be >= 1, got {n_total}")
    base_cfg = cfg.model_copy(update={"n_init": n_total, "iterations": 0, "k_schedule": "doubling"})
    kwargs.setdefault("init_tag", "baseline")
    return run_active(base_cfg, oracle, ens_cfg, **kwargs)


__all__ = [
    "ALConfig",
    "HistoryRow",
    "ALHistory",
    "ALResult",
    "k_for_iteration",
    "total_budget",
    "seed_streams",
    "draw_unique",
    "top_k_indices",
    "select_top_k",
    "evaluate_fe",
    "make_test_set",
    "run_active",
    "run_baseline",
]
