"""Deep-ensemble surrogate of the complex transmission t(p).

Two independent groups of J networks model Re t and Im t. Members of a group
see the same training rows and differ only in their seeds (initial weights and
batch order). Group outputs are pooled into a mean and a variance per part.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import ENSEMBLE_MEMBERS, NN_INPUT_SIZE
from geometry import FrequencyId, ParamVector, UnitCellSpec, encode_batch
from nnet import MlpParams, TrainConfig, forward_batch, init_params, input_gradient_batch, train
from surrogate.pooling import pool_arrays

logger = logging.getLogger("lensctl")


class EnsembleConfig(BaseModel):
    """The `ensemble` section of the run config.

    `member_seeds` lists 2J seeds (J real-part members, then J imaginary-part
    members); when omitted they are derived from `seed`.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    members: int = ENSEMBLE_MEMBERS
    seed: int = 0
    member_seeds: Optional[List[int]] = None
    train: TrainConfig = Field(default_factory=TrainConfig)

    @model_validator(mode="after")
    def _check(self) -> "EnsembleConfig":
        if self.members < 2:
            raise ValueError("an ensemble needs at least 2 members per part")
        if self.member_seeds is not None and len(self.member_seeds) != 2 * self.members:
            raise ValueError(f"member_seeds needs {2 * self.members} entries, got {len(self.member_seeds)}")
        return self

    def seeds(self) -> List[int]:
        if self.member_seeds is not None:
            return list(self.member_seeds)
        state = np.random.SeedSequence(self.seed).generate_state(2 * self.members)
        return [int(s) for s in state]


@dataclass(frozen=True)
class SurrogatePrediction:
    mu_re: float
    mu_im: float
    var_re: float
    var_im: float

    @property
    def mu(self) -> complex:
        return complex(self.mu_re, self.mu_im)


@dataclass(frozen=True)
class PredictionBatch:
    """Pooled predictions for n inputs; every field has shape (n,)."""

    mu_re: np.ndarray
    mu_im: np.ndarray
    var_re: np.ndarray
    var_im: np.ndarray

    @property
    def mu(self) -> np.ndarray:
        return self.mu_re + 1j * self.mu_im

    def at(self, i: int) -> SurrogatePrediction:
        return SurrogatePrediction(
            mu_re=float(self.mu_re[i]),
            mu_im=float(self.mu_im[i]),
            var_re=float(self.var_re[i]),
            var_im=float(self.var_im[i]),
        )


@dataclass(frozen=True)
class PartGradient:
    """Pooled mean/std of one part and their derivatives w.r.t. the network input, shape (n, inputs)."""

    mu: np.ndarray
    sigma: np.ndarray
    d_mu: np.ndarray
    d_sigma: np.ndarray


@dataclass
class Ensemble:
    re_members: List[MlpParams]
    im_members: List[MlpParams]
    config: EnsembleConfig
    spec: UnitCellSpec

    def encode(self, widths: np.ndarray, freq_index: Sequence[int]) -> np.ndarray:
        return encode_batch(widths, freq_index, self.spec)

    def predict_encoded(self, X: np.ndarray) -> PredictionBatch:
        mu_re, var_re = _pool_part(self.re_members, X)
        mu_im, var_im = _pool_part(self.im_members, X)
        return PredictionBatch(mu_re=mu_re, mu_im=mu_im, var_re=var_re, var_im=var_im)

    def gradient_encoded(self, X: np.ndarray) -> Tuple[PartGradient, PartGradient]:
        return _pooled_gradient(self.re_members, X), _pooled_gradient(self.im_members, X)


def _pool_part(members: Sequence[MlpParams], X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    outs = [forward_batch(m, X) for m in members]
    return pool_arrays(np.stack([o[0] for o in outs]), np.stack([o[1] for o in outs]))


def _pooled_gradient(members: Sequence[MlpParams], X: np.ndarray) -> PartGradient:
    mus, sigmas, d_mus, d_sigmas = [], [], [], []
    for m in members:
        mu, sigma = forward_batch(m, X)
        d_mu, d_sigma = input_gradient_batch(m, X)
        mus.append(mu)
        sigmas.append(sigma)
        d_mus.append(d_mu)
        d_sigmas.append(d_sigma)
    mu_i, sig_i = np.stack(mus), np.stack(sigmas)
    dmu_i, dsig_i = np.stack(d_mus), np.stack(d_sigmas)
    mu_star, var_star = pool_arrays(mu_i, sig_i)
    d_mu_star = dmu_i.mean(axis=0)
    # d var* = mean(2 sigma_i d sigma_i + 2 mu_i d mu_i) - 2 mu* d mu*
    d_var = (2.0 * (sig_i[..., None] * dsig_i + mu_i[..., None] * dmu_i)).mean(axis=0)
    d_var -= 2.0 * mu_star[:, None] * d_mu_star
    sigma_star = np.sqrt(var_star)
    return PartGradient(mu=mu_star, sigma=sigma_star, d_mu=d_mu_star, d_sigma=d_var / (2.0 * sigma_star[:, None]))


def untrained_ensemble(cfg: EnsembleConfig, spec: UnitCellSpec) -> Ensemble:
    """Freshly initialized members, seeded from cfg.seeds()."""
    sizes = (NN_INPUT_SIZE, *cfg.train.hidden, 2)
    members = [
        init_params(
            np.random.default_rng(s),
            sizes,
            tanh_scale=cfg.train.tanh_scale,
            sigma_floor=cfg.train.sigma_floor,
        )
        for s in cfg.seeds()
    ]
    return Ensemble(re_members=members[: cfg.members], im_members=members[cfg.members :], config=cfg, spec=spec)


def train_ensemble(
    X: np.ndarray,
    t: np.ndarray,
    cfg: EnsembleConfig,
    spec: UnitCellSpec,
    *,
    warm_start: Optional[Ensemble] = None,
    epochs: Optional[int] = None,
    jobs: int = 1,
) -> Ensemble:
    """Train all 2J members on encoded inputs X and complex labels t.

    - Members start from `warm_start` when given (fresh Adam state), else from seeded initialization
    - Member k trains with seed cfg.seeds()[k]; members run concurrently when jobs > 1
    - Output does not depend on `jobs`
    """
    t = np.asarray(t, dtype=complex).reshape(-1)
    start = warm_start if warm_start is not None else untrained_ensemble(cfg, spec)
    starts = start.re_members + start.im_members
    targets = [t.real] * cfg.members + [t.imag] * cfg.members
    update = {"epochs": epochs} if epochs is not None else {}
    member_cfgs = [cfg.train.model_copy(update={"seed": s, **update}) for s in cfg.seeds()]

    def _fit(k: int) -> MlpParams:
        return train(starts[k], X, targets[k], member_cfgs[k])

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trained = list(pool.map(_fit, range(len(starts))))
    else:
        trained = [_fit(k) for k in range(len(starts))]
    logger.info(f"[TRAIN] Trained {len(trained)} members on {len(t)} rows")
    return Ensemble(re_members=trained[: cfg.members], im_members=trained[cfg.members :], config=cfg, spec=spec)


def predict(e: Ensemble, p: ParamVector, f: FrequencyId) -> SurrogatePrediction:
    return e.predict_encoded(e.encode(np.atleast_2d(p), [f.value])).at(0)


def predict_batch(e: Ensemble, widths: np.ndarray, freq_index: Sequence[int]) -> PredictionBatch:
    return e.predict_encoded(e.encode(widths, freq_index))


def acquisition_score(pred: SurrogatePrediction | PredictionBatch):
    """Sum of the pooled variances of both parts; works element-wise on batches."""
    return pred.var_re + pred.var_im


__all__ = [
    "EnsembleConfig",
    "SurrogatePrediction",
    "PredictionBatch",
    "PartGradient",
    "Ensemble",
    "untrained_ensemble",
    "train_ensemble",
    "predict",
    "predict_batch",
    "acquisition_score",
]
