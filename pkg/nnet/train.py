from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config import (
    NN_HIDDEN,
    NN_SIGMA_FLOOR,
    NN_TANH_SCALE,
    TRAIN_BATCH_SIZE,
    TRAIN_DECAY,
    TRAIN_DECAY_START_EPOCH,
    TRAIN_EPOCHS,
    TRAIN_LR0,
)
from errors import ConfigError
from nnet.adam import adam_init, adam_step
from nnet.mlp import MlpParams, NumericError, backward

logger = logging.getLogger("lensctl")


class EmptyDatasetError(ConfigError):
    """Training or evaluation was asked to run on zero rows."""


class TrainConfig(BaseModel):
    """Per-member training settings (the `train` section of the run config)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = TRAIN_EPOCHS
    batch_size: int = TRAIN_BATCH_SIZE
    lr0: float = TRAIN_LR0
    decay: float = TRAIN_DECAY
    decay_start_epoch: int = TRAIN_DECAY_START_EPOCH
    seed: int = 0
    sigma_floor: float = NN_SIGMA_FLOOR
    tanh_scale: float = NN_TANH_SCALE
    hidden: Tuple[int, ...] = NN_HIDDEN

    @field_validator("epochs", "batch_size")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("decay")
    @classmethod
    def _decay_range(cls, v: float) -> float:
        if not 0 < v <= 1:
            raise ValueError("decay must be in (0, 1]")
        return v

    @model_validator(mode="after")
    def _positive_scales(self) -> "TrainConfig":
        if self.lr0 < 0 or self.sigma_floor <= 0 or self.tanh_scale <= 0:
            raise ValueError("lr0 must be >= 0; sigma_floor and tanh_scale must be > 0")
        if self.decay_start_epoch < 0 or not self.hidden or min(self.hidden) < 1:
            raise ValueError("decay_start_epoch must be >= 0 and hidden widths >= 1")
        return self


def learning_rate(cfg: TrainConfig, epoch: int) -> float:
    """Step size for 0-based `epoch`: lr0 up to epoch decay_start_epoch - 1, then one decay per epoch."""
    return cfg.lr0 * cfg.decay ** max(0, epoch - cfg.decay_start_epoch + 1)


def train(
    theta0: MlpParams,
    X: np.ndarray,
    y: np.ndarray,
    cfg: TrainConfig,
    *,
    loss_log: Optional[List[float]] = None,
) -> MlpParams:
    """Mini-batch Adam on the mean Gaussian nll, starting from `theta0` with a fresh optimizer state.

    - One seeded permutation of row indices per epoch; the last batch may be short
    - `loss_log`, when given, receives the mean batch loss of every epoch
    - Deterministic for fixed inputs and cfg.seed
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    n = X.shape[0] if X.ndim == 2 else 0
    if n == 0:
        raise EmptyDatasetError("cannot train on an empty dataset")
    if y.shape[0] != n:
        raise ConfigError(f"{n} inputs but {y.shape[0]} targets")

    rng = np.random.default_rng(cfg.seed)
    theta = theta0.copy()
    state = adam_init(theta)
    for epoch in range(cfg.epochs):
        lr = learning_rate(cfg, epoch)
        order = rng.permutation(n)
        losses = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            loss, grad = backward(theta, X[idx], y[idx])
            theta, state = adam_step(theta, grad, state, lr)
            losses.append(loss)
        if not theta.is_finite():
            raise NumericError("training diverged", {"epoch": epoch, "lr": lr})
        if loss_log is not None:
            loss_log.append(float(np.mean(losses)))
    logger.debug(f"[TRAIN] seed={cfg.seed} n={n} epochs={cfg.epochs} last_loss={losses[-1]:.4g}")
    return theta


__all__ = ["EmptyDatasetError", "TrainConfig", "learning_rate", "train"]
