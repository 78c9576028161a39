"""Self-describing JSON checkpoints for one network.

Arrays are stored flattened row-major next to their shapes. Python's json
writes floats with repr, which reads back to the identical f64.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

from errors import ConfigError
from nnet.mlp import MlpParams

CHECKPOINT_FORMAT = "lensctl.mlp/1"


def params_to_dict(
    theta: MlpParams,
    *,
    seed: Optional[int] = None,
    config: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    return {
        "format": CHECKPOINT_FORMAT,
        "layer_sizes": list(theta.layer_sizes),
        "tanh_scale": float(theta.tanh_scale),
        "sigma_floor": float(theta.sigma_floor),
        "seed": seed,
        "config": config or {},
        "layers": [
            {
                "weight_shape": list(w.shape),
                "weight": [float(v) for v in w.ravel()],
                "bias": [float(v) for v in b.ravel()],
            }
            for w, b in zip(theta.weights, theta.biases)
        ],
    }


def params_from_dict(data: Dict[str, Any]) -> MlpParams:
    if data.get("format") != CHECKPOINT_FORMAT:
        raise ConfigError(f"not a network checkpoint (format={data.get('format')!r})")
    try:
        weights, biases = [], []
        for layer in data["layers"]:
            shape = tuple(int(s) for s in layer["weight_shape"])
            w = np.asarray(layer["weight"], dtype=float).reshape(shape)
            b = np.asarray(layer["bias"], dtype=float)
            if b.shape != (shape[1],):
                raise ConfigError(f"bias of length {b.shape[0]} does not match weight shape {shape}")
            weights.append(w)
            biases.append(b)
        theta = MlpParams(
            weights=weights,
            biases=biases,
            tanh_scale=float(data["tanh_scale"]),
            sigma_floor=float(data["sigma_floor"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed network checkpoint: {e}") from e
    if list(theta.layer_sizes) != list(data.get("layer_sizes", theta.layer_sizes)):
        raise ConfigError("checkpoint layer_sizes disagree with stored arrays")
    return theta


def save_checkpoint(path: Path, theta: MlpParams, **meta: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(params_to_dict(theta, **meta)), encoding="utf-8")
    return path


def load_checkpoint(path: Path) -> MlpParams:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"checkpoint not found: {path}")
    return params_from_dict(json.loads(path.read_text(encoding="utf-8")))


__all__ = ["CHECKPOINT_FORMAT", "params_to_dict", "params_from_dict", "save_checkpoint", "load_checkpoint"]
