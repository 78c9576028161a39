from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from errors import ConfigError
from geometry import UnitCellSpec
from nnet import params_from_dict, params_to_dict
from surrogate.ensemble import Ensemble, EnsembleConfig

logger = logging.getLogger("lensctl")

BUNDLE_FORMAT = "lensctl.ensemble/1"


def ensemble_to_dict(e: Ensemble, *, dataset_fingerprint: Optional[str] = None) -> Dict[str, Any]:
    seeds = e.config.seeds()
    j = e.config.members
    cfg_echo = e.config.train.model_dump(mode="json")
    return {
        "format": BUNDLE_FORMAT,
        "config": e.config.model_dump(mode="json"),
        "unit_cell": e.spec.model_dump(mode="json"),
        "dataset_fingerprint": dataset_fingerprint,
        "re_members": [params_to_dict(m, seed=seeds[k], config=cfg_echo) for k, m in enumerate(e.re_members)],
        "im_members": [params_to_dict(m, seed=seeds[j + k], config=cfg_echo) for k, m in enumerate(e.im_members)],
    }


def ensemble_from_dict(data: Dict[str, Any]) -> Ensemble:
    if data.get("format") != BUNDLE_FORMAT:
        raise ConfigError(f"not an ensemble bundle (format={data.get('format')!r})")
    try:
        cfg = EnsembleConfig.model_validate(data["config"])
        spec = UnitCellSpec.model_validate(data["unit_cell"])
        re_members = [params_from_dict(m) for m in data["re_members"]]
        im_members = [params_from_dict(m) for m in data["im_members"]]
    except KeyError as e:
        raise ConfigError(f"ensemble bundle is missing {e}") from e
    if len(re_members) != cfg.members or len(im_members) != cfg.members:
        raise ConfigError("ensemble bundle member count disagrees with its config")
    return Ensemble(re_members=re_members, im_members=im_members, config=cfg, spec=spec)


def save_ensemble(path: Path, e: Ensemble, *, dataset_fingerprint: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(ensemble_to_dict(e, dataset_fingerprint=dataset_fingerprint)), encoding="utf-8")
    logger.info(f"[TRAIN] Saved ensemble to {path}")
    return path


def load_ensemble(path: Path) -> Ensemble:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"ensemble checkpoint not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    return ensemble_from_dict(data)


def bundle_fingerprint(path: Path) -> Optional[str]:
    return json.loads(Path(path).read_text(encoding="utf-8")).get("dataset_fingerprint")


__all__ = [
    "BUNDLE_FORMAT",
    "ensemble_to_dict",
    "ensemble_from_dict",
    "save_ensemble",
    "load_ensemble",
    "bundle_fingerprint",
]
