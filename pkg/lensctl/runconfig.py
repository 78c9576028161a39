"""JSON run config: one pydantic section per package, every field defaulted.

`unit_cell` accepts either a full cell description or a preset name
("normal", "small", "smallest"). The AL section takes its seed from
`master_seed`; setting `al.seed` directly is rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config import DEFAULT_MASTER_SEED, ENSEMBLE_MEMBERS, RUN_CONFIG_SCHEMA_VERSION
from errors import ConfigError
from active_learning import ALConfig, OracleKind, OracleSettings
from chebyshev import ChebyshevSettings
from fdfd import GridSettings
from geometry import NORMAL_CELL, UnitCellSpec, preset
from metaopt import DesignOptConfig
from nnet import TrainConfig
from surrogate import EnsembleConfig


class EnsembleSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    members: int = ENSEMBLE_MEMBERS
    member_seeds: Optional[List[int]] = None


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: int = RUN_CONFIG_SCHEMA_VERSION
    master_seed: int = DEFAULT_MASTER_SEED
    output_dir: str = "runs"
    record_timings: bool = True
    unit_cell: UnitCellSpec = NORMAL_CELL
    grid: GridSettings = Field(default_factory=GridSettings)
    oracle: OracleKind = "analytic_synthetic"
    ensemble: EnsembleSection = Field(default_factory=EnsembleSection)
    train: TrainConfig = Field(default_factory=TrainConfig)
    al: ALConfig = Field(default_factory=ALConfig)
    chebyshev: ChebyshevSettings = Field(default_factory=ChebyshevSettings)
    design: DesignOptConfig = Field(default_factory=DesignOptConfig)

    @field_validator("schema_version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != RUN_CONFIG_SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {v} (this build reads {RUN_CONFIG_SCHEMA_VERSION})")
        return v

    @field_validator("unit_cell", mode="before")
    @classmethod
    def _preset_name(cls, v: Any) -> Any:
        if isinstance(v, str):
            try:
                return preset(v)
            except ConfigError as e:
                raise ValueError(str(e)) from e
        return v

    @model_validator(mode="before")
    @classmethod
    def _al_seed_from_master(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        al = data.get("al") or {}
        if isinstance(al, ALConfig):
            data = {**data, "al": al.model_copy(update={"seed": data.get("master_seed", DEFAULT_MASTER_SEED)})}
        elif isinstance(al, dict):
            if "seed" in al:
                raise ValueError("set master_seed instead of al.seed")
            data = {**data, "al": {**al, "seed": data.get("master_seed", DEFAULT_MASTER_SEED)}}
        return data

    def with_seed(self, seed: int) -> "RunConfig":
        return RunConfig.model_validate({**self.echo(), "master_seed": int(seed)})

    def _al_echo(self) -> dict:
        data = self.al.model_dump(mode="json")
        data.pop("seed")
        return data

    def echo(self) -> dict:
        """JSON form that loads back into an identical config."""
        data = self.model_dump(mode="json")
        data["al"] = self._al_echo()
        return data

    def oracle_settings(self) -> OracleSettings:
        return OracleSettings(kind=self.oracle, grid=self.grid)

    def ensemble_config(self) -> EnsembleConfig:
        return EnsembleConfig(
            members=self.ensemble.members,
            seed=self.master_seed,
            member_seeds=self.ensemble.member_seeds,
            train=self.train,
        )


def load_run_config(path: Optional[Path]) -> RunConfig:
    """Defaults when `path` is None; ConfigError on a missing, malformed or invalid file."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e}") from e


def save_run_config(path: Path, cfg: RunConfig) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(cfg.echo(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


__all__ = ["EnsembleSection", "RunConfig", "load_run_config", "save_run_config"]
