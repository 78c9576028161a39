from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence

from errors import ConfigError, NumericFailure
from active_learning import Oracle, make_oracle
from geometry import UnitCellSpec
from lensctl.runconfig import RunConfig

logger = logging.getLogger("lensctl")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def fail(command: str, e: BaseException) -> int:
    """Print the operator-facing error line and map the exception to an exit code."""
    if isinstance(e, NumericFailure):
        print(f"[error] {command} failed: {e}")
        if e.diagnostics:
            print(f"[error] diagnostics: {e.diagnostics}")
        logger.debug(f"[{command}] numeric failure", exc_info=e)
        return EXIT_NUMERIC
    if isinstance(e, (ConfigError, FileNotFoundError)):
        print(f"[error] {command}: {e}")
        return EXIT_CONFIG
    logger.exception(f"[{command}] unexpected failure")
    print(f"[error] {command} failed: {e}")
    return EXIT_NUMERIC


def oracle_for(cfg: RunConfig, spec: Optional[UnitCellSpec] = None, kind: Optional[str] = None) -> Oracle:
    settings = cfg.oracle_settings()
    if kind is not None:
        settings = settings.model_copy(update={"kind": kind})
    return make_oracle(settings, spec if spec is not None else cfg.unit_cell)


def out_dir(cfg: RunConfig, out: Optional[Path], default_name: str) -> Path:
    return Path(out) if out is not None else Path(cfg.output_dir) / default_name


def seeds_for(cfg: RunConfig, seed_list: Optional[Sequence[int]]) -> list[int]:
    return list(seed_list) if seed_list else [cfg.master_seed]


__all__ = ["EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERIC", "fail", "oracle_for", "out_dir", "seeds_for"]
