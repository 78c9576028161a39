"""Labeling oracles: the expensive function the surrogate learns.

Every oracle is a pure function of (widths, frequency). Batches may be labeled
on a thread pool; results always come back in input order.
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import SYNTHETIC_ORACLE_CONSTANTS
from errors import ConfigError, NumericFailure
from fdfd import GridSettings, SolveRecord, cell_effective_layers, label, relative_transmission
from geometry import FrequencyId, UnitCellSpec, check_bounds, normalize

logger = logging.getLogger("lensctl")

OracleKind = Literal["analytic_synthetic", "transfer_matrix_synthetic", "fdfd"]


class OracleError(NumericFailure):
    """Labeling failed part-way; `records` holds every row labeled before the failure, in order."""

    def __init__(self, message: str, records: Sequence[SolveRecord], diagnostics: dict | None = None) -> None:
        super().__init__(message, diagnostics)
        self.records: List[SolveRecord] = list(records)


class OracleSettings(BaseModel):
    """The `oracle` section of the run config."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: OracleKind = "analytic_synthetic"
    grid: GridSettings = Field(default_factory=GridSettings)


class Oracle:
    kind: str = "base"

    def __init__(self, spec: UnitCellSpec) -> None:
        self.spec = spec
        self.calls = 0
        self.seconds = 0.0
        self._lock = threading.Lock()

    def _evaluate(self, widths: np.ndarray, f: FrequencyId) -> complex:
        raise NotImplementedError

    def label_one(self, widths: np.ndarray, f: FrequencyId) -> SolveRecord:
        w = check_bounds(widths, self.spec)
        start = time.perf_counter()
        t = complex(self._evaluate(w, f))
        elapsed = time.perf_counter() - start
        with self._lock:
            self.calls += 1
            self.seconds += elapsed
        return SolveRecord(params=tuple(float(v) for v in w), frequency=f, t=t, wall_time=elapsed)

    def label_batch(self, widths: np.ndarray, freq_index: Sequence[int], *, jobs: int = 1) -> List[SolveRecord]:
        """Label rows in order; on failure raise OracleError carrying the rows finished before it."""
        widths = np.atleast_2d(np.asarray(widths, dtype=float))
        freqs = [FrequencyId(int(i)) for i in freq_index]
        if len(freqs) != widths.shape[0]:
            raise ConfigError(f"{widths.shape[0]} width rows but {len(freqs)} frequencies")
        records: List[SolveRecord] = []
        try:
            if jobs > 1 and len(freqs) > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    for rec in pool.map(self.label_one, widths, freqs):
                        records.append(rec)
            else:
                for w, f in zip(widths, freqs):
                    records.append(self.label_one(w, f))
        except (NumericFailure, ConfigError) as e:
            logger.error(f"[AL] {self.kind} oracle failed after {len(records)}/{len(freqs)} rows: {e}")
            diagnostics = getattr(e, "diagnostics", {})
            raise OracleError(f"{self.kind} oracle failed on row {len(records)}: {e}", records, diagnostics) from e
        return records

    def counters(self) -> dict:
        with self._lock:
            return {"oracle_calls": self.calls, "oracle_seconds": self.seconds}


class AnalyticSyntheticOracle(Oracle):
    """Cheap smooth stand-in: t = exp(i*pi*<c, w>) * (0.6 + 0.4*cos(pi*<a, w>)) on normalized widths w.

    The constants are synthetic, one (c, a) pair per frequency.
    """

    kind = "analytic_synthetic"

    def __init__(self, spec: UnitCellSpec) -> None:
        super().__init__(spec)
        self._c = {}
        self._a = {}
        for f in FrequencyId:
            consts = SYNTHETIC_ORACLE_CONSTANTS[f.label]
            c, a = np.asarray(consts["c"], dtype=float), np.asarray(consts["a"], dtype=float)
            if c.size != spec.layer_count:
                raise ConfigError(f"synthetic constants have {c.size} entries; cell has {spec.layer_count} layers")
            self._c[f], self._a[f] = c, a

    def _evaluate(self, widths: np.ndarray, f: FrequencyId) -> complex:
        w = normalize(widths, self.spec)
        phase = np.pi * float(self._c[f] @ w)
        amplitude = 0.6 + 0.4 * np.cos(np.pi * float(self._a[f] @ w))
        return amplitude * np.exp(1j * phase)


class TransferMatrixSyntheticOracle(Oracle):
    """Transmission of the laterally averaged (effective-medium) stack, normalized like FDFD."""

    kind = "transfer_matrix_synthetic"

    def _evaluate(self, widths: np.ndarray, f: FrequencyId) -> complex:
        return relative_transmission(
            cell_effective_layers(self.spec, widths),
            f.wavelength_nm,
            n_in=self.spec.n_substrate,
            n_out=self.spec.n_background,
        )


class FdfdOracle(Oracle):
    kind = "fdfd"

    def __init__(self, spec: UnitCellSpec, grid: GridSettings | None = None) -> None:
        super().__init__(spec)
        self.grid = grid or GridSettings()

    def _evaluate(self, widths: np.ndarray, f: FrequencyId) -> complex:
        return label(widths, f, self.spec, self.grid).t


def make_oracle(settings: OracleSettings, spec: UnitCellSpec) -> Oracle:
    if settings.kind == "analytic_synthetic":
        return AnalyticSyntheticOracle(spec)
    if settings.kind == "transfer_matrix_synthetic":
        return TransferMatrixSyntheticOracle(spec)
    if settings.kind == "fdfd":
        return FdfdOracle(spec, settings.grid)
    raise ConfigError(f"unknown oracle kind '{settings.kind}'")


__all__ = [
    "OracleKind",
    "OracleError",
    "OracleSettings",
    "Oracle",
    "AnalyticSyntheticOracle",
    "TransferMatrixSyntheticOracle",
    "FdfdOracle",
    "make_oracle",
]
