from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config import CHEB_NODE_CAP, CHEB_POINTS_PER_DIM, CELL_LAYER_COUNT
from errors import ConfigError
from fdfd import SolveRecord
from geometry import FrequencyId, UnitCellSpec, denormalize, normalize
from chebyshev.tensor import ChebCoeffs, check_capacity, eval_coeffs, fit, tensor_nodes

logger = logging.getLogger("lensctl")

COEFFS_FORMAT = "lensctl.chebyshev/1"


class ChebyshevSettings(BaseModel):
    """The `chebyshev` section of the run config.

    Only the first `dimension` widths vary; the rest are held at the middle
    of the width range.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    points_per_dim: int = CHEB_POINTS_PER_DIM
    dimension: int = CELL_LAYER_COUNT
    frequencies: List[str] = ["blue", "green", "red"]
    node_cap: int = CHEB_NODE_CAP

    @field_validator("points_per_dim", "dimension", "node_cap")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @model_validator(mode="after")
    def _check(self) -> "ChebyshevSettings":
        if not self.frequencies:
            raise ValueError("at least one frequency is required")
        for label in self.frequencies:
            FrequencyId.from_label(label)
        return self

    def frequency_ids(self) -> List[FrequencyId]:
        return [FrequencyId.from_label(label) for label in self.frequencies]


def reduced_widths(x: np.ndarray, spec: UnitCellSpec) -> np.ndarray:
    """Full width vectors from reduced normalized coordinates (first d widths free, rest at midpoint)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    d = x.shape[1]
    if d > spec.layer_count:
        raise ConfigError(f"reduced dimension {d} exceeds the {spec.layer_count} layers")
    widths = np.full((x.shape[0], spec.layer_count), spec.width_mid)
    widths[:, :d] = denormalize(x, spec)
    return widths


@dataclass
class ChebyshevSurrogate:
    """One (Re, Im) interpolant pair per fitted frequency."""

    spec: UnitCellSpec
    dimension: int
    points_per_dim: int
    re: Dict[FrequencyId, ChebCoeffs]
    im: Dict[FrequencyId, ChebCoeffs]

    @property
    def node_count(self) -> int:
        return self.points_per_dim**self.dimension

    def predict(self, widths: np.ndarray, freq_index: Sequence[int]) -> np.ndarray:
        """Complex t at full width vectors; only the first `dimension` widths are used."""
        widths = np.atleast_2d(np.asarray(widths, dtype=float))
        x = normalize(widths, self.spec)[:, : self.dimension]
        freqs = np.asarray(freq_index, dtype=int).reshape(-1)
        out = np.empty(widths.shape[0], dtype=complex)
        for f in FrequencyId:
            rows = np.nonzero(freqs == f.value)[0]
            if rows.size == 0:
                continue
            if f not in self.re:
                raise ConfigError(f"no Chebyshev interpolant fitted for {f.label}")
            out[rows] = eval_coeffs(self.re[f], x[rows]) + 1j * eval_coeffs(self.im[f], x[rows])
        return out


def fit_from_records(
    records_by_freq: Dict[FrequencyId, Sequence[SolveRecord]],
    spec: UnitCellSpec,
    n: int,
    d: int,
) -> ChebyshevSurrogate:
    """Fit from node labels given in tensor_nodes order, one sequence per frequency."""
    re, im = {}, {}
    for f, records in records_by_freq.items():
        t = np.array([r.t for r in records], dtype=complex)
        re[f] = fit(t.real, n, d)
        im[f] = fit(t.imag, n, d)
    return ChebyshevSurrogate(spec=spec, dimension=d, points_per_dim=n, re=re, im=im)


def fit_chebyshev(oracle, settings: ChebyshevSettings, *, jobs: int = 1) -> ChebyshevSurrogate:
    """Label the n^d tensor nodes at every configured frequency with `oracle` and fit."""
    spec = oracle.spec
    n, d = settings.points_per_dim, settings.dimension
    check_capacity(n, d, settings.node_cap)
    widths = reduced_widths(tensor_nodes(n, d, cap=settings.node_cap), spec)
    labeled = {}
    for f in settings.frequency_ids():
        logger.info(f"[CHEB] Labeling {widths.shape[0]} nodes (n={n}, d={d}) at {f.label}")
        labeled[f] = oracle.label_batch(widths, [f.value] * widths.shape[0], jobs=jobs)
    return fit_from_records(labeled, spec, n, d)


def save_coeffs(path: Path, model: ChebyshevSurrogate) -> Path:
    def _pack(c: ChebCoeffs) -> dict:
        return {"shape": list(c.values.shape), "values": [float(v) for v in c.values.ravel()]}

    data = {
        "format": COEFFS_FORMAT,
        "unit_cell": model.spec.model_dump(mode="json"),
        "dimension": model.dimension,
        "points_per_dim": model.points_per_dim,
        "frequencies": {f.label: {"re": _pack(model.re[f]), "im": _pack(model.im[f])} for f in model.re},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def load_coeffs(path: Path) -> ChebyshevSurrogate:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Chebyshev coefficients not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    if data.get("format") != COEFFS_FORMAT:
        raise ConfigError(f"{path} is not a Chebyshev coefficient file")

    def _unpack(block: dict) -> ChebCoeffs:
        return ChebCoeffs(values=np.asarray(block["values"], dtype=float).reshape(block["shape"]))

    re, im = {}, {}
    for label, parts in data["frequencies"].items():
        f = FrequencyId.from_label(label)
        re[f], im[f] = _unpack(parts["re"]), _unpack(parts["im"])
    return ChebyshevSurrogate(
        spec=UnitCellSpec.model_validate(data["unit_cell"]),
        dimension=int(data["dimension"]),
        points_per_dim=int(data["points_per_dim"]),
        re=re,
        im=im,
    )


__all__ = [
    "COEFFS_FORMAT",
    "ChebyshevSettings",
    "ChebyshevSurrogate",
    "reduced_widths",
    "fit_from_records",
    "fit_chebyshev",
    "save_coeffs",
    "load_coeffs",
]
