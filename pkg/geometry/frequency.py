from __future__ import annotations

from enum import Enum

import numpy as np

from config import WAVELENGTH_BLUE_NM, WAVELENGTH_GREEN_NM, WAVELENGTH_RED_NM
from errors import ConfigError


class FrequencyId(Enum):
    """The three design wavelengths; the value is the one-hot position."""

    BLUE = 0
    GREEN = 1
    RED = 2

    @property
    def wavelength_nm(self) -> float:
        return _WAVELENGTHS[self]

    @property
    def label(self) -> str:
        return self.name.lower()

    def one_hot(self) -> np.ndarray:
        v = np.zeros(len(FrequencyId))
        v[self.value] = 1.0
        return v

    @classmethod
    def from_wavelength(cls, wavelength_nm: float) -> "FrequencyId":
        for f in cls:
            if abs(f.wavelength_nm - float(wavelength_nm)) < 1e-6:
                return f
        raise ConfigError(f"no design frequency at {wavelength_nm} nm")

    @classmethod
    def from_label(cls, label: str) -> "FrequencyId":
        try:
            return cls[str(label).strip().upper()]
        except KeyError:
            raise ConfigError(f"unknown frequency label '{label}'") from None


_WAVELENGTHS = {
    FrequencyId.BLUE: WAVELENGTH_BLUE_NM,
    FrequencyId.GREEN: WAVELENGTH_GREEN_NM,
    FrequencyId.RED: WAVELENGTH_RED_NM,
}

ALL_FREQUENCIES = tuple(FrequencyId)


__all__ = ["FrequencyId", "ALL_FREQUENCIES"]
