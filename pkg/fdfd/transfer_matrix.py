"""1D normal-incidence transfer matrices for laterally uniform stacks.

The state carried through the stack is (E, E'/(i k0)). Light enters from the
substrate half-space (index `n_in`) and leaves into the cover half-space
(index `n_out`); layers are listed bottom (substrate side) first. The
transmitted wave is referenced back to the substrate-top plane, the same
phase plane FDFD transmission is normalized against.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from config import N_AIR, N_SILICA
from errors import ConfigError
from geometry import UnitCellSpec, check_bounds

Layer = Tuple[float, float]  # (thickness nm, refractive index)


def _check_layers(layers: Sequence[Layer]) -> List[Layer]:
    out = []
    for thickness, index in layers:
        if thickness < 0 or index < 1:
            raise ConfigError(f"invalid layer (thickness={thickness} nm, index={index})")
        out.append((float(thickness), float(index)))
    return out


def layer_matrix(thickness: float, index: float, wavelength: float) -> np.ndarray:
    delta = 2.0 * np.pi / wavelength * index * thickness
    c, s = np.cos(delta), np.sin(delta)
    return np.array([[c, 1j * s / index], [1j * index * s, c]], dtype=complex)


def stack_matrix(layers: Sequence[Layer], wavelength: float) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for thickness, index in _check_layers(layers):
        m = layer_matrix(thickness, index, wavelength) @ m
    return m


def transfer_matrix_coefficients(
    layers: Sequence[Layer],
    wavelength: float,
    *,
    n_in: float = N_SILICA,
    n_out: float = N_AIR,
) -> Tuple[complex, complex]:
    """Amplitude transmission and reflection (t, r) of the stack."""
    if not wavelength > 0:
        raise ConfigError(f"wavelength must be > 0, got {wavelength}")
    layers = _check_layers(layers)
    m = stack_matrix(layers, wavelength)
    (m11, m12), (m21, m22) = m
    # a = 1 + r is the total field at the substrate-top plane
    a = 2.0 * n_in * (m22 - n_out * m12) / (n_out * m11 - n_out * n_in * m12 - m21 + n_in * m22)
    tau = a * (m11 - m12 * n_in) + 2.0 * m12 * n_in
    total = sum(d for d, _ in layers)
    t = tau * np.exp(-1j * 2.0 * np.pi / wavelength * n_out * total)
    return complex(t), complex(a - 1.0)


def transfer_matrix_stack(
    layers: Sequence[Layer],
    wavelength: float,
    *,
    n_in: float = N_SILICA,
    n_out: float = N_AIR,
) -> complex:
    return transfer_matrix_coefficients(layers, wavelength, n_in=n_in, n_out=n_out)[0]


def relative_transmission(
    layers: Sequence[Layer],
    wavelength: float,
    *,
    n_in: float = N_SILICA,
    n_out: float = N_AIR,
) -> complex:
    """Stack transmission divided by that of the bare n_in -> n_out interface (FDFD's convention)."""
    bare = transfer_matrix_stack([], wavelength, n_in=n_in, n_out=n_out)
    return transfer_matrix_stack(layers, wavelength, n_in=n_in, n_out=n_out) / bare


def bare_interface_power(n_in: float = N_SILICA, n_out: float = N_AIR) -> float:
    return (n_out / n_in) * abs(2.0 * n_in / (n_in + n_out)) ** 2


def cell_effective_layers(spec: UnitCellSpec, widths: np.ndarray) -> List[Layer]:
    """Laterally averaged stack of a unit cell.

    Each hole layer gets eps_eff = f*eps_hole + (1-f)*eps_substrate with fill
    fraction f = width/period; spacers are plain substrate.
    """
    w = check_bounds(widths, spec)
    eps_sub = spec.n_substrate**2
    eps_hole = spec.n_hole**2
    layers: List[Layer] = []
    for k, width in enumerate(w):
        if k > 0 and spec.spacer_height > 0:
            layers.append((spec.spacer_height, spec.n_substrate))
        fill = width / spec.period
        layers.append((spec.hole_height, float(np.sqrt(fill * eps_hole + (1.0 - fill) * eps_sub))))
    return layers


__all__ = [
    "Layer",
    "layer_matrix",
    "stack_matrix",
    "transfer_matrix_coefficients",
    "transfer_matrix_stack",
    "relative_transmission",
    "bare_interface_power",
    "cell_effective_layers",
]
