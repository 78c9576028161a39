"""Scalar 2D Helmholtz solver for one periodic unit cell.

The permittivity comes as a `BandProfile` (a plain (ny, nx) map is read as
one band per row). Along y every column uses the three-point stencil that is
exact for fields uniform in x: its weights come from the 1D transfer matrices
between neighbouring nodes, so interfaces sit at their true heights and a
laterally uniform stack has no dispersion error. Along x the periodic second
difference carries the fourth-difference terms that cancel the leading error
of that stencil for fields varying in x. Stretched-coordinate absorbers close
the bottom and top rows. A unit planewave travelling up (+y) is injected
through a total-field/scattered-field boundary at `grid.source_row`: rows at
or above it hold the total field, rows below it only the reflected field.
"""

from __future__ import annotations

import logging
from typing import Tuple, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from config import FDFD_RESIDUAL_TOL
from errors import NumericFailure
from fdfd.grid import Grid2D, check_monitor
from fdfd.profile import BandProfile

logger = logging.getLogger("lensctl")

Permittivity = Union[np.ndarray, BandProfile]


class SolverError(NumericFailure):
    """The discrete Helmholtz system could not be solved to tolerance."""


def _pml_profile(grid: Grid2D, y: np.ndarray, k0: float) -> np.ndarray:
    """Complex stretch factor s(y) = 1 + i*sigma(y) at positions y (nm from the grid bottom)."""
    length = grid.pml_thickness * grid.dx
    m = grid.pml_power
    sigma_max = (m + 1) * np.log(1.0 / grid.pml_reflection) / (2.0 * k0 * length)
    top_start = (grid.ny - grid.pml_thickness) * grid.dx
    depth = np.maximum(length - y, 0.0) + np.maximum(y - top_start, 0.0)
    return 1.0 + 1j * sigma_max * (depth / length) ** m


def _as_profile(eps: Permittivity, grid: Grid2D) -> BandProfile:
    if isinstance(eps, BandProfile):
        profile = eps
        if profile.nx != grid.nx:
            raise SolverError(f"band profile has {profile.nx} columns, grid has {grid.nx}")
    else:
        arr = np.asarray(eps, dtype=float)
        if arr.shape != (grid.ny, grid.nx):
            raise SolverError(f"permittivity map shape {arr.shape} does not match grid ({grid.ny}, {grid.nx})")
        if not np.all(np.isfinite(arr)):
            raise SolverError("permittivity map contains non-finite values")
        profile = BandProfile.from_rows(arr, grid.dx)
    for band in profile.bands:
        if not np.all(np.isfinite(band.eps)):
            raise SolverError("permittivity map contains non-finite values")
        if np.any(band.eps <= 0):
            raise SolverError("permittivity must be positive", {"band_nm": [band.y0, band.y1]})
    return profile


def _check_resolution(profile: BandProfile, k0: float, dx: float) -> None:
    k_dx = k0 * np.sqrt(profile.max_eps()) * dx
    if k_dx >= 0.5 * np.pi:
        raise SolverError("grid too coarse for the densest medium", {"k0_n_dx": float(k_dx)})


def _segment_transfer(profile: BandProfile, y_from: float, y_to: float, k0: float) -> Tuple[np.ndarray, np.ndarray]:
    """(a, b) per column with u(y_to) = a*u(y_from) + b*u'(y_from) for fields uniform in x."""
    nx = profile.nx
    m11, m12 = np.ones(nx), np.zeros(nx)
    m21, m22 = np.zeros(nx), np.ones(nx)
    upward = y_to > y_from
    last = len(profile.bands) - 1
    y = y_from
    while y != y_to:
        i = profile.band_index(y, upward=upward)
        band = profile.bands[i]
        if upward:
            stop = y_to if i == last else min(band.y1, y_to)
        else:
            stop = y_to if i == 0 else max(band.y0, y_to)
        kappa = k0 * np.sqrt(band.eps)
        c, s = np.cos(kappa * (stop - y)), np.sin(kappa * (stop - y))
        m11, m12, m21, m22 = (
            c * m11 + s / kappa * m21,
            c * m12 + s / kappa * m22,
            -kappa * s * m11 + c * m21,
            -kappa * s * m12 + c * m22,
        )
        y = stop
    return m11, m12


def _y_stencil(profile: BandProfile, grid: Grid2D, k0: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(down, mid, up) weights of the y part plus k0^2*eps, and the node permittivity; each (ny, nx)."""
    h = grid.dx
    y = (np.arange(grid.ny) + 0.5) * h
    eps_node = profile.node_eps(y)
    kappa = k0 * np.sqrt(eps_node)

    s_node = _pml_profile(grid, y, k0)[:, None]
    s_up = _pml_profile(grid, y + 0.5 * h, k0)[:, None]
    s_down = _pml_profile(grid, y - 0.5 * h, k0)[:, None]
    shape = (grid.ny, grid.nx)
    down = np.broadcast_to(1.0 / (s_node * s_down * h * h), shape).copy()
    up = np.broadcast_to(1.0 / (s_node * s_up * h * h), shape).copy()
    # 2 - 2cos(kh) in place of (kh)^2 makes homogeneous rows outside the absorbers exact
    mid = -(1.0 / s_up + 1.0 / s_down) / (s_node * h * h) + (2.0 - 2.0 * np.cos(kappa * h)) / (h * h)

    for j in range(grid.pml_thickness, grid.ny - grid.pml_thickness):
        if profile.band_index(y[j] - h, upward=True) == profile.band_index(y[j] + h, upward=False):
            continue
        a_up, b_up = _segment_transfer(profile, y[j], y[j] + h, k0)
        a_dn, b_dn = _segment_transfer(profile, y[j], y[j] - h, k0)
        norm = 0.5 * (b_up - b_dn) * h * h
        down[j] = b_up / norm
        up[j] = -b_dn / norm
        mid[j] = (a_up * b_dn - a_dn * b_up) / norm
    return down, mid, up, eps_node


def _second_difference_x_periodic(nx: int, dx: float) -> sp.csr_matrix:
    i = np.arange(nx)
    r = np.concatenate([i, i, i])
    c = np.concatenate([i, (i + 1) % nx, (i - 1) % nx])
    v = np.concatenate([np.full(nx, -2.0), np.ones(nx), np.ones(nx)]) / (dx * dx)
    # duplicate (r, c) pairs are summed, which handles nx = 1 and nx = 2
    return sp.coo_matrix((v, (r, c)), shape=(nx, nx)).tocsr()


def helmholtz_operator(eps: Permittivity, wavelength: float, grid: Grid2D) -> sp.csc_matrix:
    """Sparse system matrix; unknowns ordered row-major over (ny, nx), y outer."""
    profile = _as_profile(eps, grid)
    k0 = 2.0 * np.pi / wavelength
    _check_resolution(profile, k0, grid.dx)
    down, mid, up, eps_node = _y_stencil(profile, grid, k0)
    nx, h = grid.nx, grid.dx

    dyy = sp.diags([down[1:].ravel(), mid.ravel(), up[:-1].ravel()], [-nx, 0, nx], format="csr")
    d2x = _second_difference_x_periodic(nx, h)
    eye_y = sp.identity(grid.ny, format="csr")
    weight = 1.0 - k0 * k0 * eps_node.ravel() * h * h / 6.0
    dxx = sp.diags(weight) @ sp.kron(eye_y, d2x) - (h * h / 6.0) * sp.kron(eye_y, d2x @ d2x)
    return (dyy + dxx).tocsc()


def incident_wave(eps: Permittivity, wavelength: float, grid: Grid2D) -> np.ndarray:
    """Unit planewave travelling up through the medium at the source row.

    It solves the discrete equation exactly in that medium, since the y
    stencil is exact for laterally uniform fields.
    """
    profile = _as_profile(eps, grid)
    y_src = (np.array([grid.source_row - 1, grid.source_row]) + 0.5) * grid.dx
    eps_src = profile.node_eps(y_src)
    if not np.allclose(eps_src, eps_src.flat[0]):
        raise SolverError("source rows must lie in a laterally uniform medium")
    kappa = 2.0 * np.pi / wavelength * np.sqrt(float(eps_src.flat[0]))
    phase = np.exp(1j * kappa * (np.arange(grid.ny) - grid.source_row) * grid.dx)
    return np.repeat(phase[:, None], grid.nx, axis=1)


def _tfsf_source(op: sp.csc_matrix, u_inc: np.ndarray, grid: Grid2D) -> np.ndarray:
    q = np.zeros(u_inc.shape)
    q[grid.source_row :, :] = 1.0
    q = q.ravel()
    u = u_inc.ravel()
    # b = (Q A - A Q) u_inc; nonzero only on the two rows straddling the source row
    return q * (op @ u) - op @ (q * u)


def _relative_residual(op: sp.csc_matrix, u: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(op @ u - b) / max(np.linalg.norm(b), 1e-300))


def solve_cell(eps: Permittivity, wavelength: float, grid: Grid2D) -> np.ndarray:
    """Solve the cell under unit planewave illumination; returns the (ny, nx) complex field."""
    if not wavelength > 0:
        raise SolverError(f"wavelength must be > 0, got {wavelength}")
    profile = _as_profile(eps, grid)

    op = helmholtz_operator(profile, wavelength, grid)
    b = _tfsf_source(op, incident_wave(profile, wavelength, grid), grid)

    diagnostics: dict = {"unknowns": op.shape[0], "wavelength_nm": wavelength}
    u = None
    try:
        u = spla.splu(op).solve(b)
        diagnostics["direct_residual"] = _relative_residual(op, u, b)
    except RuntimeError as e:
        diagnostics["direct_error"] = str(e)

    if u is None or diagnostics["direct_residual"] > FDFD_RESIDUAL_TOL:
        logger.warning(f"[FDFD] Direct solve unusable ({diagnostics}); trying preconditioned GMRES")
        u = _iterative_solve(op, b, diagnostics)

    return u.reshape(grid.ny, grid.nx)


def _iterative_solve(op: sp.csc_matrix, b: np.ndarray, diagnostics: dict) -> np.ndarray:
    try:
        ilu = spla.spilu(op, drop_tol=1e-6, fill_factor=20)
    except RuntimeError as e:
        diagnostics["ilu_error"] = str(e)
        raise SolverError("singular Helmholtz system", diagnostics) from e
    precond = spla.LinearOperator(op.shape, ilu.solve, dtype=complex)
    u, info = spla.gmres(op, b, M=precond, rtol=FDFD_RESIDUAL_TOL * 0.1, restart=200, maxiter=50)
    diagnostics["gmres_info"] = int(info)
    residual = _relative_residual(op, u, b)
    diagnostics["iterative_residual"] = residual
    if info != 0 or residual > FDFD_RESIDUAL_TOL:
        raise SolverError("Helmholtz solve did not reach the residual tolerance", diagnostics)
    return u


def zero_order(field: np.ndarray, row: int) -> complex:
    """Overlap of one field row with the normally propagating planewave mode."""
    return complex(np.mean(field[row, :]))


def extract_transmission(field: np.ndarray, reference_field: np.ndarray, grid: Grid2D) -> complex:
    """Zero-order transmission of `field` relative to the empty-cell `reference_field`."""
    check_monitor(grid, grid.monitor_row)
    ref = zero_order(reference_field, grid.monitor_row)
    if ref == 0:
        raise SolverError("reference field has no zero-order transmission at the monitor")
    return zero_order(field, grid.monitor_row) / ref


def direct_transmission(field: np.ndarray, grid: Grid2D) -> complex:
    """Zero-order transmitted amplitude per unit incident amplitude (not reference-normalized)."""
    check_monitor(grid, grid.monitor_row)
    return zero_order(field, grid.monitor_row)


def extract_reflection(field: np.ndarray, grid: Grid2D) -> complex:
    """Zero-order reflected amplitude, sampled in the scattered-field region below the source."""
    check_monitor(grid, grid.reflection_row)
    return zero_order(field, grid.reflection_row)


def power_balance(t_direct: complex, r: complex, n_in: float, n_out: float) -> float:
    """Transmitted plus reflected power fraction; 1 for a lossless single-order cell."""
    return (n_out / n_in) * abs(t_direct) ** 2 + abs(r) ** 2


__all__ = [
    "SolverError",
    "helmholtz_operator",
    "incident_wave",
    "solve_cell",
    "zero_order",
    "extract_transmission",
    "direct_transmission",
    "extract_reflection",
    "power_balance",
]
