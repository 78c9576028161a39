from __future__ import annotations

import numpy as np
import pytest

from fdfd import (
    GridSettings,
    MonitorPlacementError,
    ResolutionError,
    SolverError,
    bare_interface_power,
    cell_effective_layers,
    cell_grid,
    check_energy,
    check_monitor,
    direct_transmission,
    extract_reflection,
    extract_transmission,
    label,
    make_grid,
    power_balance,
    rasterize,
    rasterize_layers,
    reference_field,
    relative_transmission,
    solve_cell,
    solve_stack,
    transfer_matrix_coefficients,
)
from geometry import NORMAL_CELL, SMALL_CELL, FrequencyId

N_SUB = 1.45

# Coarse settings that keep every solve below a few thousand unknowns.
COARSE = GridSettings(pixels_per_period=20)


def _mk_stack(rng: np.random.Generator, dx: float) -> list[tuple[float, float]]:
    layers = []
    for _ in range(int(rng.integers(1, 4))):
        thickness = dx * int(rng.integers(4, 20))
        layers.append((thickness, float(rng.uniform(1.0, 2.5))))
    return layers


def _fe(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


def test_transfer_matrix_bare_interface_is_fresnel():
    t, r = transfer_matrix_coefficients([], 540.0)
    assert t == pytest.approx(2 * N_SUB / (N_SUB + 1.0))
    assert r == pytest.approx((N_SUB - 1.0) / (N_SUB + 1.0))
    assert relative_transmission([], 540.0) == pytest.approx(1.0)


def test_transfer_matrix_air_layer_is_invisible():
    assert relative_transmission([(123.0, 1.0)], 405.0) == pytest.approx(1.0)


def test_transfer_matrix_conserves_power():
    rng = np.random.default_rng(3)
    for wl in (405.0, 540.0, 810.0):
        layers = _mk_stack(rng, 10.0)
        t, r = transfer_matrix_coefficients(layers, wl)
        assert power_balance(t, r, N_SUB, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_quarter_wave_coating_cancels_reflection():
    n_c = np.sqrt(N_SUB * 1.0)
    wl = 540.0
    _, r = transfer_matrix_coefficients([(wl / (4 * n_c), n_c)], wl)
    assert abs(r) < 1e-12


def test_effective_layers_follow_cell_layout():
    w = np.full(10, 200.0)
    assert len(cell_effective_layers(NORMAL_CELL, w)) == 19
    layers = cell_effective_layers(SMALL_CELL, w)
    assert len(layers) == 10
    fill = 200.0 / 400.0
    assert layers[0][1] == pytest.approx(np.sqrt(fill * 1.0 + (1 - fill) * N_SUB**2))


def test_grid_layout_and_monitor_checks():
    grid = cell_grid(NORMAL_CELL, FrequencyId.GREEN, GridSettings())
    assert grid.dx == 10.0 and grid.nx == 40
    assert grid.pml_thickness < grid.source_row < grid.structure_start
    assert grid.structure_stop < grid.monitor_row < grid.ny - grid.pml_thickness
    with pytest.raises(MonitorPlacementError):
        check_monitor(grid, 0)
    with pytest.raises(ResolutionError):
        make_grid(400.0, 100.0, 540.0, GridSettings(dx_nm=30.0))


def test_rasterize_is_two_valued_and_sized_by_width():
    grid = cell_grid(NORMAL_CELL, FrequencyId.RED, GridSettings())
    widths = np.linspace(100.0, 300.0, 10)
    eps = rasterize(NORMAL_CELL, widths, grid)
    assert eps.shape == (grid.ny, grid.nx)
    assert set(np.unique(eps).tolist()) == {1.0, N_SUB**2}
    first_hole_row = grid.structure_start + 5
    assert int(np.sum(eps[first_hole_row] == 1.0)) == 10  # 100 nm at 10 nm pixels


def test_rasterize_subpixel_smooths_edges():
    grid = cell_grid(NORMAL_CELL, FrequencyId.RED, GridSettings())
    eps = rasterize(NORMAL_CELL, np.full(10, 105.0), grid, subpixel=True)
    values = np.unique(eps)
    assert values.min() >= 1.0 - 1e-12 and values.max() <= N_SUB**2 + 1e-12
    assert values.size > 2


def test_rasterize_rejects_unresolved_holes():
    grid = cell_grid(NORMAL_CELL, FrequencyId.RED, GridSettings(pixels_per_period=10))
    with pytest.raises(ResolutionError):
        rasterize(NORMAL_CELL, np.full(10, 60.0), grid)


def _random_stack(rng: np.random.Generator) -> list[tuple[float, float]]:
    n_layers = int(rng.integers(1, 4))
    return [(float(rng.uniform(20.0, 300.0)), float(rng.uniform(1.0, 2.5))) for _ in range(n_layers)]


@pytest.mark.parametrize(
    "settings, tol",
    [
        (GridSettings(), 1e-2),
        pytest.param(GridSettings(pixels_per_period=80), 3e-3, marks=pytest.mark.slow),
    ],
)
def test_fdfd_matches_transfer_matrix_on_random_stacks(settings, tol):
    rng = np.random.default_rng(11)
    wavelengths = (405.0, 540.0, 810.0)
    worst = 0.0
    for i in range(21):
        wl = wavelengths[i % 3]
        layers = _random_stack(rng)
        t_fdfd = solve_stack(layers, wl, period=400.0, settings=settings, n_substrate=N_SUB)
        worst = max(worst, _fe(t_fdfd, relative_transmission(layers, wl)))
    assert worst < tol


def test_layer_edges_between_rows_are_not_snapped():
    layers = [(123.0, 2.0), (77.0, 1.3)]
    exact = relative_transmission(layers, 540.0)
    settings = GridSettings()
    grid = make_grid(400.0, 200.0, 540.0, settings)
    snapped_field = solve_cell(rasterize_layers(layers, grid, n_substrate=N_SUB), 540.0, grid)
    snapped = extract_transmission(snapped_field, reference_field(grid, N_SUB, 1.0), grid)
    placed = solve_stack(layers, 540.0, period=400.0, settings=settings, n_substrate=N_SUB)
    assert _fe(placed, exact) < 1e-3
    assert _fe(placed, exact) < _fe(snapped, exact)


def test_vacuum_cell_carries_a_unit_planewave():
    grid = make_grid(400.0, 100.0, 540.0, GridSettings())
    field = solve_cell(np.ones((grid.ny, grid.nx)), 540.0, grid)
    inside = slice(grid.pml_thickness, grid.ny - grid.pml_thickness)
    magnitude = np.abs(field[inside])
    total = np.arange(grid.ny)[inside] >= grid.source_row
    # total-field rows carry the planewave, scattered-field rows stay dark
    assert np.max(np.abs(magnitude[total] - 1.0)) < 1e-3
    assert np.max(magnitude[~total]) < 1e-3


def test_uniform_medium_sets_the_wavenumber():
    grid = make_grid(400.0, 100.0, 540.0, GridSettings())
    field = solve_cell(np.full((grid.ny, grid.nx), 2.1025), 540.0, grid)
    rows = np.arange(grid.source_row, grid.ny - grid.pml_thickness - 1)
    step = field[rows + 1, 0] / field[rows, 0]
    k0 = 2 * np.pi / 540.0
    np.testing.assert_allclose(step, np.exp(1j * 1.45 * k0 * grid.dx), atol=1e-3)


def test_transmission_ignores_lateral_shift_and_mirror():
    widths = np.linspace(80.0, 320.0, 10)
    f = FrequencyId.RED
    grid = cell_grid(NORMAL_CELL, f, GridSettings())
    eps = rasterize(NORMAL_CELL, widths, grid, subpixel=True)
    ref = reference_field(grid, N_SUB, 1.0)

    def _t(m: np.ndarray) -> complex:
        return extract_transmission(solve_cell(m, f.wavelength_nm, grid), ref, grid)

    shifted = np.roll(eps, 3, axis=1)
    t_shifted = _t(shifted)
    assert _t(shifted[:, ::-1]) == pytest.approx(t_shifted, rel=1e-9)
    assert t_shifted == pytest.approx(_t(eps), rel=1e-9)
    assert label(widths, f, NORMAL_CELL).t == label(widths, f, NORMAL_CELL).t


@pytest.mark.slow
@pytest.mark.parametrize("f", list(FrequencyId))
def test_halving_dx_barely_moves_normal_cell_transmission(f):
    widths = np.linspace(80.0, 320.0, 10)
    coarse = label(widths, f, NORMAL_CELL, GridSettings()).t
    fine = label(widths, f, NORMAL_CELL, GridSettings(pixels_per_period=80)).t
    assert _fe(coarse, fine) < 1e-2


def test_empty_stack_has_unit_transmission():
    t = solve_stack([], 540.0, period=20.0, settings=GridSettings(dx_nm=10.0), n_substrate=N_SUB)
    assert t == pytest.approx(1.0, abs=1e-10)


def test_fdfd_power_balance_on_lossless_stack():
    settings = GridSettings(dx_nm=5.0)
    layers = [(100.0, 2.1)]
    grid = make_grid(20.0, 100.0, 540.0, settings)
    field = solve_cell(rasterize_layers(layers, grid, n_substrate=N_SUB), 540.0, grid)
    balance = power_balance(direct_transmission(field, grid), extract_reflection(field, grid), N_SUB, 1.0)
    assert balance == pytest.approx(1.0, abs=2e-2)


def test_solve_cell_rejects_bad_inputs():
    grid = make_grid(20.0, 50.0, 540.0, GridSettings(dx_nm=10.0))
    with pytest.raises(SolverError):
        solve_cell(np.ones((3, 3)), 540.0, grid)
    eps = np.ones((grid.ny, grid.nx))
    eps[0, 0] = np.nan
    with pytest.raises(SolverError):
        solve_cell(eps, 540.0, grid)
    with pytest.raises(SolverError):
        solve_cell(-np.ones((grid.ny, grid.nx)), 540.0, grid)


def test_solve_cell_rejects_grids_too_coarse_for_the_medium():
    grid = make_grid(400.0, 100.0, 405.0, GridSettings(dx_nm=100.0))
    with pytest.raises(SolverError) as exc:
        solve_cell(np.full((grid.ny, grid.nx), N_SUB**2), 405.0, grid)
    assert "k0_n_dx" in exc.value.diagnostics


def test_label_is_deterministic_and_within_energy_bound():
    widths = np.linspace(80.0, 320.0, 10)
    a = label(widths, FrequencyId.RED, NORMAL_CELL, COARSE)
    b = label(widths, FrequencyId.RED, NORMAL_CELL, COARSE)
    assert a.t == b.t
    assert a.params == tuple(widths)
    assert abs(a.t) ** 2 * bare_interface_power(N_SUB, 1.0) <= 1.0 + 1e-2


def test_energy_check_raises_on_gain():
    with pytest.raises(SolverError) as exc:
        check_energy(1.5, N_SUB, 1.0, 1e-2)
    assert "transmitted_power" in exc.value.diagnostics
