from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from active_learning import ALConfig, AnalyticSyntheticOracle, make_test_set, run_active, run_baseline, total_budget
from errors import ConfigError
from geometry import NORMAL_CELL, BoundsError, FrequencyId, denormalize, normalize
from metaopt import (
    DesignOptConfig,
    FocalSpec,
    GeometryError,
    LabelTable,
    MetasurfaceDesign,
    expected_intensity,
    field_at,
    field_from_amplitudes,
    focal_line,
    focal_line_x,
    greens_row,
    initial_design,
    kernel_matrix,
    label_design,
    load_design,
    objective,
    optimize,
    read_focal_line_csv,
    relative_l2,
    save_design,
    soft_objective,
    softmin,
    surrogate_prediction,
    validate,
    write_report,
    write_trace_csv,
)
from nnet import TrainConfig, min_abs_preactivation
from surrogate import EnsembleConfig, untrained_ensemble

TINY = EnsembleConfig(members=2, seed=11, train=TrainConfig(hidden=(8, 8)))


def _mk_design(n_cells: int = 4, seed: int = 0, **kwargs) -> MetasurfaceDesign:
    return initial_design(NORMAL_CELL, DesignOptConfig(n_cells=n_cells, seed=seed, **kwargs))


def _kink_free_design(ensemble, n_cells: int = 3) -> MetasurfaceDesign:
    members = ensemble.re_members + ensemble.im_members
    for seed in range(100):
        design = _mk_design(n_cells, seed)
        X = np.vstack([ensemble.encode(design.cells, [f.value] * n_cells) for f in FrequencyId])
        if all(min_abs_preactivation(m, x) > 1e-3 for m in members for x in X):
            return design
    raise AssertionError("no kink-free design found")


def test_greens_kernel_scaling_and_phase():
    wl = 0.54
    g1 = greens_row((0.0, 10.0), 0.0, wl)
    g4 = greens_row((0.0, 40.0), 0.0, wl)
    assert abs(g4) == pytest.approx(abs(g1) / 2.0)
    ratio = greens_row((0.0, 10.0 + wl), 0.0, wl) / g1
    assert np.angle(ratio) == pytest.approx(0.0, abs=1e-9)
    # obliquity factor y / rho
    off_axis = greens_row((10.0, 10.0), 0.0, wl)
    assert abs(off_axis) == pytest.approx((1 / np.sqrt(np.hypot(10.0, 10.0))) * (10.0 / np.hypot(10.0, 10.0)))


def test_greens_kernel_rejects_near_and_below():
    with pytest.raises(GeometryError):
        greens_row((0.0, 0.0), 0.0, 0.54)
    with pytest.raises(GeometryError):
        greens_row((0.0, 0.3), 0.0, 0.54)


def test_uniform_aperture_is_normalized_to_unit_focal_intensity():
    design = _mk_design(10, init="midpoint")
    for f in FrequencyId:
        y = design.focal.point(f)[1]
        e = field_from_amplitudes(np.array([[0.0, y]]), design, np.ones(design.n_cells), f)
        assert abs(e[0]) ** 2 == pytest.approx(1.0)


def test_field_is_linear_in_amplitudes():
    design = _mk_design(5)
    rng = np.random.default_rng(1)
    t1 = rng.normal(size=5) + 1j * rng.normal(size=5)
    t2 = rng.normal(size=5) + 1j * rng.normal(size=5)
    pts = np.array([[-3.0, 40.0], [0.0, 60.0], [7.5, 80.0]])
    f = FrequencyId.BLUE
    lhs = field_from_amplitudes(pts, design, 2.0 * t1 - 0.5j * t2, f)
    rhs = 2.0 * field_from_amplitudes(pts, design, t1, f) - 0.5j * field_from_amplitudes(pts, design, t2, f)
    assert np.allclose(lhs, rhs)
    assert np.all(field_from_amplitudes(pts, design, np.zeros(5), f) == 0)


def test_expected_intensity_reductions():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    one = _mk_design(1)
    pts = np.array([[0.0, 60.0], [4.0, 50.0]])
    f = FrequencyId.GREEN
    assert np.allclose(
        expected_intensity(pts, one, ensemble, f, noise_model="global"),
        expected_intensity(pts, one, ensemble, f, noise_model="per_cell"),
    )
    design = _mk_design(6)
    mean_only = np.abs(field_at(pts, design, ensemble, f)) ** 2
    for model in ("global", "per_cell"):
        assert np.all(expected_intensity(pts, design, ensemble, f, noise_model=model) >= mean_only)
    with pytest.raises(ConfigError):
        expected_intensity(pts, design, ensemble, f, noise_model="banana")


def _sampled_intensity(K: np.ndarray, mu: np.ndarray, sigma: np.ndarray, eps: np.ndarray) -> tuple[float, float]:
    """Mean sampled intensity and its standard error."""
    t = mu[None, :] + sigma[None, :] * eps
    samples = np.abs(-t @ K) ** 2
    return float(np.mean(samples)), float(np.std(samples) / np.sqrt(len(samples)))


@pytest.mark.parametrize("noise_model", ["global", "per_cell"])
def test_noise_model_matches_sampled_average(noise_model):
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    rng = np.random.default_rng(3)
    draws = 100_000
    for trial in range(20):
        design = _mk_design(int(rng.integers(2, 13)), seed=trial)
        f = list(FrequencyId)[trial % 3]
        pts = np.array([[float(rng.uniform(-8.0, 8.0)), 60.0]])
        pred = surrogate_prediction(design, ensemble, f)
        sigma = np.sqrt(pred.var_re) + 1j * np.sqrt(pred.var_im)
        cols = 1 if noise_model == "global" else design.n_cells
        eps = rng.normal(size=(draws, cols))
        sampled, se = _sampled_intensity(kernel_matrix(pts, design, f)[0], pred.mu, sigma, eps)
        expected = expected_intensity(pts, design, ensemble, f, noise_model=noise_model)[0]
        assert abs(sampled - expected) <= max(1e-2 * expected, 3.0 * se)


def test_global_noise_is_exact_for_standardized_draws():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design = _mk_design(5, seed=2)
    f = FrequencyId.RED
    pts = np.array([[10.0, 60.0]])
    pred = surrogate_prediction(design, ensemble, f)
    sigma = np.sqrt(pred.var_re) + 1j * np.sqrt(pred.var_im)
    eps = np.random.default_rng(3).normal(size=4000)
    eps = (eps - eps.mean()) / eps.std()
    sampled, _ = _sampled_intensity(kernel_matrix(pts, design, f)[0], pred.mu, sigma, eps[:, None])
    expected = expected_intensity(pts, design, ensemble, f, noise_model="global")[0]
    assert sampled == pytest.approx(expected, rel=1e-9)


def test_mirrored_design_mirrors_intensity():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design = _mk_design(6, seed=7)
    pts = np.array([[-6.0, 60.0], [2.5, 45.0]])
    mirrored_pts = pts * np.array([-1.0, 1.0])
    for f in FrequencyId:
        a = expected_intensity(pts, design, ensemble, f)
        b = expected_intensity(mirrored_pts, design.mirrored(), ensemble, f)
        assert np.allclose(a, b, rtol=1e-10)


def test_softmin_bounds():
    values = np.array([0.3, 0.5, 0.9])
    assert softmin(values, 1e4) == pytest.approx(0.3, abs=1e-3)
    assert softmin(values, 1.0) < 0.3


def test_gradient_matches_finite_differences():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design = _kink_free_design(ensemble)
    beta = 20.0
    value, per, grad = soft_objective(design, ensemble, beta)
    assert value <= per.min()
    z = normalize(design.cells, NORMAL_CELL)
    h = 1e-6
    rng = np.random.default_rng(0)
    for _ in range(8):
        i, j = int(rng.integers(z.shape[0])), int(rng.integers(z.shape[1]))
        zp, zm = z.copy(), z.copy()
        zp[i, j] += h
        zm[i, j] -= h
        vp = soft_objective(design.with_cells(denormalize(zp, NORMAL_CELL)), ensemble, beta)[0]
        vm = soft_objective(design.with_cells(denormalize(zm, NORMAL_CELL)), ensemble, beta)[0]
        assert grad[i, j] == pytest.approx((vp - vm) / (2 * h), rel=1e-4, abs=1e-6 * np.abs(grad).max())


def test_per_cell_gradient_matches_finite_differences():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design = _kink_free_design(ensemble)
    _, _, grad = soft_objective(design, ensemble, 5.0, noise_model="per_cell")
    z = normalize(design.cells, NORMAL_CELL)
    h = 1e-6
    zp, zm = z.copy(), z.copy()
    zp[1, 4] += h
    zm[1, 4] -= h
    vp = soft_objective(design.with_cells(denormalize(zp, NORMAL_CELL)), ensemble, 5.0, noise_model="per_cell")[0]
    vm = soft_objective(design.with_cells(denormalize(zm, NORMAL_CELL)), ensemble, 5.0, noise_model="per_cell")[0]
    assert grad[1, 4] == pytest.approx((vp - vm) / (2 * h), rel=1e-4, abs=1e-6 * np.abs(grad).max())


def test_zero_weight_cell_has_zero_gradient():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    base = _mk_design(4, seed=1)
    design = MetasurfaceDesign(cells=base.cells, spec=NORMAL_CELL, weights=np.array([0.0, 1.0, 1.0, 1.0]))
    for model in ("global", "per_cell"):
        _, _, grad = soft_objective(design, ensemble, 10.0, noise_model=model)
        assert np.allclose(grad[0], 0.0)
        assert np.any(grad[1:] != 0.0)


def test_optimize_without_iterations_returns_start():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design0 = _mk_design(3)
    best, trace = optimize(design0, ensemble, DesignOptConfig(n_cells=3, iterations=0))
    assert best is design0
    assert len(trace.rows) == 1
    assert trace.rows[0].worst_case == pytest.approx(objective(design0, ensemble)[0])


def test_optimize_improves_and_stays_in_bounds(tmp_path: Path):
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    cfg = DesignOptConfig(n_cells=4, iterations=15, step=0.1, beta_start=5.0, beta_end=50.0)
    design0 = initial_design(NORMAL_CELL, cfg)
    best, trace = optimize(design0, ensemble, cfg)
    again, trace2 = optimize(design0, ensemble, cfg)
    assert len(trace.rows) == 16
    assert [r.iter for r in trace.rows] == list(range(16))
    assert objective(best, ensemble)[0] >= trace.rows[0].worst_case
    assert objective(best, ensemble)[0] == pytest.approx(trace.worst_cases().max())
    assert np.array_equal(best.cells, again.cells)
    assert best.cells.min() >= NORMAL_CELL.width_min and best.cells.max() <= NORMAL_CELL.width_max
    path = write_trace_csv(tmp_path / "trace.csv", trace)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "iter,worst_case,i_blue,i_green,i_red,beta"
    assert len(lines) == 17


def test_beta_schedule_and_config_checks():
    cfg = DesignOptConfig(iterations=5, beta_start=2.0, beta_end=32.0)
    assert cfg.beta_at(0) == pytest.approx(2.0)
    assert cfg.beta_at(2) == pytest.approx(8.0)
    assert cfg.beta_at(4) == pytest.approx(32.0)
    assert cfg.beta_at(10) == pytest.approx(32.0)
    with pytest.raises(ValueError):
        DesignOptConfig(step=0.0)
    with pytest.raises(ValueError):
        DesignOptConfig(beta_start=10.0, beta_end=1.0)
    with pytest.raises(ValueError):
        FocalSpec(green=(0.0, -1.0))


def test_design_validation_and_roundtrip(tmp_path: Path):
    design = _mk_design(3, seed=4)
    back = load_design(save_design(tmp_path / "design.json", design))
    assert np.array_equal(back.cells, design.cells)
    assert back.focal == design.focal
    with pytest.raises(BoundsError):
        MetasurfaceDesign(cells=np.full((2, 10), 400.0), spec=NORMAL_CELL)
    with pytest.raises(GeometryError):
        MetasurfaceDesign(cells=design.cells, spec=NORMAL_CELL, weights=np.ones(2))
    with pytest.raises(ConfigError):
        load_design(tmp_path / "nothing.json")


def test_positions_are_centered():
    design = _mk_design(4)
    assert design.positions_um() == pytest.approx([-0.6, -0.2, 0.2, 0.6])


def test_validation_against_own_labels_is_exact(tmp_path: Path):
    oracle = AnalyticSyntheticOracle(NORMAL_CELL)
    cfg = DesignOptConfig(n_cells=4, line_samples=21)
    cells = _mk_design(4, seed=3).cells
    cells[3] = cells[0]
    design = MetasurfaceDesign(cells=cells, spec=NORMAL_CELL)
    labels = label_design(design, oracle)
    assert oracle.calls == 9
    report = validate(design, oracle, labels, cfg, labels=labels)
    assert report.solves == 9
    assert all(v == 0.0 for v in report.discrepancy.values())
    assert report.predicted_worst_case == report.validated_worst_case

    paths = write_report(tmp_path / "val", report, design)
    line = read_focal_line_csv(paths["predicted"])
    assert np.array_equal(line.x_um, focal_line_x(cfg))
    assert np.array_equal(line.intensity, report.predicted.intensity)
    summary = json.loads(paths["summary"].read_text(encoding="utf-8"))
    assert summary["solves"] == 9 and set(summary["discrepancy"]) == {"blue", "green", "red"}
    assert summary["predicted_kind"] == "label_intensity"


def test_validation_with_surrogate_reports_discrepancy():
    oracle = AnalyticSyntheticOracle(NORMAL_CELL)
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    cfg = DesignOptConfig(n_cells=3, line_samples=11)
    design = _mk_design(3, seed=8)
    report = validate(design, oracle, ensemble, cfg)
    assert report.solves == 9
    assert all(np.isfinite(v) and v > 0 for v in report.discrepancy.values())
    line = focal_line(design, ensemble, focal_line_x(cfg), noise_model=cfg.noise_model)
    assert np.allclose(line.intensity, report.predicted.intensity)
    assert report.predicted_kind == "expected_intensity:global"


def test_predicted_focal_line_is_the_expected_intensity():
    ensemble = untrained_ensemble(TINY, NORMAL_CELL)
    design = _mk_design(4, seed=9)
    x = np.linspace(-3.0, 3.0, 7)
    for model in ("global", "per_cell"):
        line = focal_line(design, ensemble, x, noise_model=model)
        mean_field = focal_line(design, ensemble, x)
        for i, f in enumerate(FrequencyId):
            pts = np.column_stack([x, np.full_like(x, design.focal.point(f)[1])])
            np.testing.assert_allclose(
                line.intensity[i], expected_intensity(pts, design, ensemble, f, noise_model=model), rtol=1e-12
            )
        assert np.all(line.intensity >= mean_field.intensity)


def test_label_table_and_relative_l2_errors():
    design = _mk_design(2)
    with pytest.raises(ConfigError):
        LabelTable({}).amplitudes(design, FrequencyId.RED)
    with pytest.raises(ConfigError):
        relative_l2(np.ones(3), np.zeros(3))


@pytest.mark.slow
def test_active_learning_designs_validate_closer_and_focus_better():
    al_cfg = ALConfig(n_init=200, oversampling=4, k=100, k_schedule="doubling", iterations=4, test_size=500)
    ens_cfg = EnsembleConfig(members=4, train=TrainConfig(hidden=(64, 64)))
    gaps: dict[str, list[float]] = {"al": [], "baseline": []}
    gains = []
    for seed in (1, 2, 3):
        run_cfg = al_cfg.model_copy(update={"seed": seed})
        cfg = DesignOptConfig(n_cells=10, iterations=300, seed=seed)
        oracle = AnalyticSyntheticOracle(NORMAL_CELL)
        test_set = make_test_set(run_cfg, oracle)
        ensembles = {
            "al": run_active(run_cfg, oracle, ens_cfg, test_set=test_set).ensemble,
            "baseline": run_baseline(total_budget(run_cfg), run_cfg, oracle, ens_cfg, test_set=test_set).ensemble,
        }
        start = initial_design(NORMAL_CELL, cfg)
        start_labels = label_design(start, oracle)
        start_report = validate(start, oracle, start_labels, cfg, labels=start_labels)
        for name, ensemble in ensembles.items():
            design, _ = optimize(start, ensemble, cfg)
            report = validate(design, oracle, ensemble, cfg)
            gaps[name].append(float(np.mean(list(report.discrepancy.values()))))
            if name == "al":
                gains.append(report.validated_worst_case / start_report.validated_worst_case)
    assert np.median(gaps["al"]) < np.median(gaps["baseline"])
    assert np.median(gains) >= 2.0
