from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from active_learning import FdfdOracle
from errors import ConfigError
from geometry import NORMAL_CELL, SMALLEST_CELL, BoundsError, FrequencyId, encode_batch, sample_uniform
from nnet import MemberPrediction, TrainConfig, min_abs_preactivation
from surrogate import (
    EnsembleConfig,
    acquisition_score,
    bundle_fingerprint,
    finite_difference_hessian,
    fractional_error,
    fractional_errors,
    hessian_spectrum,
    load_ensemble,
    pool,
    pool_arrays,
    predict,
    predict_batch,
    save_ensemble,
    singular_values,
    train_ensemble,
    untrained_ensemble,
)

TINY = EnsembleConfig(members=2, seed=3, train=TrainConfig(epochs=3, batch_size=8, hidden=(8, 8)))


def _mk_data(n: int = 24, seed: int = 0):
    widths, freqs = sample_uniform(np.random.default_rng(seed), n, NORMAL_CELL)
    X = encode_batch(widths, freqs, NORMAL_CELL)
    t = 0.5 * np.cos(X[:, 0]) + 0.3j * np.sin(X[:, 1] + X[:, 10])
    return widths, freqs, X, t


def test_pool_identities():
    mu, var = pool([MemberPrediction(0.3, 0.2)] * 5)
    assert mu == pytest.approx(0.3)
    assert var == pytest.approx(0.04)

    mu, var = pool([MemberPrediction(-1.0, 0.1), MemberPrediction(1.0, 0.1)])
    assert mu == pytest.approx(0.0)
    assert var == pytest.approx(0.01 + 1.0)


def test_pool_matches_moment_definition_on_random_tuples():
    rng = np.random.default_rng(1)
    for members in (1, 2, 5, 8):
        mu = rng.normal(size=(members, 2500))
        sigma = rng.uniform(0.1, 1.0, size=(members, 2500))
        m_star, v_star = pool_arrays(mu, sigma)
        expected_mu = mu.sum(axis=0) / members
        expected_var = (sigma**2 + mu**2).sum(axis=0) / members - expected_mu**2
        np.testing.assert_allclose(m_star, expected_mu, rtol=0, atol=1e-12)
        np.testing.assert_allclose(v_star, expected_var, rtol=0, atol=1e-12)
        assert np.all(v_star >= np.mean(sigma**2, axis=0) - 1e-15)


def test_pool_is_exactly_permutation_invariant():
    rng = np.random.default_rng(2)
    mu = rng.normal(size=(5, 2000))
    sigma = rng.uniform(0.1, 1.0, size=(5, 2000))
    m1, v1 = pool_arrays(mu, sigma)
    for _ in range(3):
        perm = rng.permutation(5)
        m2, v2 = pool_arrays(mu[perm], sigma[perm])
        assert np.array_equal(m1, m2) and np.array_equal(v1, v2)


def test_pool_rejects_empty():
    with pytest.raises(ValueError):
        pool([])
    with pytest.raises(ValueError):
        pool_arrays(np.zeros((2, 3)), np.zeros((3, 3)))


def test_fractional_error():
    v = np.array([1 + 1j, 2 - 1j, -0.5j])
    assert fractional_error(v, v) == 0.0
    assert fractional_error(2 * v, v) == pytest.approx(1.0)
    fe = fractional_errors(v + 0.1, v)
    assert fe["fe_im"] == 0.0 and fe["fe_re"] > 0.0
    with pytest.raises(ConfigError):
        fractional_error(v, np.zeros(3))
    with pytest.raises(ConfigError):
        fractional_error(v, v[:2])


def test_ensemble_config_checks_seeds():
    assert len(TINY.seeds()) == 4
    assert TINY.seeds() == EnsembleConfig(members=2, seed=3).seeds()
    assert EnsembleConfig(members=2, member_seeds=[1, 2, 3, 4]).seeds() == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        EnsembleConfig(members=1)
    with pytest.raises(ValueError):
        EnsembleConfig(members=2, member_seeds=[1, 2, 3])


def test_training_is_deterministic_across_jobs():
    _, _, X, t = _mk_data()
    a = train_ensemble(X, t, TINY, NORMAL_CELL, jobs=1)
    b = train_ensemble(X, t, TINY, NORMAL_CELL, jobs=3)
    pa, pb = a.predict_encoded(X), b.predict_encoded(X)
    assert np.array_equal(pa.mu, pb.mu)
    assert np.array_equal(pa.var_re, pb.var_re)


def test_members_differ_within_a_part():
    e = untrained_ensemble(TINY, NORMAL_CELL)
    assert len(e.re_members) == 2 and len(e.im_members) == 2
    assert not np.array_equal(e.re_members[0].weights[0], e.re_members[1].weights[0])


def test_predictions_and_acquisition_score():
    widths, freqs, X, t = _mk_data()
    e = train_ensemble(X, t, TINY, NORMAL_CELL)
    batch = predict_batch(e, widths, freqs)
    single = predict(e, widths[4], FrequencyId(int(freqs[4])))
    assert single.mu == pytest.approx(complex(batch.mu[4]))
    assert np.all(batch.var_re > 0) and np.all(batch.var_im > 0)
    assert np.allclose(acquisition_score(batch), batch.var_re + batch.var_im)
    assert acquisition_score(single) == pytest.approx(single.var_re + single.var_im)


def test_warm_start_uses_given_members():
    _, _, X, t = _mk_data()
    e = train_ensemble(X, t, TINY, NORMAL_CELL)
    again = train_ensemble(X, t, TINY, NORMAL_CELL, warm_start=e, epochs=1)
    fresh = train_ensemble(X, t, TINY, NORMAL_CELL, epochs=1)
    assert not np.array_equal(again.predict_encoded(X).mu, fresh.predict_encoded(X).mu)


def test_pooled_gradient_matches_finite_differences():
    e = untrained_ensemble(TINY, NORMAL_CELL)
    rng = np.random.default_rng(4)
    members = e.re_members + e.im_members
    for _ in range(50):
        widths, freqs = sample_uniform(rng, 1, NORMAL_CELL)
        x = encode_batch(widths, freqs, NORMAL_CELL)[0]
        if all(min_abs_preactivation(m, x) > 1e-3 for m in members):
            break
    g_re, _ = e.gradient_encoded(x[None, :])
    h = 1e-6
    for k in range(10):
        step = np.zeros_like(x)
        step[k] = h
        hi, lo = e.predict_encoded((x + step)[None, :]), e.predict_encoded((x - step)[None, :])
        d_mu = (hi.mu_re[0] - lo.mu_re[0]) / (2 * h)
        d_sigma = (np.sqrt(hi.var_re[0]) - np.sqrt(lo.var_re[0])) / (2 * h)
        assert g_re.d_mu[0, k] == pytest.approx(d_mu, rel=1e-4, abs=1e-7)
        assert g_re.d_sigma[0, k] == pytest.approx(d_sigma, rel=1e-4, abs=1e-7)


def test_hessian_of_quadratic_is_exact():
    A = np.array([[2.0, 0.5, 0.0], [0.5, -1.0, 0.3], [0.0, 0.3, 4.0]])

    def fn(Z: np.ndarray) -> np.ndarray:
        return 0.5 * np.einsum("ni,ij,nj->n", Z, A, Z)

    H = finite_difference_hessian(fn, np.array([0.1, -0.2, 0.3]), 0.05)
    assert np.allclose(H, A, atol=1e-9)
    sv = singular_values(H)
    assert np.all(np.diff(sv) <= 0)
    assert np.allclose(sv, np.sort(np.abs(np.linalg.eigvalsh(A)))[::-1])


def test_hessian_spectrum_on_ensemble():
    e = untrained_ensemble(TINY, SMALLEST_CELL)
    spectrum = hessian_spectrum(e, np.full(10, SMALLEST_CELL.width_mid), FrequencyId.GREEN)
    assert spectrum["re"].shape == (10,) and spectrum["im"].shape == (10,)
    with pytest.raises(BoundsError):
        hessian_spectrum(e, np.full(10, SMALLEST_CELL.width_max), FrequencyId.GREEN)


@pytest.mark.slow
def test_smallest_cell_surrogate_has_a_low_rank_hessian():
    oracle = FdfdOracle(SMALLEST_CELL)
    widths, freqs = sample_uniform(np.random.default_rng(6), 1000, SMALLEST_CELL)
    records = oracle.label_batch(widths, freqs, jobs=4)
    X = encode_batch(widths, freqs, SMALLEST_CELL)
    t = np.array([r.t for r in records])
    cfg = EnsembleConfig(members=3, seed=6, train=TrainConfig(hidden=(64, 64, 64)))
    ensemble = train_ensemble(X, t, cfg, SMALLEST_CELL, jobs=4)
    spectrum = hessian_spectrum(ensemble, np.full(10, SMALLEST_CELL.width_mid), FrequencyId.GREEN)
    for s in spectrum.values():
        assert s[2] / s[0] < 0.1


def test_bundle_roundtrip(tmp_path: Path):
    widths, freqs, X, t = _mk_data()
    e = train_ensemble(X, t, TINY, NORMAL_CELL)
    path = save_ensemble(tmp_path / "ensemble.json", e, dataset_fingerprint="sha256:abc")
    back = load_ensemble(path)
    assert back.config == e.config and back.spec == e.spec
    assert np.array_equal(back.predict_encoded(X).mu, e.predict_encoded(X).mu)
    assert bundle_fingerprint(path) == "sha256:abc"
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["re_members"][0]["seed"] == TINY.seeds()[0]


def test_bundle_errors(tmp_path: Path):
    with pytest.raises(ConfigError):
        load_ensemble(tmp_path / "none.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_ensemble(broken)
