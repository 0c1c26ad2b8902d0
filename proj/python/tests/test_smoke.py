import numpy as np
import pytest

import expeda


def test_operator_matches_dense_reference():
    ds = expeda.make_synthetic(d=40, k=4, per_class=5, noise=2.0, seed=1)
    f = expeda.preprocess(ds)
    m = expeda.dense_operator(f, expeda.DenseKind.symmetric)
    rng = np.random.default_rng(0)
    v = rng.standard_normal(40)
    np.testing.assert_allclose(expeda.apply_sym(f, v), m @ v, rtol=0, atol=1e-10 * np.linalg.norm(m @ v))
    nonsym = expeda.dense_operator(f, expeda.DenseKind.nonsymmetric)
    np.testing.assert_allclose(expeda.apply_nonsym(f, v), nonsym @ v, rtol=0, atol=1e-10 * np.linalg.norm(nonsym @ v))


def test_krylov_fit_agrees_with_dense():
    ds = expeda.make_synthetic(d=150, k=6, per_class=5, seed=3)
    dense = expeda.fit(expeda.Method.eda_dense, ds)
    for method in (expeda.Method.arnoldi_eda, expeda.Method.lanczos_eda):
        basis = expeda.fit(method, ds, tol=1e-8)
        assert basis.v.shape == (150, 5)
        np.testing.assert_allclose(basis.v.T @ basis.v, np.eye(5), atol=1e-10)
        assert expeda.subspace_angle(dense.v, basis.v).sin_angle < 1e-5


def test_identity_example():
    ds = expeda.LabeledDataset.from_indices(np.eye(3), [0, 1, 2])
    lda = expeda.fit(expeda.Method.classical_lda, ds, t=2)
    assert lda.small_sample_size
    eda = expeda.fit(expeda.Method.arnoldi_eda, ds, t=3, tol=1e-10)
    assert int(np.sum(eda.eigenvalues > 1 + 1e-8)) == 2


def test_bounds_and_evaluation():
    ds = expeda.make_synthetic(d=60, k=4, per_class=6, seed=2)
    f = expeda.preprocess(ds)
    s = expeda.spectrum_summary(f)
    for i in range(60):
        lo, hi = expeda.eig_bounds(s, i)
        assert lo - 1e-8 <= s.lambda_m[i] <= hi + 1e-8
    assert expeda.count_unit_eigs(s) >= 60 - ds.size + 1
    report = expeda.evaluate(ds, expeda.Method.lanczos_eda, per_class_train=3, repeats=3)
    assert len(report.per_repeat_accuracy) == 3
    assert 0.0 <= report.accuracy <= 1.0


def test_errors_map_to_python_exceptions():
    ds = expeda.make_synthetic(d=50, k=3, per_class=3)
    with pytest.raises(expeda.OracleScaleError):
        expeda.fit(expeda.Method.eda_dense, ds, oracle_cap=10)
    with pytest.raises(expeda.ConfigError):
        expeda.parse_method("nope")
    with pytest.raises(expeda.Error):
        expeda.LabeledDataset.from_indices(np.zeros((3, 2)), [0, 1])
