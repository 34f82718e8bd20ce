"""Slack-penalised SVM fits and kernel factor preparation."""

import numpy as np
import pytest

import oracles

from distmaj import SolverConfig
from distmaj.applications import kernel_svm_prepare, svm_fit
from distmaj.applications.svm import default_svm_config
from distmaj.datasets import svm_data


def _margins(model, x, y):
    return y * (x @ model.theta)


def test_separated_points_drive_slack_to_zero():
    x = np.array([[1.0, 5.0], [1.0, -5.0]])
    y = np.array([1.0, -1.0])
    model = svm_fit(x, y, lam=1.0)
    assert model.slack.max() <= 1e-6
    assert model.violation_max <= 1e-6
    assert np.all(_margins(model, x, y) >= 1.0 - 1e-6)


def test_small_instance_matches_qp_oracle():
    data = svm_data(60, seed=2, dim=3)
    lam = 4.0
    model = svm_fit(data.x, data.y, lam=lam)
    ref_obj, ref_theta, _ = oracles.svm_qp(data.x, data.y, lam)
    assert model.violation_max <= 1e-6
    assert model.objective == pytest.approx(ref_obj, rel=1e-3)
    np.testing.assert_allclose(model.theta, ref_theta, atol=5e-3)


def test_objective_bookkeeping_is_exact():
    data = svm_data(50, seed=3, dim=3)
    lam = 2.0
    model = svm_fit(data.x, data.y, lam=lam)
    manual = float(model.slack.sum()) + 0.5 * lam * float(model.theta @ model.theta)
    assert model.objective == pytest.approx(manual, abs=1e-10)
    assert model.slack.min() >= -1e-12  # slacks stay in the nonnegative orthant
    assert model.trace.max_objective_increase() <= 1e-12


def test_violation_signed_reports_worst_margin_or_slack():
    data = svm_data(40, seed=5, dim=3)
    model = svm_fit(data.x, data.y, lam=8.0)
    slack_resid = _margins(model, data.x, data.y) - (1.0 - model.slack)
    expected = min(float(slack_resid.min()), float(model.slack.min()))
    assert model.violation_signed == pytest.approx(expected, abs=1e-12)


def test_decision_and_classify():
    data = svm_data(50, seed=7, dim=3)
    model = svm_fit(data.x, data.y, lam=1.0)
    scores = model.decision(data.x)
    np.testing.assert_allclose(scores, data.x @ model.theta)
    labels = model.classify(data.x)
    assert set(np.unique(labels)).issubset({-1.0, 1.0})
    # training accuracy should beat coin flipping comfortably
    assert np.mean(labels == data.y) >= 0.8


def test_input_validation():
    x = np.array([[1.0, 2.0], [1.0, -1.0]])
    y = np.array([1.0, -1.0])
    with pytest.raises(ValueError):
        svm_fit(x, np.array([1.0, 2.0]), lam=1.0)  # labels not in {-1, 1}
    with pytest.raises(ValueError):
        svm_fit(x, y[:1], lam=1.0)
    with pytest.raises(ValueError):
        svm_fit(x, y, lam=0.0)
    with pytest.raises(ValueError):
        svm_fit(np.array([[2.0, 1.0], [2.0, -1.0]]), y, lam=1.0)  # no intercept column


def test_preset_schedule_and_custom_config():
    config = default_svm_config("mm-qn")
    schedule = config.resolved_schedule()
    assert len(schedule) == 26
    assert schedule[-1] > 2.0**20 - 1.0
    assert config.secants == 5
    assert default_svm_config("mm").secants == 0

    data = svm_data(30, seed=9, dim=3)
    model = svm_fit(data.x, data.y, lam=1.0,
                    config=SolverConfig(rho=1e-6, mu_schedule=[3.0, 7.0, 15.0]))
    assert model.mu_final == 15.0


def test_accelerated_route_is_cheaper():
    data = svm_data(80, seed=11, dim=4)
    schedule = [2.0 ** (k + 1) - 1.0 for k in range(14)]
    plain = svm_fit(data.x, data.y, lam=5.0, solver="mm",
                    config=SolverConfig(rho=1e-6, mu_schedule=schedule))
    accel = svm_fit(data.x, data.y, lam=5.0, solver="mm-qn",
                    config=SolverConfig(rho=1e-6, mu_schedule=schedule, secants=5))
    assert accel.iterations < plain.iterations
    # both settle near the same optimum (the truncated schedule leaves a
    # small mu-dependent offset in the coefficients)
    assert abs(accel.objective - plain.objective) <= 1e-3 * abs(plain.objective)
    np.testing.assert_allclose(accel.theta, plain.theta, atol=2e-2)


# ---------------------------------------------------------------------------
# Kernel factor preparation
# ---------------------------------------------------------------------------


def test_kernel_identity_gram_gives_identity_factor():
    np.testing.assert_allclose(kernel_svm_prepare(np.eye(5)), np.eye(5))


def test_kernel_rank_one_gram_recovers_generator():
    v = np.array([0.5, -1.0, 2.0])
    gram = np.outer(v, v)
    factor = kernel_svm_prepare(gram)
    lead = factor[:, 0]
    sign = np.sign(lead @ v) or 1.0
    np.testing.assert_allclose(sign * lead, v, atol=1e-8)
    # residual columns carry sqrt(eps)-level eigenvalue noise at most
    np.testing.assert_allclose(factor[:, 1:], 0.0, atol=1e-7)
    truncated = kernel_svm_prepare(gram, rank=1)
    assert truncated.shape == (3, 1)
    np.testing.assert_allclose(truncated @ truncated.T, gram, atol=1e-8)


def test_kernel_random_psd_reconstruction():
    rng = np.random.default_rng(13)
    g = rng.standard_normal((10, 10))
    gram = g @ g.T
    factor = kernel_svm_prepare(gram)
    err = np.linalg.norm(factor @ factor.T - gram) / np.linalg.norm(gram)
    assert err <= 1e-8


def test_kernel_rank_truncation_keeps_leading_energy():
    rng = np.random.default_rng(15)
    g = rng.standard_normal((8, 3))
    gram = g @ g.T  # rank 3
    factor = kernel_svm_prepare(gram, rank=3)
    assert factor.shape == (8, 3)
    np.testing.assert_allclose(factor @ factor.T, gram, atol=1e-8)


def test_kernel_validation():
    with pytest.raises(ValueError):
        kernel_svm_prepare(np.ones((2, 3)))
    with pytest.raises(ValueError):
        kernel_svm_prepare(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        kernel_svm_prepare(np.array([[1.0, 0.0], [0.0, -1.0]]))  # indefinite
    with pytest.raises(ValueError):
        kernel_svm_prepare(np.eye(3), rank=0)
    with pytest.raises(ValueError):
        kernel_svm_prepare(np.eye(3), rank=4)


def test_kernel_factor_feeds_svm_fit():
    # Classify with a feature map given only through its Gram matrix.
    rng = np.random.default_rng(17)
    raw = rng.standard_normal((40, 2))
    labels = np.sign(raw[:, 0] * raw[:, 1] + 0.1 * rng.standard_normal(40))
    labels[labels == 0] = 1.0
    feats = np.column_stack([raw, raw**2, raw[:, :1] * raw[:, 1:]])
    gram = feats @ feats.T
    factor = kernel_svm_prepare(gram)
    design = np.column_stack([np.ones(40), factor])
    model = svm_fit(design, labels, lam=0.5)
    accuracy = np.mean(model.classify(design) == labels)
    assert accuracy >= 0.9
