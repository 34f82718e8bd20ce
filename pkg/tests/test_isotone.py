"""Isotone regression application: all four solver routes against PAVA."""

import numpy as np
import pytest

import oracles

from distmaj import SolverConfig, pava
from distmaj.applications import isotone_fit
from distmaj.applications.isotone import SOLVERS, default_isotone_config
from distmaj.datasets import isotone_data


def test_solver_roster():
    assert set(SOLVERS) == {"mm", "mm-qn", "dual", "dual-fista"}


def test_monotone_input_is_returned_unchanged():
    y = np.array([0.0, 0.5, 0.5, 2.0])
    for solver in SOLVERS:
        fit = isotone_fit(y, solver=solver)
        np.testing.assert_allclose(fit.fitted, y, atol=1e-9)
        assert fit.violation_max <= 1e-12


def test_three_point_example_all_solvers():
    y = np.array([1.0, 3.0, 2.0])
    expected = np.array([1.0, 2.5, 2.5])
    for solver in SOLVERS:
        fit = isotone_fit(y, solver=solver)
        err = np.linalg.norm(fit.fitted - expected) / (np.linalg.norm(expected) + 1.0)
        assert err <= 1e-3, solver


def test_synthetic_data_matches_pava_all_solvers():
    data = isotone_data(60, seed=4)
    ref = pava(data.y, data.weights)
    for solver in SOLVERS:
        fit = isotone_fit(data.y, weights=data.weights, solver=solver)
        rel = np.linalg.norm(fit.fitted - ref) / (np.linalg.norm(ref) + 1.0)
        assert rel <= 1e-3, solver
        assert fit.converged, solver
        assert fit.trace.max_objective_increase() <= 1e-12, solver


def test_weighted_fit_matches_weighted_pava():
    # Small weights slow the penalty contraction, so drive the MM route
    # with a tighter stop than the preset when high accuracy is the point.
    rng = np.random.default_rng(8)
    y = rng.standard_normal(40)
    w = rng.uniform(0.3, 3.0, 40)
    ref = oracles.sklearn_isotone(y, w)
    tight = SolverConfig(rho=1e-8, max_stages=20, secants=2)
    for solver, config in (("mm-qn", tight), ("dual-fista", None)):
        fit = isotone_fit(y, weights=w, config=config, solver=solver)
        rel = np.linalg.norm(fit.fitted - ref) / (np.linalg.norm(ref) + 1.0)
        assert rel <= 1e-3


def test_objective_reported_consistently():
    rng = np.random.default_rng(9)
    y = rng.standard_normal(30)
    w = rng.uniform(0.5, 2.0, 30)
    fit = isotone_fit(y, weights=w, solver="mm-qn")
    assert fit.objective == pytest.approx(
        0.5 * float(np.sum(w * (fit.fitted - y) ** 2)), abs=1e-10
    )
    assert fit.distance == pytest.approx(
        float(np.linalg.norm(fit.fitted - y)), abs=1e-12
    )


def test_violation_fields_reflect_order_defects():
    y = np.array([2.0, 1.0])
    fit = isotone_fit(y, solver="mm-qn")
    assert fit.violation_max <= 1e-3
    assert fit.violation_signed <= fit.violation_max + 1e-12
    # adjacent decreases never exceed the reported maximum
    drops = np.maximum(fit.fitted[:-1] - fit.fitted[1:], 0.0)
    assert drops.max() <= fit.violation_max + 1e-12


def test_single_point_short_circuits():
    fit = isotone_fit(np.array([4.0]))
    np.testing.assert_allclose(fit.fitted, np.array([4.0]))
    assert fit.converged
    assert fit.violation_max == 0.0


def test_input_validation():
    with pytest.raises(ValueError):
        isotone_fit(np.array([]))
    with pytest.raises(ValueError):
        isotone_fit(np.array([1.0, 2.0]), weights=np.array([1.0]))
    with pytest.raises(ValueError):
        isotone_fit(np.array([1.0, 2.0]), weights=np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        isotone_fit(np.array([1.0, 2.0]), solver="nope")


def test_custom_config_is_honored():
    y = np.array([3.0, 1.0, 2.0])
    config = SolverConfig(rho=1e-4, mu_schedule=[1.0, 3.0])
    fit = isotone_fit(y, config=config, solver="mm")
    assert fit.mu_final == 3.0


def test_default_configs_differ_by_solver():
    qn = default_isotone_config("mm-qn")
    plain = default_isotone_config("mm")
    assert qn.secants > 0
    assert plain.secants == 0


def test_accelerated_route_uses_fewer_iterations():
    data = isotone_data(100, seed=6)
    plain = isotone_fit(data.y, solver="mm")
    accel = isotone_fit(data.y, solver="mm-qn")
    assert accel.iterations < plain.iterations
    dual = isotone_fit(data.y, solver="dual")
    fista = isotone_fit(data.y, solver="dual-fista")
    assert fista.iterations <= dual.iterations
