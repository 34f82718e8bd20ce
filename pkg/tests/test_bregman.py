"""Bregman divergences, generalized projections, and feasibility steps."""

import numpy as np
import pytest

import oracles

from distmaj import (
    Ball,
    Box,
    Entropy,
    Halfspace,
    Hyperplane,
    Mahalanobis,
    NegLog,
    SquaredNorm,
    UnsupportedCombination,
    bregman_feasibility_step,
    bregman_project,
    divergence,
)


def _random_spd(rng, dim):
    g = rng.standard_normal((dim, dim))
    return g @ g.T + dim * np.eye(dim)


# ---------------------------------------------------------------------------
# Divergence values
# ---------------------------------------------------------------------------


def test_divergence_vanishes_at_equal_arguments():
    rng = np.random.default_rng(1)
    x = np.abs(rng.standard_normal(3)) + 0.1
    for gen in (SquaredNorm(), NegLog(), Entropy(), Mahalanobis(_random_spd(rng, 3))):
        assert divergence(gen, x, x) == pytest.approx(0.0, abs=1e-12)


def test_squared_norm_divergence_is_squared_distance():
    gen = SquaredNorm()
    assert divergence(gen, np.array([1.0, 0.0]), np.array([0.0, 0.0])) == (
        pytest.approx(1.0)
    )
    rng = np.random.default_rng(2)
    y = rng.standard_normal(4)
    x = rng.standard_normal(4)
    assert divergence(gen, y, x) == pytest.approx(float(np.sum((y - x) ** 2)))


def test_entropy_divergence_pinned_value():
    e = np.e
    val = divergence(Entropy(), np.array([1.0, 1.0]), np.array([e, e]))
    assert val == pytest.approx(2.0 * e - 4.0, abs=1e-12)


def test_mahalanobis_divergence_quadratic_form():
    rng = np.random.default_rng(3)
    m = _random_spd(rng, 3)
    gen = Mahalanobis(m)
    y = rng.standard_normal(3)
    x = rng.standard_normal(3)
    assert divergence(gen, y, x) == pytest.approx(float((y - x) @ m @ (y - x)))


def test_divergence_nonnegative_and_discerning():
    rng = np.random.default_rng(5)
    gens = [SquaredNorm(), NegLog(), Entropy(), Mahalanobis(_random_spd(rng, 3))]
    for _ in range(250):
        for gen in gens:
            y = np.abs(rng.standard_normal(3)) + 0.05
            x = np.abs(rng.standard_normal(3)) + 0.05
            d = divergence(gen, y, x)
            assert d >= -1e-12
            if np.linalg.norm(y - x) > 1e-6:
                assert d > 0.0


def test_divergence_domain_and_shape_errors():
    with pytest.raises(ValueError):
        divergence(NegLog(), np.array([1.0, -1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        divergence(Entropy(), np.array([1.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        divergence(SquaredNorm(), np.array([1.0, 2.0]), np.array([1.0]))


def test_mahalanobis_validation():
    with pytest.raises(ValueError):
        Mahalanobis(np.ones((2, 3)))
    with pytest.raises(ValueError):
        Mahalanobis(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        Mahalanobis(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_generator_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    gens = [SquaredNorm(), NegLog(), Entropy(), Mahalanobis(_random_spd(rng, 3))]
    for gen in gens:
        x = np.abs(rng.standard_normal(3)) + 0.5
        np.testing.assert_allclose(
            gen.gradient(x),
            oracles.finite_diff_grad(gen.value, x),
            atol=1e-5,
        )


# ---------------------------------------------------------------------------
# Bregman projections
# ---------------------------------------------------------------------------


def test_feasible_point_projects_to_itself():
    box = Box(np.array([0.5, 0.5]), np.array([2.0, 2.0]))
    x = np.array([1.0, 1.5])
    for gen in (SquaredNorm(), NegLog(), Entropy()):
        np.testing.assert_allclose(bregman_project(gen, box, x), x)


def test_separable_box_projection_is_clamp():
    gen = Entropy()
    box = Box(np.array([1.0, 1.0]), np.array([2.0, 2.0]))
    np.testing.assert_allclose(
        bregman_project(gen, box, np.array([0.5, 3.0])), np.array([1.0, 2.0])
    )


def test_mahalanobis_identity_hyperplane_equals_euclidean():
    rng = np.random.default_rng(9)
    plane = Hyperplane(np.array([1.0, 2.0, -1.0]), 0.5)
    for _ in range(20):
        x = rng.standard_normal(3)
        out = bregman_project(Mahalanobis(np.eye(3)), plane, x)
        ref = oracles.hyperplane_project(plane.normal, plane.offset, x)
        np.testing.assert_allclose(out, ref, atol=1e-10)


def test_quadratic_hyperplane_projection_optimality():
    rng = np.random.default_rng(11)
    for _ in range(25):
        m = _random_spd(rng, 3)
        gen = Mahalanobis(m)
        plane = Hyperplane(rng.standard_normal(3), float(rng.uniform(-1, 1)))
        x = rng.standard_normal(3)
        p = bregman_project(gen, plane, x)
        assert abs(plane.normal @ p - plane.offset) <= 1e-9
        # beats any other feasible competitor in this divergence
        for _ in range(30):
            c = oracles.hyperplane_project(
                plane.normal, plane.offset, rng.standard_normal(3) * 2.0
            )
            assert divergence(gen, p, x) <= divergence(gen, c, x) + 1e-9


def test_separable_box_projection_optimality():
    rng = np.random.default_rng(13)
    for _ in range(50):
        lo = rng.uniform(0.2, 1.0, 3)
        hi = lo + rng.uniform(0.2, 2.0, 3)
        box = Box(lo, hi)
        gen = NegLog()
        x = rng.uniform(0.05, 4.0, 3)
        p = bregman_project(gen, box, x)
        assert box.contains(p, tol=1e-12)
        c = rng.uniform(lo, hi)
        assert divergence(gen, p, x) <= divergence(gen, c, x) + 1e-9


def test_unsupported_projection_combinations_raise():
    with pytest.raises(UnsupportedCombination):
        bregman_project(Entropy(), Hyperplane(np.array([1.0]), 0.0), np.array([1.0]))
    with pytest.raises(UnsupportedCombination):
        bregman_project(SquaredNorm(), Ball(np.zeros(2), 1.0), np.ones(2))
    with pytest.raises(UnsupportedCombination):
        bregman_project(Mahalanobis(np.eye(2)), Ball(np.zeros(2), 1.0), np.ones(2))


def test_squared_norm_box_and_hyperplane_recover_euclidean():
    rng = np.random.default_rng(15)
    box = Box(-np.ones(2), np.ones(2))
    plane = Hyperplane(np.array([1.0, 1.0]), 1.0)
    for _ in range(20):
        x = 2.0 * rng.standard_normal(2)
        np.testing.assert_allclose(
            bregman_project(SquaredNorm(), box, x),
            oracles.box_project(box.lower, box.upper, x),
        )
        np.testing.assert_allclose(
            bregman_project(SquaredNorm(), plane, x),
            oracles.hyperplane_project(plane.normal, plane.offset, x),
            atol=1e-12,
        )


def test_entropy_box_projection_respects_domain():
    # Clamping to a box touching zero would exit the generator's domain.
    box = Box(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        bregman_project(Entropy(), box, np.array([-1.0, 0.5]))


# ---------------------------------------------------------------------------
# Multi-generator feasibility steps
# ---------------------------------------------------------------------------


def test_all_squared_norm_step_is_mean():
    rng = np.random.default_rng(17)
    points = [rng.standard_normal(3) for _ in range(4)]
    out = bregman_feasibility_step([SquaredNorm()] * 4, points)
    np.testing.assert_allclose(out, np.mean(points, axis=0))


def test_single_generator_step_lands_on_its_point():
    p = np.array([0.3, 0.7])
    for gen in (SquaredNorm(), Entropy(), NegLog(), Mahalanobis(np.eye(2))):
        np.testing.assert_allclose(
            bregman_feasibility_step([gen], [p]), p, atol=1e-10
        )


def test_mixed_quadratic_step_solves_stationarity_system():
    rng = np.random.default_rng(19)
    m = _random_spd(rng, 3)
    y1 = rng.standard_normal(3)
    y2 = rng.standard_normal(3)
    out = bregman_feasibility_step([SquaredNorm(), Mahalanobis(m)], [y1, y2])
    # stationarity: (2 I + 2 M) x = 2 y1 + 2 M y2
    lhs = (2.0 * np.eye(3) + 2.0 * m) @ out
    rhs = 2.0 * y1 + 2.0 * m @ y2
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_separable_step_zeroes_weighted_gradient():
    # Minimizing x -> sum_i D(y_i | x) zeroes sum_i hess(x) (x - y_i).
    rng = np.random.default_rng(21)
    gens = [Entropy(), NegLog(), Entropy()]
    for _ in range(25):
        points = [rng.uniform(0.2, 3.0, 4) for _ in gens]
        out = bregman_feasibility_step(gens, points)
        resid = np.zeros(4)
        for gen, y in zip(gens, points):
            resid += gen.hessian_diag(out) * (out - y)
        assert np.max(np.abs(resid)) <= 1e-9
        lo = np.min(points, axis=0)
        hi = np.max(points, axis=0)
        assert np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12)


def test_separable_step_decreases_total_divergence():
    rng = np.random.default_rng(23)
    gens = [Entropy(), NegLog()]
    for _ in range(25):
        points = [rng.uniform(0.3, 2.0, 3) for _ in gens]
        out = bregman_feasibility_step(gens, points)
        x0 = rng.uniform(0.3, 2.0, 3)
        total_at = lambda u: sum(
            divergence(g, p, u) for g, p in zip(gens, points)
        )
        # the step minimizes the proximity sum over u
        assert total_at(out) <= total_at(x0) + 1e-9


def test_feasibility_step_validation():
    with pytest.raises(ValueError):
        bregman_feasibility_step([], [])
    with pytest.raises(ValueError):
        bregman_feasibility_step([SquaredNorm()], [np.zeros(2), np.zeros(2)])
    with pytest.raises(ValueError):
        bregman_feasibility_step(
            [SquaredNorm(), SquaredNorm()], [np.zeros(2), np.zeros(3)]
        )
    with pytest.raises(ValueError):
        bregman_feasibility_step([Entropy()], [np.array([-1.0, 1.0])])
    with pytest.raises(UnsupportedCombination):
        bregman_feasibility_step(
            [Entropy(), Mahalanobis(np.eye(2))],
            [np.ones(2), np.ones(2)],
        )
