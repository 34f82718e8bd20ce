"""Scalar cosine minimization by quadratic majorization."""

import numpy as np
import pytest

from distmaj.applications import cosine_mm_iterate, cosine_surrogate, summa_gap


def test_first_step_from_one():
    xs = cosine_mm_iterate(x0=1.0, steps=1)
    assert xs[0] == 1.0
    assert xs[1] == pytest.approx(1.0 + np.sin(1.0), abs=1e-12)
    assert xs[1] == pytest.approx(1.84147, abs=1e-5)


def test_minimizer_is_fixed_point():
    xs = cosine_mm_iterate(x0=np.pi, steps=10)
    np.testing.assert_allclose(xs, np.pi)


def test_converges_to_pi_within_hundred_steps():
    xs = cosine_mm_iterate(x0=1.0, steps=100)
    assert len(xs) == 101
    assert abs(xs[-1] - np.pi) <= 1e-8


def test_every_step_decreases_cosine():
    xs = cosine_mm_iterate(x0=1.0, steps=100)
    values = np.cos(xs)
    assert np.all(np.diff(values) <= 1e-15)


def test_surrogate_majorizes_cosine():
    rng = np.random.default_rng(5)
    for _ in range(200):
        x = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        y = float(rng.uniform(-2 * np.pi, 2 * np.pi))
        assert cosine_surrogate(y, x) >= np.cos(y) - 1e-12
    x = 0.7
    assert cosine_surrogate(x, x) == pytest.approx(np.cos(x), abs=1e-12)


def test_surrogate_minimizer_is_next_iterate():
    x = 1.3
    grid = np.linspace(x - np.pi, x + np.pi, 4001)
    values = [cosine_surrogate(float(g), x) for g in grid]
    assert grid[int(np.argmin(values))] == pytest.approx(x + np.sin(x), abs=1e-3)


def test_gap_nonnegative_at_tangent_point():
    x0 = 1.0
    x1 = x0 + np.sin(x0)
    assert summa_gap(x1, x0) >= -1e-12


def test_gap_goes_negative_somewhere():
    xs = np.linspace(-2 * np.pi, 2 * np.pi, 2001)
    gaps = np.array([summa_gap(float(x), 1.0) for x in xs])
    assert gaps.min() < 0.0


def test_perfect_quadratic_majorizer_never_fails_the_gap():
    # Control case: for f quadratic, the exact surrogate g(y|x) = f(y) gives
    # gap(x) = f(x) - f(x1) >= 0 with x1 the one-step (exact) minimizer.
    f = lambda u: 0.5 * (u - 2.0) ** 2
    x1 = 2.0  # one MM step under the perfect surrogate lands at the minimum
    for x in np.linspace(-5.0, 5.0, 101):
        gap = (f(x) - f(x1)) - (f(x) - f(x))
        assert gap >= -1e-12
