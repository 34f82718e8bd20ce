"""Bregman divergences, projections, and multi-anchor feasibility steps.

A generator phi (strictly convex, differentiable on its domain) induces

    D(y | x) = phi(y) - phi(x) - <grad phi(x), y - x>  >= 0.

Bregman projections are supported for the combinations with closed forms:
separable generators onto boxes (componentwise clamp) and quadratic
generators onto hyperplanes.  Everything else raises UnsupportedCombination
rather than silently falling back to the Euclidean case.

The feasibility step solves  sum_i H_i(x) (x - y_i) = 0  with
H_i = hessian of phi_i: a linear solve when every generator is quadratic, a
per-coordinate safeguarded Newton bracketed by [min_i y_ij, max_i y_ij] when
every generator is separable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .projections import Box, Hyperplane


class UnsupportedCombination(ValueError):
    """No closed form is implemented for this generator/set pairing."""


class BregmanGenerator:
    """Convex generator; subclasses mark themselves separable or quadratic."""

    separable = False
    quadratic = False

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def check_domain(self, x: np.ndarray) -> None:
        """Raise ValueError when x is outside the domain of phi."""

    # separable generators: diagonal hessian and its elementwise derivative
    def hessian_diag(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessian_diag_deriv(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # quadratic generators: constant hessian matrix
    def hessian_matrix(self, dim: int) -> np.ndarray:
        raise NotImplementedError


class SquaredNorm(BregmanGenerator):
    """phi(x) = ||x||^2, so D(y|x) = ||y - x||^2 (twice the Euclidean half)."""

    separable = True
    quadratic = True

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(x @ x)

    def gradient(self, x):
        return 2.0 * np.asarray(x, dtype=float)

    def hessian_diag(self, x):
        return np.full(np.asarray(x).shape, 2.0)

    def hessian_diag_deriv(self, x):
        return np.zeros(np.asarray(x).shape)

    def hessian_matrix(self, dim):
        return 2.0 * np.eye(dim)


class NegLog(BregmanGenerator):
    """phi(x) = -sum log x_i on x > 0 (Itakura-Saito-type divergence)."""

    separable = True

    def value(self, x):
        self.check_domain(x)
        return float(-np.sum(np.log(np.asarray(x, dtype=float))))

    def gradient(self, x):
        self.check_domain(x)
        return -1.0 / np.asarray(x, dtype=float)

    def check_domain(self, x):
        if np.any(np.asarray(x, dtype=float) <= 0):
            raise ValueError("NegLog: requires strictly positive entries")

    def hessian_diag(self, x):
        return 1.0 / np.asarray(x, dtype=float) ** 2

    def hessian_diag_deriv(self, x):
        return -2.0 / np.asarray(x, dtype=float) ** 3


class Entropy(BregmanGenerator):
    """phi(x) = sum x_i log x_i on x > 0 (Kullback-Leibler-type divergence)."""

    separable = True

    def value(self, x):
        self.check_domain(x)
        x = np.asarray(x, dtype=float)
        return float(np.sum(x * np.log(x)))

    def gradient(self, x):
        self.check_domain(x)
        return np.log(np.asarray(x, dtype=float)) + 1.0

    def check_domain(self, x):
        if np.any(np.asarray(x, dtype=float) <= 0):
            raise ValueError("Entropy: requires strictly positive entries")

    def hessian_diag(self, x):
        return 1.0 / np.asarray(x, dtype=float)

    def hessian_diag_deriv(self, x):
        return -1.0 / np.asarray(x, dtype=float) ** 2


@dataclass
class Mahalanobis(BregmanGenerator):
    """phi(x) = x^T M x with M symmetric positive definite.

    D(y|x) = (y - x)^T M (y - x).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Mahalanobis: matrix must be square")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("Mahalanobis: matrix must be symmetric")
        if np.linalg.eigvalsh(m)[0] <= 0:
            raise ValueError("Mahalanobis: matrix must be positive definite")
        self.matrix = 0.5 * (m + m.T)

    separable = False
    quadratic = True

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return float(x @ self.matrix @ x)

    def gradient(self, x):
        return 2.0 * self.matrix @ np.asarray(x, dtype=float)

    def hessian_matrix(self, dim):
        if dim != self.matrix.shape[0]:
            raise ValueError("Mahalanobis: dimension mismatch")
        return 2.0 * self.matrix


def divergence(gen: BregmanGenerator, y, x) -> float:
    """D(y | x) = phi(y) - phi(x) - <grad phi(x), y - x>; nonnegative."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape:
        raise ValueError("divergence: shape mismatch")
    gen.check_domain(y)
    gen.check_domain(x)
    return gen.value(y) - gen.value(x) - float(gen.gradient(x) @ (y - x))


def bregman_project(gen: BregmanGenerator, cset, x) -> np.ndarray:
    """argmin_{z in cset} D(z | x) for the supported closed-form pairings.

    Separable generator + Box: componentwise clamp (z -> D(z|x) is unimodal
    per coordinate with minimum at x).  Quadratic generator + Hyperplane:
    the M-weighted affine projection.  Anything else raises
    UnsupportedCombination.
    """
    x = np.asarray(x, dtype=float)
    gen.check_domain(x)
    if isinstance(cset, Box) and gen.separable:
        out = np.clip(x, cset.lower, cset.upper)
        gen.check_domain(out)
        return out
    if isinstance(cset, Hyperplane) and gen.quadratic:
        a, b = cset.normal, cset.offset
        m_inv_a = np.linalg.solve(gen.hessian_matrix(a.shape[0]) / 2.0, a)
        return x + m_inv_a * ((b - a @ x) / (a @ m_inv_a))
    raise UnsupportedCombination(
        f"no Bregman projection rule for {type(gen).__name__} onto "
        f"{type(cset).__name__}")


def _newton_coordinate(gens, ys_col, lo: float, hi: float) -> float:
    """Solve sum_i d_i(t) (t - y_i) = 0 on [lo, hi] to residual 1e-10."""
    if hi - lo <= 0.0:
        return lo

    def f_and_deriv(t):
        arr = np.asarray([t], dtype=float)
        f = 0.0
        fp = 0.0
        for g, y in zip(gens, ys_col):
            d = float(g.hessian_diag(arr)[0])
            dp = float(g.hessian_diag_deriv(arr)[0])
            f += d * (t - y)
            fp += d + dp * (t - y)
        return f, fp

    t = 0.5 * (lo + hi)
    for _ in range(200):
        f, fp = f_and_deriv(t)
        if abs(f) <= 1e-10:
            return t
        if f > 0:
            hi = t
        else:
            lo = t
        t_new = t - f / fp if fp > 0 else None
        if t_new is None or not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)  # bisection safeguard
        if hi - lo < 1e-16 * (1.0 + abs(t)):
            return t_new
        t = t_new
    return t


def bregman_feasibility_step(gens: Sequence[BregmanGenerator],
                             points: Sequence[np.ndarray]) -> np.ndarray:
    """Solve sum_i H_i(x) (x - y_i) = 0 for the blended point x.

    All-quadratic generators reduce to one linear solve; all-separable
    generators solve a bracketed scalar equation per coordinate (the root
    lies in [min_i y_ij, max_i y_ij] since the residual is negative at the
    min and positive at the max).  Mixing a non-separable generator with a
    non-quadratic one has no implemented rule.
    """
    if len(gens) == 0 or len(gens) != len(points):
        raise ValueError("bregman_feasibility_step: need one point per "
                         "generator")
    ys = [np.asarray(p, dtype=float) for p in points]
    dim = ys[0].shape[0]
    if any(y.shape != (dim,) for y in ys):
        raise ValueError("bregman_feasibility_step: point shape mismatch")
    for g, y in zip(gens, ys):
        g.check_domain(y)

    if all(g.quadratic for g in gens):
        lhs = np.zeros((dim, dim))
        rhs = np.zeros(dim)
        for g, y in zip(gens, ys):
            h = g.hessian_matrix(dim)
            lhs += h
            rhs += h @ y
        return np.linalg.solve(lhs, rhs)

    if all(g.separable for g in gens):
        stacked = np.stack(ys)
        lows = stacked.min(axis=0)
        highs = stacked.max(axis=0)
        out = np.empty(dim)
        for j in range(dim):
            out[j] = _newton_coordinate(gens, stacked[:, j],
                                        float(lows[j]), float(highs[j]))
        return out

    raise UnsupportedCombination(
        "no feasibility-step rule mixes a non-separable generator with a "
        "non-quadratic one")
