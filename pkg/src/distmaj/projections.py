"""Euclidean projection operators onto closed convex sets.

Every set exposes ``project`` (nearest point) and ``dist`` (Euclidean distance
to the set).  Projections are exact closed forms: clamps, halfspace/hyperplane
formulas, sort-and-threshold for the simplex and the l1 ball, pool-adjacent-
violators for the isotone cone, and an eigenvalue clamp for the PSD cone.
Membership checks use a 1e-12 feasibility tolerance throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

FEASIBILITY_TOL = 1e-12


class ConvexSet:
    """Closed convex set with an exact projection oracle."""

    def project(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dist(self, x: np.ndarray) -> float:
        """Euclidean distance from ``x`` to the set."""
        x = np.asarray(x, dtype=float)
        return float(np.linalg.norm(np.ravel(x - self.project(x))))

    def contains(self, x: np.ndarray, tol: float = FEASIBILITY_TOL) -> bool:
        return self.dist(x) <= tol


def project(cset: ConvexSet, x: np.ndarray) -> np.ndarray:
    """Nearest point of ``cset`` to ``x``."""
    return cset.project(x)


def dist(cset: ConvexSet, x: np.ndarray) -> float:
    """Euclidean distance from ``x`` to ``cset``."""
    return cset.dist(x)


def _as_vector(x, size: Optional[int], what: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{what}: expected a vector, got shape {v.shape}")
    if size is not None and v.shape[0] != size:
        raise ValueError(f"{what}: expected length {size}, got {v.shape[0]}")
    return v


class WholeSpace(ConvexSet):
    """The trivial constraint (all of the space): projection is the identity.

    Useful as the set list for unconstrained problems, where the penalized
    MM step degenerates to a proximal-point step of the loss.
    """

    def project(self, x):
        return np.asarray(x, dtype=float).copy()

    def dist(self, x):
        return 0.0


@dataclass
class Box(ConvexSet):
    """Axis-aligned box {x : lower <= x <= upper} (any array shape)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.lower.shape != self.upper.shape:
            raise ValueError("Box: lower/upper shape mismatch")
        if np.any(self.lower > self.upper):
            raise ValueError("Box: requires lower <= upper elementwise")

    def project(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.lower.shape:
            raise ValueError(f"Box: expected shape {self.lower.shape}, "
                             f"got {x.shape}")
        return np.clip(x, self.lower, self.upper)


@dataclass
class Ball(ConvexSet):
    """Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.radius = float(self.radius)
        if self.radius <= 0:
            raise ValueError("Ball: radius must be positive")

    def project(self, x):
        x = _as_vector(x, self.center.shape[0], "Ball")
        d = x - self.center
        nrm = float(np.linalg.norm(d))
        if nrm <= self.radius:
            return x.copy()
        return self.center + (self.radius / nrm) * d


@dataclass
class Hyperplane(ConvexSet):
    """{x : a^T x = b} with a != 0."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        self.offset = float(self.offset)
        self._nsq = float(self.normal @ self.normal)
        if self._nsq <= 0.0:
            raise ValueError("Hyperplane: normal must be nonzero")

    def project(self, x):
        x = _as_vector(x, self.normal.shape[0], "Hyperplane")
        return x + ((self.offset - self.normal @ x) / self._nsq) * self.normal


@dataclass
class Halfspace(ConvexSet):
    """{x : a^T x <= b} with a != 0."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        self.offset = float(self.offset)
        self._nsq = float(self.normal @ self.normal)
        if self._nsq <= 0.0:
            raise ValueError("Halfspace: normal must be nonzero")

    def project(self, x):
        x = _as_vector(x, self.normal.shape[0], "Halfspace")
        excess = self.normal @ x - self.offset
        if excess <= 0.0:
            return x.copy()
        return x - (excess / self._nsq) * self.normal


class Simplex(ConvexSet):
    """Probability simplex {x >= 0, sum(x) = 1}; sort-and-threshold."""

    def project(self, x):
        x = _as_vector(x, None, "Simplex")
        if x.size == 0:
            raise ValueError("Simplex: empty vector")
        u = np.sort(x)[::-1]
        css = np.cumsum(u)
        ks = np.arange(1, x.size + 1)
        mask = u - (css - 1.0) / ks > 0
        k = int(np.nonzero(mask)[0][-1])
        tau = (css[k] - 1.0) / (k + 1)
        return np.maximum(x - tau, 0.0)


@dataclass
class L1Ball(ConvexSet):
    """{x : ||x||_1 <= radius}; soft threshold with a sorted cutoff."""

    radius: float

    def __post_init__(self):
        self.radius = float(self.radius)
        if self.radius <= 0:
            raise ValueError("L1Ball: radius must be positive")

    def project(self, x):
        x = _as_vector(x, None, "L1Ball")
        a = np.abs(x)
        if a.sum() <= self.radius:
            return x.copy()
        u = np.sort(a)[::-1]
        css = np.cumsum(u)
        ks = np.arange(1, x.size + 1)
        mask = u - (css - self.radius) / ks > 0
        k = int(np.nonzero(mask)[0][-1])
        tau = (css[k] - self.radius) / (k + 1)
        return np.sign(x) * np.maximum(a - tau, 0.0)


def pava(y, weights=None) -> np.ndarray:
    """Weighted pool-adjacent-violators: nearest nondecreasing sequence.

    Minimizes sum_i w_i (z_i - y_i)^2 over z_1 <= ... <= z_n by merging
    adjacent blocks whose pooled means strictly violate the order (ties stay
    unmerged).  O(n) via a block stack.

    Parameters
    ----------
    y : array_like, shape (n,)
    weights : array_like, shape (n,), optional
        Positive case weights; default all ones.

    Returns
    -------
    ndarray, shape (n,)
    """
    y = _as_vector(y, None, "pava")
    n = y.shape[0]
    if weights is None:
        w = np.ones(n)
    else:
        w = _as_vector(weights, n, "pava weights")
        if np.any(w <= 0):
            raise ValueError("pava: weights must be positive")
    # blocks as parallel stacks: pooled mean, pooled weight, block length
    means = np.empty(n)
    wsum = np.empty(n)
    count = np.empty(n, dtype=int)
    top = -1
    for i in range(n):
        top += 1
        means[top] = y[i]
        wsum[top] = w[i]
        count[top] = 1
        while top > 0 and means[top - 1] > means[top]:
            tot = wsum[top - 1] + wsum[top]
            means[top - 1] = (wsum[top - 1] * means[top - 1]
                              + wsum[top] * means[top]) / tot
            wsum[top - 1] = tot
            count[top - 1] += count[top]
            top -= 1
    return np.repeat(means[:top + 1], count[:top + 1])


@dataclass
class IsotoneCone(ConvexSet):
    """Monotone cone {x_1 <= ... <= x_n}; projection is weighted PAVA.

    With ``weights`` given, ``project`` returns the nearest point in the
    w-weighted metric (the plain Euclidean projection for unit weights).
    """

    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if np.any(self.weights <= 0):
                raise ValueError("IsotoneCone: weights must be positive")

    def project(self, x):
        x = _as_vector(x, None, "IsotoneCone")
        if self.weights is not None and self.weights.shape[0] != x.shape[0]:
            raise ValueError("IsotoneCone: weight length mismatch")
        return pava(x, self.weights)


@dataclass
class PairwiseOrder(ConvexSet):
    """{x : x_i <= x_j}; violated pairs are replaced by their average."""

    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError("PairwiseOrder: indices must differ")

    def project(self, x):
        x = _as_vector(x, None, "PairwiseOrder")
        if not (0 <= self.i < x.size and 0 <= self.j < x.size):
            raise ValueError("PairwiseOrder: index out of range")
        out = x.copy()
        if out[self.i] > out[self.j]:
            avg = 0.5 * (out[self.i] + out[self.j])
            out[self.i] = avg
            out[self.j] = avg
        return out


class NonnegativeOrthant(ConvexSet):
    """{x : x >= 0} elementwise, any array shape."""

    def project(self, x):
        return np.maximum(np.asarray(x, dtype=float), 0.0)


class PsdCone(ConvexSet):
    """Symmetric positive semidefinite matrices.

    ``project`` clamps negative eigenvalues to zero.  Inputs are symmetrized
    as (A + A^T)/2 only when max|A - A^T| <= 1e-12; anything more asymmetric
    is rejected as an input error.
    """

    def project(self, x):
        a = np.asarray(x, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("PsdCone: expected a square matrix")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if asym > 1e-12:
            raise ValueError(f"PsdCone: matrix asymmetry {asym:.3e} exceeds "
                             "1e-12; symmetrize the input first")
        s = 0.5 * (a + a.T)
        vals, vecs = np.linalg.eigh(s)
        if vals.size and vals[0] >= 0.0:
            return s
        pos = np.clip(vals, 0.0, None)
        out = (vecs * pos) @ vecs.T
        return 0.5 * (out + out.T)


@dataclass
class SvmHalfspace(ConvexSet):
    """Hinge constraint {(eps, theta) : eps_j + y_j x_j^T theta >= 1}.

    Operates on the stacked vector u = (eps_1..eps_n, theta_1..theta_p).
    """

    index: int
    label: float
    features: np.ndarray
    n_cases: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.label = float(self.label)
        if self.label not in (-1.0, 1.0):
            raise ValueError("SvmHalfspace: label must be -1 or +1")
        if not 0 <= self.index < self.n_cases:
            raise ValueError("SvmHalfspace: index out of range")
        self._den = 1.0 + self.label ** 2 * float(self.features
                                                  @ self.features)

    def project(self, u):
        u = _as_vector(u, self.n_cases + self.features.shape[0],
                       "SvmHalfspace")
        eps = u[:self.n_cases]
        theta = u[self.n_cases:]
        deficit = 1.0 - eps[self.index] - self.label * (self.features @ theta)
        if deficit <= 0.0:
            return u.copy()
        c = deficit / self._den
        out = u.copy()
        out[self.index] += c
        out[self.n_cases:] += c * self.label * self.features
        return out


@dataclass
class ConvexRegHalfspace(ConvexSet):
    """Supporting-plane constraint {theta_j >= theta_k + xi_k^T (x_j - x_k)}.

    Operates on the stacked vector u = (theta, vec(Xi)) where Xi is the
    (n_cases, p) matrix of subgradient rows, flattened in row-major order.
    """

    j: int
    k: int
    x_j: np.ndarray
    x_k: np.ndarray
    n_cases: int

    def __post_init__(self):
        self.x_j = np.asarray(self.x_j, dtype=float)
        self.x_k = np.asarray(self.x_k, dtype=float)
        if self.j == self.k:
            raise ValueError("ConvexRegHalfspace: j and k must differ")
        if self.x_j.shape != self.x_k.shape:
            raise ValueError("ConvexRegHalfspace: point shape mismatch")
        self._d = self.x_j - self.x_k
        self._den = 2.0 + float(self._d @ self._d)

    def project(self, u):
        n, p = self.n_cases, self._d.shape[0]
        u = _as_vector(u, n + n * p, "ConvexRegHalfspace")
        theta = u[:n]
        xi_k = u[n + self.k * p: n + (self.k + 1) * p]
        deficit = theta[self.k] + xi_k @ self._d - theta[self.j]
        if deficit <= 0.0:
            return u.copy()
        r = deficit / self._den
        out = u.copy()
        out[self.j] += r
        out[self.k] -= r
        out[n + self.k * p: n + (self.k + 1) * p] -= r * self._d
        return out


def project_l1_rectangle(lower, upper, x) -> np.ndarray:
    """l1-nearest point of the box [lower, upper]: the componentwise clamp.

    The clamp median(lower_i, x_i, upper_i) minimizes each |z_i - x_i|
    separately, hence the l1 distance (it is simultaneously the l2 projection).
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape:
        raise ValueError("project_l1_rectangle: bound shapes differ")
    if np.any(lower > upper):
        raise ValueError("project_l1_rectangle: requires lower <= upper")
    x = np.asarray(x, dtype=float)
    if x.shape != lower.shape:
        raise ValueError("project_l1_rectangle: point shape mismatch")
    return np.clip(x, lower, upper)


class ProjectionResult(NamedTuple):
    point: np.ndarray
    converged: bool
    iterations: int


def alternating_projection(first: ConvexSet, second: ConvexSet, x0,
                           max_iter: int = 10_000,
                           tol: float = 1e-12) -> ProjectionResult:
    """von Neumann alternating projections x <- P_first(P_second(x)).

    Stops when the iterate moves less than ``tol``; hitting ``max_iter``
    returns the last iterate flagged as nonconverged.
    """
    if max_iter < 1:
        raise ValueError("alternating_projection: max_iter must be >= 1")
    x = np.asarray(x0, dtype=float)
    for it in range(1, max_iter + 1):
        x_next = first.project(second.project(x))
        delta = float(np.linalg.norm(np.ravel(x_next - x)))
        x = x_next
        if delta <= tol:
            return ProjectionResult(x, True, it)
    return ProjectionResult(x, False, max_iter)


def simultaneous_projection_step(sets: Sequence[ConvexSet], x) -> np.ndarray:
    """Average of the projections of ``x`` onto each set (one parallel sweep)."""
    if len(sets) == 0:
        raise ValueError("simultaneous_projection_step: need at least one set")
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    for cset in sets:
        acc += cset.project(x)
    return acc / len(sets)
