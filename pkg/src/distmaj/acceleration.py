"""Limited-memory secant extrapolation for fixed-point (MM) maps.

Given evaluations (x_i, F(x_i)) of a smooth map F, consecutive differences
u_i = x_i - x_{i-1}, v_i = F(x_i) - F(x_{i-1}) define a least-squares secant
model M ~ F'(x).  The accelerated iterate solves the affine fixed-point
equation z = F(x) + M (z - x):

    z = x + r + V (I_k - H)^{-1} G^{-1} U^T r,   r = F(x) - x,

with G = U^T U + ridge*I and H = G^{-1} U^T V (a Woodbury identity, so only a
k x k system is solved, k = number of secants).  For an affine map with
contraction and at least dim(x) independent secants the result is the exact
fixed point.
"""

from __future__ import annotations

from typing import Callable, List, Optional, Tuple

import numpy as np


class SecantHistory:
    """Rolling buffer of the last ``capacity`` map evaluations (x, F(x))."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("SecantHistory: capacity must be >= 1")
        self.capacity = int(capacity)
        self._pairs: List[Tuple[np.ndarray, np.ndarray]] = []

    def push(self, x: np.ndarray, fx: np.ndarray) -> None:
        self._pairs.append((np.ravel(np.asarray(x, dtype=float)).copy(),
                            np.ravel(np.asarray(fx, dtype=float)).copy()))
        if len(self._pairs) > self.capacity:
            del self._pairs[0]

    def clear(self) -> None:
        self._pairs.clear()

    def pairs(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return list(self._pairs)

    def __len__(self) -> int:
        return len(self._pairs)


def extrapolate(x: np.ndarray, fx: np.ndarray, history: SecantHistory,
                ridge: float = 1e-12) -> Optional[np.ndarray]:
    """Secant extrapolation toward the fixed point of the map.

    ``x`` is the current iterate and ``fx = F(x)``; the history supplies the
    earlier evaluations.  Returns ``None`` when no usable secants exist or the
    small solve is singular/nonfinite (callers then fall back to ``fx``).
    """
    shape = np.asarray(x).shape
    xf = np.ravel(np.asarray(x, dtype=float))
    ff = np.ravel(np.asarray(fx, dtype=float))
    entries = history.pairs() + [(xf, ff)]
    if len(entries) < 2:
        return None
    us = []
    vs = []
    for (xa, fa), (xb, fb) in zip(entries[:-1], entries[1:]):
        u = xb - xa
        nu = float(np.linalg.norm(u))
        if nu == 0.0 or not np.isfinite(nu):
            continue  # duplicate evaluation contributes no secant
        us.append(u / nu)
        vs.append((fb - fa) / nu)
    if not us:
        return None
    U = np.column_stack(us)
    V = np.column_stack(vs)
    k = U.shape[1]
    r = ff - xf
    G = U.T @ U + ridge * np.eye(k)
    try:
        Ut_r = U.T @ r
        w = np.linalg.solve(G, Ut_r)
        H = np.linalg.solve(G, U.T @ V)
        coeff = np.linalg.solve(np.eye(k) - H, w)
    except np.linalg.LinAlgError:
        return None
    z = xf + r + V @ coeff
    if not np.all(np.isfinite(z)):
        return None
    return z.reshape(shape)


def accelerate(map_fn: Callable[[np.ndarray], np.ndarray],
               objective: Callable[[np.ndarray], float],
               x: np.ndarray,
               history: SecantHistory,
               ridge: float = 1e-12) -> np.ndarray:
    """One safeguarded accelerated step of the fixed-point map.

    Evaluates F(x), records the pair in the history, and returns the secant
    extrapolation when it is finite and does not increase ``objective``
    relative to the plain step; otherwise returns F(x).  With an empty
    history this is exactly the plain MM step.
    """
    fx = np.asarray(map_fn(x), dtype=float)
    cand = extrapolate(x, fx, history, ridge)
    history.push(x, fx)
    if cand is None:
        return fx
    if objective(cand) <= objective(fx):
        return cand
    return fx
