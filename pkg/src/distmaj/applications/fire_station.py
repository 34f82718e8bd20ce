"""Facility location: minimize summed distances to axis-aligned rectangles.

For rectangles R_1..R_m and a location x, the objective is
sum_i dist(x, R_i) in either the l1 or l2 norm.  Distance majorization
freezes each rectangle at its clamp (nearest point) p_i = P_{R_i}(x_n) and
minimizes sum_i ||x - p_i|| instead:

* l1: the surrogate separates per coordinate and is minimized by the
  componentwise median of the clamps (lower median for even counts);
* l2: the surrogate is a geometric-median problem, solved by Weiszfeld
  iterations with the standard anchor-coincidence safeguard.

Both loops stop when the location moves less than 1e-10.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..trace import SolveTrace


@dataclass
class Rectangle:
    """Axis-aligned rectangle given by center and positive half side lengths."""

    center: np.ndarray
    half: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.half = np.asarray(self.half, dtype=float)
        if self.center.shape != self.half.shape:
            raise ValueError("Rectangle: center/half shape mismatch")
        if np.any(self.half <= 0):
            raise ValueError("Rectangle: half side lengths must be positive")

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.half

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.half

    def clamp(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)


@dataclass
class FireStationResult:
    location: np.ndarray
    objective: float
    norm: str
    iterations: int
    converged: bool
    trace: SolveTrace
    seconds: float


def l1_station_objective(rects: Sequence[Rectangle], x) -> float:
    """sum_i l1-distance from x to rectangle i (componentwise gaps)."""
    x = np.asarray(x, dtype=float)
    total = 0.0
    for r in rects:
        total += float(np.sum(np.maximum(r.lower - x, 0.0)
                              + np.maximum(x - r.upper, 0.0)))
    return total


def l2_station_objective(rects: Sequence[Rectangle], x) -> float:
    """sum_i Euclidean distance from x to rectangle i."""
    x = np.asarray(x, dtype=float)
    return float(sum(np.linalg.norm(x - r.clamp(x)) for r in rects))


def weiszfeld(points, start=None, tol: float = 1e-10,
              max_iter: int = 2000) -> np.ndarray:
    """Geometric median of ``points`` (m, d) by safeguarded Weiszfeld steps.

    When an iterate lands on an anchor point, the step switches to the
    correction that either certifies optimality (pull strength <= 1) or
    moves off the anchor (the standard fix for the vanishing denominator).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = pts.shape[0]
    if m == 0:
        raise ValueError("weiszfeld: need at least one point")
    x = pts.mean(axis=0) if start is None else \
        np.asarray(start, dtype=float).copy()
    for _ in range(max_iter):
        d = np.linalg.norm(pts - x[None, :], axis=1)
        at_anchor = d <= 1e-14
        if at_anchor.any():
            k = int(np.argmax(at_anchor))
            others = ~at_anchor
            if not others.any():
                return x  # all anchors coincide with x
            diffs = (pts[others] - x[None, :]) / d[others, None]
            pull = diffs.sum(axis=0)
            r = float(np.linalg.norm(pull))
            if r <= 1.0 + 1e-14:
                return x  # the anchor is the median
            inv = 1.0 / d[others]
            tilde = (pts[others] * inv[:, None]).sum(axis=0) / inv.sum()
            step = (1.0 - 1.0 / r)
            x_new = step * tilde + (1.0 - step) * x
        else:
            inv = 1.0 / d
            x_new = (pts * inv[:, None]).sum(axis=0) / inv.sum()
        if np.linalg.norm(x_new - x) <= tol:
            return x_new
        x = x_new
    return x


def _lower_median(values: np.ndarray) -> np.ndarray:
    """Columnwise lower median (exact sample median for odd counts)."""
    s = np.sort(values, axis=0)
    return s[(values.shape[0] - 1) // 2]


def fire_station(rects: Sequence[Rectangle], norm: str = "l1",
                 x0: Optional[np.ndarray] = None, tol: float = 1e-10,
                 max_iter: int = 10_000) -> FireStationResult:
    """Best station location for summed l1 or l2 rectangle distances."""
    rects = list(rects)
    if not rects:
        raise ValueError("fire_station: need at least one rectangle")
    if norm not in ("l1", "l2"):
        raise ValueError("fire_station: norm must be 'l1' or 'l2'")
    dim = rects[0].center.shape[0]
    if any(r.center.shape != (dim,) for r in rects):
        raise ValueError("fire_station: rectangles of mixed dimension")
    x = (np.mean([r.center for r in rects], axis=0) if x0 is None
         else np.asarray(x0, dtype=float).copy())
    obj_fn = l1_station_objective if norm == "l1" else l2_station_objective

    trace = SolveTrace()
    trace.mark_stage()
    t0 = time.perf_counter()
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        clamps = np.stack([r.clamp(x) for r in rects])
        if norm == "l1":
            x_new = _lower_median(clamps)
        else:
            x_new = weiszfeld(clamps, start=x, tol=tol)
        step = float(np.linalg.norm(x_new - x))
        trace.append(it - 1, 0.0, obj_fn(rects, x), 0.0, step,
                     time.perf_counter() - t0)
        x = x_new
        if step <= tol:
            converged = True
            break
    seconds = time.perf_counter() - t0
    trace.append(it, 0.0, obj_fn(rects, x), 0.0, 0.0, seconds)
    return FireStationResult(location=x, objective=obj_fn(rects, x),
                             norm=norm, iterations=it, converged=converged,
                             trace=trace, seconds=seconds)
