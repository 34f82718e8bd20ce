"""Tukey biweight robust regression via the penalized MM solver.

The biweight loss caps the influence of gross outliers: residuals beyond the
cutoff c contribute a constant c^2/6.  Its second derivative is bounded below
by -4/5, so l(beta) = sum_i phi(y_i - x_i^T beta) satisfies

    hessian(l) >= -(4/5) * lambda_max(X^T X) * I =: -kappa * I,

and any penalty parameter mu > kappa makes the MM surrogate strongly convex.
``robust_regression`` enforces that by raising the schedule when needed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .penalty import (PenaltyProblem, SmoothLoss, SolveResult, SolverConfig,
                      solve)
from .projections import ConvexSet
from .trace import SolveTrace


def _check_cutoff(c: float) -> float:
    c = float(c)
    if c <= 0:
        raise ValueError("cutoff must be positive")
    return c


def tukey_value(t, c: float):
    """Biweight loss: (c^2/6)[1 - (1 - (t/c)^2)^3] inside |t| <= c, c^2/6 beyond."""
    c = _check_cutoff(c)
    t = np.asarray(t, dtype=float)
    s = np.clip((t / c) ** 2, 0.0, 1.0)
    return (c * c / 6.0) * (1.0 - (1.0 - s) ** 3)


def tukey_d1(t, c: float):
    """phi'(t) = t (1 - (t/c)^2)^2 inside the cutoff, 0 beyond."""
    c = _check_cutoff(c)
    t = np.asarray(t, dtype=float)
    s = (t / c) ** 2
    inside = s <= 1.0
    return np.where(inside, t * (1.0 - np.minimum(s, 1.0)) ** 2, 0.0)


def tukey_d2(t, c: float):
    """phi''(t) = 1 - 6(t/c)^2 + 5(t/c)^4 inside, 0 beyond; min value -4/5."""
    c = _check_cutoff(c)
    t = np.asarray(t, dtype=float)
    s = (t / c) ** 2
    return np.where(s <= 1.0, 1.0 - 6.0 * s + 5.0 * s * s, 0.0)


def kappa_bound(design, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """(4/5) * spectral radius of X^T X by power iteration (relative tol)."""
    x = np.asarray(design, dtype=float)
    if x.ndim != 2:
        raise ValueError("kappa_bound: design must be a matrix")
    p = x.shape[1]
    if p == 0 or x.size == 0:
        return 0.0
    rng = np.random.default_rng(0)
    v = np.ones(p) / np.sqrt(p) + 1e-3 * rng.standard_normal(p)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = x.T @ (x @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        lam_new = float(v @ w)
        v = w / nw
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return 0.8 * lam_new
        lam = lam_new
    return 0.8 * lam


@dataclass
class TukeyLoss(SmoothLoss):
    """l(beta) = sum_i phi_c(y_i - x_i^T beta) with curvature bound kappa."""

    design: np.ndarray
    response: np.ndarray
    cutoff: float = 4.685

    def __post_init__(self):
        self.design = np.asarray(self.design, dtype=float)
        self.response = np.asarray(self.response, dtype=float)
        if self.design.ndim != 2:
            raise ValueError("TukeyLoss: design must be a matrix")
        if self.response.shape != (self.design.shape[0],):
            raise ValueError("TukeyLoss: response length mismatch")
        self.cutoff = _check_cutoff(self.cutoff)
        self.curvature = kappa_bound(self.design)

    def value(self, beta):
        r = self.response - self.design @ np.asarray(beta, dtype=float)
        return float(np.sum(tukey_value(r, self.cutoff)))

    def gradient(self, beta):
        r = self.response - self.design @ np.asarray(beta, dtype=float)
        return -self.design.T @ tukey_d1(r, self.cutoff)


@dataclass
class RobustFit:
    """Best-of-starts biweight fit plus solver bookkeeping."""

    coef: np.ndarray
    objective: float
    kappa: float
    schedule_raised: bool
    converged: bool
    iterations: int
    trace: SolveTrace
    start_objectives: List[float]


def default_robust_config(constrained: bool = False) -> SolverConfig:
    """Solver preset for biweight fits.

    Constrained fits use the usual growing-mu schedule.  Unconstrained fits
    run a proximal-point iteration at a single fixed mu (growing mu would
    only damp the steps) with a tight rho, which drives the gradient itself
    to roughly ``mu * rho * scale``.
    """
    if constrained:
        return SolverConfig(rho=1e-6)
    return SolverConfig(rho=1e-9, mu_schedule=[1.0], max_inner=200_000)


def _start_points(design, response, n_starts: int) -> List[np.ndarray]:
    ols, *_ = np.linalg.lstsq(design, response, rcond=None)
    starts = [ols]
    scale = max(1.0, float(np.linalg.norm(ols)))
    for k in range(1, n_starts):
        rng = np.random.default_rng(k)
        starts.append(ols + scale * rng.standard_normal(ols.shape[0]))
    return starts


def robust_regression(design, response, cutoff: float = 4.685,
                      sets: Sequence[ConvexSet] = (),
                      config: Optional[SolverConfig] = None,
                      n_starts: int = 1) -> RobustFit:
    """Fit a biweight regression, optionally constrained to convex sets.

    The loss is nonconvex, so the result is a stationary point; ``n_starts``
    > 1 reruns from seeded perturbations of the least-squares start and keeps
    the best objective (deterministic: seeds are the start indices).  If the
    configured schedule starts at or below the curvature bound kappa, the
    whole schedule is scaled up and the fit is flagged ``schedule_raised``.
    """
    design = np.asarray(design, dtype=float)
    response = np.asarray(response, dtype=float)
    if n_starts < 1:
        raise ValueError("robust_regression: n_starts must be >= 1")
    loss = TukeyLoss(design, response, cutoff)
    if config is None:
        config = default_robust_config(constrained=bool(sets))
    schedule = config.resolved_schedule()
    raised = False
    if loss.curvature > 0 and schedule[0] <= loss.curvature:
        # start at 2*kappa: safely convex surrogates with sane conditioning
        factor = 2.0 * loss.curvature / schedule[0]
        schedule = [m * factor for m in schedule]
        raised = True
    config = replace(config, mu_schedule=schedule)

    problem = PenaltyProblem(loss, list(sets))
    best: Optional[SolveResult] = None
    start_objs: List[float] = []
    for x0 in _start_points(design, response, n_starts):
        res = solve(problem, config, x0=x0)
        final_obj = loss.value(res.x)
        start_objs.append(final_obj)
        if best is None or final_obj < loss.value(best.x):
            best = res
    assert best is not None
    return RobustFit(coef=best.x, objective=loss.value(best.x),
                     kappa=loss.curvature, schedule_raised=raised,
                     converged=best.converged, iterations=best.iterations,
                     trace=best.trace, start_objectives=start_objs)
