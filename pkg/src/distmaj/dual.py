"""Dual proximal-gradient solver for strongly convex losses.

For  min f(x)  s.t.  x in C_1 ∩ ... ∩ C_m  with f eta-strongly convex, the
(negated) dual of min f + sum_i h_i is minimized over blocks z_1..z_m:

    F(z) = f*(sum_i z_i) + sum_i h_i(z_i),
    h_i(z) = sup_{x in C_i} <-z, x>   (support function of C_i at -z).

One proximal-gradient sweep with step sigma reads

    x^n = argmin_x f(x) - (sum_i z_i)^T x,
    z_i^{n+1} = z_i^n + sigma * [ P_{C_i}(x^n - z_i^n / sigma) - x^n ],

and x^n converges to the constrained primal solution.  Each block update is
the proximal map of sigma * h_i via the Moreau identity
prox_{sigma h}(u) = u + sigma * P_C(-u / sigma), so F(z) is computable along
the way: the projected point w_i attains the support of C_i at -z_i^{n+1},
giving h_i(z_i^{n+1}) = <-z_i^{n+1}, w_i> exactly.

The stacked gradient of the smooth part is (m/eta)-Lipschitz, so the default
sigma = eta/m makes plain sweeps monotone in F.  FISTA momentum
(n-2)/(n+1) is available with a function-value restart that retakes a plain
step, keeping the recorded objective monotone.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .penalty import SolveResult, SolverConfig
from .projections import ConvexSet
from .trace import SolveTrace


@dataclass
class DualState:
    """Dual blocks plus the primal point they reconstruct.

    Invariant: ``x`` is the minimizer of f(.) - (sum_i z_i)^T(.) for the
    current blocks, and ``support_values[i]`` equals h_i(z_i).
    ``momentum_n`` drives the FISTA weight and is reset by restarts.
    """

    z: np.ndarray
    x: np.ndarray
    n: int
    z_prev: Optional[np.ndarray]
    support_values: np.ndarray
    momentum_n: int


def _require_strongly_convex(loss) -> float:
    eta = float(getattr(loss, "eta", 0.0) or 0.0)
    if eta <= 0 or not hasattr(loss, "linear_tilt_solve"):
        raise ValueError("dual solver needs a strongly convex loss exposing "
                         "eta > 0 and linear_tilt_solve")
    return eta


def dual_init(loss, sets: Sequence[ConvexSet]) -> DualState:
    """Zero blocks; the reconstructed primal is the unconstrained minimizer."""
    _require_strongly_convex(loss)
    if not sets:
        raise ValueError("dual solver needs at least one constraint set")
    # zero tilt: scalar 0 broadcasts through any tilt solve
    x = np.asarray(loss.linear_tilt_solve(0.0), dtype=float)
    m = len(sets)
    z = np.zeros((m,) + x.shape)
    return DualState(z=z, x=x, n=0, z_prev=None,
                     support_values=np.zeros(m), momentum_n=0)


def _sweep(loss, sets, z_base: np.ndarray, x_base: np.ndarray, sigma: float):
    """Block update from (z_base, x_base); returns (z_new, x_new, h_new)."""
    m = len(sets)
    z_new = np.empty_like(z_base)
    h_new = np.empty(m)
    for i, cset in enumerate(sets):
        v = x_base - z_base[i] / sigma
        w = np.asarray(cset.project(v), dtype=float)
        z_new[i] = z_base[i] + sigma * (w - x_base)
        h_new[i] = -float(np.vdot(np.ravel(z_new[i]), np.ravel(w)).real)
    x_new = np.asarray(loss.linear_tilt_solve(z_new.sum(axis=0)), dtype=float)
    return z_new, x_new, h_new


def dual_step(loss, sets: Sequence[ConvexSet], state: DualState,
              sigma: float) -> DualState:
    """One plain proximal-gradient sweep over all blocks."""
    if sigma <= 0:
        raise ValueError("dual_step: sigma must be positive")
    z_new, x_new, h_new = _sweep(loss, sets, state.z, state.x, sigma)
    return DualState(z=z_new, x=x_new, n=state.n + 1, z_prev=state.z,
                     support_values=h_new, momentum_n=state.momentum_n + 1)


def fista_step(loss, sets: Sequence[ConvexSet], state: DualState,
               sigma: float) -> DualState:
    """One accelerated sweep from extrapolated blocks.

    Uses momentum weight (k-2)/(k+1) with k = state.momentum_n, so right
    after two plain sweeps (k = 2) it coincides with ``dual_step``.
    """
    if sigma <= 0:
        raise ValueError("fista_step: sigma must be positive")
    if state.z_prev is None or state.n < 2:
        raise ValueError("fista_step: needs two plain sweeps first")
    beta = max(0.0, (state.momentum_n - 2.0) / (state.momentum_n + 1.0))
    s_blocks = state.z + beta * (state.z - state.z_prev)
    x_tilde = np.asarray(loss.linear_tilt_solve(s_blocks.sum(axis=0)),
                         dtype=float)
    z_new, x_new, h_new = _sweep(loss, sets, s_blocks, x_tilde, sigma)
    return DualState(z=z_new, x=x_new, n=state.n + 1, z_prev=state.z,
                     support_values=h_new, momentum_n=state.momentum_n + 1)


def dual_objective(loss, state: DualState) -> float:
    """F(z) = f*(sum z_i) + sum_i h_i(z_i) (the dual minimization objective)."""
    s = state.z.sum(axis=0)
    fstar = float(np.vdot(np.ravel(s), np.ravel(state.x)).real) \
        - loss.value(state.x)
    return fstar + float(state.support_values.sum())


def dual_solve(loss, sets: Sequence[ConvexSet],
               config: Optional[SolverConfig] = None,
               sigma: Optional[float] = None,
               accelerated: bool = False) -> SolveResult:
    """Run dual sweeps until the primal iterate settles.

    Stops on ||x^{n+1} - x^n|| / (||x^n|| + 1) < config.rho.  The trace
    stores sigma in the mu column, the dual objective F(z) in the objective
    column (monotone for the default sigma = eta/m), the max primal set
    distance as violation, and the stopping ratio as residual.  The result's
    ``objective`` is the primal loss at the final x.
    """
    eta = _require_strongly_convex(loss)
    if not sets:
        raise ValueError("dual solver needs at least one constraint set")
    config = config or SolverConfig()
    if sigma is None:
        sigma = eta / len(sets)
    if sigma <= 0:
        raise ValueError("dual_solve: sigma must be positive")

    state = dual_init(loss, sets)
    trace = SolveTrace()
    trace.mark_stage()
    t0 = time.perf_counter()

    def record(st: DualState, ratio: float) -> None:
        viol = max(c.dist(st.x) for c in sets)
        trace.append(st.n, sigma, dual_objective(loss, st), viol, ratio,
                     time.perf_counter() - t0)

    record(state, np.inf)
    converged = False
    ratio = np.inf
    best_f = dual_objective(loss, state)
    for _ in range(config.max_inner):
        if accelerated and state.n >= 2:
            cand = fista_step(loss, sets, state, sigma)
            if dual_objective(loss, cand) > best_f:
                # momentum overshoot: retake a plain sweep (monotone) and
                # let the momentum weight rebuild from zero
                cand = dual_step(loss, sets,
                                 replace(state, momentum_n=1), sigma)
        else:
            cand = dual_step(loss, sets, state, sigma)
        ratio = (np.linalg.norm(np.ravel(cand.x - state.x))
                 / (np.linalg.norm(np.ravel(state.x)) + 1.0))
        state = cand
        best_f = min(best_f, dual_objective(loss, state))
        record(state, ratio)
        if ratio < config.rho:
            converged = True
            break

    seconds = time.perf_counter() - t0
    viol = max(c.dist(state.x) for c in sets)
    return SolveResult(x=state.x, trace=trace, converged=converged,
                       iterations=state.n, mu_final=sigma,
                       objective=loss.value(state.x), violation=viol,
                       residual=float(ratio), seconds=seconds)
