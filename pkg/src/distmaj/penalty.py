"""Penalized MM solver: smooth losses over intersections of convex sets.

The constrained problem  min l(x)  s.t.  x in C_1 ∩ ... ∩ C_m  is approached
through the penalized objective

    f_mu(x) = l(x) + (mu/2) * sum_i gamma_i * dist(x, C_i)^2,

driven to the constrained solution along an increasing mu schedule.  Each MM
step majorizes every dist^2 term by the squared distance to the frozen
projection of the current iterate, so the surrogate is

    g(x | x_n) = l(x) + (mu/2) * ||x - pbar_n||^2 + const,
    pbar_n = sum_i gamma_i * P_{C_i}(x_n),

i.e. one proximal step of the loss at the weighted average of projections.
Inner loops stop on the relative step rule ||x_{n+1} - x_n|| / (||x_n|| + 1)
< rho; optional secant acceleration is safeguarded by the surrogate objective.

Iterates are plain numpy arrays of any shape (vectors, matrices), so matrix
problems run through the same machinery.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .acceleration import SecantHistory, extrapolate
from .projections import ConvexSet, WholeSpace
from .trace import SolveTrace

MU_CAP = 2.0 ** 20 - 1.0


class InnerSolveError(RuntimeError):
    """Inner minimization failed; carries the last iterate reached."""

    def __init__(self, message: str, last_iterate: np.ndarray):
        super().__init__(message)
        self.last_iterate = last_iterate


def default_mu_schedule(stages: int = 20) -> List[float]:
    """Geometric schedule mu_k = 2^(k+1) - 1 (1, 3, 7, ...), capped at 2^20 - 1."""
    if stages < 1:
        raise ValueError("schedule needs at least one stage")
    out: List[float] = []
    for k in range(stages):
        mu = min(2.0 ** (k + 1) - 1.0, MU_CAP)
        if out and mu <= out[-1]:
            break  # cap reached; further stages would repeat
        out.append(mu)
    return out


# ---------------------------------------------------------------------------
# losses


class SmoothLoss:
    """Differentiable loss; subclasses may provide a proximal closed form.

    ``curvature`` is a bound kappa such that l + (kappa/2)||.||^2 is convex
    (0 for convex losses).  The first mu of any schedule must exceed it.
    """

    curvature: float = 0.0

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def proximal_solve(self, v: np.ndarray, c: float) -> Optional[np.ndarray]:
        """argmin_u l(u) + (c/2)||u - v||^2, or None when no closed form."""
        return None


class ZeroLoss(SmoothLoss):
    """Identically zero; turns the solver into pure feasibility seeking."""

    def value(self, x):
        return 0.0

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def proximal_solve(self, v, c):
        return np.asarray(v, dtype=float).copy()


@dataclass
class QuadraticLoss(SmoothLoss):
    """l(x) = 0.5 ||x - target||^2 (Frobenius for matrices).

    Also usable on the dual side: strongly convex with eta = 1 and
    linear_tilt_solve(s) = argmin l(x) - <s, x> = target + s.
    """

    target: np.ndarray

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=float)
        self.eta = 1.0

    def value(self, x):
        d = np.ravel(np.asarray(x, dtype=float) - self.target)
        return 0.5 * float(d @ d)

    def gradient(self, x):
        return np.asarray(x, dtype=float) - self.target

    def proximal_solve(self, v, c):
        return (self.target + c * np.asarray(v, dtype=float)) / (1.0 + c)

    def linear_tilt_solve(self, s):
        return self.target + np.asarray(s, dtype=float)


@dataclass
class WeightedQuadraticLoss(SmoothLoss):
    """l(x) = 0.5 sum_i w_i (x_i - target_i)^2 with positive weights.

    Strongly convex with eta = min(w); linear_tilt_solve(s) = target + s/w.
    """

    target: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != self.target.shape:
            raise ValueError("WeightedQuadraticLoss: weight shape mismatch")
        if np.any(self.weights <= 0):
            raise ValueError("WeightedQuadraticLoss: weights must be positive")
        self.eta = float(np.min(self.weights))

    def value(self, x):
        d = np.asarray(x, dtype=float) - self.target
        return 0.5 * float(np.sum(self.weights * d * d))

    def gradient(self, x):
        return self.weights * (np.asarray(x, dtype=float) - self.target)

    def proximal_solve(self, v, c):
        v = np.asarray(v, dtype=float)
        return (self.weights * self.target + c * v) / (self.weights + c)

    def linear_tilt_solve(self, s):
        return self.target + np.asarray(s, dtype=float) / self.weights


def armijo_minimize(value: Callable[[np.ndarray], float],
                    gradient: Callable[[np.ndarray], np.ndarray],
                    x0: np.ndarray,
                    grad_tol: float = 1e-10,
                    max_iter: int = 50_000) -> np.ndarray:
    """Backtracking gradient descent (halving, slope 1e-4) to ||grad|| <= tol.

    Exits early when the candidate move falls below the floating-point
    resolution of the iterate: past that point no representable progress
    remains, which on badly scaled problems can happen before the absolute
    gradient tolerance is met.
    """
    x = np.asarray(x0, dtype=float).copy()
    f = value(x)
    if not np.isfinite(f):
        raise InnerSolveError("nonfinite loss value at start point", x)
    g = gradient(x)
    step = 1.0
    for _ in range(max_iter):
        gsq = float(np.vdot(g, g).real)
        gnorm = np.sqrt(gsq)
        if gnorm <= grad_tol:
            return x
        move_floor = 1e-16 * (float(np.linalg.norm(np.ravel(x))) + 1.0)
        t = step
        while True:
            if t * gnorm <= move_floor:
                return x  # machine converged: the iterate cannot move
            cand = x - t * g
            fc = value(cand)
            if np.isfinite(fc) and fc < f - 1e-4 * t * gsq:
                break
            t *= 0.5
        x, f = cand, fc
        g = gradient(x)
        step = min(2.0 * t, 1e8)
    raise InnerSolveError("gradient iteration cap reached", x)


# ---------------------------------------------------------------------------
# problem / config


@dataclass
class PenaltyProblem:
    """Loss plus constraint sets with positive weights.

    Weights are normalized to sum to one (relative importances; overall
    penalty scale belongs to mu).  ``sets`` may be empty, in which case
    solving just minimizes the loss.
    """

    loss: SmoothLoss
    sets: Sequence[ConvexSet] = field(default_factory=list)
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.sets = list(self.sets)
        m = len(self.sets)
        if self.weights is None:
            self.weights = (np.full(m, 1.0 / m) if m else np.zeros(0))
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (m,):
                raise ValueError("PenaltyProblem: need one weight per set")
            if np.any(w <= 0):
                raise ValueError("PenaltyProblem: weights must be positive")
            self.weights = w / w.sum()

    def default_start(self) -> np.ndarray:
        target = getattr(self.loss, "target", None)
        if target is None:
            raise ValueError("no default start point; pass x0 explicitly")
        return np.zeros_like(np.asarray(target, dtype=float))


@dataclass
class SolverConfig:
    """Knobs for the staged MM solver.

    ``mu_schedule`` overrides the default geometric schedule built from
    ``max_stages``.  ``secants`` > 0 switches on safeguarded quasi-Newton
    acceleration with that history length (history clears at each mu change).
    ``target_violation``, when set, stops the outer loop early once the
    maximum set distance falls below it (and becomes part of ``converged``).
    """

    rho: float = 1e-4
    max_stages: int = 20
    mu_schedule: Optional[Sequence[float]] = None
    max_inner: int = 50_000
    secants: int = 0
    safeguard: bool = True
    target_violation: Optional[float] = None
    inner_grad_tol: float = 1e-10
    ridge: float = 1e-12

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("SolverConfig: rho must be positive")
        if self.max_stages < 1:
            raise ValueError("SolverConfig: max_stages must be >= 1")
        if self.max_inner < 1:
            raise ValueError("SolverConfig: max_inner must be >= 1")
        if self.secants < 0:
            raise ValueError("SolverConfig: secants must be >= 0")
        if self.mu_schedule is not None:
            sched = [float(m) for m in self.mu_schedule]
            if not sched or any(m <= 0 for m in sched):
                raise ValueError("SolverConfig: mu values must be positive")
            if any(b <= a for a, b in zip(sched[:-1], sched[1:])):
                raise ValueError("SolverConfig: mu schedule must increase")
            self.mu_schedule = sched

    def resolved_schedule(self) -> List[float]:
        if self.mu_schedule is not None:
            return list(self.mu_schedule)
        return default_mu_schedule(self.max_stages)


@dataclass
class SolveResult:
    """Final iterate plus bookkeeping from a staged solve."""

    x: np.ndarray
    trace: SolveTrace
    converged: bool
    iterations: int
    mu_final: float
    objective: float
    violation: float
    residual: float
    seconds: float


# ---------------------------------------------------------------------------
# staged MM engine

# evaluate_step(mu, x) -> (x_next, objective, violation, residual); the
# metrics describe the incoming x, so recorded stage rows are monotone.
EvaluateStep = Callable[[float, np.ndarray],
                        Tuple[np.ndarray, float, float, float]]


def run_mm_stages(evaluate_step: EvaluateStep,
                  objective_fn: Callable[[float, np.ndarray], float],
                  config: SolverConfig,
                  x0: np.ndarray,
                  stop_on_violation: Optional[float] = None,
                  retract: Optional[Callable[[np.ndarray],
                                             np.ndarray]] = None) -> SolveResult:
    """Run MM inner loops over the mu schedule with tracing and acceleration.

    ``objective_fn`` evaluates the penalized objective for the acceleration
    safeguard (it may return +inf for points outside the loss domain).
    ``stop_on_violation`` aborts as soon as the recorded violation falls to
    that level (used by pure feasibility runs).  ``retract`` maps secant
    extrapolations back into the iterate domain (e.g. clamping slack
    variables) before the safeguard judges them.

    With acceleration on, each stage runs at least ``secants + 2`` steps
    before the step-ratio stop is honored: at large mu the plain step
    contracts so hard that the ratio can fall under rho while the iterate is
    still far from the stage's fixed point, and the extrapolator needs a full
    history to pull it the rest of the way.  Extrapolation proposals are line
    searched along plain-step -> candidate (factors 2, 1, 1/2, 1/4; the
    lengthened level helps when noise-limited secants underestimate the
    distance) and the best non-increasing level is taken; an iteration whose
    proposal was rejected at every level does not end the stage either (the
    model still wants a material move; six straight rejections re-enable the
    stop).  Stages still end only when the ratio is below rho.
    """
    schedule = config.resolved_schedule()
    x = np.asarray(x0, dtype=float).copy()
    trace = SolveTrace()
    t0 = time.perf_counter()
    total = 0
    all_stages_ok = True
    mu_used = schedule[0]
    hit_violation_stop = False
    min_steps = config.secants + 2 if config.secants > 0 else 1

    for mu in schedule:
        mu_used = mu
        trace.mark_stage()
        history = SecantHistory(config.secants) if config.secants > 0 else None
        stage_ok = False
        reject_streak = 0
        for inner in range(config.max_inner):
            x_next, obj, viol, resid = evaluate_step(mu, x)
            if not np.isfinite(obj):
                raise InnerSolveError("nonfinite objective encountered", x)
            trace.append(total, mu, obj, viol, resid,
                         time.perf_counter() - t0)
            total += 1
            if stop_on_violation is not None and viol <= stop_on_violation:
                stage_ok = True
                hit_violation_stop = True
                break
            stop_allowed = True
            if history is not None:
                cand = extrapolate(x, x_next, history, config.ridge)
                history.push(x, x_next)
                if cand is not None and retract is not None:
                    cand = retract(cand)
                if cand is None:
                    trace.accel_fallbacks += 1
                else:
                    taken = None
                    if not config.safeguard:
                        taken = cand
                    else:
                        base = objective_fn(mu, x_next)
                        best = np.inf
                        for damp in (2.0, 1.0, 0.5, 0.25):
                            trial = x_next + damp * (cand - x_next)
                            if retract is not None and damp > 1.0:
                                trial = retract(trial)
                            val = objective_fn(mu, trial)
                            if val <= base and val < best:
                                taken, best = trial, val
                    if taken is not None:
                        x_next = taken
                        trace.accel_accepted += 1
                        reject_streak = 0
                    else:
                        trace.accel_rejected += 1
                        reject_streak += 1
                        stop_allowed = reject_streak >= 6
            ratio = (np.linalg.norm(np.ravel(x_next - x))
                     / (np.linalg.norm(np.ravel(x)) + 1.0))
            x = x_next
            if ratio < config.rho and inner + 1 >= min_steps and stop_allowed:
                stage_ok = True
                break
        all_stages_ok = all_stages_ok and stage_ok
        if hit_violation_stop:
            break
        if config.target_violation is not None:
            _, _, viol_now, _ = evaluate_step(mu, x)
            if viol_now <= config.target_violation:
                break

    # closing row: metrics of the final iterate under the last mu used
    _, obj, viol, resid = evaluate_step(mu_used, x)
    seconds = time.perf_counter() - t0
    trace.append(total, mu_used, obj, viol, resid, seconds)

    converged = all_stages_ok
    if config.target_violation is not None:
        converged = converged and viol <= config.target_violation
    return SolveResult(x=x, trace=trace, converged=converged,
                       iterations=total, mu_final=mu_used, objective=obj,
                       violation=viol, residual=resid, seconds=seconds)


# ---------------------------------------------------------------------------
# generic penalty solve


def _surrogate_minimize(problem: PenaltyProblem, mu: float, pbar: np.ndarray,
                        x: np.ndarray, grad_tol: float) -> np.ndarray:
    """argmin_u l(u) + (mu/2)||u - pbar||^2, by prox or Armijo descent."""
    prox = problem.loss.proximal_solve(pbar, mu)
    if prox is not None:
        return prox

    def val(u):
        d = np.ravel(u - pbar)
        return problem.loss.value(u) + 0.5 * mu * float(d @ d)

    def grad(u):
        return problem.loss.gradient(u) + mu * (u - pbar)

    return armijo_minimize(val, grad, x, grad_tol)


def _pass_through(problem: PenaltyProblem, x: np.ndarray):
    """One projection sweep: (pbar, weighted dist^2 sum, max dist)."""
    pbar = np.zeros_like(x)
    sqsum = 0.0
    worst = 0.0
    for gamma, cset in zip(problem.weights, problem.sets):
        p = np.asarray(cset.project(x), dtype=float)
        pbar += gamma * p
        dsq = float(np.vdot(np.ravel(x - p), np.ravel(x - p)).real)
        sqsum += gamma * dsq
        worst = max(worst, np.sqrt(dsq))
    return pbar, sqsum, worst


def penalized_objective(problem: PenaltyProblem, mu: float,
                        x: np.ndarray) -> float:
    """f_mu(x) = l(x) + (mu/2) sum_i gamma_i dist(x, C_i)^2."""
    x = np.asarray(x, dtype=float)
    _, sqsum, _ = _pass_through(problem, x)
    return problem.loss.value(x) + 0.5 * mu * sqsum


def mm_step(problem: PenaltyProblem, mu: float, x: np.ndarray,
            grad_tol: float = 1e-10) -> np.ndarray:
    """One MM step: prox of the loss at the weighted projection average.

    Guarantees f_mu(result) <= f_mu(x) (exactly for proximal closed forms,
    up to the inner gradient tolerance otherwise).
    """
    if mu <= 0:
        raise ValueError("mm_step: mu must be positive")
    x = np.asarray(x, dtype=float)
    if not problem.sets:
        # no constraints: pbar = x (whole-space projection), i.e. a
        # proximal-point step of the loss -- still a valid majorization
        return _surrogate_minimize(problem, mu, x, x, grad_tol)
    pbar, _, _ = _pass_through(problem, x)
    return _surrogate_minimize(problem, mu, pbar, x, grad_tol)


def stationarity_residual(problem: PenaltyProblem, mu: float,
                          x: np.ndarray) -> float:
    """|| grad l(x) + mu * sum_i gamma_i (x - P_i(x)) ||."""
    x = np.asarray(x, dtype=float)
    if not problem.sets:
        return float(np.linalg.norm(np.ravel(problem.loss.gradient(x))))
    pbar, _, _ = _pass_through(problem, x)
    g = problem.loss.gradient(x) + mu * (x - pbar)
    return float(np.linalg.norm(np.ravel(g)))


def solve(problem: PenaltyProblem, config: Optional[SolverConfig] = None,
          x0: Optional[np.ndarray] = None) -> SolveResult:
    """Staged penalized MM solve of ``problem``.

    Raises ValueError when the first mu does not exceed the loss curvature
    bound (the surrogate would not be convex).
    """
    config = config or SolverConfig()
    schedule = config.resolved_schedule()
    kappa = float(getattr(problem.loss, "curvature", 0.0))
    if kappa > 0 and schedule[0] <= kappa:
        raise ValueError(f"first mu {schedule[0]:g} must exceed the loss "
                         f"curvature bound {kappa:g}")
    x_start = problem.default_start() if x0 is None else \
        np.asarray(x0, dtype=float)

    if not problem.sets:
        # unconstrained: run the same engine over the whole space, where the
        # MM step is a proximal-point step (surrogates stay (mu-kappa)-
        # strongly convex, so the inner gradient solver is well conditioned)
        problem = PenaltyProblem(problem.loss, [WholeSpace()])

    def evaluate(mu, x):
        pbar, sqsum, worst = _pass_through(problem, x)
        obj = problem.loss.value(x) + 0.5 * mu * sqsum
        resid = float(np.linalg.norm(
            np.ravel(problem.loss.gradient(x) + mu * (x - pbar))))
        x_next = _surrogate_minimize(problem, mu, pbar, x,
                                     config.inner_grad_tol)
        return x_next, obj, worst, resid

    def objective(mu, x):
        return penalized_objective(problem, mu, x)

    return run_mm_stages(evaluate, objective, config, x_start)


def feasibility_solve(sets: Sequence[ConvexSet], x0,
                      tol: float = 1e-6,
                      config: Optional[SolverConfig] = None) -> SolveResult:
    """Seek a point of the intersection by averaged projections.

    Minimizes the proximity 0.5 * sum_i dist(x, C_i)^2; each MM step moves to
    the mean of the projections.  Success (``converged=True``) means the
    maximum distance fell to ``tol``; stalling below the step ratio first is
    the stationarity certificate of an (apparently) empty intersection, and
    the best iterate is returned flagged.
    """
    if not sets:
        raise ValueError("feasibility_solve: need at least one set")
    if config is None:
        config = SolverConfig(rho=1e-12, mu_schedule=[1.0],
                              max_inner=100_000)
    m = len(sets)

    def evaluate(mu, x):
        ps = [np.asarray(c.project(x), dtype=float) for c in sets]
        dists = [float(np.linalg.norm(np.ravel(x - p))) for p in ps]
        obj = 0.5 * sum(d * d for d in dists)
        resid = float(np.linalg.norm(
            np.ravel(sum(x - p for p in ps))))
        x_next = sum(ps) / m
        return x_next, obj, max(dists), resid

    def objective(mu, x):
        return 0.5 * sum(c.dist(x) ** 2 for c in sets)

    result = run_mm_stages(evaluate, objective, config,
                           np.asarray(x0, dtype=float),
                           stop_on_violation=tol)
    result.converged = result.violation <= tol
    return result
