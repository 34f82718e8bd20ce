"""Linear and kernel support-vector machines by distance majorization.

Primal hinge-loss SVM with slack variables eps >= 0:

    min sum_j eps_j + (lam/2) ||theta||^2
    s.t. eps_j + y_j x_j^T theta >= 1  for each case j,

where the first feature column is identically 1, so the intercept rides
inside theta (and is regularized with it).  Projection onto constraint j
adds c_j = [1 - eps_j - y_j x_j^T theta]_+ / (1 + y_j^2 ||x_j||^2) to eps_j
and c_j y_j x_j to theta; the exact MM updates under the sum-over-sets
penalty are

    eps+   = (1/n) [ sum P_eps - mu^{-1} 1 ]_+,
    theta+ = mu / (lam + n mu) * sum P_theta.

Kernel problems reduce to the linear case through a square-root factor L of
the Gram matrix (rows of L as features).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..penalty import SolverConfig, run_mm_stages
from ..trace import SolveTrace


@dataclass
class SvmModel:
    """Fitted separator: decision value is features @ theta."""

    theta: np.ndarray
    slack: np.ndarray
    lam: float
    objective: float
    violation_max: float
    violation_signed: float
    iterations: int
    converged: bool
    trace: SolveTrace
    seconds: float
    mu_final: float

    def decision(self, features) -> np.ndarray:
        return np.atleast_2d(np.asarray(features, dtype=float)) @ self.theta

    def classify(self, features) -> np.ndarray:
        return np.where(self.decision(features) >= 0.0, 1.0, -1.0)


def default_svm_config(solver: str = "mm-qn") -> SolverConfig:
    # the worst constraint deficit at the exact penalized minimizer is
    # den_j / mu for active slacks, so the schedule runs past the generic
    # default to push terminal violations below 1e-6
    schedule = [2.0 ** (k + 1) - 1.0 for k in range(26)]
    return SolverConfig(rho=1e-8, mu_schedule=schedule,
                        secants=5 if solver == "mm-qn" else 0)


def svm_fit(features, labels, lam: float = 1.0,
            config: Optional[SolverConfig] = None,
            solver: str = "mm-qn") -> SvmModel:
    """Fit the soft-margin linear SVM.

    ``features`` is (n, p) with first column identically 1; ``labels`` take
    values in {-1, +1}.  lam > 0 is the ridge weight on theta.
    """
    if solver not in ("mm", "mm-qn"):
        raise ValueError(f"svm_fit: unknown solver {solver!r}")
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if x.ndim != 2:
        raise ValueError("svm_fit: features must be a matrix")
    n, p = x.shape
    if y.shape != (n,):
        raise ValueError("svm_fit: label length mismatch")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("svm_fit: labels must be -1 or +1")
    if np.any(x[:, 0] != 1.0):
        raise ValueError("svm_fit: first feature column must be the "
                         "constant 1 (absorbed intercept)")
    lam = float(lam)
    if lam <= 0:
        raise ValueError("svm_fit: lam must be positive")
    config = config or default_svm_config(solver)

    den = 1.0 + y ** 2 * np.sum(x * x, axis=1)

    def unpack(u):
        return u[:n], u[n:]

    def parts(u):
        eps, theta = unpack(u)
        deficit = 1.0 - eps - y * (x @ theta)
        dpos = np.maximum(deficit, 0.0)
        return eps, theta, dpos

    def evaluate(mu, u):
        eps, theta, dpos = parts(u)
        c = dpos / den
        sum_p_eps = n * eps + c
        sum_p_theta = n * theta + x.T @ (c * y)
        eps_next = np.maximum(sum_p_eps - 1.0 / mu, 0.0) / n
        theta_next = (mu / (lam + n * mu)) * sum_p_theta
        obj = float(eps.sum()) + 0.5 * lam * float(theta @ theta) \
            + 0.5 * mu * float(np.sum(dpos * dpos / den))
        viol = float(np.max(dpos / np.sqrt(den)))
        grad_eps = 1.0 - mu * c
        grad_theta = lam * theta - mu * (x.T @ (c * y))
        resid = float(np.sqrt(np.sum(grad_eps ** 2)
                              + np.sum(grad_theta ** 2)))
        return np.concatenate([eps_next, theta_next]), obj, viol, resid

    def objective(mu, u):
        eps, theta, dpos = parts(u)
        if eps.min() < 0.0:
            return np.inf  # acceleration candidates must keep eps feasible
        return float(eps.sum()) + 0.5 * lam * float(theta @ theta) \
            + 0.5 * mu * float(np.sum(dpos * dpos / den))

    def retract(u):
        # secant extrapolation can push slacks slightly negative; clamp back
        # into the domain so the safeguard judges a legitimate point
        return np.concatenate([np.maximum(u[:n], 0.0), u[n:]])

    u0 = np.zeros(n + p)
    res = run_mm_stages(evaluate, objective, config, u0, retract=retract)
    eps, theta = unpack(res.x)
    slack_resid = eps + y * (x @ theta) - 1.0
    signed = float(min(slack_resid.min(), eps.min()))
    return SvmModel(theta=theta, slack=eps, lam=lam,
                    objective=float(eps.sum())
                    + 0.5 * lam * float(theta @ theta),
                    violation_max=max(0.0, -signed), violation_signed=signed,
                    iterations=res.iterations, converged=res.converged,
                    trace=res.trace, seconds=res.seconds,
                    mu_final=res.mu_final)


def kernel_svm_prepare(gram, rank: Optional[int] = None) -> np.ndarray:
    """Factor a PSD Gram matrix K as L L^T and return L for use as features.

    Eigenvalues in [-1e-10, 0) are clamped to zero; anything lower is an
    input error (K is not a kernel matrix).  Columns are ordered by
    decreasing eigenvalue with ties kept stable, so K = I yields L = I.
    ``rank`` truncates to the leading columns.
    """
    k = np.asarray(gram, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError("kernel_svm_prepare: Gram matrix must be square")
    if k.size and np.max(np.abs(k - k.T)) > 1e-12:
        raise ValueError("kernel_svm_prepare: Gram matrix must be symmetric")
    n = k.shape[0]
    vals, vecs = np.linalg.eigh(0.5 * (k + k.T))
    if vals.size and vals[0] < -1e-10:
        raise ValueError(f"kernel_svm_prepare: eigenvalue {vals[0]:.3e} "
                         "below -1e-10; not a PSD kernel matrix")
    vals = np.clip(vals, 0.0, None)
    order = np.argsort(-vals, kind="stable")
    factor = vecs[:, order] * np.sqrt(vals[order])[None, :]
    if rank is not None:
        if not 1 <= rank <= n:
            raise ValueError("kernel_svm_prepare: rank out of range")
        factor = factor[:, :rank]
    return factor
