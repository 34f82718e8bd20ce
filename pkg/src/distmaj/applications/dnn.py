"""Nearest doubly nonnegative matrix: PSD with nonnegative entries.

Projects a symmetric matrix S onto the doubly nonnegative cone by solving

    min 0.5 ||X - S||_F^2   s.t.   X in PSD  and  X >= 0 entrywise,

with the two constraint sets equally weighted.  Both the penalized MM route
and the dual proximal-gradient route apply (the loss is 1-strongly convex);
each sweep costs one eigendecomposition plus one clamp.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dual import dual_solve
from ..penalty import (PenaltyProblem, QuadraticLoss, SolverConfig, solve)
from ..projections import NonnegativeOrthant, PsdCone
from ..trace import SolveTrace

SOLVERS = ("mm", "mm-qn", "dual", "dual-fista")


@dataclass
class DnnResult:
    """Projected matrix plus the two one-sided violation magnitudes.

    ``eig_violation`` = |most negative eigenvalue| (0 when PSD);
    ``entry_violation`` = |most negative entry| (0 when nonnegative);
    ``violation_signed`` = min(smallest eigenvalue, smallest entry).
    """

    matrix: np.ndarray
    distance: float
    eig_violation: float
    entry_violation: float
    violation_signed: float
    iterations: int
    converged: bool
    trace: SolveTrace
    seconds: float
    solver: str
    mu_final: float


def default_dnn_config(solver: str = "mm-qn") -> SolverConfig:
    return SolverConfig(rho=1e-4, max_stages=20,
                        secants=2 if solver == "mm-qn" else 0)


def dnn_violations(matrix: np.ndarray):
    """(eig_violation, entry_violation, signed) for a symmetric matrix."""
    m = np.asarray(matrix, dtype=float)
    lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
    ent_min = float(m.min())
    return (max(0.0, -lam_min), max(0.0, -ent_min), min(lam_min, ent_min))


def dnn_project(matrix, config: Optional[SolverConfig] = None,
                solver: str = "mm-qn") -> DnnResult:
    """Project ``matrix`` (symmetric up to 1e-12) onto the DNN cone."""
    if solver not in SOLVERS:
        raise ValueError(f"dnn_project: unknown solver {solver!r}")
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError("dnn_project: expected a square matrix")
    if s.size and np.max(np.abs(s - s.T)) > 1e-12:
        raise ValueError("dnn_project: matrix must be symmetric "
                         "(max asymmetry above 1e-12)")
    s = 0.5 * (s + s.T)
    config = config or default_dnn_config(solver)
    loss = QuadraticLoss(s)
    sets = [PsdCone(), NonnegativeOrthant()]

    if solver in ("mm", "mm-qn"):
        res = solve(PenaltyProblem(loss, sets), config)  # starts at origin
    else:
        res = dual_solve(loss, sets, config,
                         accelerated=(solver == "dual-fista"))
    eig_v, ent_v, signed = dnn_violations(res.x)
    return DnnResult(matrix=res.x,
                     distance=float(np.linalg.norm(res.x - s)),
                     eig_violation=eig_v, entry_violation=ent_v,
                     violation_signed=signed, iterations=res.iterations,
                     converged=res.converged, trace=res.trace,
                     seconds=res.seconds, solver=solver,
                     mu_final=res.mu_final)
