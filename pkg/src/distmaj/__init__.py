"""distmaj: distance-majorization solvers for convex-constrained losses.

Minimize a smooth loss over an intersection of closed convex sets by
penalized MM with projection oracles (optionally quasi-Newton accelerated),
or by dual proximal gradient / FISTA for strongly convex losses.  Includes
Bregman-divergence variants, Tukey biweight robust regression, and worked
applications: matrix projection, isotone and convex regression, SVMs, and
facility location.
"""

from .acceleration import SecantHistory, accelerate, extrapolate
from .bregman import (BregmanGenerator, Entropy, Mahalanobis, NegLog,
                      SquaredNorm, UnsupportedCombination,
                      bregman_feasibility_step, bregman_project, divergence)
from .dual import (DualState, dual_init, dual_objective, dual_solve,
                   dual_step, fista_step)
from .penalty import (InnerSolveError, PenaltyProblem, QuadraticLoss,
                      SmoothLoss, SolveResult, SolverConfig,
                      WeightedQuadraticLoss, ZeroLoss, default_mu_schedule,
                      feasibility_solve, mm_step, penalized_objective, solve,
                      stationarity_residual)
from .projections import (Ball, Box, ConvexRegHalfspace, ConvexSet,
                          Halfspace, Hyperplane, IsotoneCone, L1Ball,
                          NonnegativeOrthant, PairwiseOrder, PsdCone, Simplex,
                          SvmHalfspace, WholeSpace, alternating_projection,
                          dist, pava, project, project_l1_rectangle,
                          simultaneous_projection_step)
from .robust import (RobustFit, TukeyLoss, default_robust_config, kappa_bound,
                     robust_regression, tukey_d1, tukey_d2, tukey_value)
from .trace import SolveTrace, TraceRow

__version__ = "0.1.0"

__all__ = [
    "SecantHistory", "accelerate", "extrapolate",
    "BregmanGenerator", "Entropy", "Mahalanobis", "NegLog", "SquaredNorm",
    "UnsupportedCombination", "bregman_feasibility_step", "bregman_project",
    "divergence",
    "DualState", "dual_init", "dual_objective", "dual_solve", "dual_step",
    "fista_step",
    "InnerSolveError", "PenaltyProblem", "QuadraticLoss", "SmoothLoss",
    "SolveResult", "SolverConfig", "WeightedQuadraticLoss", "ZeroLoss",
    "default_mu_schedule", "feasibility_solve", "mm_step",
    "penalized_objective", "solve", "stationarity_residual",
    "Ball", "Box", "ConvexRegHalfspace", "ConvexSet", "Halfspace",
    "Hyperplane", "IsotoneCone", "L1Ball", "NonnegativeOrthant",
    "PairwiseOrder", "PsdCone", "Simplex", "SvmHalfspace", "WholeSpace",
    "alternating_projection", "dist", "pava", "project",
    "project_l1_rectangle", "simultaneous_projection_step",
    "RobustFit", "TukeyLoss", "default_robust_config", "kappa_bound",
    "robust_regression", "tukey_d1", "tukey_d2", "tukey_value",
    "SolveTrace", "TraceRow",
    "__version__",
]
