"""Minimizing cos(x) by quadratic majorization; a SUMMA counterexample.

Since |cos''| <= 1, g(y | x) = cos(x) - sin(x)(y - x) + (y - x)^2 / 2
majorizes cos at x, and its minimizer is the MM map

    psi(x) = x + sin(x),

which converges to the nearest odd multiple of pi (quadratically near pi,
where psi'(pi) = 0).  The SUMMA condition would require

    [g(x | x0) - g(x1 | x0)] - [g(x | x1) - cos(x)] >= 0 for all x;

``summa_gap`` evaluates that difference, and it dips negative on [-2pi, 2pi]
for x0 = 1: a convergent MM scheme need not satisfy SUMMA.
"""

from __future__ import annotations

import numpy as np


def cosine_mm_iterate(x0: float = 1.0, steps: int = 100) -> np.ndarray:
    """Iterates of psi(x) = x + sin(x) starting at x0 (x0 included)."""
    if steps < 0:
        raise ValueError("cosine_mm_iterate: steps must be >= 0")
    out = np.empty(steps + 1)
    out[0] = float(x0)
    for k in range(steps):
        out[k + 1] = out[k] + np.sin(out[k])
    return out


def cosine_surrogate(y, x):
    """g(y | x) = cos(x) - sin(x)(y - x) + (y - x)^2 / 2 (majorizes cos)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.cos(x) - np.sin(x) * (y - x) + 0.5 * (y - x) ** 2


def summa_gap(x, x0: float = 1.0):
    """SUMMA surplus at x after one MM step from x0 (negative = violated).

    Computes [g(x|x0) - g(x1|x0)] - [g(x|x1) - cos(x)] with x1 = psi(x0).
    SUMMA-style convergence proofs need this to be nonnegative everywhere;
    for x0 = 1 it is negative on part of [-2pi, 2pi].
    """
    x = np.asarray(x, dtype=float)
    x1 = float(x0) + np.sin(float(x0))
    lhs = cosine_surrogate(x, x0) - cosine_surrogate(x1, x0)
    rhs = cosine_surrogate(x, x1) - np.cos(x)
    return lhs - rhs
