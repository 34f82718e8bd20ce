"""Seeded example-data generators and the CSV formats the CLI speaks.

All generators draw from ``numpy.random.default_rng(seed)`` and all writers
format floats with ``repr`` (shortest round-trip), so a (kind, size, seed)
triple always produces byte-identical files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

DATASET_KINDS = ("dnn", "isotone", "convexreg", "svm", "firestation",
                 "robust", "feasibility")


def _write_rows(path: str, header: List[str], rows: np.ndarray) -> None:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def _read_rows(path: str):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        data = []
        for line in reader:
            if not line:
                continue
            try:
                data.append([float(v) for v in line])
            except ValueError:
                raise ValueError(f"{path}: non-numeric row {line!r}") from None
    if not data:
        raise ValueError(f"{path}: no data rows")
    widths = {len(r) for r in data}
    if len(widths) != 1 or widths != {len(header)}:
        raise ValueError(f"{path}: ragged rows or header/data width mismatch")
    return header, np.asarray(data, dtype=float)


def save_matrix(path: str, matrix) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    _write_rows(path, [f"c{j}" for j in range(matrix.shape[1])], matrix)


def load_matrix(path: str) -> np.ndarray:
    _, data = _read_rows(path)
    return data


@dataclass
class RegressionData:
    """Predictors, responses, and optional positive case weights."""

    x: np.ndarray
    y: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.ndim == 1:
            self.x = self.x[:, None]
        self.y = np.asarray(self.y, dtype=float)
        n = self.x.shape[0]
        if self.y.shape != (n,):
            raise ValueError("RegressionData: y length mismatch")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (n,):
                raise ValueError("RegressionData: weight length mismatch")
            if np.any(self.weights <= 0):
                raise ValueError("RegressionData: weights must be positive")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def weights_or_ones(self) -> np.ndarray:
        return np.ones(self.n) if self.weights is None else self.weights

    def to_csv(self, path: str) -> None:
        p = self.x.shape[1]
        header = [f"x{j}" for j in range(p)] + ["y"]
        cols = [self.x, self.y[:, None]]
        if self.weights is not None:
            header.append("w")
            cols.append(self.weights[:, None])
        _write_rows(path, header, np.hstack(cols))

    @classmethod
    def from_csv(cls, path: str) -> "RegressionData":
        header, data = _read_rows(path)
        if "y" not in header:
            raise ValueError(f"{path}: expected a 'y' column")
        ycol = header.index("y")
        xcols = [i for i, h in enumerate(header) if h.startswith("x")]
        if not xcols:
            raise ValueError(f"{path}: expected x0.. predictor columns")
        weights = data[:, header.index("w")] if "w" in header else None
        return cls(x=data[:, xcols], y=data[:, ycol], weights=weights)


@dataclass
class FeasibilityData:
    """Halfspaces a_i^T x <= b_i plus the witness point used to build them."""

    normals: np.ndarray
    offsets: np.ndarray
    witness: Optional[np.ndarray] = None

    def __post_init__(self):
        self.normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        self.offsets = np.asarray(self.offsets, dtype=float)
        if self.offsets.shape != (self.normals.shape[0],):
            raise ValueError("FeasibilityData: offset length mismatch")

    def to_csv(self, path: str) -> None:
        d = self.normals.shape[1]
        header = [f"a{j}" for j in range(d)] + ["b"]
        _write_rows(path, header, np.hstack([self.normals,
                                             self.offsets[:, None]]))

    @classmethod
    def from_csv(cls, path: str) -> "FeasibilityData":
        header, data = _read_rows(path)
        if header[-1] != "b":
            raise ValueError(f"{path}: expected trailing 'b' column")
        return cls(normals=data[:, :-1], offsets=data[:, -1])


@dataclass
class RobustData(RegressionData):
    """Regression data with a planted gross outlier and known coefficients."""

    beta_true: Optional[np.ndarray] = None
    outlier_index: int = -1


def save_rectangles(path: str, rects) -> None:
    rows = np.asarray([[r.center[0], r.center[1], r.half[0], r.half[1]]
                       for r in rects], dtype=float)
    _write_rows(path, ["cx", "cy", "hx", "hy"], rows)


def load_rectangles(path: str):
    from .applications.fire_station import Rectangle
    header, data = _read_rows(path)
    if header != ["cx", "cy", "hx", "hy"]:
        raise ValueError(f"{path}: expected columns cx,cy,hx,hy")
    return [Rectangle(center=row[:2], half=row[2:]) for row in data]


# ---------------------------------------------------------------------------
# generators


def dnn_matrix(size: int, seed: int) -> np.ndarray:
    """Symmetric part of a standard normal matrix (generally indefinite)."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((size, size))
    return 0.5 * (g + g.T)


def isotone_data(size: int, seed: int) -> RegressionData:
    """Noisy squares on an increasing grid; the classic isotone test bed."""
    rng = np.random.default_rng(seed)
    x = np.linspace(1.0, 3.0, size)
    y = x ** 2 + rng.standard_normal(size)
    return RegressionData(x=x, y=y, weights=np.ones(size))


def convexreg_data(size: int, seed: int, dim: int = 1) -> RegressionData:
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(size, dim))
    if dim == 1:
        x = np.sort(x, axis=0)
    y = np.sum(x ** 2, axis=1) + 0.2 * rng.standard_normal(size)
    return RegressionData(x=x, y=y, weights=np.ones(size))


def svm_data(size: int, seed: int, dim: int = 5) -> RegressionData:
    """Linearly separable-with-noise labels; first feature is the constant 1."""
    if dim < 2:
        raise ValueError("svm_data: dim must be >= 2 (intercept + features)")
    rng = np.random.default_rng(seed)
    x = np.hstack([np.ones((size, 1)), rng.standard_normal((size, dim - 1))])
    theta = rng.standard_normal(dim)
    margin = x @ theta + 0.3 * rng.standard_normal(size)
    y = np.where(margin >= 0, 1.0, -1.0)
    return RegressionData(x=x, y=y)


def firestation_rectangles():
    """The five fixed unit-square buildings (half side length 0.5)."""
    from .applications.fire_station import Rectangle
    centers = [(-7.0, 0.5), (-5.0, -8.0), (4.0, 7.0), (5.0, 2.0),
               (-4.0, 6.0)]
    return [Rectangle(center=np.array(c), half=np.array([0.5, 0.5]))
            for c in centers]


def robust_data(size: int, seed: int, dim: int = 3) -> RobustData:
    """Linear model with N(0, 0.1^2) noise and one gross (+/-30) outlier."""
    rng = np.random.default_rng(seed)
    x = np.hstack([np.ones((size, 1)), rng.standard_normal((size, dim - 1))])
    beta = rng.standard_normal(dim)
    y = x @ beta + 0.1 * rng.standard_normal(size)
    idx = int(rng.integers(size))
    y[idx] += 30.0 * (1.0 if rng.random() < 0.5 else -1.0)
    return RobustData(x=x, y=y, beta_true=beta, outlier_index=idx)


def feasibility_halfspaces(size: int, seed: int, dim: int = 3
                           ) -> FeasibilityData:
    """Random halfspaces guaranteed to share a seeded witness point."""
    rng = np.random.default_rng(seed)
    normals = rng.standard_normal((size, dim))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    witness = rng.standard_normal(dim)
    offsets = normals @ witness + rng.uniform(0.1, 1.0, size)
    return FeasibilityData(normals=normals, offsets=offsets, witness=witness)


def generate(kind: str, size: int, seed: int, dim: Optional[int] = None):
    """Build the seeded dataset object for ``kind`` (see DATASET_KINDS)."""
    if kind == "dnn":
        return dnn_matrix(size, seed)
    if kind == "isotone":
        return isotone_data(size, seed)
    if kind == "convexreg":
        return convexreg_data(size, seed, dim or 1)
    if kind == "svm":
        return svm_data(size, seed, dim or 5)
    if kind == "firestation":
        return firestation_rectangles()
    if kind == "robust":
        return robust_data(size, seed, dim or 3)
    if kind == "feasibility":
        return feasibility_halfspaces(size, seed, dim or 3)
    raise ValueError(f"unknown dataset kind {kind!r}; "
                     f"choose from {', '.join(DATASET_KINDS)}")


def save_dataset(obj, kind: str, path: str) -> None:
    if kind == "dnn":
        save_matrix(path, obj)
    elif kind == "firestation":
        save_rectangles(path, obj)
    elif kind == "feasibility":
        obj.to_csv(path)
    elif kind in ("isotone", "convexreg", "svm", "robust"):
        obj.to_csv(path)
    else:
        raise ValueError(f"unknown dataset kind {kind!r}")


def load_dataset(kind: str, path: str):
    if kind == "dnn":
        return load_matrix(path)
    if kind == "firestation":
        return load_rectangles(path)
    if kind == "feasibility":
        return FeasibilityData.from_csv(path)
    if kind in ("isotone", "convexreg", "svm", "robust"):
        return RegressionData.from_csv(path)
    raise ValueError(f"unknown dataset kind {kind!r}")
