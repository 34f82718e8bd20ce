"""Per-iteration solve traces shared by the penalty and dual solvers."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, TextIO, Union

TRACE_COLUMNS = ("iter", "mu", "objective", "violation", "residual", "seconds")


@dataclass
class TraceRow:
    """One recorded iteration.

    ``objective``/``violation``/``residual`` describe the iterate *entering* the
    step, so within a fixed ``mu`` the objective column is non-increasing.
    """

    iteration: int
    mu: float
    objective: float
    violation: float
    residual: float
    seconds: float

    def astuple(self):
        return (self.iteration, self.mu, self.objective, self.violation,
                self.residual, self.seconds)


@dataclass
class SolveTrace:
    """Ordered trace rows plus stage boundaries (one stage per value of mu).

    Bookkeeping counters for the acceleration safeguard live here as plain
    attributes; they are not part of the CSV schema.
    """

    rows: List[TraceRow] = field(default_factory=list)
    stage_starts: List[int] = field(default_factory=list)
    accel_accepted: int = 0
    accel_rejected: int = 0
    accel_fallbacks: int = 0

    def mark_stage(self) -> None:
        self.stage_starts.append(len(self.rows))

    def append(self, iteration: int, mu: float, objective: float,
               violation: float, residual: float, seconds: float) -> None:
        self.rows.append(TraceRow(iteration, mu, objective, violation,
                                  residual, seconds))

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def last(self) -> TraceRow:
        return self.rows[-1]

    def stage_slices(self) -> Iterator[Sequence[TraceRow]]:
        """Yield the rows of each mu stage in order."""
        bounds = list(self.stage_starts) + [len(self.rows)]
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi > lo:
                yield self.rows[lo:hi]

    def max_objective_increase(self) -> float:
        """Largest within-stage objective increase (0 for a monotone trace)."""
        worst = 0.0
        for stage in self.stage_slices():
            objs = [r.objective for r in stage]
            for a, b in zip(objs[:-1], objs[1:]):
                worst = max(worst, b - a)
        return worst

    def write_csv(self, target: Union[str, TextIO]) -> None:
        """Write rows as CSV with the fixed header ``iter,mu,...,seconds``."""
        if isinstance(target, str):
            with open(target, "w", newline="") as fh:
                self._write(fh)
        else:
            self._write(target)

    def _write(self, fh: TextIO) -> None:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for row in self.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row.astuple()])
