"""
Exact rational primal simplex for packing LPs:

    maximize  c^T x   subject to  A x <= b,  x >= 0,  with b >= 0.

The slack basis is feasible because b >= 0, so no phase one is needed. All
arithmetic is in `fractions.Fraction` and pivoting follows Bland's rule, so
the method terminates without tolerances and returns an exact optimal basic
solution together with exact optimal duals.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import List, Sequence, Tuple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimplexResult:
    status: str  # 'optimal' or 'unbounded'
    value: Fraction
    primal: Tuple[Fraction, ...]
    duals: Tuple[Fraction, ...]
    basis: Tuple[int, ...]
    pivots: int


class SimplexTableau:
    """Dense tableau over the columns [A | I]."""

    def __init__(self, columns: Sequence[Sequence[Rational]], capacities: Sequence[Rational],
                 objective: Sequence[Rational]) -> None:
        """
        Args:
            columns: one coefficient vector (length m) per structural variable.
            capacities: right-hand side b, length m, all >= 0.
            objective: c, one entry per structural variable.
        """
        self.m = len(capacities)
        self.n = len(columns)
        if len(objective) != self.n:
            raise ValueError(f"Objective has {len(objective)} entries for {self.n} columns.")
        if any(len(col) != self.m for col in columns):
            raise ValueError(f"Every column needs {self.m} coefficients.")
        if any(b < 0 for b in capacities):
            raise ValueError("Right-hand side must be nonnegative for the slack start.")
        zero, one = Fraction(0), Fraction(1)
        self.rows: List[List[Fraction]] = []
        for i in range(self.m):
            row = [Fraction(col[i]) for col in columns] + [zero] * self.m
            row[self.n + i] = one
            self.rows.append(row)
        self.rhs: List[Fraction] = [Fraction(b) for b in capacities]
        self.reduced: List[Fraction] = [Fraction(c) for c in objective] + [zero] * self.m
        self.value = zero
        self.basis: List[int] = [self.n + i for i in range(self.m)]
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        piv = row[j]
        if piv != 1:
            self.rows[i] = row = [v / piv for v in row]
            self.rhs[i] /= piv
        for k in range(self.m):
            if k == i:
                continue
            factor = self.rows[k][j]
            if factor:
                other = self.rows[k]
                self.rows[k] = [a - factor * b for a, b in zip(other, row)]
                self.rhs[k] -= factor * self.rhs[i]
        factor = self.reduced[j]
        if factor:
            self.reduced = [a - factor * b for a, b in zip(self.reduced, row)]
            self.value += factor * self.rhs[i]
        self.basis[i] = j
        self.pivots += 1

    def bland_step(self) -> str:
        entering = next((j for j, r in enumerate(self.reduced) if r > 0), None)
        if entering is None:
            return "optimal"
        candidates = [(self.rhs[i] / self.rows[i][entering], self.basis[i], i)
                      for i in range(self.m) if self.rows[i][entering] > 0]
        if not candidates:
            return "unbounded"
        _, _, leaving = min(candidates)
        logger.debug(f"Pivot: x{self.basis[leaving]} leaves, x{entering} enters")
        self.pivot(leaving, entering)
        return "continue"

    def solve(self, max_pivots: int = 1_000_000) -> SimplexResult:
        status = "continue"
        while status == "continue":
            if self.pivots >= max_pivots:
                raise RuntimeError(f"Simplex exceeded {max_pivots} pivots.")
            status = self.bland_step()
        primal = [Fraction(0)] * self.n
        for i, var in enumerate(self.basis):
            if var < self.n:
                primal[var] = self.rhs[i]
        duals = tuple(-self.reduced[self.n + i] for i in range(self.m))
        return SimplexResult(status, self.value, tuple(primal), duals, tuple(self.basis), self.pivots)


def solve_packing_lp(columns: Sequence[Sequence[Rational]], capacities: Sequence[Rational],
                     objective: Sequence[Rational] = ()) -> SimplexResult:
    """max sum(x) (or c^T x) s.t. sum_z x_z * column_z <= capacities, x >= 0."""
    objective = list(objective) if objective else [1] * len(columns)
    tableau = SimplexTableau(columns, capacities, objective)
    result = tableau.solve()
    logger.debug(f"Simplex finished: status={result.status}, value={result.value}, pivots={result.pivots}")
    return result
