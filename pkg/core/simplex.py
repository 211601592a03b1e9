"""
Dense simplex tableau with Bland's rule, in binary64 or exact rationals.

Solves max 1ᵀu s.t. Bu ≤ 1, u ≥ 0 for a matrix B with positive entries.
The slack basis is feasible from the start, so no first phase is needed.
With exact=True the tableau holds fractions.Fraction objects and every
comparison is exact.
"""

import logging
from fractions import Fraction

import numpy as np

from core.errors import NumericalFailure

logger = logging.getLogger(__name__)

EPS = 1e-12


class SimplexTableau:
    """Tableau [B | I | 1] with the reduced-cost row last."""

    def __init__(self, B: np.ndarray, exact: bool = False):
        rows, cols = B.shape
        self.rows = rows
        self.cols = cols
        self.exact = exact
        self.eps = 0 if exact else EPS
        if exact:
            zero, one = Fraction(0), Fraction(1)
            T = np.full((rows + 1, cols + rows + 1), zero, dtype=object)
            T[:rows, :cols] = [[Fraction(repr(float(x))) for x in row] for row in B]
        else:
            zero, one = 0.0, 1.0
            T = np.zeros((rows + 1, cols + rows + 1))
            T[:rows, :cols] = B
        for i in range(rows):
            T[i, cols + i] = one
        T[:rows, -1] = one
        T[rows, :cols] = -one
        self.T = T
        self.basis = list(range(cols, cols + rows))
        self.pivots = 0

    def pivot(self, i: int, j: int) -> None:
        T = self.T
        T[i] = T[i] / T[i, j]
        factors = T[:, j].copy()
        factors[i] = 0
        T -= factors[:, None] * T[i][None, :]
        self.basis[i] = j
        self.pivots += 1

    def entering(self) -> int | None:
        """Smallest-index column with negative reduced cost."""
        improving = np.flatnonzero(self.T[-1, :-1] < -self.eps)
        return int(improving[0]) if improving.size else None

    def leaving(self, j: int) -> int:
        """Min-ratio row; ties go to the smallest basic variable."""
        column = self.T[:-1, j]
        rows = np.flatnonzero(column > self.eps)
        if rows.size == 0:
            raise NumericalFailure(f"LP unbounded along column {j}")
        ratios = self.T[rows, -1] / column[rows]
        best = ratios.min()
        slack = 0 if self.exact else EPS * max(1.0, abs(float(best)))
        tied = rows[ratios <= best + slack]
        return int(min(tied, key=lambda i: self.basis[i]))

    def solve(self, max_pivots: int | None = None) -> None:
        limit = max_pivots or 50 * (self.rows + self.cols)
        while (j := self.entering()) is not None:
            if self.pivots >= limit:
                raise NumericalFailure(f"simplex did not converge in {limit} pivots")
            self.pivot(self.leaving(j), j)
        logger.debug(f"simplex {self.rows}x{self.cols} optimal after {self.pivots} pivots")

    def primal(self) -> np.ndarray:
        """Optimal u (structural variables)."""
        u = np.full(self.cols, self.T[0, 0] * 0, dtype=object if self.exact else float)
        for i, var in enumerate(self.basis):
            if var < self.cols:
                u[var] = self.T[i, -1]
        return u

    def dual(self) -> np.ndarray:
        """Optimal dual prices of the rows, read off the slack reduced costs."""
        return self.T[-1, self.cols : self.cols + self.rows].copy()
