"""
Shared precomputation for the sparse candidate tables U and W.

Both tables read every cell in O(1) from three arrays built once per game:

- phi: costs with the sentinel φ_0 = 0
- P:   prefix sums, P[j] = φ_1 + ... + φ_j
- C:   suffix sums of reciprocals, C[s] = 1/φ_s + ... + 1/φ_m, C[m + 1] = 0

The tables are never materialized; subclasses expose single cells and a
vectorized search over the few cells that can be optimal.
"""

import logging
from abc import ABC, abstractmethod
from typing import Optional

import numpy as np

from config import Config
from core.dto import GameInstance, MarginalVector
from core.errors import IndexOutOfRange, InvalidInstance, NumericalFailure

logger = logging.getLogger(__name__)


class CandidateTable(ABC):
    """Lazily evaluated table of closed-form candidate cells."""

    def __init__(self, g: GameInstance, feas_eps: Optional[float] = None):
        if g.zero_targets:
            raise InvalidInstance(
                f"{g.zero_targets} zero-cost targets must be stripped before the table search"
            )
        if not (1 <= g.k_a <= g.m - 1 and 1 <= g.k_d <= g.m - 1):
            raise InvalidInstance(
                f"degenerate budgets k_a={g.k_a}, k_d={g.k_d} for m={g.m} have no table"
            )
        self.game = g
        self.feas_eps = Config.FEAS_EPS if feas_eps is None else feas_eps

        m = g.m
        self.m = m
        self.k_a = g.k_a
        self.k_d = g.k_d
        self.n = g.unprotected
        self.phi = g.phi
        self.C = np.zeros(m + 2)
        with np.errstate(over="ignore", divide="ignore"):
            self.P = np.concatenate(([0.0], np.cumsum(self.phi[1:])))
            self.C[1 : m + 1] = np.cumsum((1.0 / self.phi[1:])[::-1])[::-1]
        if not (np.isfinite(self.C[1]) and np.isfinite(self.P[m])):
            raise NumericalFailure(
                f"cost range [{self.phi[1]:.3g}, {self.phi[m]:.3g}] overflows the table sums; "
                "rescale the costs first"
            )

    # ------------------------------------------------------------------
    # O(1) helpers
    # ------------------------------------------------------------------

    def span(self, lo: int, hi: int) -> float:
        """Σ φ_l for lo ≤ l ≤ hi (0 when empty)."""
        if hi < lo:
            return 0.0
        return float(self.P[hi] - self.P[lo - 1])

    def span_array(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        hi = np.maximum(hi, lo - 1)
        return self.P[hi] - self.P[lo - 1]

    def tol(self, lhs: float, rhs: float) -> float:
        return self.feas_eps * max(1.0, abs(lhs), abs(rhs))

    def tol_array(self, lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        return self.feas_eps * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))

    def leq(self, lhs: float, rhs: float) -> bool:
        """lhs ≤ rhs, inclusive within tolerance."""
        return bool(lhs <= rhs + self.tol(lhs, rhs))

    def lt(self, lhs: float, rhs: float) -> bool:
        """lhs < rhs, exclusive within tolerance."""
        return bool(lhs < rhs - self.tol(lhs, rhs))

    def _check_s(self, s: int, limit: int) -> None:
        if not 1 <= s <= limit:
            raise IndexOutOfRange(f"tail start s={s} outside 1..{limit}")

    def _check_r(self, r: int, s: int, low: int = 0) -> None:
        if not low <= r <= s - 1:
            raise IndexOutOfRange(f"offset r={r} outside {low}..{s - 1} for s={s}")

    def _marginal(self, values: np.ndarray, budget: float) -> MarginalVector:
        return MarginalVector.from_array(np.clip(values, 0.0, 1.0), budget)

    def _pick(
        self,
        values: np.ndarray,
        rows: np.ndarray,
        offsets: np.ndarray,
        ranks: np.ndarray,
        maximize: bool,
    ) -> int:
        """Index of the extremal candidate; ties go to smaller row, offset, rank."""
        best = values.max() if maximize else values.min()
        slack = self.feas_eps * abs(float(best))
        if maximize:
            tied = np.flatnonzero(values >= best - slack)
        else:
            tied = np.flatnonzero(values <= best + slack)
        order = np.lexsort((ranks[tied], offsets[tied], rows[tied]))
        return int(tied[order[0]])

    @abstractmethod
    def candidates(self) -> list:
        """Every cell the search evaluates, in evaluation order."""
        pass

    @abstractmethod
    def search(self):
        """Extremal feasible cell with its reconstructed marginal."""
        pass
