"""
Attacker side of the linear-time saddle-point search (table U).

Row i of U fixes the start s = k - i + 1 of the attacker's equal-product
tail, the offset r counts the saturated targets s - r .. s - 1 just below
it, and k = max(k_a, m - k_d). Three closed-form families cover every
optimal attack marginal:

- diagonal (r = 0): α_j = λ/φ_j on the tail only
- UI: α_j = 1 on s - r .. s - 1, tail level λ = (k_a - r) / c
- UII: like UI, but the lowest attacked target carries a fraction δ and
  the tail is saturated at α_s = 1

A UI cell of column p = s - r satisfies its level bounds exactly when
G(s - 1) < k_a + p ≤ G(s), with G(s) = s + c_s φ_s nondecreasing, so every
column owns at most one candidate row and a single sorted search finds them
all. Diagonal and UII cells are read once per row. Total work is O(k).

The single-cell readers report the full table predicate, including the
condition on the lowest attacked target. The search only needs the level
bounds: every cell meeting them describes an attack marginal that secures
its value, so admitting the extra cells cannot raise the maximum.
"""

import logging
import math
from typing import Optional

import numpy as np

from core.candidate_table import CandidateTable
from core.dto import (
    AttackerSolution,
    CandidateCell,
    CellFamily,
    GameInstance,
    MarginalVector,
    SolverStats,
)
from core.errors import NoFeasibleCell

logger = logging.getLogger(__name__)

# Tie-break rank among families sharing (i, r)
_FAMILIES = (CellFamily.DIAGONAL, CellFamily.UI, CellFamily.UII)


class AttackerTable(CandidateTable):
    """Sparse attacker table U of a normalized, non-degenerate game."""

    def __init__(self, g: GameInstance, feas_eps: Optional[float] = None):
        super().__init__(g, feas_eps)
        self.k = g.k
        s = np.arange(1, self.k + 1)
        # Rounding can dent G by an ulp; the search needs it monotone.
        self.G = np.maximum.accumulate(s + self.C[s] * self.phi[s])

    def row_start(self, i: int) -> int:
        """Tail start s of row i."""
        self._check_s(i, self.k)
        return self.k - i + 1

    def _row(self, s: int) -> int:
        return self.k - s + 1

    def _tail_count(self, s: int) -> int:
        return self.n - s + 1

    # ------------------------------------------------------------------
    # Single cells
    # ------------------------------------------------------------------

    def diagonal(self, i: int) -> CandidateCell:
        s = self.row_start(i)
        c = float(self.C[s])
        t = self._tail_count(s)
        return CandidateCell(
            i=i,
            r=0,
            s=s,
            c_i=c,
            t=t,
            value=max(t, 0) * self.k_a / c,
            family=CellFamily.DIAGONAL,
            feasible=self.leq(self.k_a, c * self.phi[s]),
        )

    def cell_ui(self, i: int, r: int) -> CandidateCell:
        s = self.row_start(i)
        self._check_r(r, s)
        if r == 0:
            return self.diagonal(i)
        c = float(self.C[s])
        t = self._tail_count(s)
        mass = self.k_a - r
        p = s - r
        # rows with t <= 0 drop the lower-target condition
        feasible = (
            (t <= 0 or self.lt(t, c * self.phi[p]))
            and self.leq(mass, c * self.phi[s])
            and self.lt(c * self.phi[s - 1], mass)
        )
        value = self.span(p, min(s - 1, self.n)) + max(t, 0) * mass / c
        return CandidateCell(i, r, s, c, t, value, CellFamily.UI, feasible)

    def cell_uii(self, i: int, r: int) -> CandidateCell:
        s = self.row_start(i)
        self._check_r(r, s)
        if r == 0:
            return self.diagonal(i)
        c = float(self.C[s])
        t = self._tail_count(s)
        mass = self.k_a - r
        p = s - r
        delta = mass + 1 - c * self.phi[s]
        feasible = (
            t > 0
            and self.leq(c * self.phi[p], t)
            and self.leq(mass, c * self.phi[s])
            and self.lt(c * self.phi[s] - 1, mass)
        )
        value = (
            (delta * self.phi[p] if p <= self.n else 0.0)
            + self.span(p + 1, min(s - 1, self.n))
            + max(t, 0) * self.phi[s]
        )
        return CandidateCell(i, r, s, c, t, float(value), CellFamily.UII, feasible)

    def uii_offset(self, i: int) -> Optional[int]:
        """The only offset of row i whose UII bridge δ lies in (0, 1]."""
        s = self.row_start(i)
        level = float(self.C[s] * self.phi[s])
        r = math.ceil(self.k_a - level - self.tol(self.k_a, level))
        return r if 1 <= r <= s - 1 else None

    def column_row(self, p: int) -> Optional[int]:
        """Row holding the feasible UI cell of column p, if any."""
        s = int(np.searchsorted(self.G, self.k_a + p, side="left")) + 1
        if s > self.k or s - p < 1:
            return None
        return self._row(s)

    def candidates(self) -> list[CandidateCell]:
        cells = []
        for i in range(1, self.k + 1):
            cells.append(self.diagonal(i))
            r = self.uii_offset(i)
            if r is not None:
                cells.append(self.cell_uii(i, r))
        for p in range(1, self.k):
            i = self.column_row(p)
            if i is not None:
                cells.append(self.cell_ui(i, self.row_start(i) - p))
        return cells

    # ------------------------------------------------------------------
    # Search
    # ------------------------------------------------------------------

    def search(self) -> AttackerSolution:
        k, n, k_a, phi, C = self.k, self.n, self.k_a, self.phi, self.C
        stats = SolverStats()

        s = np.arange(1, k + 1)
        c = C[s]
        level = c * phi[s]
        t_pos = np.maximum(n - s + 1, 0)

        # Diagonal, one per row
        diag_ok = k_a <= level + self.tol_array(k_a, level)
        diag_val = t_pos * k_a / c
        stats.ui_cells += k

        # UII, one offset per row
        r2 = np.ceil(k_a - level - self.tol_array(k_a, level)).astype(int)
        uii_ok = (r2 >= 1) & (r2 <= s - 1)
        p2 = np.clip(s - r2, 1, self.m)
        delta = np.clip(k_a - r2 + 1 - level, 0.0, 1.0)
        uii_val = (
            np.where(p2 <= n, delta * phi[p2], 0.0)
            + self.span_array(np.minimum(p2 + 1, self.m + 1), np.minimum(s - 1, n))
            + t_pos * phi[s]
        )
        stats.uii_cells += k

        # UI, one row per column
        p1 = np.arange(1, k)
        s1 = np.searchsorted(self.G, k_a + p1, side="left") + 1
        ui_ok = (s1 <= k) & (s1 - p1 >= 1)
        stats.ui_cells += p1.size
        p1, s1 = p1[ui_ok], s1[ui_ok]
        r1 = s1 - p1
        ui_val = self.span_array(p1, np.minimum(s1 - 1, n)) + np.maximum(
            n - s1 + 1, 0
        ) * (k_a - r1) / C[s1]

        starts = np.concatenate((s[diag_ok], s[uii_ok], s1))
        offsets = np.concatenate((np.zeros(int(diag_ok.sum()), dtype=int), r2[uii_ok], r1))
        values = np.concatenate((diag_val[diag_ok], uii_val[uii_ok], ui_val))
        ranks = np.concatenate(
            (
                np.zeros(int(diag_ok.sum()), dtype=int),
                np.full(int(uii_ok.sum()), 2),
                np.ones(s1.size, dtype=int),
            )
        )
        if values.size == 0:
            raise NoFeasibleCell(f"no feasible U cell for m={self.m}, k_a={k_a}, k_d={self.k_d}")

        rows = k - starts + 1
        best = self._pick(values, rows, offsets, ranks, maximize=True)

        s_best = int(starts[best])
        cell = CandidateCell(
            i=int(rows[best]),
            r=int(offsets[best]),
            s=s_best,
            c_i=float(C[s_best]),
            t=n - s_best + 1,
            value=float(values[best]),
            family=_FAMILIES[int(ranks[best])],
            feasible=True,
        )
        logger.debug(
            f"U search: {values.size} feasible of {stats.ui_cells + stats.uii_cells} cells, "
            f"best {cell.family.value} i={cell.i} r={cell.r} value={cell.value:.12g}"
        )
        return AttackerSolution(value=cell.value, alpha=self.alpha(cell), cell=cell, stats=stats)

    def alpha(self, cell: CandidateCell) -> MarginalVector:
        """Attack marginal realizing a U cell."""
        s, r, phi = cell.s, cell.r, self.phi
        values = np.zeros(self.m + 1)
        tail = slice(s, self.m + 1)
        if cell.family is CellFamily.DIAGONAL:
            values[tail] = self.k_a / (cell.c_i * phi[tail])
        elif cell.family is CellFamily.UI:
            values[s - r : s] = 1.0
            values[tail] = (self.k_a - r) / (cell.c_i * phi[tail])
        else:
            p = s - r
            values[p] = self.k_a - r + 1 - cell.c_i * phi[s]
            values[p + 1 : s] = 1.0
            values[tail] = phi[s] / phi[tail]
        return self._marginal(values[1:], self.k_a)


def cell_value_UI(i: int, r: int, g: GameInstance) -> CandidateCell:
    return AttackerTable(g).cell_ui(i, r)


def cell_value_UII(i: int, r: int, g: GameInstance) -> CandidateCell:
    return AttackerTable(g).cell_uii(i, r)


def solve_attacker(g: GameInstance, feas_eps: Optional[float] = None) -> AttackerSolution:
    """Optimal attack marginal α* and value v* in O(max(k_a, m - k_d))."""
    return AttackerTable(g, feas_eps).search()


def active_bounds(sol: AttackerSolution, g: GameInstance) -> tuple[int, int, bool]:
    """First sorted index of each active set (both run to m) and the pure flag.

    The attacker mixes over s* - r* .. m. The defender mixes over s* .. m,
    or plays the single set of the k_d most expensive targets when the
    attacker's tail starts beyond m - k_d.
    """
    s, r = sol.cell.s, sol.cell.r
    pure = s > g.unprotected
    return s - r, (g.unprotected + 1 if pure else s), pure


def active_sets(
    sol: AttackerSolution, g: GameInstance
) -> tuple[frozenset[int], frozenset[int], bool]:
    """Active sets of both players as original target ids."""
    attacker_from, defender_from, pure = active_bounds(sol, g)
    return g.original_id_set(attacker_from, g.m), g.original_id_set(defender_from, g.m), pure
