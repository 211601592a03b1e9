"""
Defender side of the linear-time saddle-point search (table W).

Row i of W fixes the start s = m - i + 1 of the equal-product tail of the
non-protection marginal β, and N = i - k_d is the mass the tail carries
beyond the saturated prefix. Two shapes cover every optimal β:

- Wa: β_j = 1 for j < s, β_j = τ/φ_j on the tail with τ = N / c_s.
  The offset r is the number of prefix costs above τ, so each row has one
  Wa cell.
- Wb: β_j = 1 for j ≤ s - 2, a bridge β_{s-1} = b, and the tail level
  pinned to a prefix cost φ_q with q = s - r - 1. Along a row the value is
  convex in q, so the row minimum is the unconstrained minimizer clamped
  into the feasible range of q.

A cell is feasible when its β lies in the box and its closed form equals
the attacker's best response to β. Total work is O(m).
"""

import logging
import math
from typing import Optional

import numpy as np

from core.candidate_table import CandidateTable
from core.dto import (
    CellFamily,
    DefenderSolution,
    DualCell,
    GameInstance,
    MarginalVector,
    SolverStats,
)
from core.errors import IndexOutOfRange, NoFeasibleCell

logger = logging.getLogger(__name__)


class DefenderTable(CandidateTable):
    """Sparse defender table W of a normalized, non-degenerate game."""

    def row_start(self, i: int) -> int:
        self._check_s(i, self.m)
        return self.m - i + 1

    def _row(self, s: int) -> int:
        return self.m - s + 1

    def _excess(self, s: int) -> int:
        """N = i - k_d for the row starting at s."""
        return self.n - s + 1

    # ------------------------------------------------------------------
    # Single cells
    # ------------------------------------------------------------------

    def cell_wa(self, i: int, r: int) -> DualCell:
        s = self.row_start(i)
        self._check_r(r, s)
        c = float(self.C[s])
        N = self._excess(s)
        tau = N / c
        q = s - r
        mass = self.k_a - r
        feasible = (
            N >= 0
            and self.leq(N, c * self.phi[s])
            and self.leq(c * self.phi[q - 1], N)
            and self.leq(N, c * self.phi[q])
            and 1 <= mass <= self.m - s + 1
        )
        value = self.span(q, s - 1) + mass * tau
        return DualCell(i, r, s, c, float(value), CellFamily.WA, feasible)

    def cell_wb(self, i: int, r: int) -> DualCell:
        s = self.row_start(i)
        if s < 2:
            raise IndexOutOfRange(f"structure b needs s >= 2, row {i} has s={s}")
        self._check_r(r, s, low=1)
        c = float(self.C[s])
        c_next = float(self.C[s - 1])
        N = self._excess(s)
        q = s - r - 1
        level = float(self.phi[q])
        bridge = N + 1 - c * level
        mass = self.k_a - r
        feasible = (
            self.leq(bridge, 1.0)
            and self.leq(c_next * level, N + 1)
            and 1 <= mass <= self.m - s + 2
        )
        value = bridge * self.phi[s - 1] + mass * level + self.span(q + 1, s - 2)
        return DualCell(i, r, s, c, float(value), CellFamily.WB, feasible, beta_s_minus_1=bridge)

    def wa_offset(self, i: int) -> int:
        """Offset r of the row's Wa cell: prefix costs above the tail level."""
        s = self.row_start(i)
        tau = self._excess(s) / float(self.C[s])
        below = int(np.searchsorted(self.phi[1:s], tau + self.tol(tau, 0.0), side="right"))
        return s - 1 - below

    def wb_range(self, i: int) -> Optional[tuple[int, int]]:
        """Feasible bridge levels q of row i as an inclusive range."""
        s = self.row_start(i)
        if s < 2:
            return None
        c, c_next = float(self.C[s]), float(self.C[s - 1])
        N = self._excess(s)
        lo_level, hi_level = N / c, (N + 1) / c_next
        q_lo = int(np.searchsorted(self.phi, lo_level - self.tol(lo_level, 0.0), side="left"))
        q_hi = int(np.searchsorted(self.phi, hi_level + self.tol(hi_level, 0.0), side="right")) - 1
        q_lo = max(q_lo, 0, s - self.k_a)
        q_hi = min(q_hi, s - 2, self.m - self.k_a + 1)
        return (q_lo, q_hi) if q_lo <= q_hi else None

    def wb_offset(self, i: int) -> Optional[int]:
        """Offset of the row's minimal Wb cell."""
        bounds = self.wb_range(i)
        if bounds is None:
            return None
        s = self.row_start(i)
        x = float(self.C[s] * self.phi[s - 1]) + s - 1 - self.k_a
        q = min(max(math.ceil(x - self.tol(x, 0.0)), bounds[0]), bounds[1])
        return s - 1 - q

    def candidates(self) -> list[DualCell]:
        cells = []
        for i in range(1, self.m + 1):
            cells.append(self.cell_wa(i, self.wa_offset(i)))
            r = self.wb_offset(i)
            if r is not None:
                cells.append(self.cell_wb(i, r))
        return cells

    # ------------------------------------------------------------------
    # Search
    # ------------------------------------------------------------------

    def search(self) -> DefenderSolution:
        m, n, k_a, phi, C = self.m, self.n, self.k_a, self.phi, self.C
        stats = SolverStats()

        # Wa, one cell per row
        s = np.arange(1, m + 1)
        c = C[s]
        N = n - s + 1
        tau = N / c
        tau_tol = self.tol_array(tau, 0.0)
        below = np.searchsorted(phi[1:], tau + tau_tol, side="right")
        ra = s - 1 - np.minimum(below, s - 1)
        mass_a = k_a - ra
        wa_ok = (
            (N >= 0)
            & (tau <= phi[s] + tau_tol)
            & (mass_a >= 1)
            & (mass_a <= m - s + 1)
        )
        wa_val = self.span_array(s - ra, s - 1) + mass_a * tau
        stats.wa_cells += m

        # Wb, one clamped cell per row with s >= 2
        sb = np.arange(2, m + 1)
        cb, cn = C[sb], C[sb - 1]
        Nb = n - sb + 1
        lo_level, hi_level = Nb / cb, (Nb + 1) / cn
        q_lo = np.searchsorted(phi, lo_level - self.tol_array(lo_level, 0.0), side="left")
        q_hi = np.searchsorted(phi, hi_level + self.tol_array(hi_level, 0.0), side="right") - 1
        q_lo = np.maximum(q_lo, np.maximum(0, sb - k_a))
        q_hi = np.minimum(q_hi, np.minimum(sb - 2, m - k_a + 1))
        wb_ok = q_lo <= q_hi
        x = cb * phi[sb - 1] + sb - 1 - k_a
        q = np.clip(np.ceil(x - self.tol_array(x, 0.0)).astype(int), q_lo, np.maximum(q_hi, q_lo))
        q = np.clip(q, 0, m)
        rb = sb - 1 - q
        bridge = np.clip(Nb + 1 - cb * phi[q], 0.0, 1.0)
        wb_val = (
            bridge * phi[sb - 1]
            + (k_a - rb) * phi[q]
            + self.span_array(np.minimum(q + 1, m + 1), sb - 2)
        )
        stats.wb_cells += sb.size

        starts = np.concatenate((s[wa_ok], sb[wb_ok]))
        offsets = np.concatenate((ra[wa_ok], rb[wb_ok]))
        values = np.concatenate((wa_val[wa_ok], wb_val[wb_ok]))
        ranks = np.concatenate(
            (np.zeros(int(wa_ok.sum()), dtype=int), np.ones(int(wb_ok.sum()), dtype=int))
        )
        if values.size == 0:
            raise NoFeasibleCell(
                f"no feasible W cell for m={m}, k_a={k_a}, k_d={self.k_d}"
            )

        rows = m - starts + 1
        best = self._pick(values, rows, offsets, ranks, maximize=False)
        s_best = int(starts[best])
        family = CellFamily.WA if ranks[best] == 0 else CellFamily.WB
        c_best = float(C[s_best])
        bridge_best = None
        if family is CellFamily.WB:
            q_best = s_best - int(offsets[best]) - 1
            bridge_best = float(np.clip(n - s_best + 2 - c_best * phi[q_best], 0.0, 1.0))
        cell = DualCell(
            i=int(rows[best]),
            r=int(offsets[best]),
            s=s_best,
            c_i=c_best,
            value=float(values[best]),
            family=family,
            feasible=True,
            beta_s_minus_1=bridge_best,
        )
        logger.debug(
            f"W search: {values.size} feasible of {stats.cells_w} cells, "
            f"best {cell.family.value} i={cell.i} r={cell.r} value={cell.value:.12g}"
        )
        return DefenderSolution(value=cell.value, beta=self.beta(cell), cell=cell, stats=stats)

    def beta(self, cell: DualCell) -> MarginalVector:
        """Non-protection marginal realizing a W cell."""
        s, phi = cell.s, self.phi
        values = np.zeros(self.m + 1)
        tail = slice(s, self.m + 1)
        if cell.family is CellFamily.WA:
            values[1:s] = 1.0
            values[tail] = (self._excess(s) / cell.c_i) / phi[tail]
        else:
            q = s - cell.r - 1
            values[1 : s - 1] = 1.0
            values[s - 1] = cell.beta_s_minus_1
            values[tail] = phi[q] / phi[tail]
        return self._marginal(values[1:], self.n)


def cell_value_Wa(i: int, r: int, g: GameInstance) -> DualCell:
    return DefenderTable(g).cell_wa(i, r)


def cell_value_Wb(i: int, r: int, g: GameInstance) -> DualCell:
    return DefenderTable(g).cell_wb(i, r)


def solve_defender(g: GameInstance, feas_eps: Optional[float] = None) -> DefenderSolution:
    """Optimal non-protection marginal β* and value v* in O(m)."""
    return DefenderTable(g, feas_eps).search()
