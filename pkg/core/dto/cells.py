"""Candidate-table Data Transfer Objects.

Cells of the attacker table U (maximized) and the defender table W
(minimized). Row index i and offset r follow the table layout; s is the
first target of the equal-product tail in sorted space.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .game import MarginalVector


class CellFamily(Enum):
    """Closed-form family a candidate cell belongs to."""

    DIAGONAL = "diagonal"
    UI = "UI"
    UII = "UII"
    WA = "Wa"
    WB = "Wb"


@dataclass(frozen=True)
class CandidateCell:
    """Cell (i, i + r) of the attacker table.

    Attributes:
        i: Row index in [1, k]
        r: Offset, number of targets below s that carry attack mass
        s: Tail start, k - i + 1
        c_i: Sum of 1/φ_j over the tail s..m
        t: Tail terms counted by the defender's best response, m - k_d - s + 1
        value: Closed-form payoff of the cell
        family: UI, UII or diagonal
        feasible: Whether the cell's feasibility inequalities hold
    """

    i: int
    r: int
    s: int
    c_i: float
    t: int
    value: float
    family: CellFamily
    feasible: bool

    @property
    def p(self) -> int:
        """Lowest attacked target, s - r."""
        return self.s - self.r

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "i": self.i,
            "r": self.r,
            "s": self.s,
            "c_i": self.c_i,
            "t": self.t,
            "value": self.value,
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class DualCell:
    """Cell (i, i + r) of the defender table.

    Attributes:
        i: Row index, m - s + 1
        r: Offset
        s: Tail start
        c_i: Sum of 1/φ_j over the tail s..m
        value: Closed-form payoff of the cell
        family: Wa (structure a) or Wb (structure b)
        feasible: Whether the structure is valid and its closed form is exact
        beta_s_minus_1: Bridge entry β_{s-1}, structure b only
    """

    i: int
    r: int
    s: int
    c_i: float
    value: float
    family: CellFamily
    feasible: bool
    beta_s_minus_1: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "i": self.i,
            "r": self.r,
            "s": self.s,
            "c_i": self.c_i,
            "value": self.value,
            "feasible": self.feasible,
            "beta_s_minus_1": self.beta_s_minus_1,
        }


@dataclass
class SolverStats:
    """Cell evaluation counters of the linear solvers."""

    ui_cells: int = 0  # includes the diagonal
    uii_cells: int = 0
    wa_cells: int = 0
    wb_cells: int = 0

    @property
    def cells_u(self) -> int:
        """U^I evaluations, diagonal included; U^II work is counted in cells_uii."""
        return self.ui_cells

    @property
    def cells_uii(self) -> int:
        return self.uii_cells

    @property
    def cells_w(self) -> int:
        return self.wa_cells + self.wb_cells

    def merged(self, other: "SolverStats") -> "SolverStats":
        return SolverStats(
            ui_cells=self.ui_cells + other.ui_cells,
            uii_cells=self.uii_cells + other.uii_cells,
            wa_cells=self.wa_cells + other.wa_cells,
            wb_cells=self.wb_cells + other.wb_cells,
        )

    def to_dict(self) -> dict:
        return {
            "ui_cells": self.ui_cells,
            "uii_cells": self.uii_cells,
            "wa_cells": self.wa_cells,
            "wb_cells": self.wb_cells,
            "cells_u": self.cells_u,
            "cells_uii": self.cells_uii,
            "cells_w": self.cells_w,
        }


@dataclass(frozen=True)
class AttackerSolution:
    """Optimal attack marginal found on the U table.

    Attributes:
        value: v*
        alpha: α* in sorted space
        cell: Maximizing cell
        stats: Evaluation counters
    """

    value: float
    alpha: MarginalVector
    cell: CandidateCell
    stats: SolverStats = field(default_factory=SolverStats)


@dataclass(frozen=True)
class DefenderSolution:
    """Optimal non-protection marginal found on the W table.

    Attributes:
        value: v*
        beta: β* in sorted space
        cell: Minimizing cell
        stats: Evaluation counters
    """

    value: float
    beta: MarginalVector
    cell: DualCell
    stats: SolverStats = field(default_factory=SolverStats)
