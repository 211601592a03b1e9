"""Verification and oracle Data Transfer Objects."""

from dataclasses import dataclass

import numpy as np

from .game import GameInstance, TargetSubset


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Dense payoff matrix of a game.

    Attributes:
        rows: Attack subsets in lexicographic order
        cols: Defense subsets in lexicographic order
        entries: entries[i, j] = payoff of rows[i] against cols[j]
    """

    rows: tuple[TargetSubset, ...]
    cols: tuple[TargetSubset, ...]
    entries: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class MatrixGameSolution:
    """Optimal LP solution of a matrix game (rows maximize).

    Attributes:
        value: Game value read from the primal LP
        p: Row player's optimal mixed strategy
        q: Column player's optimal mixed strategy
        dual_value: Game value read from the dual LP
        pivots: Simplex pivots performed
    """

    value: float
    p: np.ndarray
    q: np.ndarray
    dual_value: float
    pivots: int


@dataclass(frozen=True)
class SaddleVerdict:
    """Outcome of checking the saddle inequalities by enumeration.

    Attributes:
        passed: Both inequalities hold within tol
        value: Claimed value v
        tol: Absolute tolerance used
        attacker_guarantee: Minimum over pure defenses of the payoff under p
        defender_guarantee: Maximum over pure attacks of the payoff under q
        worst_defense: Pure defense attaining attacker_guarantee
        best_attack: Pure attack attaining defender_guarantee
    """

    passed: bool
    value: float
    tol: float
    attacker_guarantee: float
    defender_guarantee: float
    worst_defense: TargetSubset
    best_attack: TargetSubset

    @property
    def attacker_ok(self) -> bool:
        return self.attacker_guarantee >= self.value - self.tol

    @property
    def defender_ok(self) -> bool:
        return self.defender_guarantee <= self.value + self.tol

    def to_dict(self, game: GameInstance) -> dict:
        return {
            "passed": self.passed,
            "value": self.value,
            "tol": self.tol,
            "attacker_guarantee": self.attacker_guarantee,
            "defender_guarantee": self.defender_guarantee,
            "worst_defense": game.original_ids(self.worst_defense),
            "best_attack": game.original_ids(self.best_attack),
        }
