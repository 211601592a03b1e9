"""Game-level Data Transfer Objects.

Targets are addressed by 1-based indices into the ascending cost order
("sorted space"). GameInstance.perm maps them back to the 1-based ids of the
caller's original ordering; everything that leaves the library goes through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence

import numpy as np

if TYPE_CHECKING:
    from core.dto.cells import SolverStats


class SolveMethod(Enum):
    """Provenance of a saddle certificate."""

    LINEAR = "linear"
    ORACLE = "oracle"


@dataclass(frozen=True)
class GameInstance:
    """Normalized zero-sum security game with additive utility.

    Attributes:
        costs: Target costs sorted ascending (sorted space)
        k_a: Number of targets the attacker hits
        k_d: Number of targets the defender protects
        perm: perm[j - 1] is the original id of sorted target j
    """

    costs: tuple[float, ...]
    k_a: int
    k_d: int
    perm: tuple[int, ...]

    @classmethod
    def from_sorted(
        cls, costs: np.ndarray, k_a: int, k_d: int, perm: Optional[np.ndarray] = None
    ) -> GameInstance:
        """Instance over costs already in ascending order (identity perm by default)."""
        costs = np.asarray(costs, dtype=float)
        ids = np.arange(1, costs.size + 1) if perm is None else np.array(perm, dtype=np.int64)
        g = cls(tuple(costs.tolist()), int(k_a), int(k_d), tuple(ids.tolist()))
        phi = np.concatenate(([0.0], costs))
        for arr in (phi, ids):
            arr.setflags(write=False)
        g.__dict__["phi"] = phi
        g.__dict__["perm_array"] = ids
        return g

    @property
    def m(self) -> int:
        return len(self.costs)

    @property
    def unprotected(self) -> int:
        """Targets left unprotected by any pure defense (m - k_d)."""
        return self.m - self.k_d

    @property
    def k(self) -> int:
        """Dimension of the attacker's candidate table."""
        return max(self.k_a, self.m - self.k_d)

    @cached_property
    def phi(self) -> np.ndarray:
        """Costs as an array with a zero sentinel at index 0."""
        arr = np.concatenate(([0.0], np.asarray(self.costs, dtype=float)))
        arr.setflags(write=False)
        return arr

    @property
    def zero_targets(self) -> int:
        """Number of zero-cost targets (they sort first)."""
        return int(np.count_nonzero(self.phi[1:] == 0.0))

    @property
    def is_degenerate(self) -> bool:
        return self.k_a in (0, self.m) or self.k_d in (0, self.m)

    @cached_property
    def perm_array(self) -> np.ndarray:
        """perm as an int array, indexed by sorted position - 1."""
        arr = np.asarray(self.perm, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def original_id(self, index: int) -> int:
        return self.perm[index - 1]

    def original_id_set(self, first: int, last: int) -> frozenset[int]:
        """Original ids of the sorted targets first..last (empty when last < first)."""
        if last < first:
            return frozenset()
        return frozenset(self.perm_array[first - 1 : last].tolist())

    def original_ids(self, indices: Iterable[int]) -> list[int]:
        return sorted(self.perm[j - 1] for j in indices)

    def sorted_index(self, original_id: int) -> int:
        return self._inverse_perm[original_id - 1]

    @cached_property
    def _inverse_perm(self) -> tuple[int, ...]:
        inverse = [0] * self.m
        for j, orig in enumerate(self.perm, start=1):
            inverse[orig - 1] = j
        return tuple(inverse)

    def to_original_order(self, values: Sequence[float]) -> list[float]:
        """Reorder a sorted-space vector into the caller's target order."""
        out = np.empty(self.m)
        out[self.perm_array - 1] = np.asarray(values, dtype=float)
        return out.tolist()

    def from_original_order(self, values: Sequence[float]) -> list[float]:
        return np.asarray(values, dtype=float)[self.perm_array - 1].tolist()


@dataclass(frozen=True)
class TargetSubset:
    """A pure action: a set of targets in sorted space.

    Attributes:
        members: Target indices in increasing order
    """

    members: tuple[int, ...]

    @classmethod
    def of(cls, indices: Iterable[int]) -> TargetSubset:
        return cls(tuple(sorted(int(j) for j in indices)))

    @property
    def cardinality(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, j: object) -> bool:
        return j in self.members


@dataclass(frozen=True, eq=False)
class MarginalVector:
    """Per-target probability mass in sorted space.

    α (attack marginal) has budget k_a; β (non-protection marginal) has
    budget m - k_d.

    Attributes:
        values: Mass per target, each in [0, 1] (read-only array)
        budget: Expected total mass
    """

    values: np.ndarray
    budget: float

    @classmethod
    def from_array(cls, values: Iterable[float], budget: float) -> MarginalVector:
        arr = np.array(values, dtype=float)
        arr.setflags(write=False)
        return cls(arr, float(budget))

    @property
    def array(self) -> np.ndarray:
        return self.values

    @property
    def m(self) -> int:
        return self.values.size

    @property
    def total(self) -> float:
        return float(np.sum(self.array))

    def is_feasible(self, sum_eps: float = 1e-9, bound_eps: float = 1e-12) -> bool:
        """Entries in [0, 1] and total equal to budget within tolerance."""
        arr = self.array
        if arr.size and (arr.min() < -bound_eps or arr.max() > 1.0 + bound_eps):
            return False
        return abs(self.total - self.budget) <= sum_eps * max(1, self.m)


@dataclass(frozen=True)
class SparseMixedStrategy:
    """Weighted list of pure actions of a single size.

    Attributes:
        atoms: (subset, probability) pairs with positive probabilities
        subset_size: Cardinality shared by every subset
    """

    atoms: tuple[tuple[TargetSubset, float], ...]
    subset_size: int

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def total_probability(self) -> float:
        return float(sum(prob for _, prob in self.atoms))

    def support(self) -> set[int]:
        """Union of the targets appearing in any atom."""
        return {j for subset, _ in self.atoms for j in subset}


@dataclass(frozen=True)
class SaddleCertificate:
    """Value and optimal strategies of a game, with structural indices.

    Attributes:
        value: Saddle-point value v*
        alpha: Attack marginal α* (sorted space, budget k_a)
        beta: Non-protection marginal β* (sorted space, budget m - k_d)
        s_star: First index of the attacker's equal-product tail
        r_star: Number of saturated targets just below s_star
        attacker_active: Original ids in the attacker's active set
        defender_active: Original ids in the defender's active set
        defender_pure: Whether the defender plays a single protection set
        method: Linear solvers or LP oracle
        game: The instance this certificate belongs to
        attacker_strategy: Lifted attacker mixed strategy, when requested
        defender_strategy: Lifted defender mixed strategy, when requested
        stats: Cell evaluation counters of the linear solvers
        runtime_ns: Wall time of the solve
        discrepancy: |v_linear - v_oracle| when both paths ran
    """

    value: float
    alpha: MarginalVector
    beta: MarginalVector
    s_star: int
    r_star: int
    attacker_active: frozenset[int]
    defender_active: frozenset[int]
    defender_pure: bool
    method: SolveMethod
    game: GameInstance
    attacker_strategy: Optional[SparseMixedStrategy] = None
    defender_strategy: Optional[SparseMixedStrategy] = None
    stats: Optional["SolverStats"] = None
    runtime_ns: int = 0
    discrepancy: Optional[float] = None

    @property
    def alpha_original(self) -> list[float]:
        return self.game.to_original_order(self.alpha.values)

    @property
    def beta_original(self) -> list[float]:
        return self.game.to_original_order(self.beta.values)
