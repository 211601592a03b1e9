"""
Game core: instance normalization, payoff evaluation and marginal algebra.

The attacker picks k_a targets, the defender protects k_d targets, and the
attacker collects the cost of every attacked target left unprotected.
Mixed strategies enter the payoff only through their marginals:

- α_j: probability that target j is attacked (sums to k_a)
- β_j: probability that target j is left unprotected (sums to m - k_d)

so best responses reduce to partial sums of the products α_jφ_j / β_jφ_j.
"""

import logging
from typing import Sequence

import numpy as np

from config import Config
from core.dto import GameInstance, MarginalVector, SparseMixedStrategy, TargetSubset
from core.errors import (
    BudgetOutOfRange,
    CardinalityMismatch,
    EmptyInstance,
    IndexOutOfRange,
    InvalidStrategy,
    NegativeCost,
)

logger = logging.getLogger(__name__)


def _as_budget(value, m: int, name: str) -> int:
    if isinstance(value, bool) or not float(value).is_integer():
        raise BudgetOutOfRange(f"{name} must be an integer, got {value!r}")
    budget = int(value)
    if budget < 0 or budget > m:
        raise BudgetOutOfRange(f"{name}={budget} outside [0, {m}]")
    return budget


def normalize(costs_raw: Sequence[float], k_a: int, k_d: int) -> GameInstance:
    """Sort costs ascending (stable) and record the permutation back.

    Raises:
        EmptyInstance: no targets
        NegativeCost: a cost is negative or not finite
        BudgetOutOfRange: k_a or k_d outside [0, m]
    """
    costs = np.asarray(list(costs_raw), dtype=float)
    m = costs.size
    if m == 0:
        raise EmptyInstance("instance has no targets")
    if not np.all(np.isfinite(costs)):
        raise NegativeCost("costs must be finite")
    if np.any(costs < 0):
        bad = int(np.argmax(costs < 0)) + 1
        raise NegativeCost(f"target {bad} has negative cost {costs[bad - 1]}")
    k_a = _as_budget(k_a, m, "k_a")
    k_d = _as_budget(k_d, m, "k_d")

    order = np.argsort(costs, kind="stable")
    return GameInstance.from_sorted(costs[order], k_a, k_d, perm=order + 1)


def _check_subset(subset: TargetSubset, size: int, m: int, label: str) -> None:
    if subset.cardinality != size:
        raise CardinalityMismatch(f"{label} has {subset.cardinality} targets, expected {size}")
    if subset.members and (subset.members[0] < 1 or subset.members[-1] > m):
        raise IndexOutOfRange(f"{label} {subset.members} outside 1..{m}")


def payoff_entry(x: TargetSubset, y: TargetSubset, g: GameInstance) -> float:
    """Attacker payoff of attack x against defense y: Σ φ_l over l ∈ x \\ y."""
    _check_subset(x, g.k_a, g.m, "attack")
    _check_subset(y, g.k_d, g.m, "defense")
    protected = set(y.members)
    return float(sum(g.phi[j] for j in x.members if j not in protected))


def _products(marginal: MarginalVector, g: GameInstance) -> np.ndarray:
    if marginal.m != g.m:
        raise CardinalityMismatch(f"marginal has {marginal.m} entries, game has {g.m} targets")
    return marginal.array * g.phi[1:]


def _sum_smallest(w: np.ndarray, count: int) -> float:
    if count <= 0:
        return 0.0
    if count >= w.size:
        return float(w.sum())
    return float(np.partition(w, count - 1)[:count].sum())


def _sum_largest(w: np.ndarray, count: int) -> float:
    if count <= 0:
        return 0.0
    if count >= w.size:
        return float(w.sum())
    return float(np.partition(w, w.size - count)[w.size - count :].sum())


def defender_best_response_value(alpha: MarginalVector, g: GameInstance) -> float:
    """Payoff the attacker secures with α: sum of the m - k_d smallest α_lφ_l."""
    return _sum_smallest(_products(alpha, g), g.unprotected)


def attacker_best_response_value(beta: MarginalVector, g: GameInstance) -> float:
    """Payoff the defender concedes with β: sum of the k_a largest β_lφ_l."""
    return _sum_largest(_products(beta, g), g.k_a)


def defender_best_response(alpha: MarginalVector, g: GameInstance) -> TargetSubset:
    """Protection set covering the k_d largest α_lφ_l."""
    w = _products(alpha, g)
    order = np.argsort(-w, kind="stable")
    return TargetSubset.of(order[: g.k_d] + 1)


def attacker_best_response(beta: MarginalVector, g: GameInstance) -> TargetSubset:
    """Attack set on the k_a largest β_lφ_l."""
    w = _products(beta, g)
    order = np.argsort(-w, kind="stable")
    return TargetSubset.of(order[: g.k_a] + 1)


def marginal_of_strategy(
    strategy: SparseMixedStrategy, m: int, complement: bool = False
) -> MarginalVector:
    """Membership marginals of a mixed strategy.

    With complement=False values[j] is the probability that j is in the drawn
    subset (α map); with complement=True it is the probability that j is not
    (β map from protection sets).
    """
    values = np.zeros(m)
    for subset, prob in strategy.atoms:
        if subset.members and (subset.members[0] < 1 or subset.members[-1] > m):
            raise IndexOutOfRange(f"subset {subset.members} outside 1..{m}")
        np.add.at(values, np.asarray(subset.members, dtype=int) - 1, prob)
    total = strategy.total_probability
    if complement:
        values = total - values
        budget = (m - strategy.subset_size) * total
    else:
        budget = strategy.subset_size * total
    return MarginalVector.from_array(values, budget)


def check_strategy(
    strategy: SparseMixedStrategy, size: int, m: int, prob_eps: float | None = None
) -> None:
    """Validate a mixed strategy over size-subsets of 1..m.

    Raises:
        InvalidStrategy: an atom is not a set of exactly size distinct targets
            in range, a probability is not positive, or they do not sum to 1
    """
    prob_eps = Config.PROB_EPS if prob_eps is None else prob_eps
    if strategy.subset_size != size:
        raise InvalidStrategy(f"strategy over {strategy.subset_size}-subsets, expected {size}")
    if not strategy.atoms:
        raise InvalidStrategy("strategy has no atoms")
    for subset, prob in strategy.atoms:
        members = subset.members
        if len(set(members)) != size or len(members) != size:
            raise InvalidStrategy(f"atom {members} is not a set of {size} distinct targets")
        if members and (min(members) < 1 or max(members) > m):
            raise InvalidStrategy(f"atom {members} names a target outside 1..{m}")
        if not (np.isfinite(prob) and prob > 0):
            raise InvalidStrategy(f"atom {members} has probability {prob!r}")
    total = strategy.total_probability
    if abs(total - 1.0) > prob_eps:
        raise InvalidStrategy(f"probabilities sum to {total!r}, expected 1")


def structural_indices(
    alpha: MarginalVector, g: GameInstance, rtol: float = 1e-9
) -> tuple[int, int]:
    """Read (s*, r*) off an ordered attack marginal.

    s* is the first target of the run of equal products α_jφ_j ending at m,
    and r* counts the targets from the lowest attacked one up to s* - 1.
    """
    w = _products(alpha, g)
    if g.m == 0 or not np.any(alpha.array > rtol):
        return 1, 0
    top = w[-1]
    eps = rtol * max(1.0, abs(top))
    s = g.m
    while s > 1 and abs(w[s - 2] - top) <= eps:
        s -= 1
    lowest = int(np.argmax(alpha.array > rtol)) + 1
    return s, max(0, s - lowest)
