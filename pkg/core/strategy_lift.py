"""
Strategy lift: mixed strategies over k-subsets from marginal vectors.

lift_marginal uses the systematic sweep. Lay the targets end to end on
[0, k), target j covering an interval of length α_j, and drop a comb of
k teeth spaced one apart at offset u ∈ [0, 1). Each tooth lands in a
different target (no interval is longer than one), so the comb picks a
k-subset, and target j is picked for a share α_j of the offsets. The comb
only changes subset when u crosses the fractional part of a prefix sum,
which gives at most m atoms.
"""

import itertools
import logging
import math
from typing import Optional

import numpy as np

from config import Config
from core.dto import (
    GameInstance,
    MarginalVector,
    SaddleVerdict,
    SparseMixedStrategy,
    TargetSubset,
)
from core.errors import CardinalityMismatch, InfeasibleMarginal, ScaleLimit
from core.game import check_strategy, marginal_of_strategy

logger = logging.getLogger(__name__)

_BOUND_EPS = 1e-12
_BATCH = 1 << 16


def _check_marginal(values: np.ndarray, k: int, sum_eps: float) -> None:
    m = values.size
    if not 0 <= k <= m:
        raise InfeasibleMarginal(f"subset size {k} outside [0, {m}]")
    if m and (values.min() < -_BOUND_EPS or values.max() > 1.0 + _BOUND_EPS):
        raise InfeasibleMarginal(
            f"marginal entries must lie in [0, 1], got [{values.min():.6g}, {values.max():.6g}]"
        )
    total = float(values.sum())
    if abs(total - k) > sum_eps * max(1, m):
        raise InfeasibleMarginal(f"marginal sums to {total:.12g}, expected {k}")


def _merge_atoms(atoms: list[tuple[tuple[int, ...], float]], k: int) -> SparseMixedStrategy:
    merged: dict[tuple[int, ...], float] = {}
    for members, weight in atoms:
        if weight > 0:
            merged[members] = merged.get(members, 0.0) + weight
    total = sum(merged.values())
    return SparseMixedStrategy(
        atoms=tuple((TargetSubset(members), w / total) for members, w in merged.items()),
        subset_size=k,
    )


def lift_marginal(
    alpha: MarginalVector, k: int, sum_eps: Optional[float] = None
) -> SparseMixedStrategy:
    """Decompose a marginal with Σα = k into at most m weighted k-subsets.

    Raises:
        InfeasibleMarginal: entries outside [0, 1] or wrong total
    """
    sum_eps = Config.SUM_EPS if sum_eps is None else sum_eps
    values = alpha.array
    _check_marginal(values, k, sum_eps)
    m = values.size
    if k == 0:
        return SparseMixedStrategy(atoms=((TargetSubset(()), 1.0),), subset_size=0)

    prefix = np.concatenate(([0.0], np.cumsum(np.clip(values, 0.0, 1.0))))
    prefix *= k / prefix[-1]
    prefix[-1] = float(k)

    merge_eps = 8 * np.finfo(float).eps * k
    cuts = np.unique(np.mod(prefix[:-1], 1.0))
    cuts = cuts[cuts < 1.0 - merge_eps]
    keep = np.concatenate(([True], np.diff(cuts) > merge_eps))
    cuts = np.append(cuts[keep], 1.0)

    teeth = np.arange(k)
    atoms = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        picks = np.searchsorted(prefix, (lo + hi) / 2 + teeth, side="right")
        members = tuple(int(j) for j in np.unique(np.minimum(picks, m)))
        if len(members) != k:
            # sliver left by rounding; its weight is below the budget tolerance
            logger.debug(f"dropping sliver [{lo:.3g}, {hi:.3g}) with {len(members)} targets")
            continue
        atoms.append((members, float(hi - lo)))

    strategy = _merge_atoms(atoms, k)
    logger.debug(f"lifted marginal m={m}, k={k} into {len(strategy)} atoms")
    return strategy


def lift_defender(beta: MarginalVector, k_d: int, m: int) -> SparseMixedStrategy:
    """Protection-set strategy whose complement marginals equal β."""
    if beta.m != m:
        raise CardinalityMismatch(f"β has {beta.m} entries, expected {m}")
    protection = MarginalVector.from_array(1.0 - beta.array, k_d)
    return lift_marginal(protection, k_d)


def lift_marginal_recursive(alpha: MarginalVector, k: int) -> SparseMixedStrategy:
    """Inductive decomposition splitting on the first target.

    Exponential in the worst case; meant for cross-checking at tiny sizes.

    Raises:
        InfeasibleMarginal: a rescaled sub-marginal leaves [0, 1]
    """
    values = alpha.array
    _check_marginal(values, k, Config.SUM_EPS)
    atoms = _split(np.clip(values, 0.0, 1.0), k, 1)
    return _merge_atoms(atoms, k)


def _split(x: np.ndarray, k: int, first: int) -> list[tuple[tuple[int, ...], float]]:
    m = x.size
    ids = tuple(range(first, first + m))
    if k == 0:
        return [((), 1.0)]
    if k == m:
        return [(ids, 1.0)]
    if k == 1:
        return [((j,), float(w)) for j, w in zip(ids, x) if w > 0]
    if m == k + 1:
        return [
            (ids[:j] + ids[j + 1 :], float(1.0 - w)) for j, w in enumerate(x) if w < 1.0
        ]

    head, rest = float(x[0]), x[1:]
    atoms = []
    for weight, size, members in ((head, k - 1, (first,)), (1.0 - head, k, ())):
        if weight <= 0:
            continue
        sub = size / (k - head) * rest
        if sub.max() > 1.0 + _BOUND_EPS:
            raise InfeasibleMarginal(
                f"rescaled sub-marginal reaches {sub.max():.6g} after splitting target {first}"
            )
        for sub_members, sub_weight in _split(np.minimum(sub, 1.0), size, first + 1):
            atoms.append((members + sub_members, weight * sub_weight))
    return atoms


def _subset_sums(w: np.ndarray, size: int):
    """Yield (combos, sums) batches over all size-subsets of range(len(w))."""
    if size == 0:
        yield np.zeros((1, 0), dtype=int), np.zeros(1)
        return
    combos = itertools.combinations(range(w.size), size)
    while True:
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.islice(combos, _BATCH)), dtype=int
        )
        if flat.size == 0:
            return
        block = flat.reshape(-1, size)
        yield block, w[block].sum(axis=1)


def _max_subset(w: np.ndarray, size: int) -> tuple[float, TargetSubset]:
    best, witness = -math.inf, None
    for block, sums in _subset_sums(w, size):
        idx = int(np.argmax(sums))
        if sums[idx] > best:
            best, witness = float(sums[idx]), block[idx]
    return best, TargetSubset.of(witness + 1)


def verify_saddle(
    p: SparseMixedStrategy,
    q: SparseMixedStrategy,
    v: float,
    g: GameInstance,
    tol: Optional[float] = None,
    cap: Optional[int] = None,
) -> SaddleVerdict:
    """Check both saddle inequalities against every pure deviation.

    p is a distribution over attack sets, q over protection sets, both in
    sorted space. Payoffs are read through the marginals, so the work is
    O((C(m, k_a) + C(m, k_d)) · m).

    Raises:
        ScaleLimit: C(m, k_a) or C(m, k_d) exceeds cap
        CardinalityMismatch: strategy subset sizes differ from the budgets
        InvalidStrategy: atoms are not distinct k-subsets or probabilities are not a
            distribution
    """
    tol = Config.VERIFY_TOL if tol is None else tol
    cap = Config.ENUM_CAP if cap is None else cap
    if p.subset_size != g.k_a or q.subset_size != g.k_d:
        raise CardinalityMismatch(
            f"strategies over {p.subset_size}/{q.subset_size}-subsets, "
            f"budgets are k_a={g.k_a}, k_d={g.k_d}"
        )
    check_strategy(p, g.k_a, g.m)
    check_strategy(q, g.k_d, g.m)
    for size in (g.k_a, g.k_d):
        count = math.comb(g.m, size)
        if count > cap:
            raise ScaleLimit(
                f"C({g.m}, {size}) = {count} pure actions exceed cap {cap}", count, cap
            )

    phi = g.phi[1:]
    attack_w = marginal_of_strategy(p, g.m).array * phi
    exposure_w = marginal_of_strategy(q, g.m, complement=True).array * phi

    covered, worst_defense = _max_subset(attack_w, g.k_d)
    attacker_guarantee = float(attack_w.sum()) - covered
    defender_guarantee, best_attack = _max_subset(exposure_w, g.k_a)

    passed = attacker_guarantee >= v - tol and defender_guarantee <= v + tol
    logger.info(
        f"verify m={g.m}: attacker secures {attacker_guarantee:.12g}, "
        f"defender concedes {defender_guarantee:.12g}, claimed {v:.12g} -> "
        f"{'pass' if passed else 'FAIL'}"
    )
    return SaddleVerdict(
        passed=passed,
        value=v,
        tol=tol,
        attacker_guarantee=attacker_guarantee,
        defender_guarantee=defender_guarantee,
        worst_defense=worst_defense,
        best_attack=best_attack,
    )
