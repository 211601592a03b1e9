"""
Fast saddle certificate: both linear table searches plus bookkeeping.

solve_linear strips negligible targets, rescales the costs to (0, 1],
short-circuits degenerate budgets, runs the attacker and defender searches
on what is left, cross-checks the two values, and maps everything back to
the caller's instance.
"""

import dataclasses
import logging
import time
from typing import Optional

import numpy as np

from config import Config
from core.attacker_solver import active_bounds, solve_attacker
from core.defender_solver import solve_defender
from core.dto import (
    GameInstance,
    MarginalVector,
    SaddleCertificate,
    SolveMethod,
    SolverStats,
)
from core.errors import CrossCheckFailure
from core.oracle import oracle_certificate
from core.ports import SaddleSolver
from core.strategy_lift import lift_defender, lift_marginal

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class _Reduced:
    """Solution of the game restricted to non-negligible targets.

    Both active sets are suffixes of sorted space; they are stored by their
    first index (m + 1 for an empty set).
    """

    value: float
    alpha: np.ndarray
    beta: np.ndarray
    s: int
    r: int
    attacker_from: int
    defender_from: int
    pure: bool
    stats: SolverStats


def _top(m: int, count: int) -> np.ndarray:
    x = np.zeros(m)
    if count:
        x[m - count :] = 1.0
    return x


def _solve_degenerate(g: GameInstance) -> _Reduced:
    """Closed forms for budgets that leave no table to search."""
    m, k_a, k_d = g.m, g.k_a, g.k_d
    n = m - k_d
    protect_top = np.ones(m) - _top(m, k_d)
    top_attack = m - k_a + 1
    if m == 0 or k_a == 0:
        value, alpha, beta, s, r = 0.0, np.zeros(m), protect_top, 1, 0
        attacker, defender = m + 1, m + 1
    elif k_d == m:
        value, alpha, beta, s, r = 0.0, _top(m, k_a), np.zeros(m), m, 0
        attacker, defender = top_attack, 1
    elif k_d == 0:
        # nothing to protect: the defender's support is vacuous, every target
        value = float(np.sum(g.phi[top_attack:]))
        alpha, beta, s, r = _top(m, k_a), np.ones(m), m, k_a - 1
        attacker, defender = top_attack, 1
    else:
        # k_a == m: the attacker hits everything, the defender covers the top k_d
        value = float(np.sum(g.phi[1 : n + 1]))
        alpha, beta, s, r = np.ones(m), protect_top, m, m - 1
        attacker, defender = 1, n + 1
    return _Reduced(value, alpha, beta, s, r, attacker, defender, True, SolverStats())


def _solve_tables(g: GameInstance, cross_check_rtol: float, feas_eps: Optional[float]) -> _Reduced:
    attacker = solve_attacker(g, feas_eps)
    defender = solve_defender(g, feas_eps)
    gap = abs(attacker.value - defender.value)
    if gap > cross_check_rtol * max(1.0, abs(attacker.value)):
        raise CrossCheckFailure(
            f"attacker value {attacker.value!r} and defender value {defender.value!r} "
            f"differ by {gap:.3g} (m={g.m}, k_a={g.k_a}, k_d={g.k_d})"
        )
    attacking, defending, pure = active_bounds(attacker, g)
    return _Reduced(
        value=attacker.value,
        alpha=attacker.alpha.array,
        beta=defender.beta.array,
        s=attacker.cell.s,
        r=attacker.cell.r,
        attacker_from=attacking,
        defender_from=defending,
        pure=pure,
        stats=attacker.stats.merged(defender.stats),
    )


def positive_part(g: GameInstance, negligible: Optional[float] = None) -> tuple[GameInstance, int]:
    """The game on non-negligible targets, in sorted space, and the number dropped.

    A cost is negligible when it is below `negligible` times the largest cost;
    zero costs always are. Budgets are capped at the number of remaining targets.
    """
    negligible = Config.NEGLIGIBLE_COST if negligible is None else negligible
    costs = g.phi[1:]
    top = float(costs[-1]) if g.m else 0.0
    z = g.m if top == 0.0 else int(np.searchsorted(costs, negligible * top, side="left"))
    m_pos = g.m - z
    reduced = GameInstance.from_sorted(costs[z:], min(g.k_a, m_pos), min(g.k_d, m_pos))
    return reduced, z


def unit_scaled(g: GameInstance) -> tuple[GameInstance, float]:
    """The same game with every cost divided by the largest, and that factor.

    Values scale linearly with the costs while marginals do not change, so the
    tables can be searched on costs in (0, 1].
    """
    top = float(g.phi[-1]) if g.m else 0.0
    if top in (0.0, 1.0):
        return g, 1.0
    return GameInstance.from_sorted(g.phi[1:] / top, g.k_a, g.k_d, g.perm_array), top


def solve_linear(
    g: GameInstance,
    strategies: bool = False,
    cross_check_rtol: Optional[float] = None,
    feas_eps: Optional[float] = None,
) -> SaddleCertificate:
    """Saddle certificate in time linear in m (plus the sort in normalize).

    Raises:
        CrossCheckFailure: attacker and defender searches disagree
    """
    cross_check_rtol = Config.CROSS_CHECK_RTOL if cross_check_rtol is None else cross_check_rtol
    started = time.perf_counter_ns()

    reduced, z = positive_part(g)
    unit, scale = unit_scaled(reduced)
    if unit.is_degenerate or unit.m == 0:
        sol = _solve_degenerate(unit)
    else:
        sol = _solve_tables(unit, cross_check_rtol, feas_eps)
    value = sol.value * scale

    alpha = np.zeros(g.m)
    beta = np.zeros(g.m)
    alpha[z:] = sol.alpha
    beta[z:] = sol.beta
    if z:
        alpha[:z] = (g.k_a - reduced.k_a) / z
        beta[:z] = (z - (g.k_d - reduced.k_d)) / z

    k = max(g.k, 1)
    s = min(max(sol.s + z, 1), k)
    r = min(max(sol.r, 0), s - 1)
    alpha_mv = MarginalVector.from_array(alpha, g.k_a)
    beta_mv = MarginalVector.from_array(beta, g.unprotected)

    p = q = None
    if strategies:
        p = lift_marginal(alpha_mv, g.k_a)
        q = lift_defender(beta_mv, g.k_d, g.m)

    cert = SaddleCertificate(
        value=value,
        alpha=alpha_mv,
        beta=beta_mv,
        s_star=s,
        r_star=r,
        attacker_active=g.original_id_set(sol.attacker_from + z, g.m),
        defender_active=g.original_id_set(sol.defender_from + z, g.m),
        defender_pure=sol.pure,
        method=SolveMethod.LINEAR,
        game=g,
        attacker_strategy=p,
        defender_strategy=q,
        stats=sol.stats,
        runtime_ns=time.perf_counter_ns() - started,
    )
    logger.info(
        f"linear solve m={g.m}, k_a={g.k_a}, k_d={g.k_d}: v*={cert.value:.12g}, "
        f"s*={s}, r*={r}, cells UI={sol.stats.cells_u} UII={sol.stats.uii_cells} "
        f"W={sol.stats.cells_w}"
    )
    return cert


def solve_both(
    g: GameInstance,
    strategies: bool = False,
    exact: Optional[bool] = None,
    cap: Optional[int] = None,
) -> SaddleCertificate:
    """Fast certificate annotated with its distance to the LP oracle value."""
    fast = solve_linear(g, strategies=strategies)
    oracle = oracle_certificate(g, exact=exact, cap=cap)
    discrepancy = abs(fast.value - oracle.value)
    if discrepancy > 1e-8 * max(1.0, abs(oracle.value)):
        logger.warning(
            f"fast value {fast.value!r} is {discrepancy:.3g} away from oracle {oracle.value!r}"
        )
    return dataclasses.replace(fast, discrepancy=discrepancy)


class LinearSaddleSolver(SaddleSolver):
    """Saddle solver backed by the linear table searches."""

    name = "linear"

    def __init__(self, strategies: bool = False, cross_check_rtol: Optional[float] = None):
        self.strategies = strategies
        self.cross_check_rtol = cross_check_rtol

    def certify(self, g: GameInstance) -> SaddleCertificate:
        return solve_linear(g, strategies=self.strategies, cross_check_rtol=self.cross_check_rtol)
