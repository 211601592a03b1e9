"""
LP oracle: ground truth for the linear solvers at desk scale.

Enumerates every attack set and every protection set in lexicographic
order, builds the dense payoff matrix, and solves the matrix game with the
Bland simplex. Rows belong to the attacker (maximizer), columns to the
defender.
"""

import itertools
import logging
import math
import time
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from config import Config
from core.dto import (
    GameInstance,
    MatrixGameSolution,
    PayoffMatrix,
    SaddleCertificate,
    SolveMethod,
    SparseMixedStrategy,
    TargetSubset,
)
from core.errors import NumericalFailure, ScaleLimit
from core.game import marginal_of_strategy, structural_indices
from core.ports import SaddleSolver
from core.simplex import SimplexTableau

logger = logging.getLogger(__name__)

_SUPPORT_EPS = 1e-12


def _subsets(m: int, size: int) -> np.ndarray:
    """All size-subsets of 1..m as rows, lexicographic."""
    if size == 0:
        return np.zeros((1, 0), dtype=int)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(1, m + 1), size)), dtype=int
    )
    return flat.reshape(-1, size)


def _indicator(combos: np.ndarray, m: int) -> np.ndarray:
    X = np.zeros((combos.shape[0], m + 1))
    X[np.arange(combos.shape[0])[:, None], combos] = 1.0
    return X[:, 1:]


def enumerate_matrix(g: GameInstance, cap: Optional[int] = None) -> PayoffMatrix:
    """Dense payoff matrix, entry = Σ φ over attacked, unprotected targets.

    Raises:
        ScaleLimit: C(m, k_a) · C(m, k_d) exceeds cap
    """
    cap = Config.MATRIX_CAP if cap is None else cap
    size = math.comb(g.m, g.k_a) * math.comb(g.m, g.k_d)
    if size > cap:
        raise ScaleLimit(
            f"payoff matrix C({g.m},{g.k_a}) x C({g.m},{g.k_d}) = {size} entries exceeds cap {cap}",
            size,
            cap,
        )
    attacks = _subsets(g.m, g.k_a)
    defenses = _subsets(g.m, g.k_d)
    phi = g.phi[1:]
    X = _indicator(attacks, g.m) * phi
    Y = _indicator(defenses, g.m)
    entries = X.sum(axis=1)[:, None] - X @ Y.T
    return PayoffMatrix(
        rows=tuple(TargetSubset(tuple(int(j) for j in row)) for row in attacks),
        cols=tuple(TargetSubset(tuple(int(j) for j in row)) for row in defenses),
        entries=entries,
    )


def solve_matrix_game(
    A: Union[PayoffMatrix, np.ndarray],
    exact: Optional[bool] = None,
    dual_rtol: Optional[float] = None,
) -> MatrixGameSolution:
    """Value and optimal strategies of a matrix game (rows maximize).

    The matrix is shifted to positive entries and the column player's LP
    max 1ᵀu s.t. Bu ≤ 1 is solved; the row player's strategy comes from the
    dual prices of the same tableau.

    Raises:
        NumericalFailure: primal and dual values disagree beyond dual_rtol
    """
    exact = Config.ORACLE_EXACT if exact is None else exact
    dual_rtol = Config.ORACLE_DUAL_RTOL if dual_rtol is None else dual_rtol
    entries = np.asarray(A.entries if isinstance(A, PayoffMatrix) else A, dtype=float)

    shift = 1.0 - min(0.0, float(entries.min()))
    tableau = SimplexTableau(entries + shift, exact=exact)
    tableau.solve()

    u, y = tableau.primal(), tableau.dual()
    su, sy = u.sum(), y.sum()
    offset = Fraction(repr(shift)) if exact else shift
    value = float(1 / su - offset)
    dual_value = float(1 / sy - offset)
    if abs(value - dual_value) > dual_rtol * max(1.0, abs(value)):
        raise NumericalFailure(f"LP primal value {value!r} and dual value {dual_value!r} disagree")

    p = np.array([float(x / sy) for x in y])
    q = np.array([float(x / su) for x in u])
    logger.debug(
        f"matrix game {entries.shape[0]}x{entries.shape[1]}: value={value:.12g}, "
        f"{tableau.pivots} pivots, exact={exact}"
    )
    return MatrixGameSolution(value=value, p=p, q=q, dual_value=dual_value, pivots=tableau.pivots)


def _strategy(subsets: tuple, weights: np.ndarray, size: int) -> SparseMixedStrategy:
    keep = np.flatnonzero(weights > _SUPPORT_EPS)
    total = float(weights[keep].sum())
    return SparseMixedStrategy(
        atoms=tuple((subsets[i], float(weights[i]) / total) for i in keep),
        subset_size=size,
    )


def oracle_certificate(
    g: GameInstance, exact: Optional[bool] = None, cap: Optional[int] = None
) -> SaddleCertificate:
    """Certificate from the full LP, α and β read off the LP strategies."""
    started = time.perf_counter_ns()
    matrix = enumerate_matrix(g, cap)
    sol = solve_matrix_game(matrix, exact=exact)

    p = _strategy(matrix.rows, sol.p, g.k_a)
    q = _strategy(matrix.cols, sol.q, g.k_d)
    alpha = marginal_of_strategy(p, g.m)
    beta = marginal_of_strategy(q, g.m, complement=True)

    s, r = structural_indices(alpha, g)
    s = min(max(s, 1), max(g.k, 1))
    r = min(r, s - 1)
    return SaddleCertificate(
        value=sol.value,
        alpha=alpha,
        beta=beta,
        s_star=s,
        r_star=r,
        attacker_active=frozenset(g.original_id(j) for j in p.support()),
        defender_active=frozenset(g.original_id(j) for j in q.support()),
        defender_pure=len(q) == 1,
        method=SolveMethod.ORACLE,
        game=g,
        attacker_strategy=p,
        defender_strategy=q,
        runtime_ns=time.perf_counter_ns() - started,
    )


class OracleSaddleSolver(SaddleSolver):
    """Saddle solver backed by the exhaustive LP."""

    name = "oracle"

    def __init__(self, exact: Optional[bool] = None, cap: Optional[int] = None):
        self.exact = exact
        self.cap = cap

    def certify(self, g: GameInstance) -> SaddleCertificate:
        return oracle_certificate(g, exact=self.exact, cap=self.cap)
