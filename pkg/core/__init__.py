"""
Saddlegame Core - saddle points of zero-sum additive security games.

Main components:
- solve_linear: Fast certificate from the attacker and defender table searches
- oracle_certificate: LP ground truth over the full payoff matrix
- lift_marginal / verify_saddle: Mixed strategies and their enumeration check
"""

from core.game import normalize
from core.oracle import OracleSaddleSolver, oracle_certificate
from core.solver import LinearSaddleSolver, solve_both, solve_linear
from core.strategy_lift import lift_defender, lift_marginal, verify_saddle

__all__ = [
    "normalize",
    "solve_linear",
    "solve_both",
    "LinearSaddleSolver",
    "oracle_certificate",
    "OracleSaddleSolver",
    # Strategies
    "lift_marginal",
    "lift_defender",
    "verify_saddle",
]
