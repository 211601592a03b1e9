"""Ports (interfaces) for saddlegame-core dependency inversion.

These abstract interfaces define how callers obtain saddle certificates,
allowing the linear solvers and the LP oracle to be swapped freely.
"""

from .saddle_solver import SaddleSolver

__all__ = [
    "SaddleSolver",
]
