"""Data Transfer Objects for saddlegame-core."""

from .cells import (
    AttackerSolution,
    CandidateCell,
    CellFamily,
    DefenderSolution,
    DualCell,
    SolverStats,
)
from .game import (
    GameInstance,
    MarginalVector,
    SaddleCertificate,
    SolveMethod,
    SparseMixedStrategy,
    TargetSubset,
)
from .files import CertificateFile, InstanceFile, StrategyAtom
from .verdict import MatrixGameSolution, PayoffMatrix, SaddleVerdict

__all__ = [
    # Enums
    "CellFamily",
    "SolveMethod",
    # Game DTOs
    "GameInstance",
    "TargetSubset",
    "MarginalVector",
    "SparseMixedStrategy",
    "SaddleCertificate",
    # Table DTOs
    "CandidateCell",
    "DualCell",
    "AttackerSolution",
    "DefenderSolution",
    "SolverStats",
    # Verification DTOs
    "PayoffMatrix",
    "MatrixGameSolution",
    "SaddleVerdict",
    # File DTOs
    "InstanceFile",
    "CertificateFile",
    "StrategyAtom",
]
