"""On-disk document Data Transfer Objects.

Everything here is in the caller's ORIGINAL target order with 1-based ids.
"""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class InstanceFile:
    """Game instance as read from JSON.

    Attributes:
        costs: Cost per target, original order
        k_a: Attacker budget
        k_d: Defender budget
    """

    costs: tuple[float, ...]
    k_a: int
    k_d: int


@dataclass(frozen=True)
class StrategyAtom:
    """One pure action of a mixed strategy.

    Attributes:
        targets: Original target ids, ascending
        prob: Probability of playing this action
    """

    targets: tuple[int, ...]
    prob: float


@dataclass(frozen=True)
class CertificateFile:
    """Saddle certificate as written to JSON.

    Attributes:
        value: v*
        alpha: Attack marginal, original order
        beta: Non-protection marginal, original order
        s_star: Structural tail index (sorted space)
        r_star: Structural offset
        attacker_active: Original ids in the attacker's active set
        defender_active: Original ids in the defender's active set
        defender_pure: Whether the defender plays a single set
        method: "linear" or "oracle"
        runtime_ns: Solve wall time (0 when timings are disabled)
        attacker_strategy: Lifted attacker strategy, when requested
        defender_strategy: Lifted defender strategy, when requested
        discrepancy: |v_linear - v_oracle|, when both ran
    """

    value: float
    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    s_star: int
    r_star: int
    attacker_active: tuple[int, ...]
    defender_active: tuple[int, ...]
    defender_pure: bool
    method: str
    runtime_ns: int
    attacker_strategy: Optional[tuple[StrategyAtom, ...]] = None
    defender_strategy: Optional[tuple[StrategyAtom, ...]] = None
    discrepancy: Optional[float] = None

    @property
    def has_strategies(self) -> bool:
        return self.attacker_strategy is not None and self.defender_strategy is not None
