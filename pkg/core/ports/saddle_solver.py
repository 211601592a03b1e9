"""Abstract solver interface for saddle-point certificates.

The CLI picks an implementation per solve mode through this abstraction.

Implementations:
- LinearSaddleSolver: table searches, linear in the number of targets
- OracleSaddleSolver: full payoff matrix plus LP, desk scale only
"""

from abc import ABC, abstractmethod

from core.dto import GameInstance, SaddleCertificate


class SaddleSolver(ABC):
    """Abstract producer of saddle certificates.

    Implementations must be stateless across calls so that one instance can
    serve several threads.
    """

    name: str = "abstract"

    @abstractmethod
    def certify(self, g: GameInstance) -> SaddleCertificate:
        """Solve a normalized game.

        Args:
            g: Instance returned by normalize()

        Returns:
            SaddleCertificate in sorted space, with original-id active sets
        """
        pass
