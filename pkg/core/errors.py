"""Exception hierarchy for saddlegame-core."""


class SaddleGameError(Exception):
    """Base class for all saddlegame errors."""

    pass


class InvalidInstance(SaddleGameError):
    """Game instance fails its preconditions."""

    pass


class NegativeCost(InvalidInstance):
    """A target cost is negative or not finite."""

    pass


class BudgetOutOfRange(InvalidInstance):
    """Attacker or defender budget lies outside [0, m]."""

    pass


class EmptyInstance(InvalidInstance):
    """Instance has no targets."""

    pass


class CardinalityMismatch(SaddleGameError):
    """A pure action has the wrong number of targets."""

    pass


class IndexOutOfRange(SaddleGameError):
    """A table cell or target index lies outside its range."""

    pass


class InfeasibleMarginal(SaddleGameError):
    """Marginal vector is not a convex combination of k-subset indicators."""

    pass


class InvalidStrategy(SaddleGameError):
    """Mixed strategy atoms are not distinct k-subsets with a probability distribution."""

    pass


class NoFeasibleCell(SaddleGameError):
    """No feasible candidate cell was found (solver defect)."""

    pass


class ScaleLimit(SaddleGameError):
    """Enumeration would exceed the configured cap."""

    def __init__(self, message: str, size: int, cap: int):
        super().__init__(message)
        self.size = size
        self.cap = cap


class NumericalFailure(SaddleGameError):
    """Numerical results disagree beyond tolerance."""

    pass


class CrossCheckFailure(NumericalFailure):
    """Attacker and defender linear solvers disagree on the value."""

    pass


class MalformedFile(SaddleGameError):
    """Instance or certificate document cannot be parsed."""

    pass
