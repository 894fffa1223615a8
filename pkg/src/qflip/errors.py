"""Exception hierarchy for qflip."""


class QflipError(Exception):
    """Base class for all library errors."""


class InvalidBias(QflipError, ValueError):
    pass


class InvalidBreakpoint(QflipError, ValueError):
    pass


class InvalidRecurrence(QflipError, ValueError):
    """A recurrence failed validation; ``violations`` lists the reasons."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class OutOfDomain(QflipError, ValueError):
    pass


class PieceExplosion(QflipError, RuntimeError):
    pass


class NoCycleFound(QflipError, RuntimeError):
    pass


class DivergentWeight(QflipError, ArithmeticError):
    pass


class NotEigenApplicable(QflipError, ValueError):
    pass


class ForcedConflict(QflipError, ValueError):
    def __init__(self, q, given, forced):
        self.q, self.given, self.forced = q, given, forced
        super().__init__(f"value {given} at q={q} conflicts with forced value {forced}")


class InfinitePreimage(QflipError, ValueError):
    pass


class NotFound(QflipError, RuntimeError):
    pass


class UnsupportedClauseCombination(QflipError, ValueError):
    pass


class NonTermination(QflipError, RuntimeError):
    pass
