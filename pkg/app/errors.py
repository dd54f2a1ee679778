class ClonerError(Exception):
    """Base class for every error raised by the cloning toolkit."""


class DomainError(ClonerError, ValueError):
    """An argument is outside the domain of the operation."""


class CombinatorialOverflowError(DomainError, OverflowError):
    """An exact combinatorial value exceeds the documented integer bound."""


class ResourceError(ClonerError):
    """A desk-scale cap (oracle expansion, dense Choi matrix) would be exceeded."""


class DiscrepancyError(ClonerError):
    """Simulation and closed form disagree beyond tolerance."""

    def __init__(self, message, deviation=None, tolerance=None):
        super().__init__(message)
        self.deviation = deviation
        self.tolerance = tolerance
