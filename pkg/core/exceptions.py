"""
Solver Exceptions
Error hierarchy shared by the library, the drivers and the CLI.
"""


class HypSolveError(Exception):
    """Base class for all solver errors."""


class ConfigError(HypSolveError):
    """Invalid solver configuration."""


class BadPrime(HypSolveError):
    """A denominator vanishes mod the prime, or a required root does not exist."""


class Unsupported(HypSolveError):
    """Input lies outside what the solver handles (not a proof of no solution)."""


class NegativePowers(Unsupported):
    """Logarithmic quotient whose normalized part has negative powers."""


class InvalidOperator(HypSolveError):
    """Operator violates the input contract (order, regularity, irreducibility)."""


class OperatorParseError(InvalidOperator):
    """Syntax error in an operator expression."""

    def __init__(self, message: str, position: int = -1):
        if position >= 0:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class PrecisionExhausted(HypSolveError):
    """A truncated series ran out of guaranteed terms."""


class ReconstructionFailure(HypSolveError):
    """Modular reconstruction found no admissible preimage."""
