"""
Solver Configuration Settings
Centralized configuration management for the hypergeometric solver.
"""

import math
import os
from dataclasses import dataclass, asdict, replace
from fractions import Fraction

from sympy import isprime

from core.exceptions import ConfigError


class Settings:
    """Solver configuration settings."""

    BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

    # Results Store Configuration
    RESULTS_DB_PATH = os.environ.get(
        "HYP_SOLVE_DB", os.path.join(BASE_DIR, "hypsolve_results.db")
    )

    # Logging
    LOG_DIR = os.environ.get("HYP_SOLVE_LOG_DIR", os.path.join(BASE_DIR, "logs"))
    CONSOLE_LOG_LEVEL = "WARNING"

    # Modular Arithmetic
    DEFAULT_PRIME = 4099
    RETRY_PRIME = 7919
    MAX_LIFT_BITS = 2000  # give up once the modulus exceeds 2^MAX_LIFT_BITS

    # Modular Sweep
    SWEEP_CHUNK = 512  # residues of C evaluated per matrix product

    # Search Space
    AF_MAX = 2  # algebraic degree of the pullback, 1 or 2
    PRECISION_FACTOR = 1  # multiplies 2(a_f+1)(d_f+1)+6

    # Driver
    MODE = "auto"  # "auto", "find2f1", "gauge"
    OUTPUT = "text"  # "text", "json"
    MODES = ["auto", "find2f1", "gauge"]
    OUTPUTS = ["text", "json"]

    # Local expansions at integral-basis places
    INTBASIS_PRECISION = 12
    MAX_PRECISION_RETRIES = 4

    # Exponential solution search (reducibility check)
    EXP_SOLUTION_MAX_PLACES = 10
    EXP_SOLUTION_MAX_DEGREE = 40

    # Batch Processing
    THREADS_ENV_VAR = "HYP_SOLVE_THREADS"
    MAX_WORKERS = 8

    # Exit Codes
    EXIT_CODES = {
        "solved": 0,
        "no-solution-found": 1,
        "unsupported": 2,
        "invalid-input": 3,
    }


@dataclass(frozen=True)
class SolveConfig:
    """Immutable per-run solver options."""

    prime: int = Settings.DEFAULT_PRIME
    retry_prime: int = Settings.RETRY_PRIME
    a_fmax: int = Settings.AF_MAX
    precision_factor: Fraction = Fraction(Settings.PRECISION_FACTOR)
    max_lift_bits: int = Settings.MAX_LIFT_BITS
    mode: str = Settings.MODE
    output: str = Settings.OUTPUT

    @classmethod
    def from_settings(cls, **overrides) -> "SolveConfig":
        """
        Build a config from Settings defaults.

        Args:
            **overrides: Field values replacing the defaults (None is ignored)

        Returns:
            SolveConfig: Validated configuration
        """
        values = {k: v for k, v in overrides.items() if v is not None}
        if "precision_factor" in values:
            values["precision_factor"] = Fraction(values["precision_factor"])
        config = replace(cls(), **values)
        config.validate()
        return config

    def validate(self):
        """Raise ConfigError when any field is out of range."""
        for name in ("prime", "retry_prime"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 3 or not isprime(value):
                raise ConfigError(f"{name} must be an odd prime, got {value}")
        if self.a_fmax not in (1, 2):
            raise ConfigError(f"a_fmax must be 1 or 2, got {self.a_fmax}")
        if self.precision_factor < 1:
            raise ConfigError(
                f"precision_factor must be >= 1, got {self.precision_factor}"
            )
        if self.max_lift_bits <= 0:
            raise ConfigError(f"max_lift_bits must be positive, got {self.max_lift_bits}")
        if self.mode not in Settings.MODES:
            raise ConfigError(f"mode must be one of {Settings.MODES}, got {self.mode}")
        if self.output not in Settings.OUTPUTS:
            raise ConfigError(f"output must be one of {Settings.OUTPUTS}, got {self.output}")

    def working_precision(self, a_f: int, d_f: int) -> int:
        """Number of series terms used by the quotient method."""
        base = 2 * (a_f + 1) * (d_f + 1) + 6
        return math.ceil(self.precision_factor * base)

    def primes(self):
        """Primes tried in order by the c-sweep."""
        if self.retry_prime == self.prime:
            return [self.prime]
        return [self.prime, self.retry_prime]

    def to_dict(self) -> dict:
        data = asdict(self)
        data["precision_factor"] = str(self.precision_factor)
        return data
