"""Exception types shared by the engines and the CLI.

Every error carries the process exit code the CLI should use when it
escapes a command. Engines raise these; they never print.
"""

from typing import Dict, Optional


class IpstarLabError(Exception):
    """Base class for all errors raised by ipstar_lab"""

    exit_code = 1


class KindMismatchError(IpstarLabError, TypeError):
    """An element or operation does not belong to the given structure"""


class TrivialSubgroupError(IpstarLabError, ValueError):
    """Coset labels and index are undefined for the trivial subgroup {0}"""


class SupportExceededError(IpstarLabError, ValueError):
    """A membership query fell outside the declared evaluable support"""


class GuardExceededError(IpstarLabError, ValueError):
    """An exhaustive search would exceed its configured guard"""

    exit_code = 3

    def __init__(self, message: str, cost_estimate: Optional[int] = None):
        if cost_estimate is not None:
            message = f"{message} (estimated cost: {cost_estimate:,} membership checks)"
        super().__init__(message)
        self.cost_estimate = cost_estimate


class LengthGuardError(GuardExceededError):
    """A sequence is too long for 2^m subset enumeration"""


class IndexPreconditionError(IpstarLabError, ValueError):
    """A construction needs a finite (or infinite) index subgroup and got the other"""


class SequenceLengthError(IpstarLabError, ValueError):
    """A sequence does not have the length a construction requires"""


class SearchExhaustedError(IpstarLabError, ValueError):
    """A bounded search found nothing inside its grid"""

    def __init__(self, message: str, grid: Optional[Dict[str, int]] = None):
        if grid:
            dims = ", ".join(f"{key}={value}" for key, value in sorted(grid.items()))
            message = f"{message} [searched grid: {dims}]"
        super().__init__(message)
        self.grid = dict(grid or {})


class ZeroInFiniteSumsError(IpstarLabError, ValueError):
    """FS(b) contains 0, so the dilation D-set construction does not apply"""


class InvalidConfigError(IpstarLabError, ValueError):
    """Experiment configuration failed validation"""

    exit_code = 2

    def __init__(self, field_errors: Dict[str, str]):
        self.field_errors = dict(field_errors)
        lines = [f"{field}: {problem}" for field, problem in sorted(self.field_errors.items())]
        super().__init__("Invalid configuration:\n  " + "\n  ".join(lines))


class UnknownExperimentError(IpstarLabError, ValueError):
    """The requested experiment is not registered"""

    exit_code = 2


class RecheckFailedError(IpstarLabError, RuntimeError):
    """A certificate failed re-verification; always a bug"""

    exit_code = 4


class CorruptCacheError(IpstarLabError, ValueError):
    """A sieve cache file has a bad header or truncated payload"""


class WindowIndexError(IpstarLabError, IndexError):
    """A Følner window index is outside the range the family generates"""
