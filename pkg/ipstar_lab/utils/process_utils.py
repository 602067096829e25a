"""Host resource helpers (worker counts, memory headroom)"""

import psutil

from ..errors import GuardExceededError


def default_worker_count() -> int:
    """Physical cores, falling back to logical cores, then 1."""
    return psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True) or 1


def available_memory_bytes() -> int:
    return psutil.virtual_memory().available


def sieve_memory_bytes(limit: int) -> int:
    """Peak bytes for a numpy bool sieve of ``limit`` plus its packed bitset."""
    return (limit + 1) + (limit + 8) // 8


def require_memory(needed: int, what: str) -> None:
    """Fail loudly instead of swapping when an allocation will not fit."""
    available = available_memory_bytes()
    if needed > available:
        raise GuardExceededError(
            f"{what} needs {needed / 1024 / 1024:.1f} MB but only "
            f"{available / 1024 / 1024:.1f} MB is available"
        )
