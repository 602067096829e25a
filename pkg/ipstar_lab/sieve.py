"""Prime sieve with an on-disk bitset cache.

Cache file layout: ``b"IPSV1"`` + little-endian uint64 limit + the
sieve bitmap packed with ``numpy.packbits(bitorder="little")``.
"""

import math
import os
import struct
import tempfile
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np

from .errors import CorruptCacheError, GuardExceededError
from .largeness import PrimesSet
from .utils.logger import Logger
from .utils.process_utils import require_memory, sieve_memory_bytes

CACHE_MAGIC = b"IPSV1"
_HEADER = struct.Struct("<Q")
DEFAULT_MAX_SIEVE_LIMIT = 100_000_000

_memo: Dict[Tuple[int, Optional[str]], PrimesSet] = {}


def simple_sieve(limit: int) -> np.ndarray:
    """Boolean array of length limit + 1 with True at primes."""
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p: limit + 1: p] = False
    return is_prime


def cache_path(cache_dir: Path, limit: int) -> Path:
    return Path(cache_dir) / f"primes_{limit}.ipsv"


def write_cache(path: Path, limit: int, is_prime: np.ndarray) -> None:
    """Write atomically: temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = np.packbits(is_prime, bitorder="little").tobytes()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(CACHE_MAGIC)
            f.write(_HEADER.pack(limit))
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cache(path: Path, limit: int) -> np.ndarray:
    data = path.read_bytes()
    head = len(CACHE_MAGIC) + _HEADER.size
    if len(data) < head or data[:len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise CorruptCacheError(f"{path} does not start with {CACHE_MAGIC!r}")
    (stored,) = _HEADER.unpack(data[len(CACHE_MAGIC):head])
    if stored != limit:
        raise CorruptCacheError(f"{path} holds limit {stored}, expected {limit}")
    packed = np.frombuffer(data[head:], dtype=np.uint8)
    if packed.size != (limit + 1 + 7) // 8:
        raise CorruptCacheError(f"{path} payload is {packed.size} bytes, expected {(limit + 8) // 8}")
    return np.unpackbits(packed, count=limit + 1, bitorder="little").astype(bool)


def sieve_primes(
    limit: int,
    cache_dir: Optional[Path] = None,
    max_limit: int = DEFAULT_MAX_SIEVE_LIMIT,
    logger: Optional[Logger] = None,
) -> PrimesSet:
    """Primes up to ``limit`` as a SetSpec, cached on disk when ``cache_dir`` is given."""
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    if limit > max_limit:
        raise GuardExceededError(f"sieve limit {limit:,} exceeds the guard max_sieve_limit = {max_limit:,}")
    key = (limit, None if cache_dir is None else str(cache_dir))
    if key in _memo:
        return _memo[key]

    is_prime: Optional[np.ndarray] = None
    path = cache_path(cache_dir, limit) if cache_dir is not None else None
    if path is not None and path.exists():
        try:
            is_prime = read_cache(path, limit)
            if logger:
                logger.debug(f"Sieve cache hit: {path}")
        except (CorruptCacheError, OSError) as e:
            if logger:
                logger.warning(f"Discarding sieve cache ({e}); recomputing")
            is_prime = None

    if is_prime is None:
        require_memory(sieve_memory_bytes(limit), f"sieve to {limit:,}")
        if logger:
            logger.info(f"Sieving primes up to {limit:,}")
        is_prime = simple_sieve(limit)
        if path is not None:
            try:
                write_cache(path, limit, is_prime)
            except OSError as e:
                if logger:
                    logger.warning(f"Could not write sieve cache {path}: {e}")

    primes = PrimesSet(limit, is_prime)
    _memo[key] = primes
    return primes
