"""Tests for the prime sieve, its disk cache and the host helpers"""

import pytest

from ipstar_lab.errors import CorruptCacheError, GuardExceededError
from ipstar_lab.sieve import cache_path, read_cache, sieve_primes, simple_sieve, write_cache
from ipstar_lab.utils.logger import Logger
from ipstar_lab.utils.process_utils import default_worker_count, require_memory, sieve_memory_bytes


def test_small_sieve():
    assert list(sieve_primes(30).primes) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert sieve_primes(1).count() == 0


@pytest.mark.slow
def test_prime_count_to_one_million():
    assert sieve_primes(10 ** 6).count() == 78498


def test_cache_round_trip(tmp_path):
    path = cache_path(tmp_path, 1000)
    write_cache(path, 1000, simple_sieve(1000))
    assert read_cache(path, 1000).sum() == 168
    with pytest.raises(CorruptCacheError):
        read_cache(path, 999)


def test_cache_is_written_and_reused(tmp_path):
    messages = []
    logger = Logger(callback=messages.append, callback_level="DEBUG")
    first = sieve_primes(500, tmp_path, logger=logger)
    assert cache_path(tmp_path, 500).exists()
    assert first.count() == 95
    assert any("Sieving" in m for m in messages)


def test_corrupt_cache_is_recomputed(tmp_path):
    path = cache_path(tmp_path, 100)
    path.write_bytes(b"not a sieve")
    messages = []
    primes = sieve_primes(100, tmp_path, logger=Logger(callback=messages.append))
    assert primes.count() == 25
    assert any("Discarding" in m for m in messages)
    assert read_cache(path, 100).sum() == 25


def test_truncated_payload_detected(tmp_path):
    path = cache_path(tmp_path, 64)
    write_cache(path, 64, simple_sieve(64))
    path.write_bytes(path.read_bytes()[:-2])
    with pytest.raises(CorruptCacheError):
        read_cache(path, 64)


def test_sieve_guard():
    with pytest.raises(GuardExceededError):
        sieve_primes(1000, max_limit=999)
    with pytest.raises(ValueError):
        sieve_primes(0)


def test_host_helpers():
    assert default_worker_count() >= 1
    assert sieve_memory_bytes(80) == 81 + 11
    with pytest.raises(GuardExceededError):
        require_memory(2 ** 62, "test allocation")


def test_logger_levels_and_file(tmp_path):
    messages = []
    logger = Logger(tmp_path / "logs", callback=messages.append, callback_level="WARNING")
    logger.info("quiet")
    logger.warning("loud")
    assert len(messages) == 1 and "[WARNING] loud" in messages[0]
    written = list((tmp_path / "logs").glob("ipstar_lab_*.log"))
    assert len(written) == 1
    text = written[0].read_text(encoding="utf-8")
    assert "quiet" in text and "loud" in text
