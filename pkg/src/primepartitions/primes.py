"""Prime tables: sieving, rank queries, and the odd-prime indicator vector.

The sieve is segmented above a configurable threshold so the working set
stays cache-sized; segments are processed over odd numbers only. The
resulting table is immutable and safe to share between threads.
"""

import math
import os
import struct

import numpy as np
from filelock import FileLock

from .errors import ResourceLimitError

SEGMENT_SIZE = 1 << 20  # numbers per segment
HARD_CAP = 1 << 33

_CACHE_MAGIC = b"PPL1"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQ")


class PrimeTable:
    """Primality table up to ``limit`` with O(log n) rank queries.

    ``is_prime`` is indexed by integer; ``primes`` is the ascending array
    of all primes <= limit (2 included).
    """

    __slots__ = ("limit", "is_prime", "primes")

    def __init__(self, limit: int, is_prime: np.ndarray):
        self.limit = limit
        self.is_prime = is_prime
        self.primes = np.flatnonzero(is_prime).astype(np.int64)
        self.is_prime.setflags(write=False)
        self.primes.setflags(write=False)

    def pi(self, y) -> int:
        """Number of primes <= y; real y is read as floor(y)."""
        if y > self.limit:
            raise ValueError(f"pi({y}) out of range: table limit {self.limit}")
        return int(np.searchsorted(self.primes, math.floor(y), side="right"))

    def __repr__(self):
        return f"PrimeTable(limit={self.limit}, count={len(self.primes)})"


def _sieve_simple(n: int) -> np.ndarray:
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def _sieve_segmented(n: int, segment: int) -> np.ndarray:
    base = _sieve_simple(math.isqrt(n))
    base_odd = [int(p) for p in np.flatnonzero(base)[1:]]
    out = np.zeros(n + 1, dtype=bool)
    out[2] = True
    for lo in range(3, n + 1, 2 * segment):
        hi = min(lo + 2 * segment, n + 1)
        # one slot per odd value lo, lo+2, ...; slice step p == value step 2p
        mask = np.ones((hi - lo + 1) // 2, dtype=bool)
        for p in base_odd:
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start < hi:
                mask[(start - lo) // 2 :: p] = False
        out[lo:hi:2] = mask
    return out


def sieve_upto(N: int, *, segment_size: int = SEGMENT_SIZE, hard_cap: int = HARD_CAP) -> PrimeTable:
    """Sieve of Eratosthenes up to N inclusive.

    Uses a single pass for small N and odd-only segments of
    ``segment_size`` numbers above that; both produce identical tables.
    """
    if N < 2:
        raise ValueError(f"sieve limit must be >= 2, got {N}")
    if N > hard_cap:
        raise ResourceLimitError(f"sieve limit {N} exceeds hard cap {hard_cap}")
    if N <= segment_size:
        mask = _sieve_simple(N)
    else:
        mask = _sieve_segmented(N, segment_size)
    return PrimeTable(N, mask)


def pi(table: PrimeTable, y) -> int:
    return table.pi(y)


def odd_prime_indicator(table: PrimeTable, N: int) -> np.ndarray:
    """Bit vector of length N+1 with bit k set iff k is an odd prime."""
    if N > table.limit:
        raise ValueError(f"indicator range {N} exceeds table limit {table.limit}")
    ind = table.is_prime[: N + 1].copy()
    if N >= 2:
        ind[2] = False
    return ind


# ---------------------------------------------------------------------------
# on-disk cache

def _cache_path(cache_dir: str, limit: int) -> str:
    return os.path.join(cache_dir, f"ppl1_v{_CACHE_VERSION}_limit{limit}.bin")


def save_prime_cache(table: PrimeTable, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(cache_dir, table.limit)
    payload = _CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, table.limit)
    payload += np.packbits(table.is_prime, bitorder="little").tobytes()
    with FileLock(os.path.join(cache_dir, ".pp.lock")):
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    return path


def load_prime_cache(limit: int, cache_dir: str):
    """Return the cached PrimeTable for exactly this limit, or None.

    Anything that fails validation (magic, version, limit, payload size)
    is ignored rather than trusted.
    """
    path = _cache_path(cache_dir, limit)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError:
        return None
    if len(raw) < _CACHE_HEADER.size:
        return None
    magic, version, stored_limit = _CACHE_HEADER.unpack_from(raw)
    if magic != _CACHE_MAGIC or version != _CACHE_VERSION or stored_limit != limit:
        return None
    bits = np.frombuffer(raw, dtype=np.uint8, offset=_CACHE_HEADER.size)
    if len(bits) * 8 < limit + 1:
        return None
    mask = np.unpackbits(bits, bitorder="little")[: limit + 1].astype(bool)
    return PrimeTable(limit, mask)


def cached_sieve(N: int, cache_dir=None, **kwargs) -> PrimeTable:
    """sieve_upto with an optional read-through disk cache."""
    if cache_dir:
        table = load_prime_cache(N, cache_dir)
        if table is not None:
            return table
    table = sieve_upto(N, **kwargs)
    if cache_dir:
        save_prime_cache(table, cache_dir)
    return table
