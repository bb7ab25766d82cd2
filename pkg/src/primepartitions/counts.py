"""Exact tables of partition counts into odd prime parts.

Q_m(k) here always means: the number of multisets of exactly m odd primes
summing to k. Tables carry the per-k counts, their prefix sums (the
cumulative counts the samplers and trend checks consume), and a provenance
tag naming the computation path. Independent paths exist deliberately so
they can gate each other: convolution and naive for m = 2, Bell-polynomial
and dynamic programming and brute force for general m.
"""

import math
import os
import struct

import gmpy2
import numpy as np
from filelock import FileLock

from .errors import ConsistencyError, ResourceLimitError
from .primes import PrimeTable, odd_prime_indicator
from .series import bell_count_series

DP_BUDGET = 1 << 35  # bound on pi(n)*m*n elementary updates
Q_TOTAL_CAP = 200_000

_CACHE_MAGIC = b"PPC1"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIIQ12s")

PROVENANCES = ("convolution", "bell", "dp", "naive")


class CountTable:
    """Counts q[k] = Q_m(k) for 0 <= k <= n plus prefix sums.

    Keeps a reference to the PrimeTable it was built from so downstream
    consumers (samplers, verifiers) do not need it passed separately.
    """

    __slots__ = ("m", "n", "q", "prefix", "provenance", "table")

    def __init__(self, m, n, q, provenance, table):
        self.m = m
        self.n = n
        self.q = q
        self.prefix = np.cumsum(q)
        self.provenance = provenance
        self.table = table
        for arr in (self.q, self.prefix):
            try:
                arr.setflags(write=False)
            except ValueError:
                pass

    def __repr__(self):
        return f"CountTable(m={self.m}, n={self.n}, provenance={self.provenance!r})"


def _as_count_array(values):
    # int64 when everything fits, exact Python integers otherwise
    mx = max(values) if len(values) else 0
    if mx < 2**63:
        return np.asarray(values, dtype=np.int64)
    return np.asarray(values, dtype=object)


# ---------------------------------------------------------------------------
# m = 2

def q2_table(table: PrimeTable, n: int) -> CountTable:
    """Two-part counts for all sums s <= 2n via one exact self-convolution.

    The convolution counts ordered pairs r[s]; unordered counts follow from
    q[s] = (r[s] + [s/2 odd prime]) / 2, which must divide exactly.
    """
    if 2 * n > table.limit:
        raise ValueError(f"need primes to {2 * n}, table limit {table.limit}")
    N = 2 * n
    ind = odd_prime_indicator(table, N)
    # 32-bit slots: ordered pair counts are < pi(2n) < 2^32 for any
    # limit under the sieve hard cap, so slots cannot carry
    packed = gmpy2.mpz(int.from_bytes(ind.astype(np.uint32).tobytes(), "little"))
    prod = int(packed * packed)
    need = (N + 1) * 4
    raw = prod.to_bytes(max(need, (prod.bit_length() + 7) // 8), "little")[:need]
    r = np.frombuffer(raw, dtype="<u4").astype(np.int64)
    diag = np.zeros(N + 1, dtype=np.int64)
    ev = np.arange(0, N + 1, 2)
    diag[ev] = ind[ev // 2]
    total = r + diag
    if (total & 1).any():
        raise ConsistencyError("ordered pair counts have wrong parity")
    return CountTable(2, N, total >> 1, "convolution", table)


def q2_naive(table: PrimeTable, s: int) -> int:
    """Count unordered odd-prime pairs summing to s by direct scanning."""
    if s > table.limit:
        raise ValueError(f"sum {s} exceeds table limit {table.limit}")
    hi = int(np.searchsorted(table.primes, s // 2, side="right"))
    ps = table.primes[1:hi]  # odd primes <= s/2
    if len(ps) == 0:
        return 0
    return int(np.count_nonzero(table.is_prime[s - ps]))


def q2_table_naive(table: PrimeTable, n: int) -> CountTable:
    """Same table as q2_table but built by per-sum scanning; the oracle path."""
    if 2 * n > table.limit:
        raise ValueError(f"need primes to {2 * n}, table limit {table.limit}")
    N = 2 * n
    q = np.zeros(N + 1, dtype=np.int64)
    for s in range(6, N + 1, 2):
        q[s] = q2_naive(table, s)
    return CountTable(2, N, q, "naive", table)


# ---------------------------------------------------------------------------
# general m

def qm_table_dp(table: PrimeTable, m: int, n: int, *, m_cap: int = 8, budget: int = DP_BUDGET) -> CountTable:
    """Exact-part-count DP over odd primes in increasing order.

    Processing parts in one fixed order counts every multiset once; the
    ascending update over the part-count axis lets a prime repeat within
    its own pass. Cost is O(pi(n) * m * n) array updates.
    """
    if not 1 <= m <= m_cap:
        raise ValueError(f"part count {m} outside [1, {m_cap}]")
    if n > table.limit:
        raise ValueError(f"range {n} exceeds table limit {table.limit}")
    npi = table.pi(n)
    if npi * m * n > budget:
        raise ResourceLimitError(f"dp cost pi(n)*m*n = {npi * m * n} exceeds budget {budget}")
    # multiset count bound decides whether int64 can hold every entry
    big = math.comb(npi + m - 1, m) >= 2**63 if npi else False
    dtype = object if big else np.int64
    dp = np.zeros((m + 1, n + 1), dtype=dtype)
    dp[0, 0] = 1
    for p in table.primes[1:]:
        p = int(p)
        if p > n:
            break
        for j in range(1, m + 1):
            dp[j, p:] += dp[j - 1, :-p]
    return CountTable(m, n, dp[m], "dp", table)


def qm_table_bell(table: PrimeTable, m: int, n: int) -> CountTable:
    """Counts from the Bell-polynomial series, divided by m! exactly."""
    series = bell_count_series(table, m, n)
    fact = math.factorial(m)
    q = []
    for k, c in enumerate(series.coeffs):
        val, rem = divmod(c, fact)
        if rem:
            raise ConsistencyError(f"series coefficient at {k} not divisible by {m}!")
        q.append(val)
    return CountTable(m, n, _as_count_array(q), "bell", table)


def summatory(counts: CountTable, N: int) -> int:
    """Cumulative count of all partitions with sum <= N.

    For m = 2 and N = 2n this is the summatory Goldbach count S(2n); for
    general m it is the size of the partition class with sums up to N.
    """
    if not 0 <= N <= counts.n:
        raise ValueError(f"N={N} outside table range [0, {counts.n}]")
    return int(counts.prefix[N])


def q_total_table(table: PrimeTable, n: int, *, max_n: int = Q_TOTAL_CAP) -> np.ndarray:
    """Q(k) for k <= n: partitions into any number of odd prime parts.

    Values grow like exp(c sqrt(k/log k)) so the array holds exact Python
    integers; n is capped because of that growth.
    """
    if n > max_n:
        raise ResourceLimitError(f"total-count range {n} exceeds cap {max_n}")
    if n > table.limit:
        raise ValueError(f"range {n} exceeds table limit {table.limit}")
    dp = np.zeros(n + 1, dtype=object)
    dp[0] = 1
    for p in table.primes[1:]:
        p = int(p)
        if p > n:
            break
        # in-place unbounded-part update, in non-overlapping blocks of p
        for b in range(p, n + 1, p):
            e = min(b + p, n + 1)
            dp[b:e] += dp[b - p : e - p]
    dp.setflags(write=False)
    return dp


# ---------------------------------------------------------------------------
# builders, export, cache

def build_count_table(table: PrimeTable, m: int, n: int, path: str = None) -> CountTable:
    """Build the m-part table for sums <= n via the named path.

    Default path: convolution for m = 2, dp otherwise. The convolution and
    naive paths exist only for m = 2.
    """
    if path is None:
        path = "convolution" if m == 2 else "dp"
    if path not in PROVENANCES:
        raise ValueError(f"unknown path {path!r}")
    if path in ("convolution", "naive") and m != 2:
        raise ValueError(f"path {path!r} only supports m=2")
    if path == "convolution":
        return _trimmed(q2_table(table, (n + 1) // 2), n)
    if path == "naive":
        return _trimmed(q2_table_naive(table, (n + 1) // 2), n)
    if path == "bell":
        return qm_table_bell(table, m, n)
    return qm_table_dp(table, m, n)


def _trimmed(counts: CountTable, n: int) -> CountTable:
    if counts.n == n:
        return counts
    return CountTable(counts.m, n, counts.q[: n + 1].copy(), counts.provenance, counts.table)


def _writable(path_or_file):
    # writers accept a path or an open stream (the CLI streams to stdout)
    if hasattr(path_or_file, "write"):
        return path_or_file, False
    return open(path_or_file, "w", newline=""), True


def write_count_csv(counts: CountTable, path) -> None:
    fh, owned = _writable(path)
    try:
        fh.write("k,q,prefix\n")
        q, pre = counts.q, counts.prefix
        for k in range(counts.n + 1):
            fh.write(f"{k},{q[k]},{pre[k]}\n")
    finally:
        if owned:
            fh.close()


def write_count_json(counts: CountTable, path, *, timestamp: str = None) -> None:
    import json
    import time

    doc = {
        "m": counts.m,
        "n": counts.n,
        "provenance": counts.provenance,
        "generated_at": timestamp or time.strftime("%Y-%m-%dT%H:%M:%S"),
        "rows": [[k, int(counts.q[k]), int(counts.prefix[k])] for k in range(counts.n + 1)],
    }
    fh, owned = _writable(path)
    try:
        json.dump(doc, fh)
        fh.write("\n")
    finally:
        if owned:
            fh.close()


def _count_cache_path(cache_dir, m, n, provenance):
    return os.path.join(cache_dir, f"ppc1_v{_CACHE_VERSION}_m{m}_n{n}_{provenance}.bin")


def save_count_cache(counts: CountTable, cache_dir: str):
    """Write the table as little-endian u64 values; returns the path, or
    None when values do not fit the fixed-width format."""
    mx = int(counts.q.max()) if counts.n >= 0 else 0
    if mx >= 2**64 or int(counts.prefix[counts.n]) >= 2**63:
        return None
    os.makedirs(cache_dir, exist_ok=True)
    path = _count_cache_path(cache_dir, counts.m, counts.n, counts.provenance)
    header = _CACHE_HEADER.pack(
        _CACHE_MAGIC, _CACHE_VERSION, counts.m, counts.n,
        counts.provenance.encode().ljust(12, b"\0"),
    )
    body = counts.q.astype(np.uint64).astype("<u8").tobytes()
    with FileLock(os.path.join(cache_dir, ".pp.lock")):
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(header + body)
        os.replace(tmp, path)
    return path


def load_count_cache(table: PrimeTable, m: int, n: int, provenance: str, cache_dir: str):
    path = _count_cache_path(cache_dir, m, n, provenance)
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError:
        return None
    if len(raw) != _CACHE_HEADER.size + (n + 1) * 8:
        return None
    magic, version, m_st, n_st, prov = _CACHE_HEADER.unpack_from(raw)
    if (magic, version, m_st, n_st) != (_CACHE_MAGIC, _CACHE_VERSION, m, n):
        return None
    if prov.rstrip(b"\0").decode() != provenance:
        return None
    q = np.frombuffer(raw, dtype="<u8", offset=_CACHE_HEADER.size)
    if q.max(initial=0) >= 2**63:
        return None
    return CountTable(m, n, q.astype(np.int64), provenance, table)


def cached_count_table(table: PrimeTable, m: int, n: int, path: str = None, cache_dir=None) -> CountTable:
    provenance = path or ("convolution" if m == 2 else "dp")
    if cache_dir:
        counts = load_count_cache(table, m, n, provenance, cache_dir)
        if counts is not None:
            return counts
    counts = build_count_table(table, m, n, path)
    if cache_dir:
        save_count_cache(counts, cache_dir)
    return counts
