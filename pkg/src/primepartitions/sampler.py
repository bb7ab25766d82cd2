"""Exact uniform sampling over partitions into odd prime parts.

Sampling is rank-based: partitions of every sum s <= n are enumerated
lexicographically (size first, then parts in nondecreasing order), a rank
is drawn uniformly from [0, total), and the partition at that rank is
reconstructed by descending the cumulative count tables. No rejection
loop, so the draw count is exact and the cost per draw is bounded.

For concurrent use give each worker its own Generator (for example via
numpy.random.SeedSequence.spawn); the samplers never mutate shared state
apart from per-instance memo dictionaries.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .counts import CountTable
from .errors import ConsistencyError

DEFAULT_SEED = 1729
KS_ALPHA = 0.01
KS_COEFF = 1.63  # two-sided asymptotic critical value at alpha = 0.01


@dataclass(frozen=True)
class PartitionSample:
    size: int
    parts: tuple

    def __post_init__(self):
        if sum(self.parts) != self.size:
            raise ValueError("parts do not sum to size")
        if any(a > b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be nondecreasing")


@dataclass(frozen=True)
class KsReport:
    T: int
    D: float
    threshold: float
    alpha: float
    reference: str

    @property
    def rejected(self) -> bool:
        return self.D > self.threshold


@dataclass(frozen=True)
class LimitCdf:
    """Large-n limit law of size/n for m-part partitions: F(u) = u^m on [0, 1]."""

    m: int

    def __call__(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        if u >= 1.0:
            return 1.0
        return u**self.m


class ExactSizeCdf:
    """Finite-n size distribution taken straight from a count table.

    With a two-part table over range 2n, F(u) is the cumulative count
    through size 2*floor(u*n) over the total; tables with m >= 3 over
    range n cut at floor(u*n). at_size evaluates the same distribution at
    an integer size, exact in the table's integers before one division.
    """

    def __init__(self, counts: CountTable):
        self.counts = counts
        self.total = int(counts.prefix[counts.n])
        if self.total == 0:
            raise ValueError("count table is empty; no size distribution")

    def at_size(self, size: int) -> float:
        size = min(max(int(size), 0), self.counts.n)
        return int(self.counts.prefix[size]) / self.total

    def at_sizes(self, sizes) -> np.ndarray:
        idx = np.clip(np.asarray(sizes, dtype=np.int64), 0, self.counts.n)
        return np.asarray(self.counts.prefix[idx], dtype=np.float64) / self.total

    def __call__(self, u: float) -> float:
        if u <= 0.0:
            return 0.0
        if u >= 1.0:
            return 1.0
        if self.counts.m == 2:
            half = self.counts.n // 2
            return self.at_size(2 * math.floor(u * half))
        return self.at_size(math.floor(u * self.counts.n))


def exact_size_cdf(counts: CountTable, u: float) -> float:
    return ExactSizeCdf(counts)(u)


# ---------------------------------------------------------------------------
# rank <-> partition

class _Unranker:
    """Shared machinery mapping ranks to partitions for one count table.

    count_min(j, s, i) counts partitions of s into j odd prime parts,
    all >= the i-th odd prime; memoized, with a vectorized two-part base
    case so the recursion never enumerates pairs one by one.
    """

    def __init__(self, counts: CountTable, table=None):
        if counts.m < 2:
            raise ValueError("need at least two parts")
        table = table if table is not None else counts.table
        if table is None:
            raise ValueError("count table carries no prime table; pass one")
        if table.limit < counts.n:
            raise ValueError("prime table too short for this count range")
        self.counts = counts
        self.table = table
        self.isp = table.is_prime
        self.oprimes = table.primes[1:]  # odd primes, ascending
        self._memo = {}
        self._first = {}

    def count_min(self, j: int, s: int, imin: int) -> int:
        if s <= 0 or imin >= len(self.oprimes):
            return 0
        p0 = int(self.oprimes[imin])
        if p0 * j > s:
            return 0
        if j == 1:
            return int(bool(self.isp[s]))  # s >= p0 already holds
        key = (j, s, imin)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if j == 2:
            hi = np.searchsorted(self.oprimes, s // 2, side="right")
            ps = self.oprimes[imin:hi]
            out = int(np.count_nonzero(self.isp[s - ps])) if len(ps) else 0
        else:
            out = 0
            for i in range(imin, len(self.oprimes)):
                p = int(self.oprimes[i])
                if p * j > s:
                    break
                out += self.count_min(j - 1, s - p, i)
        self._memo[key] = out
        return out

    def first_weights(self, s: int):
        """Candidate smallest parts for sum s with their subtree counts."""
        cached = self._first.get(s)
        if cached is not None:
            return cached
        m = self.counts.m
        hi = np.searchsorted(self.oprimes, s // m, side="right")
        cand = self.oprimes[:hi].astype(np.int64)
        w = np.array(
            [self.count_min(m - 1, s - int(p), i) for i, p in enumerate(cand)],
            dtype=np.int64,
        )
        cached = (cand, w, np.cumsum(w))
        self._first[s] = cached
        return cached

    def finish(self, j: int, s: int, imin: int, rank: int):
        """Parts j..1 of a partition of s, all >= the imin-th odd prime."""
        parts = []
        while j > 2:
            for i in range(imin, len(self.oprimes)):
                p = int(self.oprimes[i])
                if p * j > s:
                    raise ConsistencyError(f"rank exhausted at sum {s}")
                c = self.count_min(j - 1, s - p, i)
                if rank < c:
                    parts.append(p)
                    s -= p
                    imin = i
                    j -= 1
                    break
                rank -= c
            else:
                raise ConsistencyError(f"rank exhausted at sum {s}")
        hi = np.searchsorted(self.oprimes, s // 2, side="right")
        ps = self.oprimes[imin:hi]
        valid = ps[self.isp[s - ps]] if hi > imin else ps[:0]
        if rank >= len(valid):
            raise ConsistencyError(f"rank outside two-part class of sum {s}")
        p = int(valid[rank])
        parts.extend((p, s - p))
        return tuple(parts)

    def unrank(self, rank: int) -> PartitionSample:
        total = int(self.counts.prefix[self.counts.n])
        if not 0 <= rank < total:
            raise ValueError(f"rank {rank} outside [0, {total})")
        size = int(np.searchsorted(self.counts.prefix, rank, side="right"))
        within = rank - (int(self.counts.prefix[size]) - int(self.counts.q[size]))
        m = self.counts.m
        if m == 2:
            return PartitionSample(size, self.finish(2, size, 0, within))
        cand, w, cw = self.first_weights(size)
        i = int(np.searchsorted(cw, within, side="right"))
        if i >= len(cand):
            raise ConsistencyError(f"rank outside class of size {size}")
        rem = within - (int(cw[i]) - int(w[i]))
        p = int(cand[i])
        return PartitionSample(size, (p,) + self.finish(m - 1, size - p, i, rem))


def unrank_partition(counts: CountTable, rank: int, table=None) -> PartitionSample:
    """Partition at a given rank in the (size, parts) lexicographic order."""
    return _Unranker(counts, table).unrank(rank)


# ---------------------------------------------------------------------------
# batched draws

def goldbach_sample_arrays(counts: CountTable, trials: int, rng):
    """Vectorized two-part draws: (sizes, smaller parts) int64 arrays."""
    if counts.m != 2:
        raise ValueError("need a two-part count table")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    table = counts.table
    if table is None:
        raise ValueError("count table carries no prime table")
    total = int(counts.prefix[counts.n])
    if total == 0:
        raise ValueError("count table is empty")
    ranks = rng.integers(0, total, size=trials)
    sizes = np.searchsorted(counts.prefix, ranks, side="right").astype(np.int64)
    within = (ranks - (counts.prefix[sizes] - counts.q[sizes])).astype(np.int64)
    isp = table.is_prime
    oprimes = table.primes[1:]
    small = np.empty(trials, dtype=np.int64)
    order = np.argsort(sizes, kind="stable")
    ssorted = sizes[order]
    cuts = np.flatnonzero(np.r_[True, ssorted[1:] != ssorted[:-1], True])
    for b, e in zip(cuts[:-1], cuts[1:]):
        s = int(ssorted[b])
        hi = np.searchsorted(oprimes, s // 2, side="right")
        ps = oprimes[:hi]
        valid = ps[isp[s - ps]]
        members = order[b:e]
        small[members] = valid[within[members]]
    return sizes, small


def mpart_sample_arrays(counts: CountTable, trials: int, rng, table=None):
    """Vectorized m-part draws: (sizes, parts) with parts of shape (trials, m)."""
    m = counts.m
    if trials < 1:
        raise ValueError("trials must be >= 1")
    unr = _Unranker(counts, table)
    total = int(counts.prefix[counts.n])
    if total == 0:
        raise ValueError("count table is empty")
    ranks = rng.integers(0, total, size=trials)
    sizes = np.searchsorted(counts.prefix, ranks, side="right").astype(np.int64)
    within = (ranks - (counts.prefix[sizes] - counts.q[sizes])).astype(np.int64)
    parts = np.empty((trials, m), dtype=np.int64)
    order = np.argsort(sizes, kind="stable")
    ssorted = sizes[order]
    cuts = np.flatnonzero(np.r_[True, ssorted[1:] != ssorted[:-1], True])
    for b, e in zip(cuts[:-1], cuts[1:]):
        s = int(ssorted[b])
        members = order[b:e]
        if m == 2:
            hi = np.searchsorted(unr.oprimes, s // 2, side="right")
            ps = unr.oprimes[:hi]
            valid = ps[unr.isp[s - ps]]
            p1 = valid[within[members]]
            parts[members, 0] = p1
            parts[members, 1] = s - p1
            continue
        cand, w, cw = unr.first_weights(s)
        ix = np.searchsorted(cw, within[members], side="right")
        rem = within[members] - (cw[ix] - w[ix])
        p1 = cand[ix]
        for t, i, p, r in zip(members, ix, p1, rem):
            parts[t, 0] = p
            parts[t, 1:] = unr.finish(m - 1, s - int(p), int(i), int(r))
    return sizes, parts


def sample_goldbach(counts: CountTable, rng) -> PartitionSample:
    """One uniform two-part draw from the table's full range."""
    sizes, small = goldbach_sample_arrays(counts, 1, rng)
    s, p = int(sizes[0]), int(small[0])
    return PartitionSample(s, (p, s - p))


def sample_mpart(counts: CountTable, table, rng) -> PartitionSample:
    """One uniform m-part draw from the table's full range."""
    sizes, parts = mpart_sample_arrays(counts, 1, rng, table)
    return PartitionSample(int(sizes[0]), tuple(int(p) for p in parts[0]))


def draw_goldbach_samples(counts: CountTable, trials: int, rng):
    sizes, small = goldbach_sample_arrays(counts, trials, rng)
    return [
        PartitionSample(int(s), (int(p), int(s - p))) for s, p in zip(sizes, small)
    ]


def draw_mpart_samples(counts: CountTable, trials: int, rng, table=None):
    sizes, parts = mpart_sample_arrays(counts, trials, rng, table)
    return [
        PartitionSample(int(s), tuple(int(p) for p in row))
        for s, row in zip(sizes, parts)
    ]


# ---------------------------------------------------------------------------
# goodness of fit

def ks_statistic(samples, n_scale, F, reference: str = "") -> KsReport:
    """Two-sided Kolmogorov-Smirnov distance of sampled sizes to a CDF.

    samples is a list of PartitionSample or an array of sizes; n_scale
    rescales sizes into [0, 1]. When F exposes at_sizes it is a purely
    atomic CDF on the integers of [0, n_scale], both CDFs are flat
    between atoms, and the supremum is the atomwise max |F_T(z) - F(z)|;
    the order-statistic formula would charge a full atom of reference
    mass on the left side and overstate D at coarse scales. Continuous
    references keep the classical form.
    """
    if hasattr(samples, "dtype"):
        sizes = np.asarray(samples, dtype=np.int64)
    else:
        sizes = np.array([s.size for s in samples], dtype=np.int64)
    T = len(sizes)
    if T < 1:
        raise ValueError("need at least one sample")
    if n_scale <= 0:
        raise ValueError("n_scale must be positive")
    ssorted = np.sort(sizes)
    if hasattr(F, "at_sizes"):
        zs = np.arange(int(n_scale) + 1, dtype=np.int64)
        emp = np.searchsorted(ssorted, zs, side="right") / T
        D = float(np.max(np.abs(emp - F.at_sizes(zs))))
    else:
        Fx = np.array([F(x) for x in ssorted / n_scale], dtype=np.float64)
        i = np.arange(1, T + 1, dtype=np.float64)
        D = max(float(np.max(i / T - Fx)), float(np.max(Fx - (i - 1.0) / T)))
    name = reference or type(F).__name__
    return KsReport(T=T, D=D, threshold=KS_COEFF / math.sqrt(T), alpha=KS_ALPHA, reference=name)


# ---------------------------------------------------------------------------
# output

def write_samples_csv(samples, path: str) -> None:
    if not samples:
        raise ValueError("no samples to write")
    m = len(samples[0].parts)
    with open(path, "w", newline="") as fh:
        fh.write("size," + ",".join(f"part_{j}" for j in range(1, m + 1)) + "\n")
        for s in samples:
            fh.write(f"{s.size}," + ",".join(str(p) for p in s.parts) + "\n")


def write_ks_json(report: KsReport, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(ks_report_dict(report), fh)
        fh.write("\n")


def ks_report_dict(report: KsReport) -> dict:
    return {
        "T": report.T,
        "D": report.D,
        "threshold": report.threshold,
        "alpha": report.alpha,
        "reference": report.reference,
    }
