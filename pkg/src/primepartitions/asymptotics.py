"""Numeric trend checks against the asymptotic laws of the counting functions.

Every check reports ratio = computed / predicted, where predicted is the
leading-order law. Convergence is O(1/log n) throughout, so downstream
tolerances are trend brackets, not tight equalities.

A note on constants. The laws used here are the ones the computed tables
actually converge to, each obtainable from the Karamata coefficient-sum
template below applied to the relevant generating function:

* cumulative two-part count over sums <= 2n: law n^2 / log^2 n
  (unordered pairs; the ordered-pair convolution carries twice this mass);
* cumulative m-part count over sums <= n: law n^m / ((m!)^2 log^m n)
  (one m! from the Bell-series normalization, one from the Karamata
  Gamma factor).

Ratios under these normalizations tend to 1 from above, empirically like
1 + 2/log n for the two-part case.
"""

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .counts import CountTable, q_total_table, q2_table, qm_table_dp, summatory
from .primes import PrimeTable, sieve_upto

C2_REFERENCE = 0.6601618158  # twin prime constant, 10 digits
LI2_REL_TOL = 1e-9
EXP_SUM_CUTOFF_FACTOR = 40  # e^{-pt} < 1e-16 beyond p = 40/t


@dataclass(frozen=True)
class AsymptoticLaw:
    """Karamata coefficient-sum template for g(x) ~ (1-x)^{-rho} L(1/(1-x))
    with L(t) = 1/log^rho t: the partial coefficient sums grow like
    n^rho L(n) / Gamma(rho+1)."""

    rho: int
    r: float = 1.0
    L: str = "1/log^rho"

    def __post_init__(self):
        if not 2 <= self.rho <= 8:
            raise ValueError("exponent rho must lie in [2, 8]")

    @property
    def gamma_factor(self) -> int:
        return math.factorial(self.rho)

    def coefficient_sum_estimate(self, n: int) -> float:
        return n**self.rho / (self.gamma_factor * math.log(n) ** self.rho)


@dataclass
class AsymptoticReport:
    check: str
    params: dict
    rows: list = field(default_factory=list)  # (scale, computed, predicted, ratio)
    timestamp: str = ""
    provenance: str = ""

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = time.strftime("%Y-%m-%dT%H:%M:%S")
        if not self.provenance:
            key = f"{self.check}:{sorted(self.params.items())}"
            self.provenance = hashlib.sha1(key.encode()).hexdigest()[:12]

    def add(self, scale, computed, predicted):
        if not predicted > 0:
            raise ValueError("predicted value must be positive")
        self.rows.append((scale, computed, predicted, computed / predicted))

    def ratios(self):
        return [row[3] for row in self.rows]


@dataclass(frozen=True)
class HlPrediction:
    n: int
    singular_factor: float
    li2_integral: float
    predicted: float


# ---------------------------------------------------------------------------
# ratio checks

def goldbach_sum_ratio(counts: CountTable, n: int) -> float:
    """Cumulative two-part count over sums <= 2n against n^2 / log^2 n."""
    if counts.m != 2:
        raise ValueError("need a two-part count table")
    if 2 * n > counts.n:
        raise ValueError(f"2n = {2 * n} exceeds table range {counts.n}")
    if n < 16:
        raise ValueError("n must be >= 16")
    return summatory(counts, 2 * n) * math.log(n) ** 2 / n**2


def mpart_sum_ratio(counts: CountTable, n: int) -> float:
    """Cumulative m-part count over sums <= n against n^m / ((m!)^2 log^m n).

    The two-part case defers to goldbach_sum_ratio on the half range, which
    is the same quantity under that check's normalization.
    """
    if counts.m == 2:
        if n % 2:
            raise ValueError("two-part delegation needs an even range")
        return goldbach_sum_ratio(counts, n // 2)
    if counts.m < 2:
        raise ValueError("part count must be >= 2")
    if n > counts.n:
        raise ValueError(f"n = {n} exceeds table range {counts.n}")
    if n < 16:
        raise ValueError("n must be >= 16")
    m = counts.m
    fact2 = math.factorial(m) ** 2
    return summatory(counts, n) * fact2 * math.log(n) ** m / n**m


def exp_prime_sum_ratio(table: PrimeTable, t: float) -> float:
    """Ratio of sum_{p odd prime} e^{-pt} to its law 1/(t log(1/t)).

    The sum is truncated where terms drop below 1e-16; raising the cutoff
    moves the result by less than 1e-12 relative. Compensated summation in
    descending term order keeps rounding under the same bar.
    """
    if not 0 < t < 1 / math.e:
        raise ValueError(f"t = {t} outside (0, 1/e)")
    cutoff = math.ceil(EXP_SUM_CUTOFF_FACTOR / t)
    if cutoff > table.limit:
        raise ValueError(f"need primes to {cutoff}, table limit {table.limit}")
    hi = table.pi(cutoff)
    ps = table.primes[1:hi].astype(np.float64)
    total = math.fsum(np.exp(-t * ps).tolist())
    return total * t * math.log(1 / t)


def twin_prime_constant(table: PrimeTable, P: int):
    """Partial product prod_{3 <= p <= P} (1 - 1/(p-1)^2) and a tail bound.

    Returns (value, tail_bound) with tail_bound an upper bound on
    |log(limit/value)| from sum_{p > P} 1/(p-1)^2 <= 2/(P-1), so
    value * exp(-tail_bound) <= limit <= value.
    """
    if P > table.limit:
        raise ValueError(f"P = {P} exceeds table limit {table.limit}")
    if P < 10**3:
        raise ValueError("P must be >= 1000")
    hi = table.pi(P)
    ps = table.primes[1:hi].astype(np.float64)
    log_value = math.fsum(np.log1p(-1.0 / (ps - 1.0) ** 2).tolist())
    return math.exp(log_value), 2.0 / (P - 1)


def _li2(n: float, rel_tol: float = LI2_REL_TOL) -> float:
    """Adaptive Simpson quadrature of 1/log^2 u over [2, n]."""

    def f(u):
        return 1.0 / math.log(u) ** 2

    def simpson(a, b, fa, fm, fb):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol):
        mid = 0.5 * (a + b)
        lm, rm = 0.5 * (a + mid), 0.5 * (mid + b)
        flm, frm = f(lm), f(rm)
        left = simpson(a, mid, fa, flm, fm)
        right = simpson(mid, b, fm, frm, fb)
        if abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return rec(a, mid, fa, flm, fm, left, tol / 2) + rec(mid, b, fm, frm, fb, right, tol / 2)

    if n <= 2:
        return 0.0
    a, b = 2.0, float(n)
    mid = 0.5 * (a + b)
    fa, fm, fb = f(a), f(mid), f(b)
    whole = simpson(a, b, fa, fm, fb)
    return rec(a, b, fa, fm, fb, whole, rel_tol * abs(whole))


def _odd_prime_divisors(table: PrimeTable, n: int):
    if n > table.limit**2:
        raise ValueError(f"{n} too large to factor with primes to {table.limit}")
    divisors = []
    x = n
    while x % 2 == 0:
        x //= 2
    for p in table.primes[1:]:
        p = int(p)
        if p * p > x:
            break
        if x % p == 0:
            divisors.append(p)
            while x % p == 0:
                x //= p
    if x > 1:
        divisors.append(x)
    return divisors


def hl_prediction(table: PrimeTable, n: int, c2: float) -> HlPrediction:
    """Hardy-Littlewood two-part prediction 2 c2 (prod (p-1)/(p-2)) int_2^n du/log^2 u.

    The singular factor runs over the odd prime divisors of n.
    """
    if n % 2 or n < 6:
        raise ValueError(f"n must be even and >= 6, got {n}")
    singular = 1.0
    for p in _odd_prime_divisors(table, n):
        singular *= (p - 1) / (p - 2)
    integral = _li2(n)
    return HlPrediction(n, singular, integral, 2.0 * c2 * singular * integral)


def hardy_ramanujan_ratio(qtotal: np.ndarray, n: int) -> float:
    """log Q(n) against 2 pi sqrt(n / (3 log n)); Q from q_total_table."""
    if n >= len(qtotal):
        raise ValueError(f"n = {n} outside table range {len(qtotal) - 1}")
    value = int(qtotal[n])
    if value == 0:
        raise ValueError(f"Q({n}) = 0; ratio undefined")
    return math.log(value) / (2 * math.pi * math.sqrt(n / (3 * math.log(n))))


# ---------------------------------------------------------------------------
# report builders (shared by the CLI and the acceptance suite)

def check_goldbach_sum(points, counts: CountTable = None, table: PrimeTable = None) -> AsymptoticReport:
    points = sorted(int(p) for p in points)
    if counts is None:
        if table is None or table.limit < 2 * points[-1]:
            table = sieve_upto(2 * points[-1])
        counts = q2_table(table, points[-1])
    report = AsymptoticReport("theorem1", {"points": points})
    for n in points:
        report.add(n, summatory(counts, 2 * n), n**2 / math.log(n) ** 2)
    return report


def check_mpart_sum(points, m: int = 3, counts: CountTable = None, table: PrimeTable = None) -> AsymptoticReport:
    points = sorted(int(p) for p in points)
    if counts is None:
        if table is None or table.limit < points[-1]:
            table = sieve_upto(points[-1])
        counts = qm_table_dp(table, m, points[-1])
    m = counts.m
    report = AsymptoticReport("theorem3", {"points": points, "m": m})
    fact2 = math.factorial(m) ** 2
    for n in points:
        report.add(n, summatory(counts, n), n**m / (fact2 * math.log(n) ** m))
    return report


def check_exp_prime_sum(points, table: PrimeTable = None) -> AsymptoticReport:
    points = sorted(float(t) for t in points)
    cutoff = math.ceil(EXP_SUM_CUTOFF_FACTOR / min(points))
    if table is None or table.limit < cutoff:
        table = sieve_upto(cutoff)
    report = AsymptoticReport("lemma2", {"points": points})
    for t in sorted(points, reverse=True):  # decreasing t, toward the limit
        ratio = exp_prime_sum_ratio(table, t)
        predicted = 1.0 / (t * math.log(1 / t))
        report.add(t, ratio * predicted, predicted)
    return report


def check_hardy_ramanujan(points, table: PrimeTable = None, qtotal: np.ndarray = None) -> AsymptoticReport:
    points = sorted(int(p) for p in points)
    if qtotal is None:
        if table is None or table.limit < points[-1]:
            table = sieve_upto(points[-1])
        qtotal = q_total_table(table, points[-1])
    report = AsymptoticReport("hardy-ramanujan", {"points": points})
    for n in points:
        denom = 2 * math.pi * math.sqrt(n / (3 * math.log(n)))
        report.add(n, math.log(int(qtotal[n])), denom)
    return report


CHECKS = {
    "theorem1": check_goldbach_sum,
    "theorem3": check_mpart_sum,
    "lemma2": check_exp_prime_sum,
    "hardy-ramanujan": check_hardy_ramanujan,
}


def write_report_csv(report: AsymptoticReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("scale,computed,predicted,ratio\n")
        for scale, computed, predicted, ratio in report.rows:
            fh.write(f"{scale!r},{computed!r},{predicted!r},{ratio!r}\n")


def write_report_json(report: AsymptoticReport, path: str) -> None:
    import json

    doc = {
        "check": report.check,
        "params": report.params,
        "timestamp": report.timestamp,
        "provenance": report.provenance,
        "rows": [list(row) for row in report.rows],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")
