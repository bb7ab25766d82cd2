"""Exact truncated power series over nonnegative integers.

Coefficients are exact Python integers, bounded by the 128-bit unsigned
range; anything larger raises instead of wrapping. Products use big-integer
Kronecker substitution (one GMP multiply) above a small degree, schoolbook
below it, and the two paths are cross-checked by the test suite.

The series of interest here is the odd-prime indicator series
sum_{p odd prime} z^p, its power substitutions, and the complete Bell
polynomial combination whose coefficients are m! times the number of
partitions into exactly m odd prime parts.
"""

import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from .errors import CoefficientOverflowError, ConsistencyError
from .primes import PrimeTable, odd_prime_indicator

SCHOOLBOOK_MAX_DEGREE = 512
BELL_M_CAP = 8

_U128_MAX = (1 << 128) - 1


class TruncatedSeries:
    """Dense exact coefficients c_0..c_D of a power series truncated at D."""

    __slots__ = ("degree_bound", "coeffs")

    def __init__(self, degree_bound: int, coeffs):
        if degree_bound < 1:
            raise ValueError("degree bound must be positive")
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != degree_bound + 1:
            raise ValueError(f"need {degree_bound + 1} coefficients, got {len(coeffs)}")
        for k, c in enumerate(coeffs):
            if c < 0:
                raise ValueError(f"negative coefficient at index {k}")
            if c > _U128_MAX:
                raise CoefficientOverflowError(f"coefficient at index {k} exceeds 128 bits")
        self.degree_bound = degree_bound
        self.coeffs = coeffs

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.degree_bound == other.degree_bound
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.degree_bound, self.coeffs))

    def __repr__(self):
        nz = sum(1 for c in self.coeffs if c)
        return f"TruncatedSeries(D={self.degree_bound}, nonzero={nz})"


def odd_prime_series(table: PrimeTable, D: int) -> TruncatedSeries:
    """The indicator series with c_k = 1 iff k is an odd prime."""
    ind = odd_prime_indicator(table, D)
    return TruncatedSeries(D, ind.astype(np.int64).tolist())


def substitute_power(s: TruncatedSeries, j: int) -> TruncatedSeries:
    """Substitute z -> z^j: coefficient c_k moves to index j*k, rest truncated."""
    if j < 1:
        raise ValueError("power must be >= 1")
    if j == 1:
        return TruncatedSeries(s.degree_bound, s.coeffs)
    D = s.degree_bound
    out = [0] * (D + 1)
    for k in range(D // j + 1):
        out[j * k] = s.coeffs[k]
    return TruncatedSeries(D, out)


def _mul_schoolbook(ca, cb, D):
    out = [0] * (D + 1)
    for i, a in enumerate(ca):
        if not a:
            continue
        for k in range(min(len(cb), D + 1 - i)):
            b = cb[k]
            if b:
                out[i + k] += a * b
    return out


def _mul_kronecker(ca, cb, D):
    # pack coefficients into w-byte slots; one exact GMP multiply does the
    # whole convolution. Slot width is sized from a coefficient bound so
    # neighboring slots never carry into each other.
    bound = (D + 1) * max(ca) * max(cb)
    words = max(1, -(-bound.bit_length() // 64))
    w = 8 * words
    a = b"".join(c.to_bytes(w, "little") for c in ca)
    b = b"".join(c.to_bytes(w, "little") for c in cb)
    prod = int(gmpy2.mpz(int.from_bytes(a, "little")) * gmpy2.mpz(int.from_bytes(b, "little")))
    need = (D + 1) * w
    raw = prod.to_bytes(max(need, (prod.bit_length() + 7) // 8), "little")[:need]
    slots = np.frombuffer(raw, dtype="<u8").reshape(D + 1, words)
    if words == 1:
        return slots[:, 0].tolist()
    acc = slots[:, -1].astype(object)
    for col in range(words - 2, -1, -1):
        acc = (acc << 64) + slots[:, col]
    return acc.tolist()


def multiply(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Exact Cauchy product truncated at the shared degree bound."""
    if a.degree_bound != b.degree_bound:
        raise ValueError(
            f"degree bounds differ: {a.degree_bound} vs {b.degree_bound}"
        )
    D = a.degree_bound
    if D <= SCHOOLBOOK_MAX_DEGREE:
        out = _mul_schoolbook(a.coeffs, b.coeffs, D)
    else:
        out = _mul_kronecker(a.coeffs, b.coeffs, D)
    if max(out) > _U128_MAX:
        k = next(i for i, c in enumerate(out) if c > _U128_MAX)
        raise CoefficientOverflowError(f"product coefficient at index {k} exceeds 128 bits")
    return TruncatedSeries(D, out)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.degree_bound != b.degree_bound:
        raise ValueError("degree bounds differ")
    return TruncatedSeries(a.degree_bound, [x + y for x, y in zip(a.coeffs, b.coeffs)])


def _scale(s: TruncatedSeries, c: int) -> TruncatedSeries:
    return TruncatedSeries(s.degree_bound, [c * x for x in s.coeffs])


# ---------------------------------------------------------------------------
# complete Bell polynomial machinery

@dataclass(frozen=True)
class BellTermSpec:
    """One term of the complete Bell polynomial B_m.

    exponents = (k_1, ..., k_m) with sum j*k_j = m; multiplier is the exact
    integer m! / (k_1! ... k_m! * (1!)^{k_1} ... (m!)^{k_m}).
    """

    m: int
    exponents: tuple
    multiplier: int


def bell_terms(m: int):
    """All BellTermSpec for B_m, one per partition of m (22 terms at m=8)."""
    terms = []

    def rec(j, remaining, ks):
        if j == 0:
            if remaining == 0:
                exps = tuple(reversed(ks))
                num = math.factorial(m)
                den = 1
                for jj, kj in enumerate(exps, start=1):
                    den *= math.factorial(kj) * math.factorial(jj) ** kj
                mult, rem = divmod(num, den)
                if rem:  # cannot happen: Bell multipliers are integers
                    raise ConsistencyError(f"non-integer Bell multiplier for {exps}")
                terms.append(BellTermSpec(m, exps, mult))
            return
        for kj in range(remaining // j + 1):
            rec(j - 1, remaining - j * kj, ks + [kj])

    rec(m, m, [])
    return terms


def bell_count_series(table: PrimeTable, m: int, D: int, *, m_cap: int = BELL_M_CAP) -> TruncatedSeries:
    """Series whose coefficient at z^k is m! times the count of partitions
    of k into exactly m odd prime parts.

    Built as the complete Bell polynomial B_m(beta_1, ..., beta_m) with
    beta_j = (j-1)! * s(z^j), s the odd-prime indicator series. The (j-1)!
    factor comes from differentiating -log(1 - x z^p) j times in x.
    """
    if not 1 <= m <= m_cap:
        raise ValueError(f"part count {m} outside [1, {m_cap}]")
    base = odd_prime_series(table, D)
    betas = {}
    for j in range(1, m + 1):
        betas[j] = _scale(substitute_power(base, j), math.factorial(j - 1))
    total = TruncatedSeries(D, [0] * (D + 1))
    for term in bell_terms(m):
        prod = None
        for j, kj in enumerate(term.exponents, start=1):
            for _ in range(kj):
                prod = betas[j] if prod is None else multiply(prod, betas[j])
        if prod is None:  # all exponents zero only when m = 0, excluded
            continue
        total = add(total, _scale(prod, term.multiplier))
    return total


def verify_pair_identity(table: PrimeTable, D: int, q2counts):
    """Check, coefficient by coefficient, that s^2(z) + s(z^2) matches twice
    the two-part count table, for every index k <= D.

    q2counts must come from an independent counting path. Returns
    (True, None) or (False, (k, series_value, 2*count)) at the smallest
    mismatch.
    """
    if q2counts.m != 2:
        raise ValueError("need a two-part count table")
    if D > q2counts.n:
        raise ValueError(f"degree {D} exceeds count table range {q2counts.n}")
    base = odd_prime_series(table, D)
    lhs = add(multiply(base, base), substitute_power(base, 2))
    for k in range(D + 1):
        rhs = 2 * int(q2counts.q[k])
        if lhs.coeffs[k] != rhs:
            return False, (k, lhs.coeffs[k], rhs)
    return True, None


def write_series_csv(s: TruncatedSeries, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("index,coefficient\n")
        for k, c in enumerate(s.coeffs):
            fh.write(f"{k},{c}\n")
