"""Exact counting, series identities, asymptotic checks, and uniform
sampling for partitions of integers into odd prime parts."""

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticLaw,
    AsymptoticReport,
    HlPrediction,
    exp_prime_sum_ratio,
    goldbach_sum_ratio,
    hardy_ramanujan_ratio,
    hl_prediction,
    mpart_sum_ratio,
    twin_prime_constant,
)
from .counts import (
    CountTable,
    build_count_table,
    cached_count_table,
    q2_naive,
    q2_table,
    q2_table_naive,
    q_total_table,
    qm_table_bell,
    qm_table_dp,
    summatory,
)
from .errors import CoefficientOverflowError, ConsistencyError, ResourceLimitError
from .primes import PrimeTable, cached_sieve, odd_prime_indicator, sieve_upto
from .sampler import (
    DEFAULT_SEED,
    ExactSizeCdf,
    KsReport,
    LimitCdf,
    PartitionSample,
    draw_goldbach_samples,
    draw_mpart_samples,
    exact_size_cdf,
    goldbach_sample_arrays,
    ks_statistic,
    mpart_sample_arrays,
    sample_goldbach,
    sample_mpart,
    unrank_partition,
)
from .series import (
    TruncatedSeries,
    bell_count_series,
    bell_terms,
    multiply,
    odd_prime_series,
    substitute_power,
    verify_pair_identity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
