"""Command line front end (`pp`).

Exit codes: 0 success, 1 argument errors, 2 verification failure (an
identity mismatch or a statistical fit rejection), 3 resource limits.
Every error also prints a one-line diagnostic to stderr.

Cache lookups resolve --cache first, then the PP_CACHE_DIR environment
variable; with neither, nothing is persisted.
"""

import argparse
import json
import math
import os
import statistics
import sys
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    AsymptoticReport,
    CHECKS,
    hl_prediction,
    twin_prime_constant,
    write_report_csv,
    write_report_json,
)
from .counts import (
    build_count_table,
    cached_count_table,
    q2_table,
    q2_table_naive,
    qm_table_bell,
    qm_table_dp,
    write_count_csv,
    write_count_json,
)
from .errors import CoefficientOverflowError, ConsistencyError, ResourceLimitError
from .primes import cached_sieve, sieve_upto
from .sampler import (
    DEFAULT_SEED,
    ExactSizeCdf,
    LimitCdf,
    PartitionSample,
    goldbach_sample_arrays,
    ks_report_dict,
    ks_statistic,
    mpart_sample_arrays,
    write_samples_csv,
)
from .series import verify_pair_identity

PATH_ALIASES = {"conv": "convolution"}
NAIVE_VERIFY_MAX = 20_000  # above this the pair oracle switches to convolution


@dataclass
class RunConfig:
    subcommand: str
    limit: int = 0
    m: int = 2
    degree: int = 0
    seed: int = DEFAULT_SEED
    trials: int = 0
    prime_limit: int = 10**6
    out: str = ""
    fmt: str = "csv"
    cache_dir: str = ""
    verbosity: int = 0
    extras: dict = field(default_factory=dict)


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pp", description="exact partition counts into odd prime parts")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)

    s = sub.add_parser("sieve", help="build (and optionally cache) a prime table")
    s.add_argument("--limit", type=int, required=True)
    s.add_argument("--cache", help="cache directory")
    s.add_argument("--out", help="write the primes as CSV (index,prime)")

    c = sub.add_parser("count", help="table of m-part counts up to a limit")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--limit", type=int, required=True)
    c.add_argument("--path", choices=["conv", "bell", "dp", "naive"])
    c.add_argument("--out")
    c.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
    c.add_argument("--cache", help="cache directory")

    v = sub.add_parser("verify-identity", help="cross-check independent count paths")
    v.add_argument("--m", type=int, required=True)
    v.add_argument("--degree", type=int, required=True)
    v.add_argument("--cache", help="cache directory")
    v.add_argument("--out", help="write a JSON verdict")

    a = sub.add_parser("asym", help="ratio of computed quantities to asymptotic laws")
    a.add_argument("--check", choices=sorted(CHECKS), required=True)
    a.add_argument("--points", required=True, help="comma-separated scales")
    a.add_argument("--m", type=int, default=3)
    a.add_argument("--out")

    h = sub.add_parser("hl", help="two-part counts against the pair-density prediction")
    h.add_argument("--from", dest="from_", type=int, required=True)
    h.add_argument("--to", type=int, required=True)
    h.add_argument("--c2-prime-limit", dest="prime_limit", type=int, default=10**6)
    h.add_argument("--out")

    z = sub.add_parser("c2", help="twin prime constant partial product")
    z.add_argument("--prime-limit", dest="prime_limit", type=int, required=True)
    z.add_argument("--out", help="write a JSON summary")

    p = sub.add_parser("sample", help="uniform draws from all partitions in range")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", dest="limit", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.add_argument("--ks", choices=["limit", "exact"], help="test sizes against a CDF")

    return parser


def _config_from(ns) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand)
    for name in ("limit", "m", "degree", "seed", "trials", "prime_limit", "fmt"):
        value = getattr(ns, name, None)
        if value is not None:
            setattr(cfg, name, value)
    cfg.out = getattr(ns, "out", None) or ""
    cfg.cache_dir = getattr(ns, "cache", None) or os.environ.get("PP_CACHE_DIR", "")
    for name in ("check", "points", "ks", "path", "from_", "to"):
        if getattr(ns, name, None) is not None:
            cfg.extras[name] = getattr(ns, name)
    for name in ("limit", "m", "degree", "trials", "prime_limit"):
        value = getattr(cfg, name)
        if value < 0:
            raise _ArgumentError(f"{name} must be positive")
    return cfg


def _load_table(limit: int, cache_dir: str):
    if cache_dir:
        return cached_sieve(limit, cache_dir)
    return sieve_upto(limit)


def _cmd_sieve(cfg: RunConfig) -> int:
    table = _load_table(cfg.limit, cfg.cache_dir)
    print(f"primes to {cfg.limit}: {len(table.primes)}")
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write("index,prime\n")
            for i, p in enumerate(table.primes):
                fh.write(f"{i},{p}\n")
        print(f"wrote {cfg.out}", file=sys.stderr)
    return 0


def _cmd_count(cfg: RunConfig) -> int:
    n, m = cfg.limit, cfg.m
    path = PATH_ALIASES.get(cfg.extras.get("path"), cfg.extras.get("path"))
    table = _load_table(max(n + 2, 8), cfg.cache_dir)
    if cfg.cache_dir and path is None:
        counts = cached_count_table(table, m, n, cache_dir=cfg.cache_dir)
    else:
        counts = build_count_table(table, m, n, path=path)
    writer = write_count_csv if cfg.fmt == "csv" else write_count_json
    if cfg.out:
        writer(counts, cfg.out)
        print(f"wrote {cfg.out}", file=sys.stderr)
    else:
        writer(counts, sys.stdout)
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    m, D = cfg.m, cfg.degree
    if m == 2:
        table = _load_table(D + 2, cfg.cache_dir)
        half = (D + 1) // 2
        if D <= NAIVE_VERIFY_MAX:
            oracle = q2_table_naive(table, half)
        else:
            oracle = q2_table(table, half)
        ok, detail = verify_pair_identity(table, D, oracle)
        label = f"lemma1: OK up to {D}"
        if not ok:
            k, lhs, rhs = detail
            label = f"lemma1: MISMATCH at k={k}: series {lhs} vs doubled count {rhs}"
    else:
        table = _load_table(max(D, 8), cfg.cache_dir)
        a = qm_table_bell(table, m, D)
        b = qm_table_dp(table, m, D)
        bad = [k for k in range(D + 1) if a.q[k] != b.q[k]]
        ok = not bad
        if ok:
            label = f"bell-vs-dp (m={m}): OK up to {D}"
        else:
            k = bad[0]
            label = f"bell-vs-dp (m={m}): MISMATCH at k={k}: {a.q[k]} vs {b.q[k]}"
    print(label)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"m": m, "degree": D, "ok": ok, "summary": label}, fh)
            fh.write("\n")
        print(f"wrote {cfg.out}", file=sys.stderr)
    return 0 if ok else 2


def _parse_points(raw: str, as_float: bool):
    try:
        if as_float:
            return [float(x) for x in raw.split(",") if x]
        return [int(x) for x in raw.split(",") if x]
    except ValueError:
        raise _ArgumentError(f"bad --points value: {raw!r}")


def _write_report(report: AsymptoticReport, out: str) -> None:
    if out.endswith(".json"):
        write_report_json(report, out)
    else:
        write_report_csv(report, out)
    print(f"wrote {out}", file=sys.stderr)


def _print_report(report: AsymptoticReport) -> None:
    print(f"check {report.check} [{report.provenance}]")
    for scale, computed, predicted, ratio in report.rows:
        print(f"  scale {scale}: computed {computed} predicted {predicted:.6g} ratio {ratio:.6f}")


def _cmd_asym(cfg: RunConfig) -> int:
    check = cfg.extras["check"]
    points = _parse_points(cfg.extras["points"], as_float=(check == "lemma2"))
    if not points:
        raise _ArgumentError("--points is empty")
    if check == "theorem3":
        report = CHECKS[check](points, m=cfg.m)
    else:
        report = CHECKS[check](points)
    _print_report(report)
    if cfg.out:
        _write_report(report, cfg.out)
    return 0


def _cmd_hl(cfg: RunConfig) -> int:
    A, B = cfg.extras["from_"], cfg.extras["to"]
    if A > B:
        raise _ArgumentError("--from must not exceed --to")
    A = A + (A % 2)
    if A < 6:
        raise _ArgumentError("range must start at 6 or above")
    P = cfg.prime_limit
    table = _load_table(max(P, B + 2), cfg.cache_dir)
    counts = q2_table(table, B // 2 + 1)
    c2, _ = twin_prime_constant(table, P)
    report = AsymptoticReport("hl", {"from": A, "to": B, "c2_prime_limit": P})
    for n in range(A, B + 1, 2):
        pred = hl_prediction(table, n, c2)
        report.add(n, int(counts.q[n]), pred.predicted)
    med = statistics.median(report.ratios())
    print(f"hl ratio over {len(report.rows)} even n in [{A}, {B}]: median {med:.4f}")
    if cfg.out:
        _write_report(report, cfg.out)
    return 0


def _cmd_c2(cfg: RunConfig) -> int:
    P = cfg.prime_limit
    table = _load_table(P, cfg.cache_dir)
    value, tail = twin_prime_constant(table, P)
    print(f"c2 partial product to {P}: {value:.12f} (tail bound {tail:.3e})")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump({"prime_limit": P, "value": value, "tail_bound": tail}, fh)
            fh.write("\n")
        print(f"wrote {cfg.out}", file=sys.stderr)
    return 0


def _cmd_sample(cfg: RunConfig) -> int:
    m, n, trials = cfg.m, cfg.limit, cfg.trials
    rng = np.random.default_rng(cfg.seed)
    if m == 2:
        table = _load_table(2 * n, cfg.cache_dir)
        counts = q2_table(table, n)
        sizes, small = goldbach_sample_arrays(counts, trials, rng)
        parts_of = lambda i: (int(small[i]), int(sizes[i] - small[i]))
        scale = 2 * n
    else:
        table = _load_table(max(n, 8), cfg.cache_dir)
        counts = qm_table_dp(table, m, n)
        sizes, parts = mpart_sample_arrays(counts, trials, rng)
        parts_of = lambda i: tuple(int(p) for p in parts[i])
        scale = n
    if cfg.out:
        samples = [PartitionSample(int(sizes[i]), parts_of(i)) for i in range(trials)]
        write_samples_csv(samples, cfg.out)
        print(f"wrote {cfg.out}", file=sys.stderr)
    ks = cfg.extras.get("ks")
    if ks:
        F = LimitCdf(m) if ks == "limit" else ExactSizeCdf(counts)
        report = ks_statistic(sizes, scale, F, reference=ks)
        print(json.dumps(ks_report_dict(report)))
        return 2 if report.rejected else 0
    print(f"{trials} draws (m={m}, n={n}, seed={cfg.seed})")
    return 0


_DISPATCH = {
    "sieve": _cmd_sieve,
    "count": _cmd_count,
    "verify-identity": _cmd_verify,
    "asym": _cmd_asym,
    "hl": _cmd_hl,
    "c2": _cmd_c2,
    "sample": _cmd_sample,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if not ns.subcommand:
            raise _ArgumentError("a subcommand is required")
        cfg = _config_from(ns)
        return _DISPATCH[cfg.subcommand](cfg)
    except _ArgumentError as exc:
        print(f"pp: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"pp: error: {exc}", file=sys.stderr)
        return 1
    except (ResourceLimitError, CoefficientOverflowError) as exc:
        print(f"pp: resource limit: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"pp: verification failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
