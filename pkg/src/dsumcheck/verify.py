"""Sweep identity records over ``n`` and their bindings, and report the outcome.

Work is split into ``(record, n)`` slices.  Each slice evaluates every
binding at that ``n`` in order and stops at its first failure; slices are
merged in ``n`` order, so a parallel run reports exactly what a sequential
run would.
"""

from __future__ import annotations

import fnmatch
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from . import dsl
from .catalog import IdentityRecord, ParamBinding, bindings, builtin_catalog, sort_key
from .exact import format_rational, rational

__all__ = [
    "PASS",
    "FAIL",
    "SKIPPED",
    "UnknownIdentity",
    "Counterexample",
    "VerificationReport",
    "check_identity",
    "run_suite",
    "select",
    "mutate",
    "reproduce",
    "brute_force_double_sum",
    "reports_to_json",
    "reports_from_json",
    "suite_passed",
]

PASS, FAIL, SKIPPED = "Pass", "Fail", "Skipped"


class UnknownIdentity(LookupError):
    """An id filter matched no catalog entry."""


@dataclass
class Counterexample:
    binding: ParamBinding
    n: int
    lhs_value: mpq
    rhs_value: mpq

    def to_json(self) -> dict:
        return {
            "binding": self.binding.to_json(),
            "n": self.n,
            "lhs_value": format_rational(self.lhs_value),
            "rhs_value": format_rational(self.rhs_value),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Counterexample":
        return cls(ParamBinding.from_json(data["binding"]), int(data["n"]),
                   rational(data["lhs_value"]), rational(data["rhs_value"]))


@dataclass
class VerificationReport:
    identity_id: str
    bindings_tested: int
    n_range: Tuple[int, int]
    status: str
    rng_seed: int
    counterexample: Optional[Counterexample] = None
    reason: Optional[str] = None
    wall_time: Optional[float] = None
    n_values: int = field(default=0)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "bindings_tested": self.bindings_tested,
            "n_range": list(self.n_range),
            "status": self.status,
            "reason": self.reason,
            "counterexample": self.counterexample.to_json() if self.counterexample else None,
            "wall_time": self.wall_time,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "VerificationReport":
        cx = data.get("counterexample")
        lo, hi = data["n_range"]
        return cls(data["identity_id"], data["bindings_tested"], (lo, hi), data["status"],
                   data["rng_seed"], Counterexample.from_json(cx) if cx else None,
                   data.get("reason"), data.get("wall_time"), hi - lo + 1)


@dataclass
class _Slice:
    n: int
    tested: int
    counterexample: Optional[Counterexample] = None
    skip_reason: Optional[str] = None


def _check_slice(record: IdentityRecord, n: int, seed: int) -> _Slice:
    lhs = dsl.compile_expr(record.lhs)
    rhs = dsl.compile_expr(record.rhs)
    tested = 0
    for binding in bindings(record, n, seed):
        env = binding.env(n)
        try:
            left, right = lhs(env), rhs(env)
        except dsl.EvalError as exc:
            return _Slice(n, tested, skip_reason=f"n={n}, {binding.describe()}: {exc}")
        tested += 1
        if left != right:
            return _Slice(n, tested, Counterexample(binding, n, left, right))
    return _Slice(n, tested)


def _assemble(record: IdentityRecord, seed: int, n_lo: int, n_hi: int,
              slices: Iterable[_Slice]) -> VerificationReport:
    tested = 0
    for sl in slices:
        tested += sl.tested
        if sl.counterexample is not None:
            return VerificationReport(record.id, tested, (n_lo, sl.n), FAIL, seed,
                                      sl.counterexample, n_values=sl.n - n_lo + 1)
        if sl.skip_reason is not None:
            return VerificationReport(record.id, tested, (n_lo, sl.n), SKIPPED, seed,
                                      reason=sl.skip_reason, n_values=sl.n - n_lo + 1)
    if tested == 0:
        return VerificationReport(record.id, 0, (n_lo, n_hi), SKIPPED, seed,
                                  reason="parameter domain produced no bindings",
                                  n_values=n_hi - n_lo + 1)
    return VerificationReport(record.id, tested, (n_lo, n_hi), PASS, seed,
                              n_values=n_hi - n_lo + 1)


def _n_bounds(record: IdentityRecord, n_max: Optional[int]) -> Tuple[int, int]:
    hi = record.max_n_default if n_max is None else n_max
    return record.min_n, hi


def check_identity(record: IdentityRecord, n_max: Optional[int] = None, seed: int = 42,
                   timings: bool = False) -> VerificationReport:
    """Verify ``record`` for ``n`` in ``[min_n, n_max]``; stop at the first failure.

    ``n_max`` defaults to the record's own bound.  A binding that trips a
    kernel precondition makes the report ``Skipped`` with the diagnostic.
    """
    lo, hi = _n_bounds(record, n_max)
    if hi < lo:
        raise ValueError(f"{record.id}: n_max={hi} is below min_n={lo}")
    start = time.perf_counter()

    def slices():
        for n in range(lo, hi + 1):
            sl = _check_slice(record, n, seed)
            yield sl
            if sl.counterexample is not None or sl.skip_reason is not None:
                return

    report = _assemble(record, seed, lo, hi, slices())
    if timings:
        report.wall_time = time.perf_counter() - start
    return report


def select(pattern: str, records: Optional[Sequence[IdentityRecord]] = None) -> List[IdentityRecord]:
    """Records whose id matches the glob ``pattern``, sorted by id."""
    pool = builtin_catalog() if records is None else records
    chosen = [r for r in pool if fnmatch.fnmatchcase(r.id, pattern)]
    if not chosen:
        raise UnknownIdentity(f"no identity matches {pattern!r}")
    return sorted(chosen, key=sort_key)


def _default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # not on Linux
        return os.cpu_count() or 1


def run_suite(pattern: str = "*", n_max_override: Optional[int] = None, seed: int = 42,
              jobs: Optional[int] = 1, records: Optional[Sequence[IdentityRecord]] = None,
              timings: bool = False) -> List[VerificationReport]:
    """Verify every record matching ``pattern``; reports come back sorted by id.

    An override below a record's ``min_n`` is raised to ``min_n``.  With
    ``jobs > 1`` slices run in worker processes; results are identical to
    ``jobs=1`` apart from ``wall_time``.
    """
    chosen = select(pattern, records)
    jobs = _default_jobs() if jobs is None or jobs <= 0 else jobs
    plan = []
    for rec in chosen:
        lo, hi = _n_bounds(rec, n_max_override)
        plan.append((rec, lo, max(lo, hi)))

    if jobs == 1:
        out = []
        for rec, lo, hi in plan:
            out.append(check_identity(rec, hi, seed, timings))
        return out

    reports = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = []
        for rec, lo, hi in plan:
            start = time.perf_counter()
            futures.append((rec, lo, hi, start,
                            [pool.submit(_check_slice, rec, n, seed) for n in range(lo, hi + 1)]))
        for rec, lo, hi, start, futs in futures:
            report = _assemble(rec, seed, lo, hi, (f.result() for f in futs))
            if timings:
                report.wall_time = time.perf_counter() - start
            reports.append(report)
    return reports


def suite_passed(reports: Iterable[VerificationReport]) -> bool:
    return all(r.passed for r in reports)


def mutate(record: IdentityRecord, delta=1) -> IdentityRecord:
    """The record with ``delta`` added to its right side (a deliberately false identity)."""
    return record.mutated(delta)


def reproduce(record: IdentityRecord, cx: Counterexample) -> Tuple[mpq, mpq]:
    """Re-evaluate both sides at a counterexample's ``n`` and binding."""
    env = cx.binding.env(cx.n)
    return dsl.compile_expr(record.lhs)(env), dsl.compile_expr(record.rhs)(env)


def brute_force_double_sum(a: Sequence, b: Sequence, n: int) -> Tuple[mpq, mpq, mpq]:
    """The two double sums of the master identities and their common right side.

    Plain nested loops over 1-based terms ``a[1..n]`` and ``b[1..n]``;
    index 0 is never read.
    """
    first = mpq(0)
    for p in range(n):
        for k in range(1, n - p + 1):
            first += a[p + k] * b[k]
    second = mpq(0)
    for k in range(1, n + 1):
        for j in range(k):
            second += a[n - j] * b[k - j]
    common = mpq(0)
    for k in range(1, n + 1):
        inner = mpq(0)
        for j in range(1, k + 1):
            inner += b[j]
        common += a[k] * inner
    return first, second, common


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2) + "\n"


def reports_from_json(text: str) -> List[VerificationReport]:
    return [VerificationReport.from_json(d) for d in json.loads(text)]
