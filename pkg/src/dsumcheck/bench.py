"""Timing of the double-sum side against the closed-form side of an entry."""

from __future__ import annotations

import csv
import io
import statistics
import time
import timeit
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

from . import dsl
from .catalog import IdentityRecord, bindings, get_record

__all__ = ["BenchRow", "bench", "bench_record", "rows_to_csv"]

CSV_HEADER = ("id", "n", "naive_ns", "closed_ns", "speedup")


@dataclass(frozen=True)
class BenchRow:
    id: str
    n: int
    naive_ns: int
    closed_ns: int

    @property
    def speedup(self) -> float:
        return self.naive_ns / self.closed_ns if self.closed_ns else float("inf")


def _median_ns(fn, reps: int) -> int:
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return int(statistics.median(samples))


def _median_ns_fast(fn, reps: int) -> int:
    # Sub-millisecond calls are looped so each sample is long enough to measure.
    timer = timeit.Timer(fn)
    loops, _ = timer.autorange()
    samples = timer.repeat(repeat=reps, number=loops)
    return int(statistics.median(samples) / loops * 1e9)


def bench_record(record: IdentityRecord, n: int, reps: int = 5, seed: int = 42) -> BenchRow:
    """Median per-call time of each side at size ``n`` (first binding in sweep order).

    The closed form gets one untimed warm-up call so that memoized kernels
    such as ``H`` are already tabulated: it is timed as a formula, not as a
    table build.  The naive side is timed cold on every repetition.
    """
    if reps < 5:
        raise ValueError("at least 5 repetitions are required")
    binding = next(iter(bindings(record, n, seed)))
    env = binding.env(n)
    lhs = dsl.compile_expr(record.lhs)
    rhs = dsl.compile_expr(record.rhs)
    rhs(env)
    closed = _median_ns_fast(lambda: rhs(env), reps)
    naive = _median_ns(lambda: lhs(env), reps)
    return BenchRow(record.id, n, naive, closed)


def bench(entry_ids: Sequence[str], n_points: Sequence[int], reps: int = 5, seed: int = 42,
          progress: Optional[Callable[[BenchRow], None]] = None) -> List[BenchRow]:
    records = [get_record(i) for i in entry_ids]  # KeyError before any timing
    rows = []
    for rec in records:
        for n in n_points:
            row = bench_record(rec, n, reps, seed)
            if progress is not None:
                progress(row)
            rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.id, r.n, r.naive_ns, r.closed_ns, f"{r.speedup:.3f}"])
    return buf.getvalue()
