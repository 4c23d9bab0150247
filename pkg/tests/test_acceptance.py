"""Acceptance criteria 1 to 8.

A pass/fail line per criterion is printed in the pytest terminal summary
(section "acceptance criteria").  Run alone with
``pytest tests/test_acceptance.py -v``.
"""

import json
import math
import random
import time
from fractions import Fraction

import pytest
from gmpy2 import mpq

from dsumcheck import dsl, exact, verify
from dsumcheck.bench import bench_record
from dsumcheck.catalog import builtin_catalog, get_record
from dsumcheck.cli import main
from dsumcheck.transform import binomial_transform

SEED = 42


def criterion(number, text):
    return pytest.mark.criterion(number, text)


@pytest.fixture(scope="module")
def default_run(tmp_path_factory):
    path = tmp_path_factory.mktemp("suite") / "default.json"
    start = time.perf_counter()
    code = main(["verify", "--seed", str(SEED), "--out", str(path)])
    elapsed = time.perf_counter() - start
    return code, path.read_bytes(), elapsed


@criterion(1, "full catalog passes at default sweeps, seed 42, within 120 s")
def test_full_suite_passes(default_run, record_property, capsys):
    code, payload, elapsed = default_run
    capsys.readouterr()
    reports = json.loads(payload)
    failing = [r["identity_id"] for r in reports if r["status"] != "Pass"]
    record_property("detail", f"{len(reports)} entries, {len(failing)} not passing, {elapsed:.1f} s")
    assert code == 0
    assert not failing
    assert [r["identity_id"] for r in reports] == [r.id for r in builtin_catalog()]
    for r in reports:
        rec = get_record(r["identity_id"])
        assert r["n_range"] == [rec.min_n, rec.max_n_default]
        assert r["bindings_tested"] >= r["n_range"][1] - r["n_range"][0] + 1
    assert elapsed <= 120.0


def _raw_master_sides(a, b, n):
    """Fraction-based loops, independent of both the DSL and the verifier oracle."""
    fa = [Fraction(int(x.numerator), int(x.denominator)) for x in a]
    fb = [Fraction(int(x.numerator), int(x.denominator)) for x in b]
    first = sum((fa[p + k] * fb[k] for p in range(n) for k in range(1, n - p + 1)), Fraction(0))
    second = sum((fa[n - j] * fb[k - j] for k in range(1, n + 1) for j in range(k)), Fraction(0))
    common = sum((fa[k] * sum(fb[1:k + 1], Fraction(0)) for k in range(1, n + 1)), Fraction(0))
    return first, second, common


def _as_fraction(q):
    q = mpq(q)
    return Fraction(int(q.numerator), int(q.denominator))


@criterion(2, "master identities hold for 200 seeded random sequence pairs, n <= 30")
def test_master_identities_random_pairs(record_property):
    rng = random.Random(SEED)
    e1, e2 = get_record("I-01"), get_record("I-02")
    lhs1, rhs1 = dsl.compile_expr(e1.lhs), dsl.compile_expr(e1.rhs)
    lhs2 = dsl.compile_expr(e2.lhs)
    for i in range(200):
        n = i % 31
        a = tuple(mpq(rng.randint(-99, 99), rng.randint(1, 20)) for _ in range(n + 1))
        b = tuple(mpq(rng.randint(-99, 99), rng.randint(1, 20)) for _ in range(n + 1))
        oracle = verify.brute_force_double_sum(a, b, n)
        raw = _raw_master_sides(a, b, n)
        assert tuple(_as_fraction(v) for v in oracle) == raw
        assert raw[0] == raw[1] == raw[2]
        env = {"n": n, "a": a, "b": b}
        assert lhs1(dict(env)) == oracle[0]
        assert lhs2(dict(env)) == oracle[1]
        assert rhs1(dict(env)) == oracle[2]
    record_property("detail", "200 pairs, n = 0..30")


@criterion(3, "Bernoulli: two algorithms and the Stirling formula agree for n <= 60; I-13 gives B_n for n <= 25")
def test_bernoulli_cross_check(record_property):
    for n in range(61):
        b = exact.bernoulli(n)
        assert exact.bernoulli_akiyama_tanigawa(n) == b
        assert exact.bernoulli_from_stirling(n) == b
    assert exact.bernoulli(60) == mpq(-1215233140483755572040304994079820246041491, 56786730)
    lhs = dsl.compile_expr(get_record("I-13").lhs)
    for n in range(1, 26):
        assert lhs({"n": n}) == exact.bernoulli(n)
    record_property("detail", "n = 0..60 and I-13 n = 1..25")


def _brute(n, term):
    return sum((term(n, k, j) for k in range(1, n + 1) for j in range(k)), Fraction(0))


POINTS = [
    ("I-40", 2, Fraction(-7), lambda n, k, j: Fraction((-1) ** j * math.comb(n, j) ** 3, n - j)),
    ("I-36", 2, Fraction(7, 2), lambda n, k, j: Fraction(math.comb(n, j), k - j)),
    ("I-25", 1, Fraction(1, 6), lambda n, k, j: Fraction(1, (k - j) * (n + 1 - j) * (n + 2 - j))),
    ("I-56", 3, Fraction(1, 3), lambda n, k, j: Fraction((-1) ** j * math.comb(n, j), k - j)),
]


@criterion(4, "point checks: I-40(2) = -7, I-36(2) = 7/2, I-25(1) = 1/6, I-56(3) = 1/3")
def test_point_checks(record_property):
    for ident, n, expected, term in POINTS:
        assert _brute(n, term) == expected, ident
        rec = get_record(ident)
        env = {"n": n, "r": mpq(0)} if ident == "I-56" else {"n": n}
        assert _as_fraction(dsl.compile_expr(rec.lhs)(dict(env))) == expected, ident
        assert _as_fraction(dsl.compile_expr(rec.rhs)(dict(env))) == expected, ident
        assert verify.check_identity(rec, n, SEED).passed
    record_property("detail", "4 of 4 values match")


@criterion(5, "transform involution on 100 random sequences (length <= 64); Fibonacci, Lucas, Bernoulli pairs to index 20")
def test_transform(record_property):
    rng = random.Random(SEED)
    lengths = [64, 0, 1] + [rng.randint(0, 64) for _ in range(97)]
    for length in lengths:
        s = [mpq(rng.randint(-99, 99), rng.randint(1, 20)) for _ in range(length)]
        assert binomial_transform(binomial_transform(s)) == s
    idx = range(21)
    fib = [(-1) ** n * exact.fibonacci(n) for n in idx]
    luc = [(-1) ** n * exact.lucas(n) for n in idx]
    ber = [(-1) ** n * exact.bernoulli(n) for n in idx]
    assert binomial_transform(fib) == [exact.fibonacci(2 * n) for n in idx]
    assert binomial_transform(luc) == [exact.lucas(2 * n) for n in idx]
    assert binomial_transform(ber) == ber
    assert binomial_transform([exact.fibonacci(2 * n) for n in idx]) == fib
    record_property("detail", f"{len(lengths)} sequences, max length {max(lengths)}")


@criterion(6, "mutation: RHS + 1 on 10 random entries fails with a reproducible counterexample")
def test_mutation_sensitivity(record_property):
    rng = random.Random(SEED)
    chosen = rng.sample(list(builtin_catalog()), 10)
    for rec in chosen:
        mutated = verify.mutate(rec)
        report = verify.check_identity(mutated, None, SEED)
        assert report.status == verify.FAIL, rec.id
        cx = report.counterexample
        assert cx.lhs_value != cx.rhs_value
        assert verify.reproduce(mutated, cx) == (cx.lhs_value, cx.rhs_value)
        # reproducible from the serialized report alone, and on a rerun
        restored = verify.reports_from_json(verify.reports_to_json([report]))[0].counterexample
        assert verify.reproduce(mutated, restored) == (cx.lhs_value, cx.rhs_value)
        again = verify.check_identity(mutated, None, SEED)
        assert verify.reports_to_json([again]) == verify.reports_to_json([report])
    record_property("detail", ", ".join(r.id for r in chosen))


@criterion(7, "determinism: byte-identical JSON reports across runs and --jobs values")
def test_determinism(default_run, tmp_path, record_property, capsys):
    _, first, _ = default_run
    outputs = {}
    for jobs in ("1", "3"):
        path = tmp_path / f"jobs{jobs}.json"
        assert main(["verify", "--seed", str(SEED), "--jobs", jobs, "--out", str(path)]) == 0
        outputs[jobs] = path.read_bytes()
    capsys.readouterr()
    assert outputs["1"] == first
    assert outputs["3"] == first
    record_property("detail", f"3 runs, {len(first)} bytes each")


@criterion(8, "bench I-05: naive time grows more than x4 from n=2000 to n=4000, closed form at most x2.5")
def test_bench_shape(record_property):
    rec = get_record("I-05")
    small = bench_record(rec, 2000, reps=5, seed=SEED)
    large = bench_record(rec, 4000, reps=5, seed=SEED)
    naive_ratio = large.naive_ns / small.naive_ns
    closed_ratio = large.closed_ns / small.closed_ns
    record_property("detail", f"naive x{naive_ratio:.2f}, closed x{closed_ratio:.2f}")
    assert naive_ratio > 4.0
    assert closed_ratio <= 2.5


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
