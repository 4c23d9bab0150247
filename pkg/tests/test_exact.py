import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsumcheck import exact
from gmpy2 import mpq

fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 100)


def frac(q) -> Fraction:
    q = mpq(q)
    return Fraction(int(q.numerator), int(q.denominator))


# -- Rational contract ---------------------------------------------------------


@given(fractions, fractions)
def test_arithmetic_matches_fraction(x, y):
    a, b = exact.rational(x), exact.rational(y)
    assert frac(a + b) == x + y
    assert frac(a - b) == x - y
    assert frac(a * b) == x * y
    if y != 0:
        assert frac(a / b) == x / y


@given(fractions)
def test_lowest_terms(x):
    q = exact.rational(x)
    assert math.gcd(int(q.numerator), int(q.denominator)) == 1
    assert q.denominator >= 1


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        exact.rational(1) / exact.rational(0)


@pytest.mark.parametrize("text,expected", [("-1/2", -1), ("1/2", 0), ("-3", -3), ("7/3", 2), ("-7/3", -3)])
def test_floor_negative(text, expected):
    assert exact.floor(exact.rational(text)) == expected


def test_rational_rejects_float():
    with pytest.raises(TypeError):
        exact.rational(0.5)


def test_format_rational_always_has_denominator():
    assert exact.format_rational(3) == "3/1"
    assert exact.format_rational(mpq(-6, 4)) == "-3/2"


# -- harmonic family -----------------------------------------------------------


@pytest.mark.parametrize("s", [1, 2, 3])
def test_harmonic_against_fraction_loop(s):
    for n in range(0, 40):
        expected = sum((Fraction(1, k**s) for k in range(1, n + 1)), Fraction(0))
        assert frac(exact.harmonic(n, s)) == expected


def test_odd_harmonic_values():
    assert exact.odd_harmonic(0) == 0
    assert exact.odd_harmonic(3) == mpq(23, 15)
    assert exact.odd_harmonic(2, 2) == mpq(10, 9)


def test_harmonic_negative_index():
    with pytest.raises(exact.NegativeIndex):
        exact.harmonic(-1)


@pytest.mark.parametrize("r", ["0", "1/2", "-1/2", "3", "-5/3"])
def test_shifted_harmonic_diff(r):
    rq = Fraction(r)
    for n in range(15):
        expected = sum((1 / (k + rq) for k in range(1, n + 1)), Fraction(0))
        assert frac(exact.shifted_harmonic_diff(n, exact.rational(r))) == expected


def test_shifted_harmonic_diff_integer_r_matches_harmonic():
    for n in range(10):
        assert exact.shifted_harmonic_diff(n, 3) == exact.harmonic(n + 3) - exact.harmonic(3)


def test_shifted_harmonic_singular():
    assert exact.shifted_harmonic_diff(1, -2) == -1  # pole at k = 2 not yet reached
    with pytest.raises(exact.SingularShift):
        exact.shifted_harmonic_diff(2, -2)


# -- Bernoulli -----------------------------------------------------------------

KNOWN_B = {0: (1, 1), 1: (-1, 2), 2: (1, 6), 4: (-1, 30), 6: (1, 42), 8: (-1, 30),
           10: (5, 66), 12: (-691, 2730), 14: (7, 6), 20: (-174611, 330)}


@pytest.mark.parametrize("n", sorted(KNOWN_B))
def test_bernoulli_known_values(n):
    p, q = KNOWN_B[n]
    for algo in (exact.bernoulli, exact.bernoulli_akiyama_tanigawa, exact.bernoulli_from_stirling):
        assert algo(n) == mpq(p, q), algo.__name__


def test_bernoulli_odd_vanish():
    assert all(exact.bernoulli(n) == 0 for n in range(3, 61, 2))


# -- Fibonacci family ----------------------------------------------------------


def test_fibonacci_lucas():
    assert [exact.fibonacci(n) for n in range(10)] == [0, 1, 1, 2, 3, 5, 8, 13, 21, 34]
    assert [exact.lucas(n) for n in range(8)] == [2, 1, 3, 4, 7, 11, 18, 29]


def test_gibonacci_recurrence_and_seeds():
    for g1, g2 in [(1, 1), (2, 1), (3, -2), (mpq(1, 2), mpq(-1, 3))]:
        assert exact.gibonacci(1, g1, g2) == g1
        assert exact.gibonacci(2, g1, g2) == g2
        for n in range(30):
            assert exact.gibonacci(n + 2, g1, g2) == exact.gibonacci(n + 1, g1, g2) + exact.gibonacci(n, g1, g2)


# -- combinatorial numbers -----------------------------------------------------


def test_stirling2_explicit_formula():
    for n in range(15):
        for k in range(n + 1):
            explicit = sum((-1) ** i * math.comb(k, i) * (k - i) ** n for i in range(k + 1)) // math.factorial(k)
            assert exact.stirling2(n, k) == explicit
    assert exact.stirling2(3, 5) == 0 and exact.stirling2(3, -1) == 0


def test_catalan():
    assert [exact.catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


@given(st.integers(-20, 20), st.integers(-3, 12))
def test_binom_integer_matches_gamma_convention(m, k):
    got = exact.binom(m, k)
    if k < 0:
        assert got == 0
    elif m >= 0:
        assert got == math.comb(m, k)
    else:  # upper negation
        assert got == (-1) ** k * math.comb(k - m - 1, k)


@given(fractions, st.integers(0, 10))
def test_binom_pascal_rule(x, k):
    x = exact.rational(x)
    assert exact.binom(x + 1, k + 1) == exact.binom(x, k + 1) + exact.binom(x, k)


def test_binom_rational_examples():
    assert exact.binom(mpq(1, 2), 2) == mpq(-1, 8)
    assert exact.binom(mpq(-1, 2), 3) == mpq(-5, 16)
    assert exact.binom(mpq(5, 2), mpq(3, 2)) == exact.binom(mpq(5, 2), 1)
    assert exact.binom(mpq(1, 2), mpq(3, 2)) == 0  # x - k = -1
    with pytest.raises(exact.NonRationalBinomial):
        exact.binom(mpq(1, 3), mpq(1, 2))


def test_falling_factorial():
    assert exact.falling_factorial(5, 0) == 1
    assert exact.falling_factorial(5, 3) == 60
    assert exact.falling_factorial(mpq(1, 2), 2) == mpq(-1, 4)


# -- memo tables ---------------------------------------------------------------


def test_memo_concurrent_readers_agree():
    exact.clear_caches()
    results = {}

    def work(tid):
        results[tid] = [exact.harmonic(n) for n in range(300, 0, -7)] + [exact.bernoulli(40)]

    threads = [threading.Thread(target=work, args=(t,)) for t in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    first = results[0]
    assert all(r == first for r in results.values())
    assert first[-1] == exact.bernoulli_akiyama_tanigawa(40)


@settings(max_examples=30)
@given(st.lists(st.integers(0, 120), min_size=1, max_size=20))
def test_memo_order_independent(order):
    exact.clear_caches()
    got = [exact.harmonic(n, 2) for n in order]
    exact.clear_caches()
    assert got == [exact.harmonic(n, 2) for n in order[::-1]][::-1]
