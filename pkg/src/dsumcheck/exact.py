"""Exact rational values and the named integer/rational sequences.

Every scalar is a :data:`Rational` (``gmpy2.mpq``): always in lowest terms,
exact under ``+ - * /`` and integer powers, and ``ZeroDivisionError`` on
division by zero.  Sequence kernels are memoized as prefix tables so that a
sweep over ``n = 0, 1, 2, ...`` costs one new term per step.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Union

from gmpy2 import mpq

Rational = type(mpq(0))

Number = Union[int, Fraction, Rational, str]

__all__ = [
    "Rational",
    "SingularShift",
    "NegativeIndex",
    "NonRationalBinomial",
    "rational",
    "is_integer",
    "as_int",
    "floor",
    "format_rational",
    "harmonic",
    "odd_harmonic",
    "shifted_harmonic_diff",
    "bernoulli",
    "bernoulli_akiyama_tanigawa",
    "bernoulli_from_stirling",
    "fibonacci",
    "lucas",
    "gibonacci",
    "stirling2",
    "catalan",
    "factorial",
    "falling_factorial",
    "binom_int",
    "binom_rat",
    "binom",
    "clear_caches",
]


class SingularShift(ArithmeticError):
    """``H_{n+r} - H_r`` hit a pole: ``r`` is a negative integer in ``[-n, -1]``."""


class NegativeIndex(ValueError):
    """A sequence kernel was asked for an index outside its domain."""


class NonRationalBinomial(ValueError):
    """``binom(x, k)`` with neither ``k`` nor ``x - k`` integral has no rational value."""


def rational(value: Number) -> Rational:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to a Rational."""
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return mpq(text)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    return mpq(value)


def is_integer(value) -> bool:
    return value.denominator == 1


def as_int(value) -> int:
    """Return ``value`` as a Python int; ``ValueError`` if it is not integral."""
    if value.denominator != 1:
        raise ValueError(f"{format_rational(value)} is not an integer")
    return int(value)


def floor(value) -> int:
    """Mathematical floor, e.g. ``floor(-1/2) == -1``."""
    return int(math.floor(value))


def format_rational(value) -> str:
    """Serialize as ``"num/den"`` (the denominator is always printed)."""
    q = mpq(value)
    return f"{q.numerator}/{q.denominator}"


class _PrefixTable:
    """Growable memo ``vals[i] = step(vals, i)``, safe under concurrent readers."""

    def __init__(self, initial: List, step: Callable[[List, int], object]):
        self._vals = list(initial)
        self._step = step
        self._lock = threading.Lock()

    def get(self, n: int):
        vals = self._vals
        if n < len(vals):
            return vals[n]
        with self._lock:
            vals = self._vals
            while len(vals) <= n:
                # append is atomic, readers never see a partial list entry
                vals.append(self._step(vals, len(vals)))
            return vals[n]


class _TableFamily:
    """Prefix tables keyed by an order/seed parameter."""

    def __init__(self, factory: Callable[[Hashable], _PrefixTable]):
        self._factory = factory
        self._tables: Dict[Hashable, _PrefixTable] = {}
        self._lock = threading.Lock()

    def table(self, key: Hashable) -> _PrefixTable:
        table = self._tables.get(key)
        if table is None:
            with self._lock:
                table = self._tables.get(key)
                if table is None:
                    table = self._factory(key)
                    self._tables[key] = table
        return table

    def clear(self) -> None:
        with self._lock:
            self._tables = {}


def _check_index(name: str, n: int) -> None:
    if n < 0:
        raise NegativeIndex(f"{name} index must be non-negative, got {n}")


# -- harmonic-type sums ------------------------------------------------------

_harmonic = _TableFamily(
    lambda s: _PrefixTable([mpq(0)], lambda v, i: v[i - 1] + mpq(1, i**s))
)
_odd_harmonic = _TableFamily(
    lambda s: _PrefixTable([mpq(0)], lambda v, i: v[i - 1] + mpq(1, (2 * i - 1) ** s))
)


def harmonic(n: int, s: int = 1) -> Rational:
    """``H_n^{(s)} = sum_{k=1}^n 1/k^s``."""
    _check_index("harmonic", n)
    if s < 1:
        raise NegativeIndex(f"harmonic order must be >= 1, got {s}")
    return _harmonic.table(int(s)).get(int(n))


def odd_harmonic(n: int, s: int = 1) -> Rational:
    """``O_n^{(s)} = sum_{k=1}^n 1/(2k-1)^s``."""
    _check_index("odd_harmonic", n)
    if s < 1:
        raise NegativeIndex(f"odd harmonic order must be >= 1, got {s}")
    return _odd_harmonic.table(int(s)).get(int(n))


def _shift_step(r):
    def step(vals, i):
        shifted = i + r
        if shifted == 0:
            raise SingularShift(f"H_(n+r) - H_r is singular at r={format_rational(r)}")
        return vals[i - 1] + 1 / shifted

    return step


_shifted = _TableFamily(lambda r: _PrefixTable([mpq(0)], _shift_step(r)))


def shifted_harmonic_diff(n: int, r) -> Rational:
    """``H_{n+r} - H_r``, realized as ``sum_{k=1}^n 1/(k+r)``.

    Raises :class:`SingularShift` when ``r`` is one of ``-1, ..., -n``.
    """
    _check_index("shifted_harmonic_diff", n)
    return _shifted.table(mpq(r)).get(int(n))


# -- Bernoulli numbers -------------------------------------------------------


def _bernoulli_step(vals, m):
    acc = mpq(0)
    for k in range(m):
        acc += math.comb(m + 1, k) * vals[k]
    return -acc / (m + 1)


_bernoulli = _PrefixTable([mpq(1)], _bernoulli_step)


def bernoulli(n: int) -> Rational:
    """``B_n`` with ``B_1 = -1/2``, from ``sum_{k<=m} C(m+1,k) B_k = 0``."""
    _check_index("bernoulli", n)
    return _bernoulli.get(int(n))


def bernoulli_akiyama_tanigawa(n: int) -> Rational:
    """Independent ``B_n`` by the Akiyama-Tanigawa triangle (sign fixed for ``n=1``)."""
    _check_index("bernoulli", n)
    row = [mpq(0)] * (n + 1)
    for m in range(n + 1):
        row[m] = mpq(1, m + 1)
        for j in range(m, 0, -1):
            row[j - 1] = j * (row[j - 1] - row[j])
    return -row[0] if n == 1 else row[0]


def bernoulli_from_stirling(n: int) -> Rational:
    """``B_n = sum_{k=1}^n (-1)^k k!/(k+1) S(n,k)``, with the value 1 at ``n = 0``."""
    _check_index("bernoulli", n)
    if n == 0:
        return mpq(1)
    total = mpq(0)
    for k in range(1, n + 1):
        total += (-1) ** k * mpq(math.factorial(k), k + 1) * stirling2(n, k)
    return total


# -- Fibonacci family --------------------------------------------------------


def _gibonacci_table(seeds):
    g1, g2 = seeds
    return _PrefixTable([g2 - g1, g1, g2], lambda v, i: v[i - 1] + v[i - 2])


_gibonacci = _TableFamily(_gibonacci_table)


def gibonacci(n: int, g1=1, g2=1) -> Rational:
    """``G_n`` with ``G_1 = g1``, ``G_2 = g2`` and ``G_{n+2} = G_{n+1} + G_n``."""
    _check_index("gibonacci", n)
    return _gibonacci.table((mpq(g1), mpq(g2))).get(int(n))


def fibonacci(n: int) -> Rational:
    return gibonacci(n, 1, 1)


def lucas(n: int) -> Rational:
    return gibonacci(n, 1, 3)


# -- combinatorial numbers ---------------------------------------------------


def _stirling_row(rows, n):
    prev = rows[n - 1]
    row = [mpq(0)] * (n + 1)
    for k in range(1, n + 1):
        below = prev[k] if k < n else 0
        row[k] = k * below + prev[k - 1]
    return row


_stirling = _PrefixTable([[mpq(1)]], _stirling_row)


def stirling2(n: int, k: int) -> Rational:
    """Stirling number of the second kind ``S(n, k)``; zero outside ``0 <= k <= n``."""
    _check_index("stirling2", n)
    if k < 0 or k > n:
        return mpq(0)
    return _stirling.get(int(n))[int(k)]


def catalan(n: int) -> Rational:
    _check_index("catalan", n)
    return mpq(math.comb(2 * n, n), n + 1)


def factorial(n: int) -> Rational:
    _check_index("factorial", n)
    return mpq(math.factorial(n))


def falling_factorial(x, k: int) -> Rational:
    """``x (x-1) ... (x-k+1)``; the empty product at ``k = 0`` is 1."""
    _check_index("falling_factorial", k)
    x = mpq(x)
    out = mpq(1)
    for i in range(k):
        out *= x - i
    return out


def binom_int(m: int, k: int) -> int:
    """Combinatorial binomial for integer ``m >= 0``; 0 when ``k < 0`` or ``k > m``."""
    if k < 0 or k > m:
        return 0
    return math.comb(m, k)


def binom_rat(x, k: int) -> Rational:
    """Generalized binomial ``x(x-1)...(x-k+1)/k!`` for rational ``x``; 0 for ``k < 0``."""
    if k < 0:
        return mpq(0)
    x = mpq(x)
    if x.denominator == 1 and x >= 0:
        return mpq(binom_int(int(x), k))
    return falling_factorial(x, k) / math.factorial(k)


def binom(x, k) -> Rational:
    """Binomial coefficient with rational arguments, where it is rational.

    Integral ``k`` uses the falling-factorial form.  Otherwise, when
    ``d = x - k`` is integral, the Gamma-function definition reduces to
    ``binom(x, d)`` (and to 0 for negative ``d``, where ``1/Gamma(d+1)``
    vanishes).  Anything else involves non-rational Gamma ratios.
    """
    k = mpq(k)
    if k.denominator == 1:
        return binom_rat(x, int(k))
    d = mpq(x) - k
    if d.denominator == 1:
        return binom_rat(x, int(d))
    raise NonRationalBinomial(
        f"binom({format_rational(x)}, {format_rational(k)}) is not rational"
    )


def clear_caches() -> None:
    """Drop all memo tables (kernels rebuild them lazily)."""
    global _bernoulli, _stirling
    _harmonic.clear()
    _odd_harmonic.clear()
    _shifted.clear()
    _gibonacci.clear()
    _bernoulli = _PrefixTable([mpq(1)], _bernoulli_step)
    _stirling = _PrefixTable([[mpq(1)]], _stirling_row)

