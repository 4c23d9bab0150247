"""Identity records, parameter domains, and the builtin catalog.

Each record is data: two DSL strings (double-sum side and closed-form
side), the parameters they use, and the range of ``n`` the statement covers.
Values that would need ``H`` at a non-integer argument are rewritten through
``Hdiff(n, r) = H_{n+r} - H_r`` so that every side stays rational.
"""

from __future__ import annotations

import functools
import json
import random
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from . import dsl
from .dsl import BinOp, Expr, Num
from .exact import Rational, format_rational, rational
from .transform import binomial_transform

__all__ = [
    "SampleSet",
    "IntRange",
    "Joint",
    "RandomRational",
    "RandomSequence",
    "Param",
    "ParamBinding",
    "IdentityRecord",
    "RANDOM_DRAWS",
    "bindings",
    "builtin_catalog",
    "get_record",
    "dump_catalog",
    "load_catalog",
]

RANDOM_DRAWS = 16
"""Draws per ``n`` for records with random parameters."""


# -- parameter domains ---------------------------------------------------------


@dataclass(frozen=True)
class SampleSet:
    values: Tuple[Rational, ...]


@dataclass(frozen=True)
class IntRange:
    """Integers ``lo..hi`` inclusive; bounds are DSL expressions in ``n`` and earlier params."""

    lo: str
    hi: str


@dataclass(frozen=True)
class Joint:
    """Explicit rows for a group of parameters that are constrained together."""

    rows: Tuple[Tuple[Rational, ...], ...]


@dataclass(frozen=True)
class RandomRational:
    num_range: Tuple[int, int] = (-99, 99)
    den_max: int = 20


@dataclass(frozen=True)
class RandomSequence:
    """Random rational terms at indices ``0 .. n + extra``.

    With ``transform_of`` set, the sequence is instead the binomial
    transform of that (random) sequence, which makes the two a transform pair.
    """

    extra: int = 8
    transform_of: Optional[str] = None
    num_range: Tuple[int, int] = (-99, 99)
    den_max: int = 20


Domain = Union[SampleSet, IntRange, Joint, RandomRational, RandomSequence]


@dataclass(frozen=True)
class Param:
    names: Tuple[str, ...]
    domain: Domain

    @property
    def name(self) -> str:
        return ",".join(self.names)

    @property
    def is_random(self) -> bool:
        return isinstance(self.domain, (RandomRational, RandomSequence))

    @property
    def is_sequence(self) -> bool:
        return isinstance(self.domain, RandomSequence)


@dataclass
class ParamBinding:
    values: Dict[str, Rational] = field(default_factory=dict)
    sequences: Dict[str, Tuple[Rational, ...]] = field(default_factory=dict)

    def env(self, n: int) -> dict:
        env = dict(self.values)
        env.update(self.sequences)
        env["n"] = n
        return env

    def to_json(self) -> dict:
        return {
            "values": {k: format_rational(v) for k, v in self.values.items()},
            "sequences": {k: [format_rational(x) for x in v] for k, v in self.sequences.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "ParamBinding":
        return cls(
            {k: rational(v) for k, v in data.get("values", {}).items()},
            {k: tuple(rational(x) for x in v) for k, v in data.get("sequences", {}).items()},
        )

    def describe(self) -> str:
        parts = [f"{k}={format_rational(v)}" for k, v in self.values.items()]
        parts += [f"{k}=<{len(v)} terms>" for k, v in self.sequences.items()]
        return ", ".join(parts) or "-"


# -- records -----------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    title: str
    lhs: Expr
    rhs: Expr
    params: Tuple[Param, ...] = ()
    min_n: int = 1
    max_n_default: int = 25
    anchor: str = ""
    note: str = ""

    @property
    def param_names(self) -> List[str]:
        return [name for p in self.params for name in p.names]

    def check_variables(self) -> None:
        """Raise ``ValueError`` unless lhs/rhs use exactly ``n`` plus the declared params."""
        used = (dsl.free_vars(self.lhs) | dsl.free_vars(self.rhs)
                | dsl.sequence_names(self.lhs) | dsl.sequence_names(self.rhs))
        declared = {"n", *self.param_names}
        if used != declared:
            raise ValueError(
                f"{self.id}: expressions use {sorted(used)}, declared {sorted(declared)}"
            )

    def mutated(self, delta=1) -> "IdentityRecord":
        """Copy with ``delta`` added to the closed-form side."""
        return replace(self, rhs=BinOp("+", self.rhs, Num(mpq(delta))),
                       title=f"{self.title} (rhs + {delta})")


def _draw_rational(rng: random.Random, num_range, den_max) -> Rational:
    return mpq(rng.randint(*num_range), rng.randint(1, den_max))


def _deterministic_rows(params: Sequence[Param], n: int) -> Iterator[Dict[str, Rational]]:
    def expand(i: int, acc: Dict[str, Rational]):
        if i == len(params):
            yield dict(acc)
            return
        p = params[i]
        dom = p.domain
        if isinstance(dom, SampleSet):
            rows = [(v,) for v in dom.values]
        elif isinstance(dom, Joint):
            rows = dom.rows
        elif isinstance(dom, IntRange):
            env = dict(acc, n=n)
            lo = dsl.evaluate(dom.lo, env)
            hi = dsl.evaluate(dom.hi, env)
            rows = [(mpq(v),) for v in range(int(lo), int(hi) + 1)]
        else:
            raise TypeError(dom)
        for row in rows:
            acc.update(zip(p.names, row))
            yield from expand(i + 1, acc)
            for name in p.names:
                acc.pop(name, None)

    yield from expand(0, {})


def bindings(record: IdentityRecord, n: int, seed: int) -> Iterator[ParamBinding]:
    """All bindings tested at size ``n``, in a fixed order.

    Deterministic domains are expanded as a product in declaration order;
    when random domains are present, each deterministic row is paired with
    :data:`RANDOM_DRAWS` draws from a generator seeded by
    ``(seed, record id, n, row, draw)``.
    """
    fixed = [p for p in record.params if not p.is_random]
    rand = [p for p in record.params if p.is_random]
    for row_index, row in enumerate(_deterministic_rows(fixed, n)):
        if not rand:
            yield ParamBinding(row)
            continue
        for draw in range(RANDOM_DRAWS):
            rng = random.Random(f"{seed}:{record.id}:{n}:{row_index}:{draw}")
            values = dict(row)
            seqs: Dict[str, Tuple[Rational, ...]] = {}
            derived = []
            for p in rand:
                dom = p.domain
                if isinstance(dom, RandomRational):
                    values[p.names[0]] = _draw_rational(rng, dom.num_range, dom.den_max)
                elif dom.transform_of is not None:
                    derived.append(p)
                else:
                    length = n + dom.extra + 1
                    seqs[p.names[0]] = tuple(
                        _draw_rational(rng, dom.num_range, dom.den_max) for _ in range(length)
                    )
            for p in derived:
                seqs[p.names[0]] = tuple(binomial_transform(seqs[p.domain.transform_of]))
            yield ParamBinding(values, seqs)


# -- catalog entries -----------------------------------------------------------------


def _samples(name: str, *values) -> Param:
    return Param((name,), SampleSet(tuple(rational(v) for v in values)))


def _joint(names: str, rows) -> Param:
    return Param(tuple(names.split(",")),
                 Joint(tuple(tuple(rational(v) for v in row) for row in rows)))


def _seq(name: str, extra: int = 8, transform_of: Optional[str] = None) -> Param:
    return Param((name,), RandomSequence(extra, transform_of))


R_SHIFTS = ("0", "1/2", "-1/2", "1", "3/2", "1/3")
GIB_SEEDS = ((1, 1), (2, 1), (3, -2))

# The two inner-sum shapes almost every entry shares.
_DS = "sum(k, 1, n, sum(j, 0, k - 1, {}))"


def _ds(body: str) -> str:
    return _DS.format(body)


_SPIESS_ROWS = [(m, p) for m in range(4) for p in range(m + 1)] + [
    (m, p) for m in range(4) for p in ("1/2", "-1/2")
]

_QUKEV_ROWS = [(p, q) for p in range(4) for q in range(4)] + [
    (f"-{2 * r + 1}/2", "-1/2") for r in (1, 2, 3)
]

_ERRATUM_BINOM = (
    "The variant with weight binom(k, j) fails at n = 2 (random a); the weight that "
    "matches this right side is binom(n - j, k - j), encoded here."
)

# (id, title, lhs, rhs, anchor, params, min_n, max_n, note)
_ENTRIES = [
    # master identities
    ("I-01", "interchange of a(p+k) b(k) double sum",
     "sum(p, 0, n - 1, sum(k, 1, n - p, a(p + k)*b(k)))",
     "sum(k, 1, n, a(k)*sum(j, 1, k, b(j)))",
     "established a generalization of this theorem", (_seq("a"), _seq("b")), 0, 30, ""),
    ("I-02", "variant with a(n-j) b(k-j)",
     _ds("a(n - j)*b(k - j)"),
     "sum(k, 1, n, a(k)*sum(j, 1, k, b(j)))",
     "which is a variation of", (_seq("a"), _seq("b")), 0, 30, ""),
    ("I-03", "b = 1, a_k -> a_k/k",
     _ds("a(n - j)/(n - j)"), "sum(k, 1, n, a(k))",
     "replace a_k with a_k/k", (_seq("a"),), 0, 25, ""),
    ("I-04", "b_k = (-1)^k",
     _ds("(-1)^(k - j + 1)*a(n - j)"), "sum(k, 0, floor((n - 1)/2), a(2*k + 1))",
     "set b_k=(-1)^k and use", (_seq("a"),), 0, 25, ""),
    ("I-05", "squares of 1/(n-j) give H_n",
     _ds("1/(n - j)^2"), "H(n)",
     "Use a_k=1/k and a_k=(2k-1)^{-1}", (), 1, 25, ""),
    ("I-06", "odd analogue gives O_n",
     _ds("1/((n - j)*(2*(n - j) - 1))"), "O(n)",
     "Use a_k=1/k and a_k=(2k-1)^{-1}", (), 1, 25, ""),
    ("I-07", "alternating (n-j)",
     _ds("(-1)^(k - j + 1)*(n - j)"), "(floor((n - 1)/2) + 1)^2",
     "Use a_k=k in Theorem", (), 0, 25, ""),
    ("I-08", "alternating 1/(n-j)",
     _ds("(-1)^(k - j + 1)/(n - j)"), "O(floor((n + 1)/2))",
     "Use a_k=1/k in Theorem", (), 0, 25,
     "The variant with index floor((n-1)/2) fails at n = 1 (1 vs 0). Substituting a_k = 1/k in the "
     "alternating master identity gives O at floor((n-1)/2) + 1 = floor((n+1)/2), encoded here."),
    ("I-09", "alternating Fibonacci",
     _ds("(-1)^(k - j + 1)*F(n - j)"), "F(2*(floor((n - 1)/2) + 1))",
     "Use a_k=F_k and a_k=L_k", (), 1, 25, ""),
    ("I-10", "alternating Lucas",
     _ds("(-1)^(k - j + 1)*L(n - j)"), "L(2*(floor((n - 1)/2) + 1)) - 2",
     "Use a_k=F_k and a_k=L_k", (), 1, 25, ""),
    ("I-11", "Bernoulli-weighted alternating sum, f(1)/2",
     _ds("(-1)^(k - j)*(c1*(n - j) + c2*(n - j)^2 + c3/(n - j + 1) + c4*B(n - j))*B(n - j)"),
     "(c1 + c2 + c3/2 + c4*B(1))/2",
     "the fact that B_{2k+1}=0",
     tuple(_samples(c, 0, 1) for c in ("c1", "c2", "c3", "c4")), 1, 25,
     "f(k) = c1 k + c2 k^2 + c3/(k+1) + c4 B_k with 0/1 weights covers each sample f and their sums."),
    ("I-12", "B^2 instance",
     _ds("(-1)^(k - j)*B(n - j)^2"), "-1/4",
     "the fact that B_{2k+1}=0", (), 1, 25, ""),
    ("I-13", "Stirling double sum gives B_n",
     _ds("(-1)^(n - j)*fact(n - j - 1)/(n - j + 1)*S2(n, n - j)"), "B(n)",
     "double sum definition of Bernoulli numbers", (), 1, 25, ""),
    ("I-14", "b_j = 1/(j+r)",
     _ds("a(n - j)/(k - j + r)"), "sum(k, 1, n, a(k)*Hdiff(k, r))",
     "Use b_j=1/(j+r) in", (_samples("r", *R_SHIFTS), _seq("a")), 1, 25,
     "Right side sum a_k H_{k+r} - H_r sum a_k written as sum a_k (H_{k+r} - H_r)."),
    ("I-15", "r = 0: harmonic weights",
     _ds("a(n - j)/(k - j)"), "sum(k, 1, n, a(k)*H(k))",
     "Setting r=0 in", (_seq("a"),), 1, 25, ""),
    ("I-16", "r = -1/2: odd harmonic weights",
     _ds("a(n - j)/(2*k - 2*j - 1)"), "sum(k, 1, n, a(k)*O(k))",
     "Setting r=0 in", (_seq("a"),), 1, 25, ""),
    ("I-17", "Stirling-harmonic double sum",
     _ds("(-1)^(n - j)*fact(n - j)/((n - j + 1)*(k - j))*S2(n, n - j)"), "-n/2*B(n - 1)",
     "noting that", (), 1, 25, ""),
    ("I-18", "geometric weights, shift r",
     _ds("x^(n - j)/(k - j + r)"),
     "1/(1 - x)*(sum(k, 1, n, x^k/(k + r)) - x^(n + 1)*Hdiff(n, r))",
     "Work with a_k=x^k", (_samples("x", -1, 2, "1/2", "-3/5"), _samples("r", *R_SHIFTS)), 1, 25,
     "H_{n+r} - H_r encoded as Hdiff(n, r)."),
    ("I-19", "geometric weights, r = 0",
     _ds("x^(n - j)/(k - j)"), "1/(1 - x)*(sum(k, 1, n, x^k/k) - x^(n + 1)*H(n))",
     "Applying summation by parts", (_samples("x", -1, 2, "1/2", "-3/5"),), 1, 25, ""),
    ("I-20", "geometric weights, odd case",
     _ds("x^(n - j)/(2*k - 2*j - 1)"), "1/(1 - x)*(sum(k, 1, n, x^k/(2*k - 1)) - x^(n + 1)*O(n))",
     "Applying summation by parts", (_samples("x", -1, 2, "1/2", "-3/5"),), 1, 25, ""),
    ("I-21", "gibonacci, shift r",
     _ds("G(n - j, g1, g2)/(k - j + r)"),
     "G(n + 2, g1, g2)*Hdiff(n, r) - sum(k, 1, n, G(k + 1, g1, g2)/(k + r))",
     "combine according to the Binet forms",
     (_joint("g1,g2", GIB_SEEDS), _samples("r", *R_SHIFTS)), 1, 25, ""),
    ("I-21a", "gibonacci, r = 0",
     _ds("G(n - j, g1, g2)/(k - j)"),
     "G(n + 2, g1, g2)*H(n) - sum(k, 1, n, G(k + 1, g1, g2)/k)",
     "combine according to the Binet forms", (_joint("g1,g2", GIB_SEEDS),), 1, 25, ""),
    ("I-21b", "gibonacci, odd case",
     _ds("G(n - j, g1, g2)/(2*k - 2*j - 1)"),
     "G(n + 2, g1, g2)*O(n) - sum(k, 1, n, G(k + 1, g1, g2)/(2*k - 1))",
     "combine according to the Binet forms", (_joint("g1,g2", GIB_SEEDS),), 1, 25, ""),
    ("I-22", "(-1)^j/(k-j), parity split",
     _ds("(-1)^j/(k - j)"),
     "(1 + (-1)^n)/2*H(floor(n/2))/2 + (1 - (-1)^n)/2*O(floor((n + 1)/2))",
     "When x=-1 in", (), 1, 25,
     "Even n: H_{n/2}/2; odd n: O_{(n+1)/2}; selected by (1 +- (-1)^n)/2."),
    ("I-23", "two-parameter geometric identity",
     _ds("x^(n - j)/(k - j)*(1/(n + p - j) - x/(n + 1 + p - j))"),
     "sum(k, 1, n, x^k/(k*(k + p))) - H(n)*x^(n + 1)/(n + 1 + p)",
     "and integrate", (_samples("x", -1, 2, "1/2"), _samples("p", 1, 2, "1/2", "3/2")), 1, 25, ""),
    ("I-24", "x = 1 specialization, general p",
     _ds("1/((k - j)*(n + p - j)*(n + 1 + p - j))"),
     "1/p*(H(n) - Hdiff(n, p)) - H(n)/(n + 1 + p)",
     "Set x=1 in", (_samples("p", 1, 2, 3, "1/2", "-1/2"),), 1, 25,
     "H_n + H_p - H_{n+p} encoded as H(n) - Hdiff(n, p)."),
    ("I-25", "p = 1",
     _ds("1/((k - j)*(n + 1 - j)*(n + 2 - j))"), "n/(n + 1) - H(n)/(n + 2)",
     "Set x=1 in", (), 1, 25, ""),
    ("I-26", "p = -1/2",
     _ds("1/((k - j)*(2*(n - j) - 1)*(2*(n - j) + 1))"), "O(n) - (n + 1)/(2*n + 1)*H(n)",
     "Set x=1 in", (), 1, 25, ""),
    ("I-27", "quadruple sum",
     "sum(m, 1, n, sum(q, 1, m - 1, sum(k, 1, q - 1, sum(j, 0, k - 1, "
     "1/((k - j)*(q - j)*(q - j + 1))))))",
     "n*(n + 1)/2 - H(n) - (n + 1)/2*(H(n)^2 - H(n, 2))",
     "Write n-1 for n in", (), 0, 12,
     "Outer size r is swept as n; the inner n is renamed q. A leading term r instead fails "
     "at r = 2 (0 vs -1); summing the triple-sum identity over m with the helper sums gives "
     "r(r+1)/2, encoded here."),
    ("I-27a", "sum of H_m",
     "sum(m, 1, n, H(m))", "(n + 1)*H(n) - n",
     "can be derived easily", (), 0, 60, ""),
    ("I-27b", "sum of H_m^2",
     "sum(m, 1, n, H(m)^2)", "(n + 1)*H(n)^2 - (2*n + 1)*H(n) + 2*n",
     "can be derived easily", (), 0, 60, ""),
    ("I-27c", "sum of H_m^(2)",
     "sum(m, 1, n, H(m, 2))", "(n + 1)*H(n, 2) - H(n)",
     "can be derived easily", (), 0, 60, ""),
    ("I-28", "1/((k-j)(n-j+p)), integer p",
     _ds("1/((k - j)*(n - j + p))"),
     "1/2*(H(n)^2 - H(n, 2)) - 1/2*(H(p - 1)^2 + H(p - 1, 2)) + H(p - 1)*(H(p + n - 1) - H(n))"
     " + H(n)*(H(p + n) - H(n)) - sum(k, 1, p - 1, H(k - 1)/(n + k))",
     "Work with a_k=1/(k+p)", (_samples("p", 1, 2, 3, 4),), 1, 25, ""),
    ("I-29", "p = 1",
     _ds("1/((k - j)*(n + 1 - j))"), "1/2*(H(n)^2 - H(n, 2)) + H(n)/(n + 1)",
     "Work with a_k=1/(k+p)", (), 1, 25, ""),
    ("I-30", "H-weighted",
     _ds("H(n - j)/(k - j)"), "(n + 1)*H(n)^2 - (2*n + 1)*H(n) + 2*n",
     "come from the paper", (), 1, 25, ""),
    ("I-31", "H^2-weighted",
     _ds("H(n - j)^2/(k - j)"),
     "(n + 1)*H(n)^3 - 3/2*(2*n + 1)*H(n)^2 + 3*(2*n + 1)*H(n) + 1/2*H(n, 2) - 6*n",
     "come from the paper", (), 1, 25, ""),
    ("I-32", "H^(2)-weighted",
     _ds("H(n - j, 2)/(k - j)"),
     "(n + 1)*H(n)*H(n, 2) - 1/2*(2*n + 1)*H(n, 2) + H(n) - 1/2*H(n)^2",
     "come from the paper", (), 1, 25, ""),
    ("I-33", "Fibonacci from binom(j, n-j)",
     "sum(k, 1, n, sum(j, floor(n/2), k - 1, 1/(n - j)*binom(j, n - j)))", "F(n + 1) - 1",
     "Use a_k=binom(n-k,k) in Theorem", (), 1, 25, ""),
    ("I-34", "Spiess double sum",
     _ds("(-1)^j/(k - j)*binom(p, j)*binom(n - j, m)"),
     "binom(n - p, m - p)*(Hdiff(n - m, m - p) + H(m))",
     "Corollary 5", (_joint("m,p", _SPIESS_ROWS),), 3, 25,
     "H_{n-p} - H_{m-p} encoded as Hdiff(n - m, m - p). Integer p is limited to p <= m, where "
     "binom(n-p, m-p) and H_{m-p} are both finite; n >= 3 keeps n >= m. Rational p in {1/2, -1/2} "
     "is unrestricted."),
    ("I-35", "Knuth-Boyadzhiev, general x",
     _ds("binom(n, j)*x^(n - j)/(k - j)"), "(1 + x)^n*H(n) - sum(k, 1, n, (1 + x)^(n - k)/k)",
     "the Knuth-Boyadzhiev identity", (_samples("x", 1, -1, 2, "1/2"),), 1, 25, ""),
    ("I-36", "Knuth-Boyadzhiev, x = 1",
     _ds("binom(n, j)/(k - j)"), "2^n*(H(n) - sum(k, 1, n, 1/(2^k*k)))",
     "the Knuth-Boyadzhiev identity", (), 1, 25, ""),
    ("I-37", "Stirling derivative identity",
     _ds("fact(n - j)/(k - j)*binom(n, j)*S2(m, n - j)"), "n^m*H(n) - sum(k, 1, n, (n - k)^m/k)",
     "differentiate m times", (_samples("m", 0, 1, 2, 3, 4),), 1, 25, "0^0 = 1."),
    ("I-38", "squared binomials",
     _ds("binom(n, j)^2/(k - j)"), "binom(2*n, n)*(2*H(n) - H(2*n))",
     "plug a_k = binom(n,k)^2", (), 1, 25, ""),
    ("I-39", "binom(n,j) binom(2n,n+j)",
     _ds("1/(k - j)*binom(n, j)*binom(2*n, n + j)"),
     "binom(3*n, n)*H(n) - sum(k, 1, n, 1/k*binom(3*n - k, n - k))",
     "use the fact that", (), 1, 25, ""),
    ("I-40", "Dixon double sum",
     "sum(k, 1, n, sum(j, 0, k - 1, (-1)^j/(n - j)*binom(n, j)^3))",
     "(1 + (-1)^n)/2*((-1)^floor(n/2)*binom(n, floor(n/2))*binom(floor(3*n/2), n) - 1)"
     " + (1 - (-1)^n)/2",
     "use Dixon's identity", (), 1, 25,
     "Parity branches selected by (1 +- (-1)^n)/2; floor keeps the unused branch integral."),
    ("I-41", "central binomials over (k-j)",
     _ds("2^(2*j)/(k - j)*binom(2*(n - j), n - j)"),
     "2^(2*n + 1) + (H(n) - 2)*(2*n + 1)*binom(2*n, n)",
     "employ the following identities from", (), 1, 25, ""),
    ("I-42", "central binomials over (2k-2j-1)",
     _ds("2^(2*j)/(2*k - 2*j - 1)*binom(2*(n - j), n - j)"),
     "(O(n + 1) - 1)*(2*n + 1)*binom(2*n, n)",
     "employ the following identities from", (), 1, 25, ""),
    ("I-43", "O- and H-weighted central binomial sums agree",
     _ds("2^(2*j)/(k - j)*binom(2*(n - j), n - j)*O(n - j)"),
     _ds("2^(2*j)/(2*k - 2*j - 1)*binom(2*(n - j), n - j)*H(n - j)"),
     "This result follows from", (), 1, 25, ""),
    ("I-44", "binom(s, n-j) double sum",
     _ds("(-1)^j*s/(k - j)*binom(s, n - j)"),
     "s*binom(s - 1, n)*H(n) + binom(s - 1, n) - (-1)^n",
     "Batir derived the identity", (_samples("s", "1/2", "-1/2", "3/2", "1/3", "2/5"),), 1, 25,
     "s = 0 excluded (a step of the derivation divides by s)."),
    ("I-45", "s = 1/2 corollary",
     _ds("1/(k - j)*2^(2*j)/(2*(n - j) - 1)*binom(2*(n - j), n - j)"),
     "2^(2*n + 1) - binom(2*n, n)*(H(n) + 2)",
     "keep in mind that", (), 1, 25, ""),
    ("I-46", "s = -1/2 corollary",
     _ds("2^(2*j)/(k - j)*binom(2*(n - j), n - j)"),
     "2^(2*n + 1) + (2*n + 1)*binom(2*n, n)*(H(n) - 2)",
     "Using the transformation s", (), 1, 25, ""),
    ("I-47", "inverse binomials",
     _ds("(-1)^j/(k - j)*binom(n, j)^(-1)"),
     "(n + 1)*(H(n + 1)/(n + 2) - ((-1)^n + 1)/(n + 2)^2)",
     "together with the following identity", (), 1, 25, ""),
    ("I-48", "sum of binom(k+q, p)",
     "sum(k, 1, n, binom(k + q, p))",
     "(n + q + 1)/(p + 1)*binom(n + q, p) - binom(q, p + 1) - binom(q, p)",
     "is a consequence of Pascal's formula",
     (_samples("p", 0, 1, 2, 3), _samples("q", 0, 1, 2, 3, "-1/2")), 1, 60, ""),
    ("I-49", "sum of binom(k+q, p) H_{k+q}",
     "sum(k, 1, n, binom(k + q, p)*H(k + q))",
     "binom(n + q, p)*(1/(p + 1) + (n + q + 1)/(p + 1)*(H(n + q) - 1/(p + 1)))"
     " - binom(q, p + 1)*(H(q) - 1/(p + 1)) - binom(q, p)*H(q)",
     "eliminating H_{q-p-1} between the two",
     (_samples("p", 0, 1, 2, 3), _samples("q", 0, 1, 2, 3)), 1, 60,
     "Integer q only, so that H_q is rational."),
    ("I-50", "binom(n-j+q, p)/(n-j)",
     _ds("1/(n - j)*binom(n - j + q, p)"),
     "(n + q + 1)/(p + 1)*binom(n + q, p) - binom(q, p + 1) - binom(q, p)",
     "Set a_k=binom(k+q,p)",
     (_samples("p", 0, 1, 2, 3), _samples("q", 0, 1, 2, 3, "-1/2")), 1, 25, ""),
    ("I-51", "binom(n-j+q, p)/(k-j+q)",
     _ds("binom(n - j + q, p)/(k - j + q)"),
     "binom(n + q, p)*(1/(p + 1) + (n + q + 1)/(p + 1)*(Hdiff(n, q) - 1/(p + 1)))"
     " + binom(q, p + 1)/(p + 1)",
     "putting a_k=", (_joint("p,q", _QUKEV_ROWS),), 1, 25,
     "H_{n+q} - H_q encoded as Hdiff(n, q). Rational rows use q = -1/2, p = -r - 1/2 (r = 1, 2, 3); "
     "binom(x, y) with y non-integral is evaluated as binom(x, x - y)."),
    ("I-52", "Catalan / odd harmonic, general r",
     _ds("2^(2*j)*binom(n - j + r, r - 1)^(-1)*Cat(n - j)/(2*k - 2*j - 1)"),
     "-binom(n + r, r - 1)^(-1)*Cat(n)/(2*r - 1)*(1 + (2*n + 1)*(O(n) + 1/(2*r - 1)))"
     " + 2^(2*n + 1)/(2*r - 1)^2",
     "set q=-1/2 and p=-r-1/2", (_samples("r", 1, 2, 3, "3/2"),), 1, 25, "r = 1/2 excluded."),
    ("I-53", "Catalan / odd harmonic, r = 1",
     _ds("2^(2*j)*Cat(n - j)/(2*k - 2*j - 1)"),
     "-Cat(n)*(1 + (2*n + 1)*(O(n) + 1)) + 2^(2*n + 1)",
     "set q=-1/2 and p=-r-1/2", (), 1, 25, ""),
    ("I-54", "alternating binom(k, k+r) sum, sin(pi r) = 0 branch",
     "sum(k, 0, n, (-1)^k*binom(n, k)*binom(k, k + r))", "0",
     "Section 13", (_samples("r", 0, 1, 2, 3),), 1, 60,
     "Integer r only: sin(pi r) = 0 for r >= 1 and the r = 0 branch is 0 for n != 0."),
    ("I-55", "alternating binom(k, k+r) H_{k+r} sum, integer r",
     "sum(k, 0, n, (-1)^k*binom(n, k)*binom(k, k + r)*H(k + r))", "-binom(0, r)/n",
     "Section 13", (_samples("r", 0, 1, 2, 3),), 1, 60,
     "binom(0, r) selects the r = 0 branch (-1/n); the sin(pi r) branch vanishes for r >= 1."),
    ("I-56", "sin identity at r = 0",
     _ds("(-1)^j/(k - j + r)*binom(n + r, j)"), "(-1)^n*binom(n, n + r)^(-1)*(-1/n)",
     "and simplify using", (_samples("r", 0),), 1, 25,
     "Only r = 0 is rational; other r carry sin(pi r)/pi."),
    ("I-57", "sin identity at r = 1/2, rationalized",
     _ds("(-1)^j/(2*(k - j) + 1)*binom(2*n + 1, 2*j)*binom(2*j, j)/binom(n, j)*2^(-2*j)"),
     "(-1)^(n + 1)*n*(n + 1)/(2*n + 1)^2*2^(-2*n)*binom(2*(n + 1), n + 1)",
     "and simplify using", (), 1, 25, ""),
    ("I-58", "binomial transform pair theorem",
     "sum(k, 1, n, (-1)^k*sum(j, 0, k - 1, (-1)^j*binom(n - j, k - j)*a(n - j)*s(k - j)))",
     "sum(k, 1, n, a(k)*sigma(k)) - s(0)*sum(k, 1, n, a(k))",
     "and apply it to", (_seq("a"), _seq("s"), _seq("sigma", transform_of="s")), 1, 25,
     _ERRATUM_BINOM),
    ("I-59", "Fibonacci transform pair",
     _ds("binom(n - j, k - j)*a(n - j)*F(k - j)"), "sum(k, 1, n, a(k)*F(2*k))",
     "in turn to the binomial transform pairs", (_seq("a"),), 1, 25, _ERRATUM_BINOM),
    ("I-60", "Lucas transform pair",
     _ds("binom(n - j, k - j)*a(n - j)*L(k - j)"), "sum(k, 1, n, a(k)*(L(2*k) - 2))",
     "in turn to the binomial transform pairs", (_seq("a"),), 1, 25, _ERRATUM_BINOM),
    ("I-61", "Bernoulli self-transform pair",
     _ds("binom(n - j, k - j)*a(n - j)*B(k - j)"), "sum(k, 1, n, a(k)*((-1)^k*B(k) - 1))",
     "to the binomial transform pair", (_seq("a"),), 1, 25, _ERRATUM_BINOM),
    ("I-62", "multi-parameter transform theorem",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*sum(p, 0, r, (-1)^p*binom(r, p)*s(k + p + m - j))"),
     "(-1)^n/(n + 1)*sum(p, 0, m, (-1)^p*binom(m, p)*(sigma(n + p + r) - sigma(p + r)))",
     "Theorems 6.3 and 7.9",
     (_samples("m", 0, 1, 2), _samples("r", 0, 1, 2), _seq("s"), _seq("sigma", transform_of="s")),
     1, 25, ""),
    ("I-63", "multi-parameter theorem, m = 0",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*sum(p, 0, r, (-1)^p*binom(r, p)*s(k + p - j))"),
     "(-1)^n/(n + 1)*(sigma(n + r) - sigma(r))",
     "Theorems 6.3 and 7.9",
     (_samples("r", 0, 1, 2), _seq("s"), _seq("sigma", transform_of="s")), 1, 25, ""),
    ("I-64", "multi-parameter theorem, r = 0",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*s(k + m - j)"),
     "(-1)^n/(n + 1)*sum(p, 0, m, (-1)^p*binom(m, p)*(sigma(n + p) - sigma(p)))",
     "Theorems 6.3 and 7.9",
     (_samples("m", 0, 1, 2), _seq("s"), _seq("sigma", transform_of="s")), 1, 25, ""),
    ("I-65", "multi-parameter theorem, m = r = 0",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*s(k - j)"),
     "(-1)^n/(n + 1)*(sigma(n) - sigma(0))",
     "Theorems 6.3 and 7.9", (_seq("s"), _seq("sigma", transform_of="s")), 1, 25, ""),
    ("I-66", "x^(k-j) H_{k-j} transform sum",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*x^(k - j)*H(k - j)"),
     "(-1)^n/(n + 1)*((1 - x)^n*H(n) - sum(k, 1, n, (1 - x)^(n - k)/k))",
     "which follows from the Knuth-Boyadzhiev identity",
     (_samples("x", 0, 1, -1, 2, "1/2"),), 1, 25, "0^0 = 1."),
    ("I-67", "x = 1 case",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*H(k - j)"), "(-1)^(n + 1)/(n*(n + 1))",
     "which follows from the Knuth-Boyadzhiev identity", (), 1, 25, ""),
    ("I-68", "(k-j)^r H_{k-j} transform sum",
     "sum(k, 1, n, sum(j, 0, k, (-1)^j/(n - j + 1)*binom(n, j)*(k - j)^r*H(k - j)))",
     "(-1)^(n + 1)/(n + 1)*sum(k, 0, r, (-1)^k*fact(k)/(n - k)*S2(r, k))",
     "proceed as in the proof of Proposition", (Param(("r",), IntRange("0", "n - 1")),), 1, 25,
     "Inner sum runs j = 0..k; r ranges over 0..n-1 at each n."),
    ("I-69", "Catalan (H - O) transform sum",
     _ds("(-1)^j*2^(2*j - 2*k)*(2*(k - j) + 1)/((n - j + 1)*(k - j + 1))*binom(n, j)"
         "*Cat(k - j)*(H(k - j + 1) - O(k - j + 1))"),
     "(-1)^(n + 1)*2^(-2*n)*(2*n + 1)/(n + 1)^2*Cat(n)*(H(n + 1) - O(n + 1))",
     "Use the following known result", (), 1, 25, ""),
    ("I-70", "Bernoulli B_{k+1}/(k+1) transform sum",
     "sum(k, 1, n, (-1)^k*sum(j, 0, k - 1, B(k - j + 1)/((k - j + 1)*(n - j + 1))*binom(n, j)))",
     "(-1)^n/(n + 1)^2*((-1)^(n + 1)*B(n + 1) + (n - 1)/2)",
     "Prop. 13.33", (), 1, 25, ""),
    ("I-71", "central binomial transform sum",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*binom(2*(k - j), k - j)"),
     "1/(n + 1)*(sum(k, 0, floor(n/2), binom(n, k)*binom(n - k, k)) - (-1)^n)",
     "It is known that", (), 1, 25, ""),
    ("I-72", "Catalan C_{k+1} transform sum",
     _ds("(-1)^j/(n - j + 1)*binom(n, j)*Cat(k - j + 1)"),
     "1/(n + 1)*(sum(k, 0, floor(n/2), binom(n, 2*k)*Cat(k)) - (-1)^n)",
     "Use the result", (), 1, 25, ""),
]


def _build(entry) -> IdentityRecord:
    ident, title, lhs, rhs, anchor, params, min_n, max_n, note = entry
    rec = IdentityRecord(ident, title, dsl.parse(lhs), dsl.parse(rhs), tuple(params),
                         min_n, max_n, anchor, note)
    rec.check_variables()
    return rec


def _id_key(ident: str):
    head, _, tail = ident.partition("-")
    digits = "".join(ch for ch in tail if ch.isdigit())
    suffix = tail[len(digits):]
    return (head, int(digits) if digits else -1, suffix)


@functools.lru_cache(maxsize=None)
def builtin_catalog() -> Tuple[IdentityRecord, ...]:
    records = tuple(sorted((_build(e) for e in _ENTRIES), key=lambda r: _id_key(r.id)))
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate identity ids in builtin catalog")
    return records


def get_record(ident: str) -> IdentityRecord:
    for rec in builtin_catalog():
        if rec.id == ident:
            return rec
    raise KeyError(ident)


def sort_key(record: IdentityRecord):
    return _id_key(record.id)


# -- serialization -----------------------------------------------------------------


def _domain_to_json(dom: Domain) -> dict:
    if isinstance(dom, SampleSet):
        return {"kind": "samples", "values": [format_rational(v) for v in dom.values]}
    if isinstance(dom, Joint):
        return {"kind": "joint", "rows": [[format_rational(v) for v in row] for row in dom.rows]}
    if isinstance(dom, IntRange):
        return {"kind": "int_range", "lo": dom.lo, "hi": dom.hi}
    if isinstance(dom, RandomRational):
        return {"kind": "random_rational", "num_range": list(dom.num_range), "den_max": dom.den_max}
    if isinstance(dom, RandomSequence):
        out = {"kind": "random_sequence", "extra": dom.extra,
               "num_range": list(dom.num_range), "den_max": dom.den_max}
        if dom.transform_of is not None:
            out["transform_of"] = dom.transform_of
        return out
    raise TypeError(dom)


def _domain_from_json(data: dict) -> Domain:
    kind = data["kind"]
    if kind == "samples":
        return SampleSet(tuple(rational(v) for v in data["values"]))
    if kind == "joint":
        return Joint(tuple(tuple(rational(v) for v in row) for row in data["rows"]))
    if kind == "int_range":
        return IntRange(data["lo"], data["hi"])
    if kind == "random_rational":
        return RandomRational(tuple(data["num_range"]), data["den_max"])
    if kind == "random_sequence":
        return RandomSequence(data["extra"], data.get("transform_of"),
                              tuple(data["num_range"]), data["den_max"])
    raise ValueError(f"unknown domain kind {kind!r}")


def record_to_json(rec: IdentityRecord) -> dict:
    return {
        "id": rec.id,
        "title": rec.title,
        "lhs": dsl.to_text(rec.lhs),
        "rhs": dsl.to_text(rec.rhs),
        "params": [{"name": p.name, "domain": _domain_to_json(p.domain)} for p in rec.params],
        "min_n": rec.min_n,
        "max_n": rec.max_n_default,
        "anchor": rec.anchor,
        "note": rec.note,
    }


def record_from_json(data: dict) -> IdentityRecord:
    params = tuple(Param(tuple(p["name"].split(",")), _domain_from_json(p["domain"]))
                   for p in data.get("params", []))
    rec = IdentityRecord(data["id"], data.get("title", ""), dsl.parse(data["lhs"]),
                         dsl.parse(data["rhs"]), params, int(data.get("min_n", 1)),
                         int(data.get("max_n", 25)), data.get("anchor", ""), data.get("note", ""))
    rec.check_variables()
    return rec


_HEADER = "# dsumcheck identity catalog: one JSON record per line; '#' lines are comments"


def dump_catalog(records: Sequence[IdentityRecord]) -> str:
    lines = [_HEADER]
    lines += [json.dumps(record_to_json(r), ensure_ascii=False) for r in records]
    return "\n".join(lines) + "\n"


def load_catalog(text: str) -> List[IdentityRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            records.append(record_from_json(json.loads(line)))
        except (ValueError, KeyError) as exc:
            raise ValueError(f"catalog line {lineno}: {exc}") from exc
    return records
