"""A small language for finite nested sums over exact rationals.

Grammar (whitespace insensitive, identifiers case-sensitive)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | atom ("^" atom)?
    atom   := INT | INT "/" INT | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

``sum(k, lo, hi, body)`` and ``floor(x)`` are spelled as calls.  Any other
call is either a sequence kernel (see :data:`KERNELS`) or, when the name is
not a kernel, a lookup into a finite sequence supplied with the binding,
e.g. ``a(n - j)``.

Expressions are compiled once into nested Python closures; evaluation of a
compiled expression only touches a per-call environment, so a compiled
expression can be shared between threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from gmpy2 import mpq

from . import exact
from .exact import Rational

__all__ = [
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Floor",
    "Call",
    "Sum",
    "Expr",
    "ParseError",
    "EvalError",
    "KERNELS",
    "parse",
    "to_text",
    "compile_expr",
    "evaluate",
    "free_vars",
    "sequence_names",
]

Pos = Optional[Tuple[int, int]]


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Rational
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Neg:
    arg: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Floor:
    arg: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Sum:
    index: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"
    pos: Pos = field(default=None, compare=False, repr=False)


Expr = Union[Num, Var, Neg, BinOp, Pow, Floor, Call, Sum]


# -- errors ------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += "; expected one of: " + ", ".join(sorted(self.expected))
        super().__init__(detail)


class EvalError(ArithmeticError):
    """Evaluation failure with the offending subexpression and index values.

    ``kind`` is one of ``DivByZero``, ``SingularShift``, ``UnboundVar``,
    ``NonIntegerExponent``, ``NegativeKernelIndex``, ``NonIntegerIndex``,
    ``NonRationalValue``, ``BadArity``, ``SequenceTooShort``.
    """

    def __init__(self, kind: str, message: str, expr: Optional[Expr] = None,
                 indices: Optional[Mapping[str, object]] = None):
        self.kind = kind
        self.expr = expr
        self.indices = dict(indices or {})
        self.message = message
        where = f" in `{to_text(expr)}`" if expr is not None else ""
        at = ""
        if self.indices:
            at = " at " + ", ".join(
                f"{k}={v if isinstance(v, int) or v.denominator != 1 else int(v)}"
                for k, v in sorted(self.indices.items())
            )
        super().__init__(f"{kind}: {message}{where}{at}")


# -- tokenizer / parser --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))")


@dataclass
class _Token:
    kind: str  # "int", "ident", "op", "eof"
    text: str
    offset: int


def _tokenize(text: str, locate) -> List[_Token]:
    out = []
    i = 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i == len(text):
            out.append(_Token("eof", "", i))
            return out
        m = _TOKEN.match(text, i)
        if m is None or m.lastgroup is None:
            line, col = locate(i)
            raise ParseError(f"unexpected character {text[i]!r}", line, col,
                             ["integer", "identifier", "operator"])
        kind = m.lastgroup
        out.append(_Token(kind, m.group(kind), m.start(kind)))
        i = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]
        self.tokens = _tokenize(text, self.locate)
        self.i = 0

    def locate(self, offset: int) -> Tuple[int, int]:
        line = 0
        for idx, start in enumerate(self._line_starts):
            if start <= offset:
                line = idx
        return line + 1, offset - self._line_starts[line] + 1

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def fail(self, expected: Iterable[str], message: Optional[str] = None):
        tok = self.tok
        line, col = self.locate(tok.offset)
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(message or f"unexpected {found}", line, col, expected)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            self.fail([repr(text)])

    def pos(self) -> Tuple[int, int]:
        return self.locate(self.tok.offset)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "eof":
            self.fail(["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"])
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term(), pos)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            pos = self.pos()
            op = self.tok.text
            self.i += 1
            right = self.factor()
            if (op == "/" and isinstance(left, Num) and isinstance(right, Num)
                    and left.value.denominator == 1 and right.value.denominator == 1
                    and right.value != 0):
                # INT "/" INT is a rational literal
                left = Num(left.value / right.value, left.pos)
            else:
                left = BinOp(op, left, right, pos)
        return left

    def factor(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            pos = self.pos()
            self.i += 1
            return Neg(self.factor(), pos)
        base = self.atom()
        if self.accept("^"):
            pos = self.pos()
            return Pow(base, self.atom(), pos)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        pos = self.pos()
        if tok.kind == "int":
            self.i += 1
            return Num(mpq(int(tok.text)), pos)
        if tok.kind == "ident":
            self.i += 1
            if not self.accept("("):
                return Var(tok.text, pos)
            if tok.text == "sum":
                if self.tok.kind != "ident":
                    self.fail(["identifier"], "sum() needs an index variable first")
                index = self.tok.text
                self.i += 1
                parts = []
                for _ in range(3):
                    self.expect(",")
                    parts.append(self.expr())
                self.expect(")")
                return Sum(index, parts[0], parts[1], parts[2], pos)
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            if not self.accept(")"):
                self.fail(["','", "')'"])
            if tok.text == "floor":
                if len(args) != 1:
                    line, col = pos
                    raise ParseError("floor() takes exactly one argument", line, col, ["')'"])
                return Floor(args[0], pos)
            return Call(tok.text, tuple(args), pos)
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                self.fail(["')'", "operator"])
            return inner
        self.fail(["integer", "identifier", "'('", "'-'"])


def parse(text: str) -> Expr:
    """Parse ``text`` into an :data:`Expr`; raises :class:`ParseError`."""
    return _Parser(text).parse()


# -- canonical printer -------------------------------------------------------

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC_ADD if e.op in "+-" else _PREC_MUL
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Pow):
        return _PREC_POW
    return _PREC_ATOM  # atoms, calls, and literals (non-integers print parenthesized)


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    return s if _prec(e) >= min_prec else f"({s})"


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(parse(t))) == parse(t)``."""
    if isinstance(e, Num):
        v = e.value
        if v.denominator == 1 and v >= 0:
            return str(v.numerator)
        return f"({v.numerator}/{v.denominator})" if v.denominator != 1 else f"({v.numerator})"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _PREC_NEG)
    if isinstance(e, BinOp):
        if e.op in "+-":
            return f"{_wrap(e.left, _PREC_ADD)} {e.op} {_wrap(e.right, _PREC_MUL)}"
        return f"{_wrap(e.left, _PREC_MUL)}{e.op}{_wrap(e.right, _PREC_NEG)}"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _PREC_ATOM)}^{_wrap(e.exp, _PREC_ATOM)}"
    if isinstance(e, Floor):
        return f"floor({to_text(e.arg)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_text(a) for a in e.args)})"
    if isinstance(e, Sum):
        return f"sum({e.index}, {to_text(e.lo)}, {to_text(e.hi)}, {to_text(e.body)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- analysis ------------------------------------------------------------------


def free_vars(e: Expr, bound: frozenset = frozenset()) -> set:
    """Scalar variables not bound by an enclosing ``sum``."""
    if isinstance(e, Num):
        return set()
    if isinstance(e, Var):
        return set() if e.name in bound else {e.name}
    if isinstance(e, (Neg, Floor)):
        return free_vars(e.arg, bound)
    if isinstance(e, BinOp):
        return free_vars(e.left, bound) | free_vars(e.right, bound)
    if isinstance(e, Pow):
        return free_vars(e.base, bound) | free_vars(e.exp, bound)
    if isinstance(e, Call):
        out = set()
        for a in e.args:
            out |= free_vars(a, bound)
        return out
    if isinstance(e, Sum):
        return (free_vars(e.lo, bound) | free_vars(e.hi, bound)
                | free_vars(e.body, bound | {e.index}))
    raise TypeError(e)


def sequence_names(e: Expr) -> set:
    """Names called like functions that are not kernels (binding-supplied sequences)."""
    if isinstance(e, (Num, Var)):
        return set()
    if isinstance(e, (Neg, Floor)):
        return sequence_names(e.arg)
    if isinstance(e, BinOp):
        return sequence_names(e.left) | sequence_names(e.right)
    if isinstance(e, Pow):
        return sequence_names(e.base) | sequence_names(e.exp)
    if isinstance(e, Call):
        out = set() if e.name in KERNELS else {e.name}
        for a in e.args:
            out |= sequence_names(a)
        return out
    if isinstance(e, Sum):
        return sequence_names(e.lo) | sequence_names(e.hi) | sequence_names(e.body)
    raise TypeError(e)


# -- kernels ---------------------------------------------------------------------


class _NotInteger(ValueError):
    pass


def _i(v) -> int:
    if v.denominator != 1:
        raise _NotInteger(f"{exact.format_rational(v)} is not an integer")
    return int(v)


KERNELS: Dict[str, Tuple[Tuple[int, ...], Callable]] = {
    "H": ((1, 2), lambda n, s=1: exact.harmonic(_i(n), _i(s))),
    "O": ((1, 2), lambda n, s=1: exact.odd_harmonic(_i(n), _i(s))),
    "Hdiff": ((2,), lambda n, r: exact.shifted_harmonic_diff(_i(n), r)),
    "B": ((1,), lambda n: exact.bernoulli(_i(n))),
    "F": ((1,), lambda n: exact.fibonacci(_i(n))),
    "L": ((1,), lambda n: exact.lucas(_i(n))),
    "G": ((3,), lambda n, g1, g2: exact.gibonacci(_i(n), g1, g2)),
    "S2": ((2,), lambda n, k: exact.stirling2(_i(n), _i(k))),
    "Cat": ((1,), lambda n: exact.catalan(_i(n))),
    "binom": ((2,), exact.binom),
    "fact": ((1,), lambda n: exact.factorial(_i(n))),
    "ff": ((2,), lambda x, k: exact.falling_factorial(x, _i(k))),
}
"""Kernel name -> (accepted arities, implementation)."""

_KERNEL_ERRORS = (
    (ZeroDivisionError, "DivByZero"),
    (exact.SingularShift, "SingularShift"),
    (exact.NegativeIndex, "NegativeKernelIndex"),
    (_NotInteger, "NonIntegerIndex"),
    (exact.NonRationalBinomial, "NonRationalValue"),
)


def _scalars(env: Mapping) -> Dict[str, object]:
    return {k: v for k, v in env.items() if not isinstance(v, tuple)}


def _fail(kind: str, message: str, node: Expr, env: Mapping):
    raise EvalError(kind, message, node, _scalars(env))


# -- compiler ----------------------------------------------------------------------

Compiled = Callable[[dict], object]


def compile_expr(e: Expr) -> Compiled:
    """Compile ``e`` to a function of an environment dict.

    The environment maps scalar names to ints/Rationals and sequence names
    to tuples of Rationals indexed from 0.  ``sum`` bodies temporarily bind
    their index in the same dict and restore it afterwards.
    """
    if isinstance(e, Num):
        value = e.value
        return lambda env: value

    if isinstance(e, Var):
        name = e.name

        def var(env):
            try:
                return env[name]
            except KeyError:
                _fail("UnboundVar", f"variable {name!r} is not bound", e, env)

        return var

    if isinstance(e, Neg):
        arg = compile_expr(e.arg)
        return lambda env: -arg(env)

    if isinstance(e, BinOp):
        left, right = compile_expr(e.left), compile_expr(e.right)
        if e.op == "+":
            return lambda env: left(env) + right(env)
        if e.op == "-":
            return lambda env: left(env) - right(env)
        if e.op == "*":
            return lambda env: left(env) * right(env)

        def div(env):
            num = left(env)
            den = right(env)
            if not den:
                _fail("DivByZero", "division by zero", e, env)
            return mpq(num) / den

        return div

    if isinstance(e, Pow):
        exp_fn = compile_expr(e.exp)
        base = e.base
        if isinstance(base, Neg) and isinstance(base.arg, Num) and base.arg.value == 1:
            # (-1)^k: parity only
            def sign(env):
                k = exp_fn(env)
                if k.denominator != 1:
                    _fail("NonIntegerExponent", "exponent must be an integer", e, env)
                return -1 if k.numerator & 1 else 1

            return sign
        base_fn = compile_expr(base)

        def power(env):
            k = exp_fn(env)
            if k.denominator != 1:
                _fail("NonIntegerExponent", "exponent must be an integer", e, env)
            k = int(k)
            b = base_fn(env)
            if k >= 0:
                return b**k
            if not b:
                _fail("DivByZero", "zero to a negative power", e, env)
            return mpq(1) / b ** (-k)

        return power

    if isinstance(e, Floor):
        arg = compile_expr(e.arg)
        return lambda env: exact.floor(arg(env))

    if isinstance(e, Call):
        args = [compile_expr(a) for a in e.args]
        if e.name in KERNELS:
            arities, impl = KERNELS[e.name]
            if len(args) not in arities:
                raise EvalError("BadArity", f"{e.name} takes {' or '.join(map(str, arities))} "
                                f"arguments, got {len(args)}", e)
            if len(args) == 1:
                only = args[0]

                def kernel1(env):
                    try:
                        return impl(only(env))
                    except EvalError:
                        raise
                    except Exception as exc:
                        _kernel_error(exc, e, env)

                return kernel1

            def kernel(env):
                vals = [a(env) for a in args]
                try:
                    return impl(*vals)
                except Exception as exc:
                    _kernel_error(exc, e, env)

            return kernel
        if len(args) != 1:
            raise EvalError("BadArity", f"sequence {e.name} takes one index", e)
        name, index_fn = e.name, args[0]

        def lookup(env):
            idx = index_fn(env)
            try:
                seq = env[name]
            except KeyError:
                _fail("UnboundVar", f"sequence {name!r} is not bound", e, env)
            if idx.denominator != 1:
                _fail("NonIntegerIndex", "sequence index must be an integer", e, env)
            idx = int(idx)
            if idx < 0:
                _fail("NegativeKernelIndex", f"negative sequence index {idx}", e, env)
            if idx >= len(seq):
                _fail("SequenceTooShort", f"{name} has {len(seq)} terms, index {idx}", e, env)
            return seq[idx]

        return lookup

    if isinstance(e, Sum):
        index = e.index
        lo_fn, hi_fn, body = compile_expr(e.lo), compile_expr(e.hi), compile_expr(e.body)
        missing = object()

        def total(env):
            lo, hi = lo_fn(env), hi_fn(env)
            if lo.denominator != 1 or hi.denominator != 1:
                _fail("NonIntegerIndex", "summation bounds must be integers", e, env)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                return 0
            saved = env.get(index, missing)
            acc = 0
            try:
                for i in range(lo, hi + 1):
                    env[index] = i
                    acc = acc + body(env)
            finally:
                if saved is missing:
                    del env[index]
                else:
                    env[index] = saved
            return acc

        return total

    raise TypeError(f"not an expression node: {e!r}")


def _kernel_error(exc: Exception, node: Expr, env: Mapping):
    for etype, kind in _KERNEL_ERRORS:
        if isinstance(exc, etype):
            _fail(kind, str(exc) or etype.__name__, node, env)
    raise exc


def make_env(values: Mapping[str, object],
             sequences: Optional[Mapping[str, Sequence]] = None) -> dict:
    env = {k: mpq(v) if not isinstance(v, int) else v for k, v in values.items()}
    for name, seq in (sequences or {}).items():
        env[name] = tuple(seq)
    return env


def evaluate(e: Union[Expr, str], values: Mapping[str, object] = None,
             sequences: Optional[Mapping[str, Sequence]] = None) -> Rational:
    """Evaluate ``e`` exactly under the given scalar and sequence bindings."""
    if isinstance(e, str):
        e = parse(e)
    fn = compile_expr(e)
    return mpq(fn(make_env(values or {}, sequences)))
