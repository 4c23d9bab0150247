from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from dsumcheck import dsl
from dsumcheck.dsl import BinOp, Call, Floor, Neg, Num, Pow, Sum, Var


# -- parsing -----------------------------------------------------------------------


def test_precedence_and_associativity():
    assert dsl.evaluate("2 + 3*4") == 14
    assert dsl.evaluate("10 - 4 - 3") == 3
    assert dsl.evaluate("2*3/4") == mpq(3, 2)
    assert dsl.evaluate("-2^2") == -4
    assert dsl.evaluate("(-2)^2") == 4
    assert dsl.evaluate("2^(-2)") == mpq(1, 4)


def test_int_over_int_is_a_literal():
    e = dsl.parse("3/6")
    assert isinstance(e, Num) and e.value == mpq(1, 2)
    assert dsl.evaluate("1/2/3") == mpq(1, 6)
    assert dsl.evaluate("6/2*3") == 9


def test_sum_and_floor_nodes():
    e = dsl.parse("sum(k, 1, n, floor(k/2))")
    assert isinstance(e, Sum) and e.index == "k"
    assert isinstance(e.body, Floor)


@pytest.mark.parametrize("text,line,col", [
    ("sum(k,1,", 1, 9),
    ("1 +* 2", 1, 4),
    ("f(1, 2", 1, 7),
    ("1 +\n  )", 2, 3),
    ("sum(1, 2, 3, 4)", 1, 5),
    ("floor(1, 2)", 1, 1),
    ("2 $ 3", 1, 3),
])
def test_parse_error_positions(text, line, col):
    with pytest.raises(dsl.ParseError) as info:
        dsl.parse(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert info.value.expected


def test_parse_error_lists_expected_tokens():
    with pytest.raises(dsl.ParseError) as info:
        dsl.parse("(1 + 2")
    assert "')'" in info.value.expected


# -- printer round trip ----------------------------------------------------------

NAMES = st.sampled_from(["n", "k", "x", "r"])
LITERALS = st.fractions(max_denominator=9).filter(lambda f: abs(f) < 50).map(
    lambda f: Num(mpq(f.numerator, f.denominator)))


def _trees(children):
    return st.one_of(
        st.builds(Neg, children),
        st.builds(BinOp, st.sampled_from("+-*/"), children, children),
        st.builds(Pow, children, children),
        st.builds(Floor, children),
        st.builds(lambda a, b: Call("binom", (a, b)), children, children),
        st.builds(lambda i, lo, hi, body: Sum(i, lo, hi, body), NAMES, children, children, children),
    )


ASTS = st.recursive(st.one_of(LITERALS, st.builds(Var, NAMES)), _trees, max_leaves=12)


@settings(max_examples=300)
@given(ASTS)
def test_round_trip(tree):
    # arbitrary trees normalize on the first pass; parsed trees are fixed points
    parsed = dsl.parse(dsl.to_text(tree))
    text = dsl.to_text(parsed)
    assert dsl.parse(text) == parsed
    assert dsl.to_text(dsl.parse(text)) == text


@settings(max_examples=200)
@given(ASTS)
def test_round_trip_preserves_value(tree):
    env = {"n": 3, "k": 2, "x": mpq(1, 3), "r": -2}

    def value(t):
        try:
            return ("ok", dsl.compile_expr(t)(dict(env)))
        except dsl.EvalError as exc:
            return ("err", exc.kind)

    assert value(tree) == value(dsl.parse(dsl.to_text(tree)))


# -- evaluation ----------------------------------------------------------------------


def test_examples():
    assert dsl.evaluate("sum(k, 1, n, 1/k)", {"n": 3}) == mpq(11, 6)
    assert dsl.evaluate("floor((n - 1)/2)", {"n": 4}) == 1
    assert dsl.evaluate("floor((n - 1)/2)", {"n": 0}) == -1
    assert dsl.evaluate("sum(k, 1, n, sum(j, 0, k - 1, 1/((n - j)*(2*(n - j) - 1))))", {"n": 3}) == mpq(23, 15)


def test_empty_sum_skips_body():
    # body would divide by zero if evaluated
    assert dsl.evaluate("sum(k, 1, 0, 1/0*k)") == 0
    assert dsl.evaluate("sum(k, 3, 1, 1/(k - k))") == 0


def test_index_restored_after_sum():
    assert dsl.evaluate("k + sum(k, 1, 3, k) + k", {"k": 10}) == 26


def test_sequences_and_kernels():
    seqs = {"a": [mpq(1), mpq(1, 2), mpq(1, 3)]}
    assert dsl.evaluate("sum(i, 0, 2, a(i))", {}, seqs) == mpq(11, 6)
    assert dsl.evaluate("H(4) - O(2) + B(1) + F(10) + L(0) + Cat(3)") == mpq(25, 12) - mpq(4, 3) - mpq(1, 2) + 55 + 2 + 5
    assert dsl.evaluate("Hdiff(2, -1/2)") == mpq(8, 3)
    assert dsl.evaluate("G(5, 2, 1)") == 7
    assert dsl.evaluate("S2(5, 2) + fact(5) + ff(5, 2) + binom(1/2, 2)") == 15 + 120 + 20 - mpq(1, 8)


def test_alternating_sign_fast_path_matches_general_power():
    for k in range(-5, 6):
        assert dsl.evaluate("(-1)^k", {"k": k}) == (-1) ** k
    assert dsl.evaluate("(-1)^k", {"k": mpq(4)}) == 1


@given(st.lists(st.fractions(max_denominator=20).filter(lambda f: abs(f) < 100), min_size=1, max_size=12))
def test_double_sum_matches_fraction_oracle(terms):
    n = len(terms) - 1
    seq = [mpq(f.numerator, f.denominator) for f in terms]
    got = dsl.evaluate("sum(k, 0, n, sum(j, 0, k, a(j)*(j + 1)/(k + 1)))", {"n": n}, {"a": seq})
    expected = sum((terms[j] * (j + 1) / Fraction(k + 1) for k in range(n + 1) for j in range(k + 1)),
                   Fraction(0))
    assert Fraction(int(got.numerator), int(got.denominator)) == expected


@pytest.mark.parametrize("text,values,seqs,kind", [
    ("1/(k - 2)", {"k": 2}, None, "DivByZero"),
    ("x + 1", {}, None, "UnboundVar"),
    ("2^(1/2)", {}, None, "NonIntegerExponent"),
    ("0^(-1)", {}, None, "DivByZero"),
    ("H(-1)", {}, None, "NegativeKernelIndex"),
    ("H(1/2)", {}, None, "NonIntegerIndex"),
    ("Hdiff(3, -2)", {}, None, "SingularShift"),
    ("binom(1/3, 1/2)", {}, None, "NonRationalValue"),
    ("H(1, 2, 3)", {}, None, "BadArity"),
    ("a(5)", {}, {"a": [1, 2]}, "SequenceTooShort"),
    ("a(-1)", {}, {"a": [1, 2]}, "NegativeKernelIndex"),
    ("a(1)", {}, None, "UnboundVar"),
    ("sum(k, 1, 1/2, k)", {}, None, "NonIntegerIndex"),
])
def test_eval_error_kinds(text, values, seqs, kind):
    with pytest.raises(dsl.EvalError) as info:
        dsl.evaluate(text, values, seqs)
    assert info.value.kind == kind


def test_eval_error_carries_context():
    with pytest.raises(dsl.EvalError) as info:
        dsl.evaluate("sum(k, 1, n, 1/(k - 2))", {"n": 3})
    err = info.value
    assert err.indices == {"n": 3, "k": 2}
    assert dsl.to_text(err.expr) == "1/(k - 2)"
    assert "k=2" in str(err)


def test_free_vars_and_sequences():
    e = dsl.parse("sum(k, 1, n, a(k)*x^k*H(k))")
    assert dsl.free_vars(e) == {"n", "x"}
    assert dsl.sequence_names(e) == {"a"}
