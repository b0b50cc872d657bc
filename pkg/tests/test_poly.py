"""Polynomial kernel: parsing, arithmetic, canonical forms and factorization against sympy."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import sympy_irreducible_factors, to_sympy
from symred.poly import (Poly, PolyError, canonical, coefficients_in, degree_in, divide_exact, eval_rational,
                         eval_zero, expand_factors, factor, factor_with_unit, parse, partial, schwinger,
                         substitute, to_str, var, var_from_name)

VARS = ["x1", "x2", "x3", "x4", "s", "msq1"]


@st.composite
def polys(draw, max_terms: int = 5, max_exp: int = 2, names=VARS[:4]):
    terms = []
    for _ in range(draw(st.integers(1, max_terms))):
        c = draw(st.integers(-5, 5).filter(bool))
        mono = [f"{v}^{draw(st.integers(0, max_exp))}" for v in names]
        terms.append("*".join([f"({c})"] + mono))
    return parse("+".join(terms))


def test_parse_print_round_trip_examples():
    for text in ["x1 + x2 + x3", "2*x1^2*s - 3/4*x2", "msq1*x3 + t", "0", "-x1"]:
        p = parse(text)
        assert parse(to_str(p)) == p


def test_rational_coefficients_print_as_p_over_q():
    assert "3/4" in to_str(parse("3/4*x1"))
    assert "." not in to_str(parse("1/3*x1 + 2/7"))


def test_variable_kinds():
    assert var_from_name("x7").kind == "schwinger"
    assert var_from_name("msq2").kind == "mass_square"
    assert var_from_name("s").kind == "kinematic"


def test_parse_errors():
    for bad in ["x1 +", "(x1", "x1 ** 2 ^", "2x"]:
        with pytest.raises(PolyError):
            parse(bad)


@settings(max_examples=150, deadline=None)
@given(polys(), polys())
def test_arithmetic_matches_sympy(p, q):
    assert to_sympy(p + q) == sympy.expand(to_sympy(p) + to_sympy(q))
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))
    assert to_sympy(p - q) == sympy.expand(to_sympy(p) - to_sympy(q))


@settings(max_examples=100, deadline=None)
@given(polys())
def test_round_trip_property(p):
    assert parse(to_str(p)) == p


@settings(max_examples=100, deadline=None)
@given(polys())
def test_partial_and_evaluation(p):
    x = var_from_name("x1")
    sx = sympy.Symbol("x1")
    assert to_sympy(partial(p, x)) == sympy.expand(sympy.diff(to_sympy(p), sx))
    assert to_sympy(eval_zero(p, x)) == sympy.expand(to_sympy(p).subs(sx, 0))
    coeffs = coefficients_in(p, x)
    assert len(coeffs) == degree_in(p, x) + 1 or not p


@settings(max_examples=100, deadline=None)
@given(polys())
def test_canonical_form(p):
    if not p or len(p.terms) == 1 and 0 in p.terms:
        return
    c = canonical(p)
    assert c.leading_coefficient() > 0
    assert all(isinstance(v, int) for v in c.terms.values())
    assert canonical(p.scale(Fraction(-7, 3))) == c


def test_substitute_and_eval():
    p = parse("x1*x2 + 3*x1 - s")
    assert substitute(p, schwinger(2), parse("x3 + 1")) == parse("x1*x3 + 4*x1 - s")
    assert eval_rational(p, {schwinger(1): 2, schwinger(2): Fraction(1, 2), var_from_name("s"): 1}) == 6


def test_divide_exact():
    a, b = parse("x1 + x2"), parse("x1 - 2*x3")
    assert divide_exact(a * b, b) == a
    assert divide_exact(a * b + 1, b) is None


# ----------------------------------------------------------- factorization

def _up_to_sign(e: sympy.Expr) -> str:
    return min(sympy.srepr(sympy.expand(e)), sympy.srepr(sympy.expand(-e)))


def _check_against_sympy(p: Poly) -> None:
    unit, facs = factor_with_unit(p)
    assert expand_factors(unit, facs) == p
    ours = sorted(_up_to_sign(to_sympy(f)) for f, mult in facs for _ in range(mult))
    _, sfacs = sympy.factor_list(to_sympy(p))
    theirs = sorted(_up_to_sign(sympy.Poly(f, *sorted(f.free_symbols, key=str)).primitive()[1].as_expr())
                    for f, mult in sfacs for _ in range(mult))
    assert ours == theirs, to_str(p)


@pytest.mark.parametrize("text", [
    "x1^2 - x2^2",
    "-(x3*x4+x3*x6+x4*x6+x5*x6)^2",
    "x5*x3*x4 + x3*x5*x6 + x4*x5*x6",
    "(x1 + x2*s)*(x1*x3 - t)*(x2 + 1)^3",
    "6*x1^2*x2 + 9*x1*x2^2",
    "x1^4 + 4*x2^4",
    "x1^6 - x2^6",
    "(x1*x2 + x3*x4 - 1)*(x1 + x3 + x4)^2*(x2 - x4)",
    "x1^2 + x2^2 + x3^2",
])
def test_factor_examples(text):
    _check_against_sympy(parse(text))


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3, max_exp=2, names=VARS[:3]), polys(max_terms=3, max_exp=2, names=VARS[:3]))
def test_factor_products_match_sympy(p, q):
    if not p or not q:
        return
    _check_against_sympy(p * q)


def test_factor_random_symanzik_like_products():
    rng = random.Random(11)
    names = ["x1", "x2", "x3", "x4", "x5"]
    for _ in range(40):
        parts = []
        for _ in range(rng.randint(1, 3)):
            terms = ["*".join(rng.sample(names, rng.randint(1, 3))) for _ in range(rng.randint(1, 4))]
            parts.append("(" + "+".join(terms) + ")")
        _check_against_sympy(parse("*".join(parts)))


def test_factor_of_irreducible_is_itself():
    p = parse("x1*x2 + x2*x3 + x1*x3")
    assert [f for f, _ in factor(p)] == [canonical(p)]
    assert len(sympy_irreducible_factors(p)) == 1


def test_var_helper():
    assert var("x2") * 2 == parse("2*x2")
