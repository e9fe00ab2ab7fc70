from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masurelab.exactalg import (
    INF,
    ExponentOverflow,
    Field,
    FieldMismatch,
    NotExpandable,
    ParseError,
    RationalFunc,
    RationalU,
    expand_series,
    format_rf,
    format_ru,
    parse_rf,
    parse_ru,
)

from conftest import laurent_u_strategy, rf_strategy

Q = Field(0)
F5 = Field(5)


def test_field_parse():
    assert Field.parse("rational") == Q
    assert Field.parse("fp:5") == F5
    with pytest.raises(ValueError):
        Field.parse("fp:4")


@settings(max_examples=60, deadline=None)
@given(rf_strategy(Q), rf_strategy(Q), rf_strategy(Q))
def test_field_axioms_rational(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == RationalFunc.zero(Q)
    if a:
        assert a * a.inverse() == RationalFunc.one(Q)


@settings(max_examples=60, deadline=None)
@given(rf_strategy(F5), rf_strategy(F5))
def test_valuations_are_multiplicative(a, b):
    if a and b:
        assert (a * b).val_plus() == a.val_plus() + b.val_plus()
        assert (a * b).val_minus() == a.val_minus() + b.val_minus()
        # ultrametric inequality
        s = a + b
        if s:
            assert s.val_plus() >= min(a.val_plus(), b.val_plus())
            assert s.val_minus() >= min(a.val_minus(), b.val_minus())


def test_valuation_values():
    w = RationalFunc.w(Q)
    assert ((1 + w) / w**3).val_plus() == -3
    assert ((1 + w) / w**3).val_minus() == 2
    assert RationalFunc.zero(Q).val_plus() == INF


@settings(max_examples=60, deadline=None)
@given(rf_strategy(Q))
def test_rf_format_parse_roundtrip(a):
    assert parse_rf(format_rf(a), Q) == a


@settings(max_examples=40, deadline=None)
@given(laurent_u_strategy(Q), laurent_u_strategy(Q))
def test_ru_roundtrip_and_ring(a, b):
    assert parse_ru(format_ru(a), Q) == a
    assert (a + b) * (a - b) == a * a - b * b


def test_ru_canonical_form():
    u = RationalU.u(Q)
    f = (u**2 + u) / (u**3 + u**2)
    assert f == 1 / u
    assert f.is_monomial()


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        RationalU.u(Q) + RationalU.u(F5)


def test_parse_errors():
    for bad in ("(", "u^", "w**x", "1//2"):
        with pytest.raises(ParseError):
            parse_ru(bad, Q)


def test_exponent_overflow():
    with pytest.raises(ExponentOverflow):
        RationalFunc.monomial(1, 2**64, Q)


def test_series_expansion_geometric():
    w, u = RationalU.w(Q), RationalU.u(Q)
    s = expand_series(1 / (1 - w / u), 5)
    assert s.terms() == {-k: RationalFunc.monomial(1, k, Q) for k in range(6)}
    assert s.precision == 5


def test_series_product_matches_product_series():
    w, u = RationalU.w(Q), RationalU.u(Q)
    f, g = u / (1 + w / u), 1 / (1 - u**-2)
    assert (expand_series(f, 8) * expand_series(g, 8)).same_terms(expand_series(f * g, 8))


def test_not_expandable():
    u = RationalU.u(Q)
    with pytest.raises(NotExpandable) as e:
        expand_series(u**5 / (1 + u**-1), 4, max_shift=2)
    assert e.value.required_shift == 5


def test_u_inv_form():
    u = RationalU.u(Q)
    s, A, B = (u**2 / (1 + u)).u_inv_form()
    assert s == 1 and B[0] == RationalFunc.one(Q)
