from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nonarch.errors import DivisionByZero, ParseError, TagMismatch
from nonarch.hahn import (AllSeries, ExponentCosets, ExponentLattice, HahnSeries, SigmaFixed,
                          convolve_schoolbook, in_subfield, parse_series)
from nonarch.scalars import F2, F3, INF, Q, QI, SQRT2, Gaussian, QuadExt

EXPONENTS = [QuadExt(Fraction(n, 4)) for n in range(-4, 9)] + [SQRT2, QuadExt(1, -1), QuadExt(0, Fraction(1, 2))]
FIELDS = {"F2": F2, "F3": F3, "Q": Q, "Qi": QI}


def series(field):
    term = st.tuples(st.sampled_from(EXPONENTS), st.builds(lambda r: field.random(random.Random(r)), st.integers()))
    return st.lists(term, max_size=5).map(lambda ts: HahnSeries(field, ts))


def P(text, field=Q):
    return parse_series(text, field)


any_series = st.sampled_from(sorted(FIELDS)).flatmap(lambda tag: st.tuples(series(FIELDS[tag]), series(FIELDS[tag])))


def test_add_examples():
    assert P("t^(1/2) + t") + P("-t^(1/2)") == P("t")
    x = P("3 + t^(2)")
    assert HahnSeries.zero(Q) + x == x
    assert P("1 + t^(1/2)", F2) + P("1 + t^(3/4)", F2) == P("t^(1/2) + t^(3/4)", F2)


def test_mul_examples():
    assert P("t^(1/2)") * P("t^(1/2)") == P("t")
    assert P("1 + t") * HahnSeries.zero(Q) == HahnSeries.zero(Q)
    assert P("1 + t") * P("1 - t") == P("1 - t^(2)")


def test_valuation_examples():
    assert P("t^(1/2) + t^(3/4)").valuation() == QuadExt(Fraction(1, 2))
    assert HahnSeries.zero(Q).valuation() is INF
    assert P("3 + t").valuation() == QuadExt(0)


def test_mixed_fields_rejected():
    with pytest.raises(TagMismatch):
        P("t") + P("t", F2)
    with pytest.raises(TagMismatch):
        P("t") * P("t", F3)


@given(any_series)
def test_mul_matches_schoolbook(pair):
    x, y = pair
    assert x * y == convolve_schoolbook(x, y)


@given(any_series, any_series)
def test_valuation_laws(p1, p2):
    x, y = p1
    assert (x * y).valuation() == x.valuation() + y.valuation()
    s = (x + y).valuation()
    assert s >= min(x.valuation(), y.valuation())
    if x.valuation() != y.valuation():
        assert s == min(x.valuation(), y.valuation())


@given(any_series)
def test_ring_laws(pair):
    x, y = pair
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) * x == x * x + y * x
    assert not (x - x)


def test_invert_examples():
    r = P("t^(1/2)").invert(QuadExt(1))
    assert r.exact and r.value == P("t^(-1/2)")
    r = P("1 - t").invert(QuadExt(3))
    assert r.value == P("1 + t + t^(2) + t^(3)") and not r.exact
    assert (P("1 - t") * r.value - HahnSeries.one(Q)).valuation() == QuadExt(4)
    r = P("2").invert(QuadExt(5))
    assert r.exact and r.value == P("1/2")
    with pytest.raises(DivisionByZero):
        HahnSeries.zero(Q).invert(QuadExt(1))


@given(any_series, st.sampled_from([QuadExt(1), QuadExt(Fraction(5, 2)), QuadExt(2, 1)]))
def test_invert_precision(pair, precision):
    x, _ = pair
    if not x:
        return
    r = x.invert(precision)
    err = (x * r.value - HahnSeries.one(x.field)).valuation()
    # the error is measured relative to the leading term
    assert err > precision
    assert r.exact == (err is INF)


def test_frobenius_examples():
    assert P("1 + t^(1/2)", F2).frobenius() == P("1 + t", F2)
    assert P("t^(1/3)", F3).frobenius() == P("t", F3)
    assert not HahnSeries.zero(F2).frobenius()
    with pytest.raises(TagMismatch):
        P("t").frobenius()


@pytest.mark.parametrize("field, p", [(F2, 2), (F3, 3)])
def test_frobenius_matches_repeated_mul(field, p):
    @given(series(field))
    def check(x):
        assert x.frobenius() == x ** p
        assert x.frobenius().valuation() == p * x.valuation()

    check()


def test_tits_sigma_examples():
    assert P("t", F2).tits_sigma() == HahnSeries.monomial(F2, 1, SQRT2)
    assert P("1 + t", F2).tits_sigma() == P("1 + t^(s)", F2)
    assert not HahnSeries.zero(F2).tits_sigma()
    with pytest.raises(TagMismatch):
        P("t", F3).tits_sigma()


@given(series(F2))
def test_tits_sigma_squares_to_frobenius(x):
    assert x.tits_sigma().tits_sigma() == x.frobenius()
    assert x.tits_sigma().valuation() == SQRT2 * x.valuation()


def test_conjugate_examples():
    x = HahnSeries.monomial(QI, Gaussian(1, 1), 1)
    assert x.conjugate() == HahnSeries.monomial(QI, Gaussian(1, -1), 1)
    real = P("1/2 + 3*t^(2)", QI)
    assert real.conjugate() == real
    assert P("i*t^(1/2) + t", QI).conjugate() == P("-i*t^(1/2) + t", QI)
    with pytest.raises(TagMismatch):
        P("t").conjugate()


@given(series(QI))
def test_conjugate_involutive(x):
    assert x.conjugate().conjugate() == x
    assert x.conjugate().valuation() == x.valuation()
    assert (x.conjugate() == x) == SigmaFixed().contains(x)


def test_subfield_predicates():
    assert in_subfield(P("t^(2)"), ExponentLattice(2))
    assert not in_subfield(P("t^(1/2)"), ExponentLattice(1))
    assert not in_subfield(P("i*t", QI), SigmaFixed())
    assert in_subfield(P("t^(1/2)"), AllSeries())
    lattice = ExponentLattice(1, SQRT2)
    assert lattice.contains(P("t^(2-3*s) + t^(s)", F2))
    assert not lattice.contains(P("t^(1/2)", F2))
    cosets = ExponentCosets(ExponentLattice(2, 2 * SQRT2), [0, 1])
    assert cosets.contains(P("1 + t^(3) + t^(2*s)", F2))
    assert not cosets.contains(P("t^(s)", F2))
    assert cosets.component(P("1 + t^(3)", F2), 1) == P("t^(3)", F2)


def test_parse_forms():
    assert P("t^(1/2) + 3*t^(2)") == HahnSeries(Q, [(QuadExt(Fraction(1, 2)), Fraction(1)), (QuadExt(2), Fraction(3))])
    assert P(" - 3/4 t ") == HahnSeries.monomial(Q, Fraction(-3, 4), 1)
    assert P("0") == HahnSeries.zero(Q)
    assert P("t^(1+1*s)", F2).valuation() == QuadExt(1, 1)
    assert P("2*t", F3) == HahnSeries.monomial(F3, 2, 1)
    assert P("t + t", F2) == HahnSeries.zero(F2)


@pytest.mark.parametrize("text, position", [("t^(1/", 1), ("3 +", 3), ("t^2", 1), ("t t", 2), ("", 0)])
def test_parse_errors_carry_position(text, position):
    with pytest.raises(ParseError) as info:
        P(text)
    assert info.value.position == position


def test_parse_rejects_bad_coefficients():
    with pytest.raises(ParseError):
        P("i*t", Q)
    with pytest.raises(ParseError):
        P("1/2*t", F2)


@given(any_series)
def test_json_round_trip_is_bit_exact(pair):
    x, _ = pair
    text = json.dumps(x.to_json(), sort_keys=True)
    y = HahnSeries.from_json(json.loads(text))
    assert y == x
    assert json.dumps(y.to_json(), sort_keys=True) == text


def test_json_shape():
    data = P("t^(1/2) + 3*t^(2)").to_json()
    assert data == {"field": "Q", "terms": [{"e": ["1/2", "0"], "c": "1"}, {"e": ["2", "0"], "c": "3"}]}
    assert P("i*t", QI).to_json()["terms"][0]["c"] == ["0", "1"]


@pytest.mark.parametrize("data", [
    {"field": "Q"},
    {"field": "Z", "terms": []},
    {"field": "Q", "terms": [{"e": ["1", "0"], "c": "1"}, {"e": ["0", "0"], "c": "1"}]},
    {"field": "Q", "terms": [{"e": ["1", "0"], "c": "0"}]},
    {"field": "F2", "terms": [{"e": ["1", "0"], "c": "2"}]},
])
def test_json_rejects_non_canonical(data):
    with pytest.raises(ParseError):
        HahnSeries.from_json(data)
