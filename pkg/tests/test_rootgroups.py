from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from nonarch.errors import CarrierViolation, DivisionByZero, ParseError, ValidationFailed
from nonarch.hahn import HahnSeries, SigmaFixed, parse_series
from nonarch.rootgroups import (EXPECTED_MODULI, INTEGER_EXPONENTS, SHIPPED_FAMILIES,
                                ExceptionalElement, ExceptionalGroup, HexagonElement, OctagonElement,
                                counterexample_space, hexagon_norm,
                                hexagon_valuation, make_family, quadratic, random_series)
from nonarch.scalars import F2, F3, INF, Q, QI, SQRT2, Gaussian, QuadExt
from nonarch.ultrametric import validate_omega_group

T1 = HahnSeries.monomial


def P(text, field=Q):
    return parse_series(text, field)


@pytest.mark.parametrize("family", SHIPPED_FAMILIES)
def test_shipped_family_passes_validation(family):
    g = make_family(family)
    report = validate_omega_group(g, 120, 1)
    assert report.ok, report.violated_laws()
    assert g.modulus == EXPECTED_MODULI[family]


@pytest.mark.parametrize("family", SHIPPED_FAMILIES)
def test_element_json_round_trip(family):
    g = make_family(family)
    rng = random.Random(2)
    for _ in range(20):
        x = g.sample(rng)
        text = json.dumps(g.to_json(x), sort_keys=True)
        assert g.eq(g.from_json(json.loads(text)), x)
        assert json.loads(text)["family"] == g.name


def test_from_json_rejects_wrong_family():
    g = make_family("triangle")
    data = g.to_json(P("t"))
    data["family"] = "octagon"
    with pytest.raises(ParseError):
        g.from_json(data)


def test_octagon_omega_example():
    g = make_family("octagon")
    t = P("t", F2)
    x = OctagonElement(t, HahnSeries.zero(F2))
    assert g.omega(x) == QuadExt(2, 1)
    assert g.omega(x) == (2 + SQRT2) * t.valuation()


def test_octagon_neg_and_division_by_zero():
    g = make_family("octagon")
    rng = random.Random(4)
    for _ in range(30):
        x = g.sample(rng)
        assert g.add(x, g.neg(x)) == g.zero
    with pytest.raises(DivisionByZero):
        g.act(OctagonElement(P("t", F2), P("1", F2)), HahnSeries.zero(F2))


def test_octagon_sigma_laws():
    rng = random.Random(6)
    for _ in range(100):
        k = random_series(F2, rng, [QuadExt(Fraction(n, 3), m) for n in range(-3, 4) for m in (-1, 0, 1)])
        assert k.tits_sigma().valuation() == SQRT2 * k.valuation()
        assert k.tits_sigma().tits_sigma() == k * k


def test_octagon_line_action_has_modulus_two_plus_sqrt2():
    g = make_family("octagon")
    rng = random.Random(8)
    for _ in range(50):
        x, l = g.sample(rng), random_series(F2, rng, [QuadExt(0), QuadExt(1), SQRT2])
        if not l:
            continue
        assert g.omega(g.line_act(x, l)) == g.omega(x) + g.line_modulus * l.valuation()
        assert g.quotient(g.line_act(x, l)) == g.quotient(x) * l


def test_pseudo_quadratic_constructor():
    g = make_family("pseudo-quadratic", dim=1)
    one = HahnSeries.one(QI)
    half_i = HahnSeries.constant(QI, Gaussian(0, Fraction(1, 2)))
    x = g.element((one,), half_i)
    assert g.q((one,)) == half_i
    assert g.omega(x) == QuadExt(0)
    with pytest.raises(CarrierViolation):
        g.element((one,), one)


def test_pseudo_quadratic_form_identities():
    g = make_family("pseudo-quadratic", dim=3)
    rng = random.Random(9)
    fixed = SigmaFixed()
    for _ in range(60):
        u, v = g.sample(rng).u, g.sample(rng).u
        uv = tuple(a + b for a, b in zip(u, v))
        assert fixed.contains(g.q(uv) - g.q(u) - g.q(v) - g.f(v, u))
        assert g.f(u, v) == -g.f(v, u).conjugate()


def test_hexagon_examples_and_norm_laws():
    g = make_family("hexagon")
    z0 = HahnSeries.zero(F3)
    theta = HexagonElement(z0, HahnSeries.one(F3), z0)
    assert hexagon_norm(theta) == P("t", F3)
    assert g.omega(theta) == QuadExt(1)
    rng = random.Random(10)
    t = P("t", F3)
    for _ in range(100):
        a = g.sample(rng)
        if a == g.zero:
            continue
        assert g.omega(a) == 3 * hexagon_valuation(a)
        ta = HexagonElement(a.x * t, a.y * t, a.z * t)
        assert hexagon_norm(ta) == t * t * t * hexagon_norm(a)


def test_hexagon_carrier():
    g = make_family("hexagon")
    z0 = HahnSeries.zero(F3)
    with pytest.raises(CarrierViolation):
        g.element(P("t^(1/2)", F3), z0, z0)


def test_quadratic_example_and_min_identity():
    g = make_family("quadratic", dim=3)
    x = g.element((P("t"), P("t^(1/2)"), HahnSeries.zero(Q)))
    assert g.omega(x) == QuadExt(1)
    rng = random.Random(12)
    for _ in range(100):
        a = g.sample(rng)
        expected = 2 * min((c.valuation() for c in a), default=INF) if a else INF
        assert g.omega(a) == expected


def test_quadratic_involution_preserves_omega():
    for g in (make_family("quadratic"), counterexample_space()):
        rng = random.Random(13)
        for _ in range(50):
            a = g.sample(rng)
            assert g.omega(g.involution(a)) == g.omega(a)


def test_quadratic_with_general_coefficients():
    g = quadratic(2, [P("2"), P("t^(1/3)")])
    assert validate_omega_group(g, 60, 0).ok
    with pytest.raises(ValueError):
        quadratic(2, [P("1"), P("-1")])


def test_quadratic_rejects_overlong_vectors():
    g = make_family("quadratic", dim=2)
    with pytest.raises(CarrierViolation):
        g.element((P("1"), P("1"), P("1")))


def test_indifferent_carriers():
    k0 = make_family("indifferent")
    l0 = make_family("indifferent", side="L0")
    assert k0.contains(P("1 + t + t^(s) + t^(3)", F2))
    assert not k0.contains(P("t^(1+1*s)", F2))
    assert l0.contains(P("t^(1+1*s)", F2))
    assert not l0.contains(P("t", F2))
    assert validate_omega_group(l0, 100, 0).ok


def test_f4_forms_are_anisotropic_on_samples():
    for family in ("f4-k", "f4-f"):
        g = make_family(family)
        rng = random.Random(14)
        for _ in range(100):
            x = g.sample(rng)
            assert (g.omega(x) is INF) == (x == g.zero)


# ---------------------------------------------------------------------------
# the pluggable exceptional framework


def _zero(field):
    return lambda *args: HahnSeries.zero(field)


def test_degenerate_exceptional_instance_rejected():
    with pytest.raises(ValidationFailed) as info:
        make_family("exceptional", g=_zero(Q), pi=lambda a: HahnSeries.zero(Q),
                    q=lambda v: v * v, modulus=4)
    violated = info.value.report.violated_laws()
    assert "cond2_modulus" in violated
    assert "cond1_nonidentity_finite" in violated


def test_degenerate_instance_yields_twice_the_scalar_valuation():
    g = ExceptionalGroup("Q", 1, _zero(Q), lambda a: HahnSeries.zero(Q), lambda v: v, 4)
    x = ExceptionalElement((P("1"),), P("t"))
    s = P("t^(3)")
    assert g.omega(g.act(x, s)) - g.omega(x) == 2 * s.valuation()


def _consistent_instance_kwargs():
    """X_0 = K with exponents in Z, t-part with exponents in 1/2 + Z, q(a) = a^2.

    The two parts of q(a) + t never cancel and a^2 has a positive leading
    coefficient, so omega = min(2 valuation(a), valuation(t)) with m = 2.
    """
    half = [e + Fraction(1, 2) for e in INTEGER_EXPONENTS]

    def sample(rng):
        return ExceptionalElement((random_series(Q, rng, INTEGER_EXPONENTS, zero_prob=0.3),),
                                  random_series(Q, rng, half, zero_prob=0.3))

    def scalar(rng):
        return T1(Q, Fraction(rng.choice([1, -2, 3])), rng.choice(INTEGER_EXPONENTS))

    return dict(g=_zero(Q), pi=lambda a: a[0], q=lambda v: v * v, modulus=2, dim=1,
                sampler=sample, scalar_sampler=scalar)


def test_consistent_exceptional_instance_accepted():
    g = make_family("exceptional", validation_samples=150, **_consistent_instance_kwargs())
    assert g.modulus == QuadExt(2)
    assert validate_omega_group(g, 100, 5).ok


def test_unknown_family():
    with pytest.raises(ValueError):
        make_family("dodecagon")
