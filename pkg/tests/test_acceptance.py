"""Acceptance criteria 1-8, each at its stated sample budget and exact tolerance.

Every test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, and running this file directly prints them as well.
"""

from __future__ import annotations

import random
import sys
from fractions import Fraction

import pytest

from nonarch.completeness import (COUNTEREXAMPLE_SPACE, ball_point, counterexample_ball,
                                  line_target, lift_point, make_view,
                                  product_metric_check, project_ball, random_ball,
                                  random_candidate, random_chain, refute_candidate, sigma_split,
                                  solve_chain)
from nonarch.errors import CharacteristicTwo, ValidationFailed
from nonarch.hahn import HahnSeries, convolve_schoolbook
from nonarch.rootgroups import (EXPECTED_MODULI, QUADEXT_EXPONENTS, SHIPPED_FAMILIES,
                                HexagonElement, counterexample_space, hexagon_norm,
                                hexagon_valuation, involutory, make_family, random_series,
                                _real_series)
from nonarch.scalars import F2, F3, Q, QI, SQRT2, Gaussian, QuadExt
from nonarch.ultrametric import (Ball, Relation, ball_compare, ball_contains, check_nested,
                                 validate_omega_group)
from oracles import power_by_repeated_mul, probe_points, relation_by_membership

RESULTS: dict[int, str] = {}

EXTENSION_GROUPS = {
    "triangle": lambda: make_family("triangle"),
    "involutory": lambda: involutory(restricted=False),
    "quadratic": lambda: make_family("quadratic"),
    "pseudo-quadratic": lambda: make_family("pseudo-quadratic"),
    "hexagon": lambda: make_family("hexagon"),
    "octagon": lambda: make_family("octagon"),
}


def record(n, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    line = f"criterion {n} [{status}] {title}"
    if detail:
        line += f" -- {detail}"
    if failures:
        line += f" -- {len(failures)} failure(s), first: {failures[0]}"
    RESULTS[n] = line
    print(line)
    assert not failures, line


def L(x):
    return QuadExt(Fraction(x))


def test_criterion_1_counterexample():
    failures = []
    one = HahnSeries.one(Q)
    mono = lambda e: HahnSeries.monomial(Q, 1, QuadExt(Fraction(e)))
    table = [((one,), L(1)), ((one, mono("1/2")), L("3/2")), ((one, mono("1/2"), mono("3/4")), L("7/4"))]
    for i, (center, level) in enumerate(table):
        b = counterexample_ball(i)
        if b.center != center or b.level != level:
            failures.append(f"B_{i} = ({b.center}, {b.level})")
    g = COUNTEREXAMPLE_SPACE
    chain = [counterexample_ball(i) for i in range(13)]
    check_nested(g, chain)
    for i in range(12):
        if ball_compare(g, chain[i], chain[i + 1]) is not Relation.SECOND_INSIDE_FIRST:
            failures.append(f"B_{i + 1} not strictly inside B_{i}")
    rng = random.Random(2024)
    for _ in range(100):
        c = random_candidate(rng)
        r = refute_candidate(c)
        bound = L(2 * (1 - Fraction(1, 2 ** r.j)))
        j = next(k for k in range(len(c) + 1) if k == len(c) or not c[k])
        if not (r.refuted and r.j == j and r.level_found <= bound < r.level_required
                and not ball_contains(g, counterexample_ball(j), c)):
            failures.append(f"candidate {c} not refuted")
    record(1, "counterexample table, nesting to depth 12, 100 candidates refuted", failures,
           "levels 1, 3/2, 7/4")


def test_criterion_2_axiom_suite():
    failures = []
    for family in SHIPPED_FAMILIES:
        g = make_family(family)
        report = validate_omega_group(g, 500, 0)
        if not report.ok:
            failures.append(f"{family}: {report.violated_laws()}")
        if g.modulus != EXPECTED_MODULI[family]:
            failures.append(f"{family}: modulus {g.modulus}")
        if report.laws["cond2_modulus"].checked != 500:
            failures.append(f"{family}: modulus law checked {report.laws['cond2_modulus'].checked} times")
    zero = lambda *a: HahnSeries.zero(Q)
    try:
        make_family("exceptional", g=zero, pi=zero, q=lambda v: v, modulus=4)
        failures.append("degenerate exceptional instance accepted")
    except ValidationFailed as exc:
        if "cond2_modulus" not in exc.report.violated_laws():
            failures.append("degenerate instance rejected for the wrong reason")
    moduli = ", ".join(str(EXPECTED_MODULI[f]) for f in SHIPPED_FAMILIES)
    record(2, "all shipped families pass 500-sample validation; degenerate m=4 rejected",
           failures, f"moduli {moduli}")


def test_criterion_3_octagon_endomorphism():
    failures = []
    rng = random.Random(3)
    for _ in range(500):
        x = random_series(F2, rng, QUADEXT_EXPONENTS, max_terms=4)
        xs = x.tits_sigma()
        if xs.valuation() != SQRT2 * x.valuation():
            failures.append(f"valuation of sigma({x})")
        if xs.tits_sigma() != x * x:
            failures.append(f"sigma^2({x}) != x^2")
    record(3, "octagon sigma: valuation scales by sqrt(2), sigma^2 = squaring (500 samples)", failures)


def test_criterion_4_hexagon_norm():
    failures = []
    g = make_family("hexagon")
    t = HahnSeries.monomial(F3, 1, 1)
    rng = random.Random(4)
    checked = 0
    while checked < 500:
        a = g.sample(rng)
        if a == g.zero:
            continue
        checked += 1
        if hexagon_norm(a).valuation() != 3 * hexagon_valuation(a):
            failures.append(f"norm valuation at {a}")
        ta = HexagonElement(a.x * t, a.y * t, a.z * t)
        if hexagon_norm(ta) != t * t * t * hexagon_norm(a):
            failures.append(f"N(t a) != t^3 N(a) at {a}")
    record(4, "hexagon: valuation(N(a)) = 3 nu_E(a), N(t a) = t^3 N(a) (500 samples)", failures)


def test_criterion_5_ball_projection_and_lifting():
    failures = []
    for family, build in EXTENSION_GROUPS.items():
        g = build()
        view = make_view(g)
        x = view.independent_x
        rng = random.Random(5)
        for _ in range(50):
            b = random_ball(g, rng)
            image = project_ball(view, b)
            expected = (b.level - g.omega(x)) / view.modulus + view.rho(x).valuation()
            if image.level != expected or image.center != view.rho(b.center):
                failures.append(f"{family}: projected level {image.level} != {expected}")
            for _ in range(5):
                if not ball_contains(view.line, image, view.rho(ball_point(g, b, rng))):
                    failures.append(f"{family}: a point of the ball maps outside the image")
            for k in range(20):
                target = line_target(view, image, rng, boundary=(k == 0))
                z = lift_point(view, target, b)
                if view.rho(z) != target or not ball_contains(g, b, z):
                    failures.append(f"{family}: lift of {target} misses the ball")
    record(5, "ball projection level exact, 20 lifts per ball land in the ball (50 balls/family)",
           failures, ", ".join(EXTENSION_GROUPS))


def test_criterion_6_recursive_chain_solver():
    failures = []
    for family, build in EXTENSION_GROUPS.items():
        g = build()
        view = make_view(g)
        rng = random.Random(6)
        for _ in range(50):
            chain = random_chain(g, rng, 5)
            s = solve_chain(view, chain)
            solved = [ball_contains(g, b, s.point) for b in chain]
            oracle = [ball_contains(g, b, s.oracle) for b in chain]
            if not all(solved) or solved != oracle:
                failures.append(f"{family}: solution misses a ball")
    record(6, "recursive chain solver agrees with the smallest-center oracle (50 chains/family)",
           failures)


def test_criterion_7_sigma_split_and_product_metric():
    failures = []
    rng = random.Random(7)
    for _ in range(200):
        x = random_series(QI, rng, QUADEXT_EXPONENTS, max_terms=4)
        s = sigma_split(x)
        if s.reconstruct() != x:
            failures.append(f"reconstruction of {x}")
        if s.v.conjugate() != s.v or s.v_prime.conjugate() != -s.v_prime:
            failures.append(f"split parts of {x} not fixed/anti-fixed")
        if x.valuation() != min(s.v.valuation(), s.v_prime.valuation()):
            failures.append(f"omega-min identity at {x}")
    fixed = lambda r: _real_series(r)
    anti = lambda r: _real_series(r).scale(Gaussian(0, 1))
    report = product_metric_check(fixed, anti, 200, 7)
    if not report.ok:
        failures.append(f"product metric: {report.violations} violations")
    try:
        sigma_split(HahnSeries.monomial(F2, 1, 1), lambda y: y)
        failures.append("GF(2) split did not raise")
    except CharacteristicTwo:
        pass
    for g in (make_family("quadratic"), counterexample_space()):
        for _ in range(200):
            a = g.sample(rng)
            if g.omega(g.involution(a)) != g.omega(a):
                failures.append(f"involution changes omega at {a}")
    record(7, "sigma-split exact, product metric exact, GF(2) typed error, involution keeps omega",
           failures, "200 samples each")


def test_criterion_8_brute_force_oracles():
    failures = []
    rng = random.Random(8)
    for field in (F2, F3, Q, QI):
        for _ in range(150):
            x = random_series(field, rng, QUADEXT_EXPONENTS, max_terms=4, zero_prob=0.05)
            y = random_series(field, rng, QUADEXT_EXPONENTS, max_terms=4, zero_prob=0.05)
            if x * y != convolve_schoolbook(x, y):
                failures.append(f"mul {x} * {y}")
    for field, p in ((F2, 2), (F3, 3)):
        for _ in range(150):
            x = random_series(field, rng, QUADEXT_EXPONENTS, max_terms=4, zero_prob=0.05)
            if x.frobenius() != power_by_repeated_mul(x, p):
                failures.append(f"frobenius {x}")
    tri = make_family("triangle")
    centers = [HahnSeries.zero(Q)] + [random_series(Q, rng, QUADEXT_EXPONENTS[:9]) for _ in range(5)]
    levels = [L(Fraction(n, 4)) for n in range(-4, 9)]
    for _ in range(200):
        b1 = Ball(rng.choice(centers), rng.choice(levels), rng.choice(["open", "closed"]))
        b2 = Ball(rng.choice(centers), rng.choice(levels), rng.choice(["open", "closed"]))
        points = probe_points(tri, [b1, b2], rng)
        if ball_compare(tri, b1, b2) != relation_by_membership(tri, b1, b2, points):
            failures.append(f"ball_compare {b1} vs {b2}")
    record(8, "mul vs schoolbook, frobenius vs repeated mul, ball_compare vs membership", failures)


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
