"""Spherical completeness machinery for extension omega-groups.

An :class:`ExtensionView` presents a group ``S`` as an extension of a
K-line by a normal subgroup ``T'``: a homomorphism ``rho`` onto K with
kernel ``T'`` and an *independent* element ``x``, i.e. one with
``omega(x + y) == min(omega(x), omega(y))`` for every ``y`` in ``T'``.
From this the module provides ball projection and lifting, a recursive
solver for nested ball chains that descends through ``T'``, the
fixed/anti-fixed splitting for an involution, and the nested chain in an
infinite-dimensional quadratic space whose intersection is empty.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

from .errors import (CharacteristicTwo, EmptyChain, InputInSubgroup, ParseError,
                     TargetOutsideImage)
from .hahn import ExponentLattice, HahnSeries, SigmaFixed
from .rootgroups import (RATIONAL_EXPONENTS, HexagonElement, OctagonElement,
                         PseudoQuadraticElement, QuadraticFormGroup, SeriesGroup,
                         counterexample_space, random_series, _real_series, _trim)
from .scalars import QI, Gaussian, QuadExt, level_to_json
from .ultrametric import (Ball, OmegaGroup, ball_contains, check_nested, distance_level,
                          recenter)

__all__ = [
    "ExtensionView", "make_view", "VIEWS", "projected_level", "project_ball", "lift_point",
    "is_independent", "make_independent", "Independence", "solve_chain", "ChainSolution",
    "sigma_split", "SigmaSplit", "product_metric_check", "ProductMetricReport",
    "counterexample_ball", "counterexample_chain", "refute_candidate", "Refutation",
    "random_candidate", "random_ball", "random_chain", "ball_point", "scale_into",
    "line_target",
]


@dataclass
class ExtensionView:
    """``group`` seen as an extension of a K-line (``line``) by ``T'``.

    ``act(z, l)`` is a K-action with ``rho(act(z, l)) == rho(z) * l`` and
    ``omega(act(z, l)) == omega(z) + modulus * valuation(l)``.
    ``independent_part(z)`` returns the closed-form independent element
    ``w`` with ``rho(w) == rho(z)`` nearest to ``z``, so ``-w + z`` is the
    nearest point of ``T'``.  ``base`` views ``T'`` in the same way (None
    when ``T'`` is trivial).
    """

    group: OmegaGroup
    rho: Callable
    in_subgroup: Callable
    independent_x: object
    act: Callable
    modulus: QuadExt
    line: SeriesGroup
    sample_subgroup: Callable
    independent_part: Callable
    base: ExtensionView | None = None
    name: str = ""

    def depth(self) -> int:
        return 1 + (self.base.depth() if self.base is not None else 0)


# ---------------------------------------------------------------------------
# per-family views


def _triangle_view(g):
    one = g.scalar_one()
    return ExtensionView(
        g, rho=lambda z: z, in_subgroup=lambda z: not z, independent_x=one,
        act=lambda z, l: z * l, modulus=QuadExt(1), line=g,
        sample_subgroup=lambda rng: g.zero, independent_part=lambda z: z, name="triangle")


_I = Gaussian(0, 1)


def _fixed_line(name="K0"):
    from .rootgroups import involutory
    line = involutory(True)
    line.name = name
    return line


def _involutory_view(g):
    """K over K_0 = Fix(conj): rho is the imaginary part, x = i."""
    line = _fixed_line()
    one = HahnSeries.one(QI)
    base = ExtensionView(
        g, rho=lambda z: z, in_subgroup=lambda z: not z, independent_x=one,
        act=lambda z, l: z * l, modulus=QuadExt(1), line=line,
        sample_subgroup=lambda rng: g.zero, independent_part=lambda z: z, name="involutory/K0")
    return ExtensionView(
        g, rho=lambda z: z.imag_part(), in_subgroup=SigmaFixed().contains,
        independent_x=one.scale(_I), act=lambda z, l: z * l, modulus=QuadExt(1), line=line,
        sample_subgroup=lambda rng: _real_series(rng, zero_prob=0.1),
        independent_part=lambda z: z.imag_part().scale(_I), base=base, name="involutory")


def _coordinate_views(g, n, coord, basis, keep, sample_tail, line, modulus, act, name):
    """Views of a vector group along coordinates 0, 1, ..., n-1.

    At level j, rho is coordinate j and T' is the set of vectors whose
    coordinates up to j vanish; ``keep(z, j)`` zeroes coordinates above j.
    """
    base = None
    for j in reversed(range(n)):
        base = ExtensionView(
            g, rho=lambda z, j=j: coord(z, j),
            in_subgroup=lambda z, j=j: all(not coord(z, i) for i in range(j + 1)),
            independent_x=basis(j), act=act, modulus=modulus, line=line,
            sample_subgroup=lambda rng, j=j: sample_tail(rng, j + 1),
            independent_part=lambda z, j=j: keep(z, j), base=base, name=f"{name}/{j}")
    return base


def _quadratic_view(g: QuadraticFormGroup):
    n = g.dim
    one, zero = HahnSeries.one(g.field), HahnSeries.zero(g.field)

    def basis(j):
        return _trim([zero] * j + [one])

    def keep(z, j):
        return _trim(z[:j + 1])

    def tail(rng, start):
        return _trim([zero] * start + [g._coord_sampler(i, rng) for i in range(start, n)])

    return _coordinate_views(g, n, g.coordinate, basis, keep, tail, SeriesGroup("line", g.field),
                             g.modulus, g.act, "quadratic")


def _hexagon_view(g):
    one, zero = HahnSeries.one(g.field), HahnSeries.zero(g.field)
    line = SeriesGroup("line", g.field, carrier=ExponentLattice(1),
                       sampler=lambda rng: g._s(rng, zero_prob=0.05),
                       scalar_sampler=lambda rng: g._s(rng, zero_prob=0))

    def basis(j):
        return HexagonElement(*[one if i == j else zero for i in range(3)])

    def keep(z, j):
        return HexagonElement(*[c if i <= j else zero for i, c in enumerate(z)])

    def tail(rng, start):
        return HexagonElement(*[g._s(rng) if i >= start else zero for i in range(3)])

    return _coordinate_views(g, 3, lambda z, j: z[j], basis, keep, tail, line,
                             g.modulus, g.act, "hexagon")


def _pseudo_quadratic_view(g):
    """Levels 0..n-1 peel off the u-coordinates; the last level views {(0, k0)} = K_0."""
    n = g.dim
    one, zero = HahnSeries.one(QI), HahnSeries.zero(QI)
    zeros = (zero,) * n
    half_i = HahnSeries.constant(QI, Gaussian(0, Fraction(1, 2)))

    def center_view():
        return ExtensionView(
            g, rho=lambda z: z.t, in_subgroup=lambda z: not z.t,
            independent_x=PseudoQuadraticElement(zeros, one),
            act=lambda z, l: PseudoQuadraticElement(z.u, z.t * l), modulus=QuadExt(1),
            line=_fixed_line(), sample_subgroup=lambda rng: g.zero,
            independent_part=lambda z: z, name="pseudo-quadratic/K0")

    def keep(z, j):
        u = tuple(c if i <= j else zero for i, c in enumerate(z.u))
        return PseudoQuadraticElement(u, g.q(u))

    def tail(rng, start):
        u = tuple(random_series(QI, rng, RATIONAL_EXPONENTS, zero_prob=0.3) if i >= start else zero
                  for i in range(n))
        return PseudoQuadraticElement(u, g.q(u) - _real_series(rng, zero_prob=0.2))

    base = center_view()
    line = SeriesGroup("line", QI)
    for j in reversed(range(n)):
        e = tuple(one if i == j else zero for i in range(n))
        base = ExtensionView(
            g, rho=lambda z, j=j: z.u[j],
            in_subgroup=lambda z, j=j: all(not c for c in z.u[:j + 1]),
            independent_x=PseudoQuadraticElement(e, half_i), act=g.act, modulus=g.modulus,
            line=line, sample_subgroup=lambda rng, j=j: tail(rng, j + 1),
            independent_part=lambda z, j=j: keep(z, j), base=base, name=f"pseudo-quadratic/{j}")
    return base


def _octagon_view(g):
    """rho((t, u)) = t with kernel {(0, u)} and x = (1, 0) under the line action."""
    one, zero = HahnSeries.one(g.field), HahnSeries.zero(g.field)
    line = SeriesGroup("line", g.field)
    base = ExtensionView(
        g, rho=lambda z: z.u, in_subgroup=lambda z: not z.u,
        independent_x=OctagonElement(zero, one),
        act=lambda z, l: OctagonElement(z.t, z.u * l), modulus=g.modulus, line=line,
        sample_subgroup=lambda rng: g.zero, independent_part=lambda z: z, name="octagon/u")
    return ExtensionView(
        g, rho=lambda z: z.t, in_subgroup=lambda z: not z.t,
        independent_x=OctagonElement(one, zero), act=g.line_act, modulus=g.line_modulus,
        line=line, sample_subgroup=lambda rng: OctagonElement(zero, g._s(rng)),
        independent_part=lambda z: OctagonElement(z.t, zero), base=base, name="octagon")


VIEWS = {
    "triangle": _triangle_view,
    "involutory": _triangle_view,
    "involutory-k": _involutory_view,
    "quadratic": _quadratic_view,
    "pseudo-quadratic": _pseudo_quadratic_view,
    "hexagon": _hexagon_view,
    "octagon": _octagon_view,
}


def make_view(group: OmegaGroup) -> ExtensionView:
    """The registered extension view for ``group`` (keyed by its family name)."""
    try:
        factory = VIEWS[group.name]
    except KeyError:
        raise ValueError(f"no extension view for family {group.name!r}") from None
    return factory(group)


# ---------------------------------------------------------------------------
# independence


class Independence(NamedTuple):
    independent: bool
    witness: object = None


def _is_identity(g, z):
    return g.eq(z, g.zero)


def is_independent(view: ExtensionView, x, samples=100, seed=0, scalars=0) -> Independence:
    """Test ``omega(x + y) == min(omega(x), omega(y))`` on sampled ``y`` in ``T'``.

    With ``scalars > 0`` the multiples ``act(x, l)`` for that many sampled
    nonzero ``l`` are tested as well.  The witness is the offending ``y``
    (or ``(l, y)`` for a multiple).
    """
    g = view.group
    if _is_identity(g, x):
        raise ValueError("the identity is never independent")
    if view.in_subgroup(x):
        return Independence(False, g.neg(x))
    rng = random.Random(seed)
    candidates = [(None, x)]
    for _ in range(scalars):
        l = view.line.sample_scalar(rng)
        candidates.append((l, view.act(x, l)))
    for l, xx in candidates:
        wx = g.omega(xx)
        for _ in range(samples):
            y = view.sample_subgroup(rng)
            if g.omega(g.add(xx, y)) != min(wx, g.omega(y)):
                return Independence(False, y if l is None else (l, y))
    return Independence(True)


def make_independent(view: ExtensionView, x):
    """Return ``(w, z)``: ``w = x + (-z)`` is independent, ``z`` the nearest point of ``T'``."""
    g = view.group
    if view.in_subgroup(x):
        raise InputInSubgroup("input lies in the normal subgroup T'")
    w = view.independent_part(x)
    z = g.add(g.neg(w), x)
    return w, z


# ---------------------------------------------------------------------------
# projection and lifting


def projected_level(level, omega_x, modulus, nu_rho_x):
    """Level of the image ball: ``(level - omega(x)) / m + valuation(rho(x))``."""
    return (level - omega_x) / modulus + nu_rho_x


def project_ball(view: ExtensionView, ball: Ball) -> Ball:
    if ball.kind != "closed":
        raise ValueError("projection is defined for closed balls")
    g, x = view.group, view.independent_x
    lvl = projected_level(ball.level, g.omega(x), view.modulus, view.rho(x).valuation())
    return Ball(view.rho(ball.center), lvl, "closed")


def _divide(a: HahnSeries, b: HahnSeries, precision=QuadExt(16)):
    if b.is_monomial():
        return a * b.inverse_exact()
    return a * b.invert(precision).value


def lift_point(view: ExtensionView, target, ball: Ball):
    """A point ``z'`` of ``ball`` with ``rho(z') == target``.

    With ``c`` the center, ``z' = -(x . d) + c`` where
    ``d = (rho(c) - target) / rho(x)``; then ``c - z' = x . d``, whose
    level is ``omega(x) + m * valuation(d)``.
    """
    g, x = view.group, view.independent_x
    image = project_ball(view, ball)
    c = ball.center
    diff = view.rho(c) - target
    if diff.valuation() < image.level:
        raise TargetOutsideImage("target is outside the projected ball")
    if not diff:
        return c
    d = _divide(diff, view.rho(x))
    return g.add(g.neg(view.act(x, d)), c)


# ---------------------------------------------------------------------------
# the recursive chain solver


@dataclass
class ChainSolution:
    point: object
    oracle: object
    trace: list
    depth: int

    def to_json(self, group):
        return {"point": group.to_json(self.point), "oracle": group.to_json(self.oracle),
                "depth": self.depth, "trace": self.trace}


def solve_chain(view: ExtensionView, chain, recursion_depth=None) -> ChainSolution:
    """Find a point in every ball of a nested chain of closed balls.

    Each stage projects the chain to the K-line, takes the last projected
    center (which lies in every projected ball), lifts it into the
    smallest ball as ``z``, moves each ball to a ``T'``-center by lifting
    the same K-point into it and translating by ``-z`` from the right (an
    isometry), and recurses into the view of ``T'``.  When the views run
    out the last center is returned.  The smallest ball's center is
    reported alongside as an oracle.
    """
    chain = list(chain)
    if not chain:
        raise EmptyChain("empty ball chain")
    g = view.group
    check_nested(g, chain)
    if any(b.kind != "closed" for b in chain):
        raise ValueError("solve_chain needs closed balls")
    trace = []

    def solve(v, balls, stage):
        if v is None or (recursion_depth is not None and stage >= recursion_depth):
            return balls[-1].center
        projected = [project_ball(v, b) for b in balls]
        l = projected[-1].center
        z = lift_point(v, l, balls[-1])
        shifted = []
        for b in balls:
            w = g.add(lift_point(v, l, b), g.neg(z))
            shifted.append(recenter(g, Ball(g.add(b.center, g.neg(z)), b.level), w))
        trace.append({
            "stage": stage,
            "view": v.name,
            "projected_chain": [p.to_json(v.line) for p in projected],
            "chosen_K_point": l.to_json(),
            "translation": g.to_json(z),
        })
        y = solve(v.base, shifted, stage + 1)
        return g.add(y, z)

    point = solve(view, chain, 0)
    return ChainSolution(point, chain[-1].center, trace, len(trace))


# ---------------------------------------------------------------------------
# generators for balls, chains and targets


def scale_into(group: OmegaGroup, d, level, uniformizer=None, act=None):
    """Multiply ``d`` by the uniformizer until ``omega(d) >= level``."""
    u = uniformizer if uniformizer is not None else group.uniformizer
    act = act or group.act
    while group.omega(d) < level:
        d = act(d, u)
    return d


def ball_point(group: OmegaGroup, ball: Ball, rng):
    """A random point of a closed ball: ``d + center`` with ``omega(d) >= level``."""
    d = scale_into(group, group.sample(rng), ball.level)
    return group.add(d, ball.center)


def _random_level(rng, low=-2, high=3):
    return QuadExt(Fraction(rng.randint(low * 6, high * 6), 6))


def random_ball(group: OmegaGroup, rng, level=None) -> Ball:
    return Ball(group.sample(rng), level if level is not None else _random_level(rng))


def random_chain(group: OmegaGroup, rng, length=5, level_cap=None):
    """A nested chain of closed balls with increasing levels around a random point.

    Centers are ``d_i + p`` with ``omega(d_i) >= level_i``.  ``level_cap``
    bounds the levels from above.
    """
    p = group.sample(rng)
    level = _random_level(rng, -2, 1)
    chain = []
    for _ in range(length):
        if level_cap is not None and level > level_cap:
            level = level_cap
        d = scale_into(group, group.sample(rng), level)
        chain.append(Ball(group.add(d, p), level))
        level = level + QuadExt(Fraction(rng.randint(0, 4), 4))
    return chain


def line_target(view: ExtensionView, image: Ball, rng, boundary=False):
    """A K-point of ``image``; with ``boundary`` one at exactly its level when possible."""
    line = view.line
    c = image.center
    if boundary:
        mono = HahnSeries.monomial(line.field, line.field.one, image.level)
        if line.contains(mono):
            return c + mono
    eps = line.sample(rng)
    while eps.valuation() < image.level:
        eps = eps * line.uniformizer
    return c + eps


# ---------------------------------------------------------------------------
# splitting by an involution


@dataclass(frozen=True)
class SigmaSplit:
    v: HahnSeries
    v_prime: HahnSeries

    def reconstruct(self):
        return self.v + self.v_prime


def sigma_split(x: HahnSeries, sigma=None) -> SigmaSplit:
    """``v = (x + x^sigma) / 2`` and ``v' = (x - x^sigma) / 2``.

    ``sigma`` defaults to coefficient conjugation for Q(i).  Halving needs
    2 to be a unit with valuation 0, so GF(2) coefficients are rejected.
    """
    f = x.field
    if f.characteristic == 2:
        raise CharacteristicTwo("cannot halve in characteristic 2")
    if sigma is None:
        if f is not QI:
            raise ValueError(f"no default involution for {f.tag}")
        sigma = HahnSeries.conjugate
    xs = sigma(x)
    half = f.half(f.one)
    return SigmaSplit((x + xs).scale(half), (x - xs).scale(half))


@dataclass
class ProductMetricReport:
    checked: int = 0
    violations: int = 0
    witness: object = None

    @property
    def ok(self):
        return self.violations == 0

    def to_json(self):
        out = {"checked": self.checked, "violations": self.violations}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def product_metric_check(u_sampler, w_sampler, samples=200, seed=0) -> ProductMetricReport:
    """Check ``level(u + w, u' + w') == min(level(u, u'), level(w, w'))`` on series samples."""
    rng = random.Random(seed)
    report = ProductMetricReport()
    for _ in range(samples):
        u, u2 = u_sampler(rng), u_sampler(rng)
        w, w2 = w_sampler(rng), w_sampler(rng)
        lhs = ((u + w) - (u2 + w2)).valuation()
        rhs = min((u - u2).valuation(), (w - w2).valuation())
        report.checked += 1
        if lhs != rhs:
            report.violations += 1
            if report.witness is None:
                report.witness = {k: s.to_json() for k, s in
                                  (("u", u), ("u_prime", u2), ("w", w), ("w_prime", w2))}
    return report


# ---------------------------------------------------------------------------
# the chain with empty intersection in an infinite-dimensional quadratic space


COUNTEREXAMPLE_SPACE = counterexample_space()


def counterexample_level(i: int) -> QuadExt:
    """``2 * (1 - 2^-(i+1))``; the radius is ``2^-level = 4^-(1 - 2^-(i+1))``."""
    return QuadExt(2 * (1 - Fraction(1, 2 ** (i + 1))))


def counterexample_center(i: int):
    from .scalars import Q
    coords = [HahnSeries.one(Q)]
    coords += [HahnSeries.monomial(Q, Fraction(1), 1 - Fraction(1, 2 ** k)) for k in range(1, i + 1)]
    return tuple(coords)


def counterexample_ball(i: int) -> Ball:
    if i < 0:
        raise ValueError("index must be non-negative")
    return Ball(counterexample_center(i), counterexample_level(i))


def counterexample_chain(depth: int):
    return [counterexample_ball(i) for i in range(depth)]


class Refutation(NamedTuple):
    j: int
    level_found: object
    level_required: QuadExt
    refuted: bool

    def to_json(self, candidate):
        return {"candidate": COUNTEREXAMPLE_SPACE.to_json(candidate), "j": self.j,
                "level_found": level_to_json(self.level_found),
                "level_required": level_to_json(self.level_required), "refuted": self.refuted}


def refute_candidate(c) -> Refutation:
    """Find the ball of the chain that misses the finite-support vector ``c``.

    ``j`` is the first zero coordinate of ``c``; coordinate ``j`` of
    ``x_j - c`` is then ``t^(1 - 2^-j)`` (or 1 for ``j = 0``), which caps
    the level at ``2 (1 - 2^-j)``, below the required ``2 (1 - 2^-(j+1))``.
    """
    g = COUNTEREXAMPLE_SPACE
    if not g.contains(c):
        raise ParseError("candidate is not a finite-support vector of Q-series")
    j = 0
    while j < len(c) and c[j]:
        j += 1
    ball = counterexample_ball(j)
    found = distance_level(g, ball.center, c)
    bound = QuadExt(2 * (1 - Fraction(1, 2 ** j)))
    refuted = found <= bound and not ball_contains(g, ball, c)
    return Refutation(j, found, ball.level, refuted)


def random_candidate(rng, max_len=8):
    """A finite-support vector, often a perturbed chain center to make refutation non-trivial."""
    from .scalars import Q
    if rng.random() < 0.5:
        base = list(counterexample_center(rng.randint(0, max_len - 1)))
        for k in range(len(base)):
            if rng.random() < 0.3:
                base[k] = base[k] + random_series(Q, rng, RATIONAL_EXPONENTS)
        return _trim(base)
    n = rng.randint(0, max_len)
    return _trim(random_series(Q, rng, RATIONAL_EXPONENTS, zero_prob=0.2) for _ in range(n))
