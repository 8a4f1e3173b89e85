"""Concrete omega-groups for the nine families of Moufang polygons.

Each class implements :class:`~nonarch.ultrametric.OmegaGroup` over finite
Hahn series.  Use :func:`make_family` to build a registered instance by id.

=================  ==================================  =========
family id          carrier                             modulus m
=================  ==================================  =========
triangle           K = Q((t^G))                        1
involutory         K_0 = Fix(conj) in Q(i)((t^G))      1
quadratic          K^n with q = sum a_i x_i^2          2
indifferent        K^2-span in GF(2)((t^L))            1
pseudo-quadratic   {(u, t) : q(u) - t in K_0}          2
exceptional        X_0 x K with pluggable g, pi, q     declared
hexagon            E = F(theta), theta^3 = t, char 3   3
octagon            K x K with a Tits endomorphism      sqrt(2)
f4-k, f4-f         char-2 quadratic spaces F x K,      2
                   K^3 x F
=================  ==================================  =========
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from typing import NamedTuple

from .errors import CarrierViolation, DivisionByZero, ParseError, ValidationFailed
from .hahn import (AllSeries, ExponentCosets, ExponentLattice, HahnSeries, SigmaFixed,
                   SubfieldPredicate)
from .scalars import F2, F3, FIELDS, Q, QI, SQRT2, Gaussian, QuadExt
from .ultrametric import OmegaGroup, validate_omega_group

__all__ = [
    "SeriesGroup", "QuadraticFormGroup", "PseudoQuadraticGroup", "PseudoQuadraticElement",
    "ExceptionalGroup", "ExceptionalElement", "HexagonGroup", "HexagonElement",
    "OctagonGroup", "OctagonElement", "make_family", "FAMILIES", "SHIPPED_FAMILIES",
    "EXPECTED_MODULI", "random_series", "hexagon_norm", "hexagon_valuation",
]

# exponent pools for samplers; small on purpose so that terms collide and cancel
RATIONAL_EXPONENTS = [QuadExt(Fraction(n, d)) for n, d in
                      ((-1, 1), (-1, 2), (0, 1), (1, 3), (1, 2), (2, 3), (1, 1), (3, 2), (2, 1))]
QUADEXT_EXPONENTS = RATIONAL_EXPONENTS + [QuadExt(0, 1), QuadExt(1, 1), QuadExt(Fraction(-1, 2), Fraction(1, 2)),
                                          QuadExt(0, Fraction(-1, 2)), QuadExt(2, -1)]
INTEGER_EXPONENTS = [QuadExt(n) for n in range(-2, 4)]


def random_series(field, rng, exponents, max_terms=3, coeff=None, zero_prob=0.0):
    if zero_prob and rng.random() < zero_prob:
        return HahnSeries.zero(field)
    n = rng.randint(1, min(max_terms, len(exponents)))
    draw = coeff or field.random
    return HahnSeries(field, [(e, draw(rng)) for e in rng.sample(exponents, n)])


def _nonzero(sampler):
    def draw(rng):
        while True:
            x = sampler(rng)
            if x:
                return x
    return draw


def _series_list(items):
    return [s.to_json() for s in items]


def _parse_series(data, field):
    s = HahnSeries.from_json(data)
    if s.field is not field:
        raise ParseError(f"expected a {field.tag} series, got {s.field.tag}")
    return s


def _parse_series_list(data, field, length=None):
    if not isinstance(data, list):
        raise ParseError("expected a list of series")
    if length is not None and len(data) != length:
        raise ParseError(f"expected {length} series, got {len(data)}")
    return tuple(_parse_series(d, field) for d in data)


def _trim(coords):
    coords = list(coords)
    while coords and not coords[-1]:
        coords.pop()
    return tuple(coords)


# ---------------------------------------------------------------------------
# additive groups of (sub)fields: triangle, involutory, indifferent


class SeriesGroup(OmegaGroup):
    """An additive subgroup of a Hahn field with omega = valuation.

    ``carrier`` decides membership; scalars satisfying ``scalars`` act by
    multiplication with modulus 1.
    """

    modulus = QuadExt(1)

    def __init__(self, name, field, *, carrier: SubfieldPredicate = None,
                 scalars: SubfieldPredicate = None, sampler=None, scalar_sampler=None,
                 uniformizer=None):
        self.name = name
        self.field = field
        self.carrier = carrier or AllSeries()
        self.scalars = scalars or AllSeries()
        self.zero = HahnSeries.zero(field)
        self._sampler = sampler or (lambda rng: random_series(field, rng, QUADEXT_EXPONENTS, zero_prob=0.05))
        self._scalar_sampler = scalar_sampler or _nonzero(
            lambda rng: random_series(field, rng, QUADEXT_EXPONENTS))
        self.uniformizer = uniformizer or HahnSeries.monomial(field, field.one, 1)

    def add(self, x, y):
        return x + y

    def neg(self, x):
        return -x

    def omega(self, x):
        return x.valuation()

    def contains(self, x):
        return isinstance(x, HahnSeries) and x.field is self.field and self.carrier.contains(x)

    def act(self, x, k):
        return x * k

    def sample(self, rng):
        return self._sampler(rng)

    def sample_scalar(self, rng):
        return self._scalar_sampler(rng)

    def scalar_one(self):
        return HahnSeries.one(self.field)

    def quotient(self, x):
        return x

    def quotient_act(self, v, k):
        return v * k

    def element_to_json(self, x):
        return [x.to_json()]

    def element_from_json(self, data):
        if not isinstance(data, list) or len(data) != 1:
            raise ParseError("expected a one-element list")
        x = _parse_series(data[0], self.field)
        if not self.carrier.contains(x):
            raise CarrierViolation(f"{x} is not in the carrier of {self.name}")
        return x


def triangle(field="Q"):
    """The root groups of T(A): the additive group of a valued field."""
    f = FIELDS[field] if isinstance(field, str) else field
    if f.characteristic == 3:
        exps = INTEGER_EXPONENTS
        return SeriesGroup("triangle", f,
                           sampler=lambda rng: random_series(f, rng, exps, zero_prob=0.05),
                           scalar_sampler=_nonzero(lambda rng: random_series(f, rng, exps)))
    return SeriesGroup("triangle", f)


def _real_series(rng, exps=QUADEXT_EXPONENTS, zero_prob=0.0):
    return random_series(QI, rng, exps, coeff=QI.random_real, zero_prob=zero_prob)


def involutory(restricted=True):
    """Root groups of Q_I(K, K_0, sigma) with K = Q(i)((t^G)) and sigma = conjugation.

    ``restricted`` selects K_0 = Fix(sigma) (scalars from the fixed field);
    otherwise the group is K itself.
    """
    if restricted:
        return SeriesGroup("involutory", QI, carrier=SigmaFixed(), scalars=SigmaFixed(),
                           sampler=lambda rng: _real_series(rng, zero_prob=0.05),
                           scalar_sampler=_nonzero(_real_series))
    return SeriesGroup("involutory-k", QI)


# exponent lattices for characteristic 2: K has exponents in Z + Z*sqrt(2)
LATTICE_K = ExponentLattice(1, SQRT2)
LATTICE_F = ExponentLattice(1, 2 * SQRT2)
LATTICE_K2 = ExponentLattice(2, 2 * SQRT2)


def _lattice_series(lattice, rng, offset=QuadExt(0), zero_prob=0.0, span=(-1, 2)):
    pts = [lattice.point(m, n) + offset for m in range(span[0], span[1]) for n in range(span[0], span[1])]
    return random_series(F2, rng, pts, zero_prob=zero_prob)


INDIFFERENT_OFFSETS = {
    "K0": (QuadExt(0), QuadExt(1), SQRT2),
    "L0": (QuadExt(0), QuadExt(1, 1)),
}


def indifferent(side="K0"):
    """Root groups of Q_D(K, K_0, L_0) in characteristic 2.

    K = GF(2)((t^L)) with L = Z + Z*sqrt(2); K_0 and L_0 are spans of
    monomials over the field of squares K^2, which is also the scalar field.
    """
    offsets = INDIFFERENT_OFFSETS[side]
    carrier = ExponentCosets(LATTICE_K2, offsets)

    def sample(rng):
        out = HahnSeries.zero(F2)
        for o in offsets:
            out = out + _lattice_series(LATTICE_K2, rng, offset=o, zero_prob=0.4)
        return out

    group = SeriesGroup(f"indifferent-{side}" if side != "K0" else "indifferent", F2,
                        carrier=carrier, scalars=LATTICE_K2, sampler=sample,
                        scalar_sampler=_nonzero(lambda rng: _lattice_series(LATTICE_K2, rng)),
                        uniformizer=HahnSeries.monomial(F2, 1, 2))
    group.offsets = offsets
    return group


# ---------------------------------------------------------------------------
# quadratic-form type (also the F4 pair)


class QuadraticFormGroup(OmegaGroup):
    """Vectors with ``omega = valuation(sum_i a_i * x_i ** power_i)``.

    Elements are tuples of series with trailing zeros removed, so a group
    with ``dim=None`` holds finitely supported vectors of unbounded length.
    A scalar ``k`` multiplies coordinate ``i`` by ``k ** twist_i``; with
    ``power_i * twist_i == 2`` for every ``i`` the modulus is 2.
    """

    modulus = QuadExt(2)

    def __init__(self, name, field, dim, *, coefficients=None, powers=None, twists=None,
                 carriers=None, scalars: SubfieldPredicate = None, coord_sampler=None,
                 scalar_sampler=None, uniformizer=None):
        self.name = name
        self.field = field
        self.dim = dim
        self.coefficients = coefficients
        n = dim or 0
        self.powers = powers or (2,) * n
        self.twists = twists or (1,) * n
        self.carriers = carriers or (AllSeries(),) * n
        self.scalars = scalars or AllSeries()
        self.zero = ()
        self._coord_sampler = coord_sampler or (
            lambda i, rng: random_series(field, rng, QUADEXT_EXPONENTS, zero_prob=0.3))
        self._scalar_sampler = scalar_sampler or _nonzero(
            lambda rng: random_series(field, rng, QUADEXT_EXPONENTS))
        self.uniformizer = uniformizer or HahnSeries.monomial(field, field.one, 1)
        self._zero_series = HahnSeries.zero(field)

    def _coeff(self, i):
        return HahnSeries.one(self.field) if self.coefficients is None else self.coefficients[i]

    def _power(self, i):
        return self.powers[i] if i < len(self.powers) else 2

    def _twist(self, i):
        return self.twists[i] if i < len(self.twists) else 1

    def coordinate(self, x, i):
        return x[i] if i < len(x) else self._zero_series

    def element(self, coords):
        x = _trim(coords)
        if not self.contains(x):
            raise CarrierViolation(f"not an element of {self.name}")
        return x

    def contains(self, x):
        if not isinstance(x, tuple) or (self.dim is not None and len(x) > self.dim):
            return False
        if x and not x[-1]:
            return False
        for i, c in enumerate(x):
            if not isinstance(c, HahnSeries) or c.field is not self.field:
                return False
            if self.dim is not None and not self.carriers[i].contains(c):
                return False
        return True

    def add(self, x, y):
        z = self._zero_series
        return _trim(a + b for a, b in zip_longest(x, y, fillvalue=z))

    def neg(self, x):
        return tuple(-a for a in x)

    def form(self, x):
        total = self._zero_series
        for i, c in enumerate(x):
            if c:
                term = c * c if self._power(i) == 2 else c
                total = total + self._coeff(i) * term
        return total

    def omega(self, x):
        return self.form(x).valuation()

    def act(self, x, k):
        k2 = None
        out = []
        for i, c in enumerate(x):
            if self._twist(i) == 2:
                k2 = k2 or k * k
                out.append(c * k2)
            else:
                out.append(c * k)
        return _trim(out)

    def involution(self, x):
        """``(x_0, x_1, x_2, ...) -> (x_0, -x_1, -x_2, ...)``; preserves a diagonal form."""
        return tuple(c if i == 0 else -c for i, c in enumerate(x))

    def sample(self, rng):
        n = self.dim if self.dim is not None else rng.randint(0, 6)
        return _trim(self._coord_sampler(i, rng) for i in range(n))

    def sample_scalar(self, rng):
        return self._scalar_sampler(rng)

    def scalar_one(self):
        return HahnSeries.one(self.field)

    def quotient(self, x):
        return x

    def quotient_act(self, v, k):
        return self.act(v, k)

    def element_to_json(self, x):
        return _series_list(x)

    def element_from_json(self, data):
        return self.element(_parse_series_list(data, self.field))


def quadratic(dim=3, coefficients=None):
    """Q_Q(K, L_0, q) over K = Q((t^G)) with a diagonal form.

    ``coefficients`` defaults to all ones.  Every coefficient needs a
    positive leading coefficient so that the form stays anisotropic.
    """
    if coefficients is not None:
        coefficients = tuple(coefficients)
        if len(coefficients) != dim:
            raise ValueError("need one coefficient per coordinate")
        for a in coefficients:
            if not a or a.field is not Q or a.leading_coefficient() <= 0:
                raise ValueError("form coefficients must be Q-series with positive leading coefficient")
    return QuadraticFormGroup("quadratic", Q, dim, coefficients=coefficients)


def counterexample_space():
    """The infinite-dimensional space with q = sum x_i^2 over Q((t^Q))."""
    return QuadraticFormGroup("quadratic-infinite", Q, None,
                              coord_sampler=lambda i, rng: random_series(Q, rng, RATIONAL_EXPONENTS,
                                                                         zero_prob=0.3))


def _mono(e):
    return HahnSeries.monomial(F2, 1, e)


def f4_k():
    """First F4 root group: F x K over K, with k acting as (k^2 f, k c).

    K = GF(2)((t^L)), L = Z + Z*sqrt(2); F has exponents in Z + 2Z*sqrt(2), so
    K^2 < F < K.  The form is t^sqrt(2) * f + c^2.
    """
    return QuadraticFormGroup(
        "f4-k", F2, 2,
        coefficients=(_mono(SQRT2), _mono(0)), powers=(1, 2), twists=(2, 1),
        carriers=(LATTICE_F, LATTICE_K), scalars=LATTICE_K,
        coord_sampler=lambda i, rng: _lattice_series(LATTICE_F if i == 0 else LATTICE_K, rng, zero_prob=0.3),
        scalar_sampler=_nonzero(lambda rng: _lattice_series(LATTICE_K, rng)))


def f4_f():
    """Second F4 root group: K^3 x F over F.

    The form k1^2 + t k2^2 + t^sqrt(2) k3^2 + t^(1+sqrt(2)) phi^2 puts each
    summand in its own coset of exponents, hence it is anisotropic.
    """
    return QuadraticFormGroup(
        "f4-f", F2, 4,
        coefficients=(_mono(0), _mono(1), _mono(SQRT2), _mono(QuadExt(1, 1))),
        carriers=(LATTICE_K, LATTICE_K, LATTICE_K, LATTICE_F), scalars=LATTICE_F,
        coord_sampler=lambda i, rng: _lattice_series(LATTICE_F if i == 3 else LATTICE_K, rng, zero_prob=0.3),
        scalar_sampler=_nonzero(lambda rng: _lattice_series(LATTICE_F, rng)))


# ---------------------------------------------------------------------------
# pseudo-quadratic type


class PseudoQuadraticElement(NamedTuple):
    u: tuple
    t: HahnSeries


_HALF_I = Gaussian(0, Fraction(1, 2))
_I = Gaussian(0, 1)


class PseudoQuadraticGroup(OmegaGroup):
    """The extension ``S = {(u, t) : q(u) - t in K_0}`` of L_0 = K^n by K_0.

    K = Q(i)((t^G)), sigma = coefficient conjugation, K_0 = Fix(sigma),
    ``f(u, v) = i * sum conj(u_j) v_j`` and ``q(u) = (i/2) * sum conj(u_j) u_j``.
    """

    modulus = QuadExt(2)

    def __init__(self, dim=2):
        self.name = "pseudo-quadratic"
        self.dim = dim
        self.field = QI
        z = HahnSeries.zero(QI)
        self._z = z
        self.zero = PseudoQuadraticElement((z,) * dim, z)
        self.fixed = SigmaFixed()
        self.uniformizer = HahnSeries.monomial(QI, QI.one, 1)

    def hermitian(self, u, v):
        total = self._z
        for a, b in zip(u, v):
            if a and b:
                total = total + a.conjugate() * b
        return total

    def f(self, u, v):
        return self.hermitian(u, v).scale(_I)

    def q(self, u):
        return self.hermitian(u, u).scale(_HALF_I)

    def element(self, u, t):
        x = PseudoQuadraticElement(tuple(u), t)
        if not self.contains(x):
            raise CarrierViolation("q(u) - t is not fixed by sigma")
        return x

    def contains(self, x):
        return (isinstance(x, PseudoQuadraticElement) and len(x.u) == self.dim
                and self.fixed.contains(self.q(x.u) - x.t))

    def add(self, x, y):
        u = tuple(a + b for a, b in zip(x.u, y.u))
        return PseudoQuadraticElement(u, x.t + y.t + self.f(y.u, x.u))

    def neg(self, x):
        return PseudoQuadraticElement(tuple(-a for a in x.u), self.f(x.u, x.u) - x.t)

    def omega(self, x):
        return x.t.valuation()

    def act(self, x, k):
        return PseudoQuadraticElement(tuple(a * k for a in x.u), k.conjugate() * x.t * k)

    def sample(self, rng):
        u = tuple(random_series(QI, rng, QUADEXT_EXPONENTS, zero_prob=0.3) for _ in range(self.dim))
        k0 = _real_series(rng, zero_prob=0.2)
        return PseudoQuadraticElement(u, self.q(u) - k0)

    def sample_scalar(self, rng):
        return _nonzero(lambda r: random_series(QI, r, QUADEXT_EXPONENTS))(rng)

    def scalar_one(self):
        return HahnSeries.one(QI)

    def quotient(self, x):
        return x.u

    def quotient_act(self, v, k):
        return tuple(a * k for a in v)

    def element_to_json(self, x):
        return [_series_list(x.u), x.t.to_json()]

    def element_from_json(self, data):
        if not isinstance(data, list) or len(data) != 2:
            raise ParseError("pseudo-quadratic element is [u, t]")
        u = _parse_series_list(data[0], QI, self.dim)
        return self.element(u, _parse_series(data[1], QI))


# ---------------------------------------------------------------------------
# exceptional type: a validated framework with pluggable data


class ExceptionalElement(NamedTuple):
    a: tuple
    t: HahnSeries


class ExceptionalGroup(OmegaGroup):
    """Extension of X_0 = K^dim by K with pluggable ``g``, ``pi`` and ``q``.

    Group law ``(a, s) + (b, t) = (a + b, s + t + g(a, b))``, omega
    ``(a, t) -> valuation(q(pi(a)) + t)`` and action ``(a, t) . s = (s a, s^2 t)``
    unless ``act`` is supplied.  Nothing is assumed about the data:
    :func:`make_family` validates the instance and rejects it on failure.
    """

    def __init__(self, field, dim, g, pi, q, modulus, *, act=None, sampler=None,
                 scalar_sampler=None, neg=None, name="exceptional"):
        self.name = name
        self.field = FIELDS[field] if isinstance(field, str) else field
        self.dim = dim
        self.g, self.pi, self.q = g, pi, q
        self.modulus = modulus if isinstance(modulus, QuadExt) else QuadExt(modulus)
        self._act = act
        self._neg = neg
        z = HahnSeries.zero(self.field)
        self.zero = ExceptionalElement((z,) * dim, z)
        f = self.field
        self._sampler = sampler or (lambda rng: ExceptionalElement(
            tuple(random_series(f, rng, QUADEXT_EXPONENTS, zero_prob=0.3) for _ in range(dim)),
            random_series(f, rng, QUADEXT_EXPONENTS, zero_prob=0.2)))
        self._scalar_sampler = scalar_sampler or _nonzero(
            lambda rng: random_series(f, rng, QUADEXT_EXPONENTS))

    def add(self, x, y):
        return ExceptionalElement(tuple(p + r for p, r in zip(x.a, y.a)), x.t + y.t + self.g(x.a, y.a))

    def neg(self, x):
        if self._neg is not None:
            return self._neg(x)
        # (a, s) + (-a, s') = 0 forces s' = -s - g(a, -a)
        na = tuple(-p for p in x.a)
        return ExceptionalElement(na, -x.t - self.g(x.a, na))

    def omega(self, x):
        return (self.q(self.pi(x.a)) + x.t).valuation()

    def act(self, x, s):
        if self._act is not None:
            return self._act(x, s)
        return ExceptionalElement(tuple(s * p for p in x.a), s * s * x.t)

    def sample(self, rng):
        return self._sampler(rng)

    def sample_scalar(self, rng):
        return self._scalar_sampler(rng)

    def scalar_one(self):
        return HahnSeries.one(self.field)

    def quotient(self, x):
        return x.a

    def quotient_act(self, v, k):
        return tuple(k * p for p in v)

    def element_to_json(self, x):
        return [_series_list(x.a), x.t.to_json()]

    def element_from_json(self, data):
        if not isinstance(data, list) or len(data) != 2:
            raise ParseError("exceptional element is [a, t]")
        return ExceptionalElement(_parse_series_list(data[0], self.field, self.dim),
                                  _parse_series(data[1], self.field))


# ---------------------------------------------------------------------------
# hexagons: E = F(theta), theta^3 = t, over F = GF(3)((t^Z))


class HexagonElement(NamedTuple):
    x: HahnSeries
    y: HahnSeries
    z: HahnSeries


_T1 = HahnSeries.monomial(F3, 1, 1)
_T2 = HahnSeries.monomial(F3, 1, 2)
_INT_LATTICE = ExponentLattice(1)


def hexagon_norm(a: HexagonElement) -> HahnSeries:
    """``(x + y theta + z theta^2)^3 = x^3 + t y^3 + t^2 z^3`` in characteristic 3."""
    return a.x.frobenius() + _T1 * a.y.frobenius() + _T2 * a.z.frobenius()


def hexagon_valuation(a: HexagonElement):
    """Valuation on E extending that of F, with valuation(theta) = 1/3."""
    vy = a.y.valuation()
    vz = a.z.valuation()
    return min(a.x.valuation(), vy + Fraction(1, 3), vz + Fraction(2, 3))


class HexagonGroup(OmegaGroup):
    """The purely inseparable cubic case of H(J, F, #): J = E, omega = valuation(N)."""

    modulus = QuadExt(3)

    def __init__(self):
        self.name = "hexagon"
        self.field = F3
        z = HahnSeries.zero(F3)
        self.zero = HexagonElement(z, z, z)
        self.uniformizer = _T1

    def _s(self, rng, zero_prob=0.3):
        return random_series(F3, rng, INTEGER_EXPONENTS, zero_prob=zero_prob)

    def element(self, x, y, z):
        a = HexagonElement(x, y, z)
        if not self.contains(a):
            raise CarrierViolation("hexagon coordinates need integer exponents over GF(3)")
        return a

    def contains(self, a):
        return (isinstance(a, HexagonElement)
                and all(s.field is F3 and _INT_LATTICE.contains(s) for s in a))

    def add(self, a, b):
        return HexagonElement(a.x + b.x, a.y + b.y, a.z + b.z)

    def neg(self, a):
        return HexagonElement(-a.x, -a.y, -a.z)

    def omega(self, a):
        return hexagon_norm(a).valuation()

    def act(self, a, k):
        return HexagonElement(a.x * k, a.y * k, a.z * k)

    def sample(self, rng):
        return HexagonElement(self._s(rng), self._s(rng), self._s(rng))

    def sample_scalar(self, rng):
        return self._s(rng, zero_prob=0)

    def scalar_one(self):
        return HahnSeries.one(F3)

    def quotient(self, a):
        return tuple(a)

    def quotient_act(self, v, k):
        return tuple(c * k for c in v)

    def element_to_json(self, a):
        return _series_list(a)

    def element_from_json(self, data):
        return self.element(*_parse_series_list(data, F3, 3))


# ---------------------------------------------------------------------------
# octagons: K = GF(2)((t^G)) with sigma multiplying exponents by sqrt(2)


class OctagonElement(NamedTuple):
    t: HahnSeries
    u: HahnSeries


def _sigma(x):
    return x.tits_sigma()


class OctagonGroup(OmegaGroup):
    """The extension of K by K for O(K, sigma).

    Group law ``(t, u) + (s, v) = (t + s, u + v + t^sigma s)``, so the
    normal subgroup is ``{(0, u)}`` and ``(t, u) -> t`` is the quotient map.
    ``omega((t, u)) = valuation(t^(sigma+2) + u t + u^sigma)`` and
    ``(t, u) . k = (t k^(sigma-1), u k)`` with modulus sqrt(2).

    ``line_act`` is the untwisted action ``(t l, u l^(sigma+1))``, under which
    the quotient map is K-linear; its modulus is 2 + sqrt(2).
    """

    modulus = SQRT2
    line_modulus = QuadExt(2, 1)

    def __init__(self, inverse_precision=QuadExt(8)):
        self.name = "octagon"
        self.field = F2
        z = HahnSeries.zero(F2)
        self.zero = OctagonElement(z, z)
        self.inverse_precision = inverse_precision
        self.uniformizer = HahnSeries.monomial(F2, 1, 1)

    def add(self, x, y):
        return OctagonElement(x.t + y.t, x.u + y.u + _sigma(x.t) * y.t)

    def neg(self, x):
        return OctagonElement(x.t, x.u + _sigma(x.t) * x.t)

    def norm(self, x):
        t, u = x
        return _sigma(t) * t * t + u * t + _sigma(u)

    def omega(self, x):
        return self.norm(x).valuation()

    def sigma_minus_one(self, k):
        """``k^sigma * k^-1``; exact for monomials, otherwise a truncated inverse."""
        if not k:
            raise DivisionByZero("octagon action by 0")
        return _sigma(k) * k.invert(self.inverse_precision).value

    def act(self, x, k):
        return OctagonElement(x.t * self.sigma_minus_one(k), x.u * k)

    def line_act(self, x, l):
        return OctagonElement(x.t * l, x.u * _sigma(l) * l)

    def contains(self, x):
        return isinstance(x, OctagonElement) and x.t.field is F2 and x.u.field is F2

    def _s(self, rng, zero_prob=0.2):
        return random_series(F2, rng, QUADEXT_EXPONENTS, zero_prob=zero_prob)

    def sample(self, rng):
        return OctagonElement(self._s(rng), self._s(rng))

    def sample_scalar(self, rng):
        # monomials keep k^(sigma-1) exact
        return HahnSeries.monomial(F2, 1, rng.choice(QUADEXT_EXPONENTS))

    def scalar_one(self):
        return HahnSeries.one(F2)

    def quotient(self, x):
        return x.t

    def quotient_act(self, v, k):
        return v * self.sigma_minus_one(k)

    def element_to_json(self, x):
        return [x.t.to_json(), x.u.to_json()]

    def element_from_json(self, data):
        if not isinstance(data, list) or len(data) != 2:
            raise ParseError("octagon element is [t, u]")
        return OctagonElement(_parse_series(data[0], F2), _parse_series(data[1], F2))


# ---------------------------------------------------------------------------
# registry


def exceptional(g, pi, q, modulus=4, field="Q", dim=2, **kwargs):
    return ExceptionalGroup(field, dim, g, pi, q, modulus, **kwargs)


FAMILIES = {
    "triangle": triangle,
    "involutory": involutory,
    "quadratic": quadratic,
    "indifferent": indifferent,
    "pseudo-quadratic": PseudoQuadraticGroup,
    "exceptional": exceptional,
    "hexagon": HexagonGroup,
    "octagon": OctagonGroup,
    "f4-k": f4_k,
    "f4-f": f4_f,
}

# families validated on construction
_CHECKED_ON_BUILD = {"exceptional", "f4-k", "f4-f"}

SHIPPED_FAMILIES = ("triangle", "involutory", "quadratic", "indifferent", "pseudo-quadratic",
                    "hexagon", "octagon", "f4-k", "f4-f")

EXPECTED_MODULI = {
    "triangle": QuadExt(1), "involutory": QuadExt(1), "quadratic": QuadExt(2),
    "indifferent": QuadExt(1), "pseudo-quadratic": QuadExt(2), "hexagon": QuadExt(3),
    "octagon": SQRT2, "f4-k": QuadExt(2), "f4-f": QuadExt(2),
}


def make_family(family_id, *, validation_samples=100, validation_seed=0, **params):
    """Build a registered family instance.

    Exceptional and F4 instances are checked with
    :func:`~nonarch.ultrametric.validate_omega_group` on
    ``validation_samples`` samples; a failing instance raises
    :class:`~nonarch.errors.ValidationFailed` carrying the report.
    """
    try:
        factory = FAMILIES[family_id]
    except KeyError:
        raise ValueError(f"unknown family {family_id!r}; known: {', '.join(FAMILIES)}") from None
    group = factory(**params)
    if family_id in _CHECKED_ON_BUILD:
        report = validate_omega_group(group, validation_samples, validation_seed)
        if not report.ok:
            raise ValidationFailed(report)
    return group
