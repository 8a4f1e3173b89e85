"""Finite-support Hahn series ``sum c_e t^e`` with exponents in Q + Q*sqrt(2).

A :class:`HahnSeries` is immutable: a field plus a tuple of
``(exponent, raw coefficient)`` pairs with strictly increasing exponents and
no zero coefficients.  The valuation is the first exponent.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple

from .errors import DivisionByZero, ParseError, TagMismatch
from .scalars import (FIELDS, INF, QI, QuadExt, Field, Gaussian, parse_quadext,
                      parse_rational)

__all__ = [
    "HahnSeries", "Inversion", "SubfieldPredicate", "AllSeries", "SigmaFixed",
    "ExponentLattice", "ExponentCosets", "in_subfield", "parse_series",
    "convolve_schoolbook",
]

_ZERO_EXP = QuadExt(0)


class HahnSeries:
    __slots__ = ("field", "terms", "_hash")

    def __init__(self, field: Field, terms=()):
        acc = {}
        add = field.add
        for e, c in terms:
            if not isinstance(e, QuadExt):
                e = QuadExt(e)
            acc[e] = add(acc[e], c) if e in acc else c
        self.field = field
        self.terms = tuple(sorted(((e, c) for e, c in acc.items() if c), key=lambda ec: ec[0]))
        self._hash = None

    @classmethod
    def _trusted(cls, field, terms):
        obj = object.__new__(cls)
        obj.field = field
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors

    @classmethod
    def zero(cls, field):
        return cls._trusted(field, ())

    @classmethod
    def one(cls, field):
        return cls._trusted(field, ((_ZERO_EXP, field.one),))

    @classmethod
    def constant(cls, field, c):
        return cls._trusted(field, ((_ZERO_EXP, c),) if c else ())

    @classmethod
    def monomial(cls, field, c, e):
        if not isinstance(e, QuadExt):
            e = QuadExt(e)
        return cls._trusted(field, ((e, c),) if c else ())

    # inspection

    def valuation(self):
        return self.terms[0][0] if self.terms else INF

    def leading_coefficient(self):
        return self.terms[0][1]

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def exponents(self):
        return [e for e, _ in self.terms]

    def coefficient(self, e):
        for ex, c in self.terms:
            if ex == e:
                return c
        return self.field.zero

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, HahnSeries):
            return NotImplemented
        return self.field is other.field and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.tag, self.terms))
        return self._hash

    def _check(self, other):
        if not isinstance(other, HahnSeries):
            raise TypeError(f"expected HahnSeries, got {type(other).__name__}")
        if other.field is not self.field:
            raise TagMismatch(f"{self.field.tag} vs {other.field.tag}")

    # arithmetic

    def __add__(self, other):
        self._check(other)
        a, b = self.terms, other.terms
        if not a:
            return other
        if not b:
            return self
        add = self.field.add
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            ea, eb = a[i][0], b[j][0]
            if ea == eb:
                c = add(a[i][1], b[j][1])
                if c:
                    out.append((ea, c))
                i += 1
                j += 1
            elif ea < eb:
                out.append(a[i])
                i += 1
            else:
                out.append(b[j])
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return HahnSeries._trusted(self.field, tuple(out))

    def __neg__(self):
        neg = self.field.neg
        return HahnSeries._trusted(self.field, tuple((e, neg(c)) for e, c in self.terms))

    def __sub__(self, other):
        self._check(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HahnSeries):
            return NotImplemented
        self._check(other)
        if not self.terms or not other.terms:
            return HahnSeries.zero(self.field)
        f = self.field
        if len(self.terms) == 1:
            e0, c0 = self.terms[0]
            return HahnSeries._trusted(f, tuple((e0 + e, f.mul(c0, c)) for e, c in other.terms))
        if len(other.terms) == 1:
            e0, c0 = other.terms[0]
            return HahnSeries._trusted(f, tuple((e + e0, f.mul(c, c0)) for e, c in self.terms))
        acc = {}
        mul, add = f.mul, f.add
        for ea, ca in self.terms:
            for eb, cb in other.terms:
                e = ea + eb
                c = mul(ca, cb)
                acc[e] = add(acc[e], c) if e in acc else c
        return HahnSeries._trusted(f, tuple(sorted(((e, c) for e, c in acc.items() if c),
                                                   key=lambda ec: ec[0])))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers need invert()")
        result = HahnSeries.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        """Multiply every coefficient by the raw field value ``c``."""
        if not c:
            return HahnSeries.zero(self.field)
        mul = self.field.mul
        return HahnSeries._trusted(self.field, tuple((e, mul(x, c)) for e, x in self.terms))

    def shift(self, e):
        """Multiply by ``t^e``."""
        return HahnSeries._trusted(self.field, tuple((x + e, c) for x, c in self.terms))

    def truncate(self, bound):
        """Drop every term with exponent strictly above ``bound``."""
        return HahnSeries._trusted(self.field, tuple((e, c) for e, c in self.terms if not bound < e))

    def invert(self, precision) -> Inversion:
        """Inverse up to terms of exponent ``precision``.

        The result ``y`` satisfies ``valuation(self*y - 1) > precision``;
        ``exact`` is set when ``self*y == 1`` holds exactly.  Monomials always
        invert exactly.
        """
        if not self.terms:
            raise DivisionByZero("inverse of the zero series")
        if not isinstance(precision, QuadExt):
            precision = QuadExt(precision)
        f = self.field
        e0, c0 = self.terms[0]
        lead_inv = f.inv(c0)
        head = HahnSeries.monomial(f, lead_inv, -e0)
        if len(self.terms) == 1:
            return Inversion(head, True)
        # self = c0 t^e0 (1 + r) with valuation(r) > 0
        r = HahnSeries._trusted(f, tuple((e - e0, f.mul(c, lead_inv)) for e, c in self.terms[1:]))
        one = HahnSeries.one(f)
        s = one
        vr = r.valuation()
        steps = 0
        while vr * (steps + 1) <= precision:
            steps += 1
        for _ in range(steps):
            s = (one - r * s).truncate(precision)
        y = head * s
        return Inversion(y, (self * y) == HahnSeries.one(f))

    def inverse_exact(self):
        if not self.is_monomial():
            raise ValueError("exact inverse only for monomials")
        return self.invert(QuadExt(0)).value

    def frobenius(self):
        """The p-th power map in characteristic p (exponents times p)."""
        p = self.field.characteristic
        if p not in (2, 3):
            raise TagMismatch(f"frobenius needs GF(2) or GF(3), got {self.field.tag}")
        pw = self.field.mul
        terms = []
        for e, c in self.terms:
            cp = c
            for _ in range(p - 1):
                cp = pw(cp, c)
            terms.append((e * p, cp))
        return HahnSeries._trusted(self.field, tuple(terms))

    def tits_sigma(self):
        """Exponents times sqrt(2); squaring it twice gives the Frobenius map."""
        if self.field.tag != "F2":
            raise TagMismatch(f"tits_sigma needs GF(2), got {self.field.tag}")
        return HahnSeries._trusted(self.field, tuple((e.scale_sqrt2(), c) for e, c in self.terms))

    def conjugate(self):
        if self.field is not QI:
            raise TagMismatch(f"conjugate needs Qi, got {self.field.tag}")
        return HahnSeries._trusted(self.field, tuple((e, c.conjugate()) for e, c in self.terms))

    def real_part(self):
        """For Qi: the series of real parts (still tagged Qi)."""
        return HahnSeries(self.field, ((e, Gaussian(c.re, 0)) for e, c in self.terms))

    def imag_part(self):
        """For Qi: the series of imaginary parts as real Qi-tagged coefficients."""
        return HahnSeries(self.field, ((e, Gaussian(c.im, 0)) for e, c in self.terms))

    def map_coefficients(self, fn):
        return HahnSeries(self.field, ((e, fn(e, c)) for e, c in self.terms))

    # text and JSON

    def __repr__(self):
        return f"HahnSeries({self.field.tag}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            cs = self.field.fmt(c)
            parts.append(cs if e == _ZERO_EXP else f"{cs}*t^({e})")
        return " + ".join(parts)

    def to_json(self):
        f = self.field
        return {"field": f.tag,
                "terms": [{"e": e.to_json(), "c": f.to_json(c)} for e, c in self.terms]}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "field" not in data or "terms" not in data:
            raise ParseError("series JSON needs 'field' and 'terms'")
        if data["field"] not in FIELDS:
            raise ParseError(f"unknown field {data['field']!r}")
        f = FIELDS[data["field"]]
        terms = []
        for t in data["terms"]:
            if not isinstance(t, dict) or "e" not in t or "c" not in t:
                raise ParseError(f"bad term {t!r}")
            terms.append((QuadExt.from_json(t["e"]), f.from_json(t["c"])))
        out = cls(f, terms)
        if out.to_json() != data:
            raise ParseError("series JSON is not canonical (unsorted, repeated or zero terms)")
        return out


class Inversion(NamedTuple):
    value: HahnSeries
    exact: bool


def convolve_schoolbook(x: HahnSeries, y: HahnSeries) -> HahnSeries:
    """Reference product: every pair of terms, one at a time, via addition."""
    f = x.field
    out = HahnSeries.zero(f)
    for ea, ca in x.terms:
        for eb, cb in y.terms:
            out = out + HahnSeries.monomial(f, f.mul(ca, cb), ea + eb)
    return out


# ---------------------------------------------------------------------------
# membership predicates


class SubfieldPredicate:
    def contains(self, x: HahnSeries) -> bool:
        raise NotImplementedError

    def __call__(self, x):
        return self.contains(x)


class AllSeries(SubfieldPredicate):
    def contains(self, x):
        return True

    def __repr__(self):
        return "AllSeries()"


class SigmaFixed(SubfieldPredicate):
    """Series whose coefficients are fixed by conjugation (real, for Qi)."""

    def contains(self, x):
        f = x.field
        return all(f.is_fixed(c) for _, c in x.terms)

    def __repr__(self):
        return "SigmaFixed()"


class ExponentLattice(SubfieldPredicate):
    """Series whose exponents lie in the lattice spanned by one or two generators."""

    def __init__(self, *generators):
        if not 1 <= len(generators) <= 2:
            raise ValueError("one or two generators")
        gens = tuple(g if isinstance(g, QuadExt) else QuadExt(g) for g in generators)
        if any(not g for g in gens):
            raise ValueError("zero generator")
        if len(gens) == 2:
            g, h = gens
            det = g.a * h.b - h.a * g.b
            if det == 0:
                raise ValueError("generators are linearly dependent")
            self._det = det
        self.generators = gens

    def coordinates(self, e: QuadExt):
        """Rational coordinates of ``e`` in the generators, or None when outside their span."""
        if len(self.generators) == 1:
            r = e / self.generators[0]
            return (r.a,) if r.is_rational() else None
        g, h = self.generators
        m = (e.a * h.b - h.a * e.b) / self._det
        n = (g.a * e.b - e.a * g.b) / self._det
        return (m, n)

    def has_exponent(self, e) -> bool:
        coords = self.coordinates(e)
        return coords is not None and all(c.denominator == 1 for c in coords)

    def contains(self, x):
        return all(self.has_exponent(e) for e, _ in x.terms)

    def point(self, *coords):
        return sum((g * c for g, c in zip(self.generators, coords)), QuadExt(0))

    def __repr__(self):
        return f"ExponentLattice{tuple(str(g) for g in self.generators)}"


class ExponentCosets(SubfieldPredicate):
    """Series with exponents in a union of cosets ``offset + lattice``.

    With ``lattice`` the exponents of ``K^2`` this is the ``K^2``-span of the
    monomials ``t^offset``.
    """

    def __init__(self, lattice: ExponentLattice, offsets):
        self.lattice = lattice
        self.offsets = tuple(o if isinstance(o, QuadExt) else QuadExt(o) for o in offsets)

    def coset_index(self, e):
        for i, o in enumerate(self.offsets):
            if self.lattice.has_exponent(e - o):
                return i
        return None

    def contains(self, x):
        return all(self.coset_index(e) is not None for e, _ in x.terms)

    def component(self, x: HahnSeries, i: int) -> HahnSeries:
        o = self.offsets[i]
        return HahnSeries._trusted(x.field, tuple(
            (e, c) for e, c in x.terms if self.lattice.has_exponent(e - o)))

    def __repr__(self):
        return f"ExponentCosets({self.lattice!r}, {[str(o) for o in self.offsets]})"


def in_subfield(x: HahnSeries, predicate: SubfieldPredicate) -> bool:
    return predicate.contains(x)


# ---------------------------------------------------------------------------
# text expressions: sums of  coeff * t^(exp)

_TOKENS = re.compile(r"\s*(?:(\d+)|(\^\(([^()]*)\))|(\S))")


def parse_series(text: str, field: Field) -> HahnSeries:
    """Parse e.g. ``"t^(1/2) + 3*t^(2)"`` or ``"1 + t^(1+1*s)"``.

    A term is ``[coeff][*]t[^(exp)]`` or a bare coefficient; coefficients
    are rationals, with an optional trailing ``i`` (or a lone ``i``) for Qi.
    Exponents use the :func:`parse_quadext` text form.
    """
    tokens = []
    for m in _TOKENS.finditer(text):
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("exp", m.group(3), m.start(3)))
        elif m.group(4) is not None:
            if not m.group(4).isspace():
                tokens.append((m.group(4), None, m.start(4)))
    if not tokens:
        raise ParseError("empty expression", 0)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None, len(text))

    terms = []
    first = True
    while pos < len(tokens):
        kind, val, where = peek()
        sign = 1
        if kind in ("+", "-"):
            sign = -1 if kind == "-" else 1
            pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-', got {kind!r}", where)
        first = False
        coeff = None
        kind, val, where = peek()
        if kind == "num":
            pos += 1
            num = val
            if peek()[0] == "/":
                pos += 1
                k2, v2, w2 = peek()
                if k2 != "num":
                    raise ParseError("expected denominator", w2)
                pos += 1
                num = f"{num}/{v2}"
            coeff = parse_rational(num)
            if peek()[0] == "i":
                pos += 1
                coeff = ("i", coeff)
        elif kind == "i":
            pos += 1
            coeff = ("i", Fraction(1))
        exponent = QuadExt(0)
        if coeff is not None and peek()[0] == "*":
            pos += 1
            if peek()[0] != "t":
                raise ParseError("expected 't' after '*'", peek()[2])
        if peek()[0] == "t":
            pos += 1
            exponent = QuadExt(1)
            if peek()[0] == "exp":
                _, etext, ewhere = peek()
                pos += 1
                try:
                    exponent = parse_quadext(etext)
                except ParseError as exc:
                    off = exc.position if exc.position is not None else 0
                    raise ParseError(f"bad exponent {etext!r}", ewhere + off) from exc
            elif peek()[0] == "^":
                raise ParseError("exponent must be parenthesised: t^(...)", peek()[2])
        elif coeff is None:
            k, _, w = peek()
            raise ParseError(f"unexpected {k!r}", w)
        if coeff is None:
            coeff = Fraction(1)
        terms.append((exponent, _coerce_coeff(field, coeff, sign, where)))
    return HahnSeries(field, terms)


def _coerce_coeff(field, coeff, sign, where):
    imaginary = isinstance(coeff, tuple)
    value = coeff[1] if imaginary else coeff
    value = sign * value
    if field is QI:
        return Gaussian(0, value) if imaginary else Gaussian(value, 0)
    if imaginary:
        raise ParseError(f"imaginary coefficient in field {field.tag}", where)
    if field.characteristic:
        if value.denominator % field.characteristic == 0:
            raise ParseError(f"denominator not invertible in {field.tag}", where)
        return field.mul(field.from_int(value.numerator), field.inv(field.from_int(value.denominator)))
    return value
