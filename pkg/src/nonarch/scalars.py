"""Exact scalars: the value scale Q + Q*sqrt(2) and the coefficient fields.

Rationals are :class:`fractions.Fraction`.  :class:`QuadExt` stores
``(p + q*sqrt(2)) / d`` with integers, which keeps exponent arithmetic inside
Hahn series cheap.  Valuation levels are either a :class:`QuadExt` or the
singleton :data:`INF`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from math import gcd

from .errors import DivisionByZero, ParseError, TagMismatch

__all__ = [
    "QuadExt", "INF", "Level", "SQRT2", "ZERO", "ONE", "quadext_sign",
    "parse_quadext", "level_to_json", "level_from_json", "format_level",
    "Gaussian", "Field", "F2", "F3", "Q", "QI", "FIELDS", "Coefficient",
    "rational_str", "parse_rational",
]


def rational_str(x: Fraction) -> str:
    return str(x)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}") from exc


def _sign_pq(p: int, q: int) -> int:
    if p >= 0 and q >= 0:
        return 1 if (p or q) else 0
    if p <= 0 and q <= 0:
        return -1
    # opposite signs: compare p^2 with 2 q^2 (never equal, sqrt(2) is irrational)
    if p * p > 2 * q * q:
        return 1 if p > 0 else -1
    return 1 if q > 0 else -1


@total_ordering
class QuadExt:
    """An exact real number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("_p", "_q", "_d")

    def __init__(self, a=0, b=0):
        a = Fraction(a)
        b = Fraction(b)
        d = a.denominator * b.denominator // gcd(a.denominator, b.denominator)
        self._set(a.numerator * (d // a.denominator), b.numerator * (d // b.denominator), d)

    def _set(self, p, q, d):
        g = gcd(gcd(p, q), d)
        if g != 1:
            p //= g
            q //= g
            d //= g
        self._p = p
        self._q = q
        self._d = d

    @classmethod
    def _make(cls, p, q, d):
        obj = object.__new__(cls)
        obj._set(p, q, d)
        return obj

    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._d)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._d)

    def sign(self) -> int:
        return _sign_pq(self._p, self._q)

    def is_rational(self) -> bool:
        return self._q == 0

    def is_integer(self) -> bool:
        return self._q == 0 and self._d == 1

    def scale_sqrt2(self) -> QuadExt:
        return QuadExt._make(2 * self._q, self._p, self._d)

    def conjugate(self) -> QuadExt:
        return QuadExt._make(self._p, -self._q, self._d)

    def __float__(self):
        # display only; never used for comparisons
        return (self._p + self._q * 2 ** 0.5) / self._d

    @staticmethod
    def _coerce(other):
        if isinstance(other, QuadExt):
            return other
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return QuadExt._make(other.numerator, 0, other.denominator)
        return None

    def __add__(self, other):
        if other is INF:
            return INF
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return QuadExt._make(self._p + o._p, self._q + o._q, self._d)
        return QuadExt._make(self._p * o._d + o._p * self._d,
                             self._q * o._d + o._q * self._d, self._d * o._d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt._make(-self._p, -self._q, self._d)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if other is INF:
            return NotImplemented
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt._make(self._p * o._p + 2 * self._q * o._q,
                             self._p * o._q + self._q * o._p, self._d * o._d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o._p * o._p - 2 * o._q * o._q
        if norm == 0:
            raise DivisionByZero("division by zero in Q(sqrt 2)")
        # x / y = x * conj(y) * d_y / norm(p_y, q_y)
        p = (self._p * o._p - 2 * self._q * o._q) * o._d
        q = (self._q * o._p - self._p * o._q) * o._d
        d = self._d * norm
        if d < 0:
            p, q, d = -p, -q, -d
        return QuadExt._make(p, q, d)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self._p == other._p and self._q == other._q and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._q == 0 and Fraction(self._p, self._d) == other
        return NotImplemented

    def __hash__(self):
        if self._q == 0:
            return hash(Fraction(self._p, self._d))
        return hash((self._p, self._q, self._d))

    def __lt__(self, other):
        if other is INF:
            return True
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _sign_pq(o._p * self._d - self._p * o._d, o._q * self._d - self._q * o._d) > 0

    def __bool__(self):
        return bool(self._p or self._q)

    def __repr__(self):
        return f"QuadExt({self.a!s}, {self.b!s})"

    def __str__(self):
        a, b = self.a, self.b
        if b == 0:
            return str(a)
        op = "+" if b > 0 else "-"
        return f"{a}{op}{abs(b)}*s"

    def to_json(self):
        return [str(self.a), str(self.b)]

    @classmethod
    def from_json(cls, data):
        if not (isinstance(data, list) and len(data) == 2 and all(isinstance(x, str) for x in data)):
            raise ParseError(f"expected a pair of rational strings, got {data!r}")
        return cls(parse_rational(data[0]), parse_rational(data[1]))


@total_ordering
class _Infinity:
    """The level of the identity element: larger than every finite level."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("inf-level")

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __le__(self, other):
        return other is self

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        o = QuadExt._coerce(other)
        if o is None or o.sign() <= 0:
            return NotImplemented
        return self

    __rmul__ = __mul__

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Level = "QuadExt | _Infinity"

ZERO = QuadExt(0)
ONE = QuadExt(1)
SQRT2 = QuadExt(0, 1)


def quadext_sign(x: QuadExt) -> int:
    """Exact sign of ``a + b*sqrt(2)``."""
    return x.sign()


_QE_TOKEN = re.compile(r"\s*(?:(\d+)|(\S))")


def parse_quadext(text: str) -> QuadExt:
    """Parse the text form, e.g. ``"1/2"``, ``"1+1*s"``, ``"-3/4*s"``, ``"s"``.

    Terms are rationals or rationals times ``s`` (standing for sqrt(2)),
    joined by ``+`` and ``-``.
    """
    tokens = []
    for m in _QE_TOKEN.finditer(text):
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            tokens.append((m.group(2), None, m.start(2)))
    pos = 0
    total = QuadExt(0)

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", None, len(text))

    if not tokens:
        raise ParseError("empty number", 0)
    first = True
    while True:
        kind, _, where = peek()
        sign = 1
        if kind in "+-" and kind != "end":
            sign = -1 if kind == "-" else 1
            pos += 1
        elif not first:
            break
        first = False
        kind, val, where = peek()
        if kind == "num":
            pos += 1
            coeff = Fraction(val)
            if peek()[0] == "/":
                pos += 1
                kind2, val2, where2 = peek()
                if kind2 != "num":
                    raise ParseError("expected denominator", where2)
                if val2 == 0:
                    raise ParseError("zero denominator", where2)
                pos += 1
                coeff = Fraction(val, val2)
            if peek()[0] == "*":
                pos += 1
                if peek()[0] != "s":
                    raise ParseError("expected 's' after '*'", peek()[2])
                pos += 1
                total = total + QuadExt(0, sign * coeff)
            elif peek()[0] == "s":
                pos += 1
                total = total + QuadExt(0, sign * coeff)
            else:
                total = total + QuadExt(sign * coeff)
        elif kind == "s":
            pos += 1
            total = total + QuadExt(0, sign)
        else:
            raise ParseError(f"unexpected {kind!r}", where)
    if pos != len(tokens):
        raise ParseError(f"unexpected {peek()[0]!r}", peek()[2])
    return total


def format_level(level) -> str:
    return "inf" if level is INF else str(level)


def level_to_json(level):
    return "inf" if level is INF else level.to_json()


def level_from_json(data):
    if data == "inf":
        return INF
    return QuadExt.from_json(data)


# ---------------------------------------------------------------------------
# coefficient fields


class Gaussian:
    """Exact Gaussian rational ``re + im*i``.

    Stored as integers ``(a + b*i) / d`` with ``d > 0`` and
    ``gcd(a, b, d) == 1``, which keeps products free of Fraction overhead.
    """

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re, im = Fraction(re), Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a, b, d):
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        self._a, self._b, self._d = a, b, d

    @classmethod
    def _make(cls, a, b, d):
        z = cls.__new__(cls)
        z._set(a, b, d)
        return z

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def __add__(self, other):
        d1, d2 = self._d, other._d
        if d1 == d2:
            return Gaussian._make(self._a + other._a, self._b + other._b, d1)
        return Gaussian._make(self._a * d2 + other._a * d1, self._b * d2 + other._b * d1, d1 * d2)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Gaussian._make(-self._a, -self._b, self._d)

    def __mul__(self, other):
        a1, b1, a2, b2 = self._a, self._b, other._a, other._b
        return Gaussian._make(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, self._d * other._d)

    def conjugate(self):
        return Gaussian._make(self._a, -self._b, self._d)

    def inverse(self):
        a, b, d = self._a, self._b, self._d
        n = a * a + b * b
        if n == 0:
            raise DivisionByZero("inverse of 0 in Q(i)")
        # d / (a + b i) = d (a - b i) / n
        return Gaussian._make(d * a, -d * b, n)

    def __bool__(self):
        return bool(self._a or self._b)

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self._a == other._a and self._b == other._b and self._d == other._d
        return NotImplemented

    def __hash__(self):
        return hash((self._a, self._b, self._d))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        op = "+" if self.im > 0 else "-"
        return f"({self.re}{op}{abs(self.im)}i)"


class Field:
    """Arithmetic on raw coefficient values of one field.

    Raw values: ``int`` in ``range(p)`` for GF(p), ``Fraction`` for Q and
    :class:`Gaussian` for Q(i).  Hahn series store raw values and call these
    methods, which is much cheaper than boxing every coefficient.
    """

    tag: str
    characteristic: int

    def __repr__(self):
        return f"<field {self.tag}>"

    def __reduce__(self):
        return (_field_by_tag, (self.tag,))

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def conj(self, a):
        return a

    def is_fixed(self, a) -> bool:
        return self.conj(a) == a

    def from_int(self, n: int):
        raise NotImplementedError

    def half(self, a):
        return self.mul(a, self.inv(self.from_int(2)))


class PrimeField(Field):
    def __init__(self, p):
        self.characteristic = p
        self.tag = f"F{p}"
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.characteristic

    def neg(self, a):
        return (-a) % self.characteristic

    def mul(self, a, b):
        return (a * b) % self.characteristic

    def inv(self, a):
        if a % self.characteristic == 0:
            raise DivisionByZero(f"inverse of 0 in {self.tag}")
        return pow(a, -1, self.characteristic)

    def from_int(self, n):
        return n % self.characteristic

    def nonzero_values(self):
        return list(range(1, self.characteristic))

    def random(self, rng):
        return rng.randrange(1, self.characteristic)

    def to_json(self, a):
        return str(a)

    def from_json(self, data):
        if not isinstance(data, str) or not data.isdigit() or int(data) >= self.characteristic:
            raise ParseError(f"bad {self.tag} coefficient {data!r}")
        return int(data)

    def parse(self, text):
        n = int(parse_rational(text))
        return n % self.characteristic

    def fmt(self, a):
        return str(a)


class RationalField(Field):
    tag = "Q"
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / a

    def from_int(self, n):
        return Fraction(n)

    def random(self, rng):
        num = rng.choice([1, 1, 2, 3, -1, -1, -2, 5])
        return Fraction(num, rng.choice([1, 1, 2, 3]))

    def to_json(self, a):
        return str(a)

    def from_json(self, data):
        if not isinstance(data, str):
            raise ParseError(f"bad Q coefficient {data!r}")
        return parse_rational(data)

    def parse(self, text):
        return parse_rational(text)

    def fmt(self, a):
        return str(a)


class GaussianField(Field):
    tag = "Qi"
    characteristic = 0
    zero = Gaussian(0, 0)
    one = Gaussian(1, 0)
    i = Gaussian(0, 1)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()

    def conj(self, a):
        return a.conjugate()

    def from_int(self, n):
        return Gaussian(n, 0)

    def random(self, rng):
        while True:
            g = Gaussian(Q.random(rng) if rng.random() < 0.8 else 0,
                         Q.random(rng) if rng.random() < 0.6 else 0)
            if g:
                return g

    def random_real(self, rng):
        return Gaussian(Q.random(rng), 0)

    def to_json(self, a):
        return [str(a.re), str(a.im)]

    def from_json(self, data):
        if not (isinstance(data, list) and len(data) == 2 and all(isinstance(x, str) for x in data)):
            raise ParseError(f"bad Qi coefficient {data!r}")
        return Gaussian(parse_rational(data[0]), parse_rational(data[1]))

    def fmt(self, a):
        return str(a)


F2 = PrimeField(2)
F3 = PrimeField(3)
Q = RationalField()
QI = GaussianField()
FIELDS = {f.tag: f for f in (F2, F3, Q, QI)}


def _field_by_tag(tag):
    return FIELDS[tag]


class Coefficient:
    """A boxed coefficient: a raw value tagged with its field.

    Mixed-field arithmetic raises :class:`TagMismatch`.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: Field, value):
        self.field = field
        self.value = value

    def _check(self, other):
        if not isinstance(other, Coefficient):
            raise TypeError(f"expected Coefficient, got {type(other).__name__}")
        if other.field is not self.field:
            raise TagMismatch(f"{self.field.tag} vs {other.field.tag}")

    def __add__(self, other):
        self._check(other)
        return Coefficient(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        self._check(other)
        return Coefficient(self.field, self.field.sub(self.value, other.value))

    def __neg__(self):
        return Coefficient(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        self._check(other)
        return Coefficient(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        self._check(other)
        return Coefficient(self.field, self.field.div(self.value, other.value))

    def inv(self):
        return Coefficient(self.field, self.field.inv(self.value))

    def conj(self):
        return Coefficient(self.field, self.field.conj(self.value))

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self.field is other.field and self.value == other.value

    def __hash__(self):
        return hash((self.field.tag, self.value))

    def __bool__(self):
        return bool(self.value)

    def __repr__(self):
        return f"Coefficient({self.field.tag}, {self.field.fmt(self.value)})"
