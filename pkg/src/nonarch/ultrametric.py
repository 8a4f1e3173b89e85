"""Omega-groups, their ultrametric and ball algebra, and the axiom validator.

An omega-group is a (possibly non-abelian) group with a map ``omega`` into
levels satisfying:

* ``omega(x) == INF`` exactly for the identity;
* ``omega(-x) == omega(x)`` and ``omega(x + y) >= min(omega(x), omega(y))``;
* optionally a right scalar action ``act(x, l)`` by Hahn series with
  ``omega(act(x, l)) == omega(x) + modulus * valuation(l)``.

The distance between ``x`` and ``y`` is ``2 ** -omega(x - y)``.  It is never
evaluated; everything here works with the exponent (the *level*), so a
larger level means a smaller distance.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

from .errors import ChainNotNested, EmptyChain, NotAMember, ParseError
from .scalars import INF, QuadExt, format_level, level_from_json, level_to_json

__all__ = [
    "OmegaGroup", "Ball", "Relation", "distance_level", "ball_contains",
    "ball_compare", "recenter", "check_nested", "validate_omega_group",
    "LawResult", "ValidationReport", "CorruptedOmega",
]


class OmegaGroup:
    """Base class for omega-group instances.

    Subclasses provide ``add``, ``neg``, ``zero``, ``omega`` and a sampler.
    Groups with a scalar action also set ``modulus`` and implement ``act``
    and ``sample_scalar``.  ``quotient``/``quotient_act`` describe the map to
    the vector space ``S/T'`` when there is one.
    """

    name = "omega-group"
    modulus = None
    zero = None

    def add(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise NotImplementedError

    def omega(self, x):
        raise NotImplementedError

    def eq(self, x, y) -> bool:
        return x == y

    def contains(self, x) -> bool:
        return True

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def has_action(self) -> bool:
        return self.modulus is not None

    def act(self, x, k):
        raise NotImplementedError(f"{self.name} has no scalar action")

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def sample_scalar(self, rng: random.Random):
        raise NotImplementedError

    def scalar_one(self):
        raise NotImplementedError

    def scalar_valuation(self, k):
        return k.valuation()

    def scalar_mul(self, k, l):
        return k * l

    def quotient(self, x):
        return None

    def quotient_act(self, v, k):
        return None

    def element_to_json(self, x):
        raise NotImplementedError

    def element_from_json(self, data):
        raise NotImplementedError

    def to_json(self, x):
        return {"family": self.name, "data": self.element_to_json(x)}

    def from_json(self, data):
        if not isinstance(data, dict) or "data" not in data:
            raise ParseError("element JSON needs 'family' and 'data'")
        if data.get("family") != self.name:
            raise ParseError(f"element of family {data.get('family')!r}, expected {self.name!r}")
        return self.element_from_json(data["data"])

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def distance_level(group: OmegaGroup, x, y):
    """``omega(x - y)``: the exponent of the distance ``2 ** -omega(x - y)``."""
    return group.omega(group.add(x, group.neg(y)))


class Relation(enum.Enum):
    DISJOINT = "Disjoint"
    FIRST_INSIDE_SECOND = "FirstInsideSecond"
    SECOND_INSIDE_FIRST = "SecondInsideFirst"
    EQUAL = "Equal"


@dataclass(frozen=True)
class Ball:
    center: object
    level: QuadExt
    kind: str = "closed"

    def __post_init__(self):
        if self.kind not in ("open", "closed"):
            raise ValueError(f"kind must be 'open' or 'closed', not {self.kind!r}")
        if self.level is INF or not isinstance(self.level, QuadExt):
            raise ValueError("ball level must be finite")

    def to_json(self, group: OmegaGroup):
        return {"center": group.to_json(self.center), "level": level_to_json(self.level),
                "kind": self.kind}

    @classmethod
    def from_json(cls, group: OmegaGroup, data):
        if not isinstance(data, dict) or set(data) != {"center", "level", "kind"}:
            raise ParseError("ball JSON needs exactly 'center', 'level', 'kind'")
        level = level_from_json(data["level"])
        if level is INF:
            raise ParseError("ball level must be finite")
        if data["kind"] not in ("open", "closed"):
            raise ParseError(f"bad ball kind {data['kind']!r}")
        return cls(group.from_json(data["center"]), level, data["kind"])

    def __str__(self):
        return f"{self.kind} ball, level {format_level(self.level)}"


def _within(level, ball: Ball) -> bool:
    return level >= ball.level if ball.kind == "closed" else level > ball.level


def ball_contains(group: OmegaGroup, ball: Ball, p) -> bool:
    return _within(distance_level(group, ball.center, p), ball)


def _size_key(ball: Ball):
    # larger key = smaller ball: higher level, then open inside closed
    return (ball.level, 1 if ball.kind == "open" else 0)


def ball_compare(group: OmegaGroup, b1: Ball, b2: Ball) -> Relation:
    """Relation between two balls.

    Two balls of an ultrametric space are either disjoint or nested, so it is
    enough to test whether the larger ball holds the smaller one's center.
    """
    k1, k2 = _size_key(b1), _size_key(b2)
    if k1 == k2:
        return Relation.EQUAL if ball_contains(group, b1, b2.center) else Relation.DISJOINT
    if k1 > k2:
        return Relation.FIRST_INSIDE_SECOND if ball_contains(group, b2, b1.center) else Relation.DISJOINT
    return Relation.SECOND_INSIDE_FIRST if ball_contains(group, b1, b2.center) else Relation.DISJOINT


def recenter(group: OmegaGroup, ball: Ball, p) -> Ball:
    if not ball_contains(group, ball, p):
        raise NotAMember("new center lies outside the ball")
    return Ball(p, ball.level, ball.kind)


def check_nested(group: OmegaGroup, chain) -> None:
    """Raise unless each ball of ``chain`` contains the next one."""
    if not chain:
        raise EmptyChain("empty ball chain")
    for i in range(len(chain) - 1):
        rel = ball_compare(group, chain[i], chain[i + 1])
        if rel not in (Relation.EQUAL, Relation.SECOND_INSIDE_FIRST):
            raise ChainNotNested(f"ball {i + 1} is not inside ball {i} ({rel.value})")


# ---------------------------------------------------------------------------
# axiom validation


@dataclass
class LawResult:
    checked: int = 0
    passed: int = 0
    witness: object = None

    def to_json(self):
        out = {"checked": self.checked, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ValidationReport:
    family: str
    samples: int
    seed: int
    modulus: object = None
    laws: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.passed == r.checked for r in self.laws.values())

    def violated_laws(self):
        return [name for name, r in self.laws.items() if r.passed != r.checked]

    def to_json(self):
        return {
            "family": self.family,
            "samples": self.samples,
            "seed": self.seed,
            "rng": "python-random-mt19937",
            "modulus": None if self.modulus is None else self.modulus.to_json(),
            "ok": self.ok,
            "laws": {name: r.to_json() for name, r in self.laws.items()},
        }


LAWS = (
    "associativity", "identity", "inverse",
    "cond1_identity_infinite", "cond1_nonidentity_finite",
    "cond3_symmetry", "cond3_ultrametric", "lemma_strict_triangle",
    "cond2_modulus", "eq_quotient", "eq_distributive", "eq_compatible", "eq_unit",
)


def validate_omega_group(group: OmegaGroup, samples: int = 500, seed: int = 0) -> ValidationReport:
    """Check the group axioms and the omega conditions on random tuples.

    Violations are recorded in the report (with a JSON witness for the
    first failure of each law); nothing is raised.
    """
    rng = random.Random(seed)
    report = ValidationReport(group.name, samples, seed, group.modulus)
    laws = report.laws
    acting = group.has_action()
    for name in LAWS:
        if name.startswith(("cond2", "eq_")) and not acting:
            continue
        laws[name] = LawResult()

    tj = group.to_json
    g = group

    def record(name, ok, witness):
        r = laws[name]
        r.checked += 1
        if ok:
            r.passed += 1
        elif r.witness is None:
            r.witness = witness()

    z0 = g.zero
    record("cond1_identity_infinite", g.omega(z0) is INF, lambda: {"x": tj(z0)})
    for _ in range(samples):
        x, y, z = g.sample(rng), g.sample(rng), g.sample(rng)
        # a partner close to -x exercises cancellation in the strict-triangle checks
        near = g.add(g.neg(x), z) if rng.random() < 0.5 else y
        xy = g.add(x, y)
        record("associativity", g.eq(g.add(xy, z), g.add(x, g.add(y, z))),
               lambda: {"x": tj(x), "y": tj(y), "z": tj(z)})
        record("identity", g.eq(g.add(x, z0), x) and g.eq(g.add(z0, x), x),
               lambda: {"x": tj(x)})
        nx = g.neg(x)
        record("inverse", g.eq(g.add(x, nx), z0) and g.eq(g.add(nx, x), z0),
               lambda: {"x": tj(x)})
        wx = g.omega(x)
        if not g.eq(x, z0):
            record("cond1_nonidentity_finite", wx is not INF, lambda: {"x": tj(x)})
        record("cond3_symmetry", g.omega(nx) == wx,
               lambda: {"x": tj(x), "omega_x": level_to_json(wx),
                        "omega_neg_x": level_to_json(g.omega(nx))})
        for other in (y, near):
            wo = g.omega(other)
            s = g.add(x, other)
            ws = g.omega(s)
            record("cond3_ultrametric", ws >= min(wx, wo),
                   lambda: {"x": tj(x), "y": tj(other), "omega_sum": level_to_json(ws)})
            if wx != wo:
                # omega(a) > omega(b) forces omega(a + b) == omega(b), in either order
                hi, lo = (x, other) if wx > wo else (other, x)
                w_lo = min(wx, wo)
                record("lemma_strict_triangle",
                       g.omega(g.add(hi, lo)) == w_lo and g.omega(g.add(lo, hi)) == w_lo,
                       lambda: {"x": tj(hi), "y": tj(lo)})
        if not acting:
            continue
        k, l = g.sample_scalar(rng), g.sample_scalar(rng)
        xk = g.act(x, k)
        expected = wx + g.modulus * g.scalar_valuation(k)
        record("cond2_modulus", g.omega(xk) == expected,
               lambda: {"x": tj(x), "scalar": k.to_json(),
                        "omega": level_to_json(g.omega(xk)), "expected": level_to_json(expected)})
        v = g.quotient(x)
        if v is not None:
            record("eq_quotient", g.quotient(xk) == g.quotient_act(v, k),
                   lambda: {"x": tj(x), "scalar": k.to_json()})
        record("eq_distributive", g.eq(g.act(xy, k), g.add(xk, g.act(y, k))),
               lambda: {"x": tj(x), "y": tj(y), "scalar": k.to_json()})
        record("eq_compatible", g.eq(g.act(xk, l), g.act(x, g.scalar_mul(k, l))),
               lambda: {"x": tj(x), "k": k.to_json(), "l": l.to_json()})
        record("eq_unit", g.eq(g.act(x, g.scalar_one()), x), lambda: {"x": tj(x)})
    return report


class CorruptedOmega(OmegaGroup):
    """Wraps a group and raises omega by one at a single planted element.

    Used to check that the validator catches a planted fault; the sampler
    returns the planted element on every other draw.
    """

    def __init__(self, base: OmegaGroup, planted):
        self.base = base
        self.planted = planted
        self.name = base.name
        self.modulus = base.modulus
        self.zero = base.zero

    def omega(self, x):
        w = self.base.omega(x)
        return w + 1 if self.base.eq(x, self.planted) else w

    def sample(self, rng):
        return self.planted if rng.random() < 0.5 else self.base.sample(rng)

    def __getattr__(self, attr):
        return getattr(self.base, attr)

    def add(self, x, y):
        return self.base.add(x, y)

    def neg(self, x):
        return self.base.neg(x)

    def eq(self, x, y):
        return self.base.eq(x, y)

    def act(self, x, k):
        return self.base.act(x, k)

    def quotient(self, x):
        return self.base.quotient(x)

    def quotient_act(self, v, k):
        return self.base.quotient_act(v, k)

    def sample_scalar(self, rng):
        return self.base.sample_scalar(rng)

    def scalar_one(self):
        return self.base.scalar_one()

    def element_to_json(self, x):
        return self.base.element_to_json(x)

    def element_from_json(self, data):
        return self.base.element_from_json(data)
