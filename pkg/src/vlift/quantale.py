"""Commutative quantales with exact arithmetic.

Finite kinds (``two`` and the ``n``-chains) encode a value as its chain
index, so ``le``/``join``/``meet`` are the integer order and every
operation can be tabulated.  Interval kinds use :class:`fractions.Fraction`;
``lawvere_plus`` additionally has the token :data:`INF`.  Reversed-order
kinds store raw reals and implement ``le`` as ``>=``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Sequence

import numpy as np

__all__ = [
    "INF",
    "Quantale",
    "QuantaleError",
    "LawReport",
    "make_quantale",
    "validate_laws",
    "FINITE_KINDS",
    "INTERVAL_KINDS",
]


class QuantaleError(ValueError):
    pass


class _Infinity:
    """The point at infinity of ``[0, inf]``; a singleton."""

    _instance: "_Infinity | None" = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("vlift.INF")


INF = _Infinity()

FINITE_KINDS = ("two", "lukasiewicz_chain", "godel_chain")
INTERVAL_KINDS = (
    "unit_lukasiewicz",
    "unit_godel",
    "unit_product",
    "lawvere_plus",
    "unit_ultrametric",
)
_REVERSED = ("lawvere_plus", "unit_ultrametric")
_OUT_OF_SCOPE = ("probabilistic", "probabilistic_metric")


@dataclass(frozen=True)
class Quantale:
    """A commutative quantale of one of the supported kinds.

    Build instances with :func:`make_quantale`; the constructor does not
    validate ``n``.
    """

    kind: str
    n: int = 1

    # -- descriptors -----------------------------------------------------

    @property
    def finite(self) -> bool:
        return self.kind in FINITE_KINDS

    @property
    def reversed_order(self) -> bool:
        return self.kind in _REVERSED

    @property
    def tensor_is_meet(self) -> bool:
        return self.kind in ("two", "godel_chain", "unit_godel", "unit_ultrametric")

    def descriptor(self) -> dict:
        if self.kind in ("lukasiewicz_chain", "godel_chain"):
            return {"kind": self.kind, "n": self.n}
        return {"kind": self.kind}

    def __str__(self):
        if self.kind in ("lukasiewicz_chain", "godel_chain"):
            return f"{self.kind}({self.n})"
        return self.kind

    # -- constants ---------------------------------------------------------

    @property
    def bottom(self):
        if self.finite:
            return 0
        if self.kind == "lawvere_plus":
            return INF
        if self.kind == "unit_ultrametric":
            return Fraction(1)
        return Fraction(0)

    @property
    def top(self):
        if self.finite:
            return self.n
        if self.reversed_order:
            return Fraction(0)
        return Fraction(1)

    @property
    def unit(self):
        # every supported kind except the reversed ones has I = top;
        # for the reversed ones I = 0 = top as well
        return self.top

    # -- carrier -----------------------------------------------------------

    def contains(self, x) -> bool:
        if self.finite:
            return isinstance(x, (int, np.integer)) and not isinstance(x, bool) and 0 <= x <= self.n
        if x is INF:
            return self.kind == "lawvere_plus"
        if not isinstance(x, (Fraction, int)) or isinstance(x, bool):
            return False
        if self.kind == "lawvere_plus":
            return x >= 0
        return 0 <= x <= 1

    def check(self, *xs) -> None:
        for x in xs:
            if not self.contains(x):
                raise QuantaleError(f"value {x!r} is not in the carrier of {self}")

    def carrier(self) -> tuple:
        """All values in ascending order (finite kinds only)."""
        if not self.finite:
            raise QuantaleError(f"{self} has an infinite carrier")
        return tuple(range(self.n + 1))

    @property
    def size(self) -> int:
        if not self.finite:
            raise QuantaleError(f"{self} has an infinite carrier")
        return self.n + 1

    # -- order and lattice -------------------------------------------------

    def le(self, x, y) -> bool:
        if self.finite:
            return x <= y
        if self.kind == "lawvere_plus":
            if x is INF:
                return True
            if y is INF:
                return False
            return x >= y
        if self.kind == "unit_ultrametric":
            return x >= y
        return x <= y

    def join2(self, x, y):
        return y if self.le(x, y) else x

    def meet2(self, x, y):
        return x if self.le(x, y) else y

    def join(self, xs: Iterable = ()):
        acc = self.bottom
        for x in xs:
            acc = self.join2(acc, x)
        return acc

    def meet(self, xs: Iterable = ()):
        acc = self.top
        for x in xs:
            acc = self.meet2(acc, x)
        return acc

    # -- monoidal closed structure ----------------------------------------

    def tensor(self, x, y):
        k = self.kind
        if k == "two" or k == "godel_chain":
            return x if x <= y else y
        if k == "lukasiewicz_chain":
            return max(x + y - self.n, 0)
        if k == "unit_lukasiewicz":
            return max(x + y - 1, Fraction(0))
        if k == "unit_godel":
            return min(x, y)
        if k == "unit_product":
            return Fraction(x) * y
        if k == "lawvere_plus":
            if x is INF or y is INF:
                return INF
            return Fraction(x) + y
        if k == "unit_ultrametric":
            return max(x, y)
        raise QuantaleError(f"unsupported kind {k!r}")

    def hom(self, x, y):
        """Internal hom ``[x, y]``: the largest ``z`` with ``x (x) z <= y``."""
        k = self.kind
        if k == "two":
            return 1 if x <= y else y
        if k == "godel_chain":
            return self.n if x <= y else y
        if k == "lukasiewicz_chain":
            return self.n if x <= y else self.n - x + y
        if k == "unit_lukasiewicz":
            return Fraction(1) if x <= y else 1 - x + y
        if k == "unit_godel":
            return Fraction(1) if x <= y else Fraction(y)
        if k == "unit_product":
            return Fraction(1) if x <= y else Fraction(y) / x
        if k == "lawvere_plus":
            if x is INF:
                return Fraction(0)
            if y is INF:
                return INF
            return Fraction(0) if x >= y else Fraction(y) - x
        if k == "unit_ultrametric":
            return Fraction(0) if x >= y else Fraction(y)
        raise QuantaleError(f"unsupported kind {k!r}")

    # -- tabulation (finite kinds) ----------------------------------------

    @cached_property
    def tensor_table(self) -> np.ndarray:
        c = self.carrier()
        t = np.array([[self.tensor(x, y) for y in c] for x in c], dtype=np.int64)
        t.flags.writeable = False
        return t

    @cached_property
    def hom_table(self) -> np.ndarray:
        c = self.carrier()
        t = np.array([[self.hom(x, y) for y in c] for x in c], dtype=np.int64)
        t.flags.writeable = False
        return t

    # -- serialisation -----------------------------------------------------

    def format(self, x) -> str:
        if self.finite:
            return str(int(x))
        if x is INF:
            return "inf"
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse(self, s: Any):
        """Parse a serialised value, rejecting anything inexact."""
        if isinstance(s, bool):
            raise QuantaleError(f"boolean {s!r} is not a quantale value")
        if isinstance(s, float):
            raise QuantaleError(f"decimal value {s!r} rejected: use p/q")
        if isinstance(s, (int, np.integer)):
            v = int(s) if self.finite else Fraction(int(s))
            self.check(v)
            return v
        if not isinstance(s, str):
            raise QuantaleError(f"cannot parse {s!r} as a value of {self}")
        t = s.strip()
        if t == "inf":
            if self.kind != "lawvere_plus":
                raise QuantaleError(f"'inf' is only a value of lawvere_plus, not {self}")
            return INF
        if any(ch in t for ch in ".eE"):
            raise QuantaleError(f"decimal value {s!r} rejected: use p/q")
        if self.finite:
            if not t.isdigit():
                raise QuantaleError(f"{s!r} is not a chain index of {self}")
            v = int(t)
        else:
            try:
                v = Fraction(t)
            except (ValueError, ZeroDivisionError):
                raise QuantaleError(f"{s!r} is not an exact rational p/q") from None
        self.check(v)
        return v

    # -- sampling ------------------------------------------------------------

    def sample_values(self, count: int, rng: random.Random, denominators=(2, 3, 4, 5, 8)) -> list:
        """Random carrier values (exact) for law checks and batteries."""
        if self.finite:
            return [rng.randint(0, self.n) for _ in range(count)]
        out = []
        for _ in range(count):
            q = rng.choice(denominators)
            if self.kind == "lawvere_plus":
                if rng.random() < 0.1:
                    out.append(INF)
                else:
                    out.append(Fraction(rng.randint(0, 4 * q), q))
            else:
                out.append(Fraction(rng.randint(0, q), q))
        return out


def make_quantale(spec) -> Quantale:
    """Build a quantale from a descriptor such as ``{"kind": "godel_chain", "n": 3}``.

    A bare kind name is accepted as shorthand.
    """
    if isinstance(spec, Quantale):
        return spec
    if isinstance(spec, str):
        spec = {"kind": spec}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise QuantaleError(f"quantale descriptor must name a kind, got {spec!r}")
    kind = spec["kind"]
    if kind in _OUT_OF_SCOPE:
        raise QuantaleError(
            f"quantale kind {kind!r} is out of scope (function-valued carrier is not supported)"
        )
    if kind in ("lukasiewicz_chain", "godel_chain"):
        n = spec.get("n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise QuantaleError(f"{kind} needs an integer n >= 1, got {n!r}")
        return Quantale(kind, n)
    if kind == "two":
        return Quantale("two", 1)
    if kind in INTERVAL_KINDS:
        return Quantale(kind, 1)
    raise QuantaleError(f"unsupported quantale kind {kind!r}")


# ---------------------------------------------------------------------------
# law validation


@dataclass
class LawReport:
    quantale: str
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def _count(self, law: str, n: int = 1):
        self.checked[law] = self.checked.get(law, 0) + n

    def _fail(self, law: str, *witness):
        if not any(f["law"] == law for f in self.failures):
            self.failures.append({"law": law, "witness": list(witness)})


def validate_laws(q: Quantale, samples: Sequence | None = None) -> LawReport:
    """Check lattice, monoid and residuation laws.

    Exhaustive on finite kinds (``samples`` ignored); on interval kinds all
    triples drawn from ``samples`` are checked.
    """
    if q.finite:
        vals = list(q.carrier())
    else:
        if not samples:
            raise QuantaleError("interval quantales need a nonempty sample list")
        q.check(*samples)
        vals = list(dict.fromkeys(samples))
        vals.extend(v for v in (q.bottom, q.top, q.unit) if v not in vals)
    rep = LawReport(str(q))
    le, t, h = q.le, q.tensor, q.hom
    bot, top, one = q.bottom, q.top, q.unit

    for x in vals:
        rep._count("le_reflexive")
        if not le(x, x):
            rep._fail("le_reflexive", x)
        rep._count("bounds")
        if not (le(bot, x) and le(x, top)):
            rep._fail("bounds", x)
        rep._count("unit")
        if t(one, x) != x or t(x, one) != x:
            rep._fail("unit", x)
        rep._count("tensor_bottom")
        if t(x, bot) != bot:
            rep._fail("tensor_bottom", x)
        rep._count("hom_in_carrier")
        if not q.contains(h(x, x)):
            rep._fail("hom_in_carrier", x)

    for x, y in itertools.product(vals, repeat=2):
        rep._count("le_antisymmetric")
        if le(x, y) and le(y, x) and x != y:
            rep._fail("le_antisymmetric", x, y)
        j, m = q.join([x, y]), q.meet([x, y])
        rep._count("join_lub")
        if not (le(x, j) and le(y, j)):
            rep._fail("join_lub", x, y)
        rep._count("meet_glb")
        if not (le(m, x) and le(m, y)):
            rep._fail("meet_glb", x, y)
        rep._count("tensor_commutative")
        if t(x, y) != t(y, x):
            rep._fail("tensor_commutative", x, y)
        rep._count("le_total")
        if not (le(x, y) or le(y, x)):
            # every supported kind is a chain
            rep._fail("le_total", x, y)

    for x, y, z in itertools.product(vals, repeat=3):
        rep._count("le_transitive")
        if le(x, y) and le(y, z) and not le(x, z):
            rep._fail("le_transitive", x, y, z)
        rep._count("join_least")
        if le(x, z) and le(y, z) and not le(q.join([x, y]), z):
            rep._fail("join_least", x, y, z)
        rep._count("meet_greatest")
        if le(z, x) and le(z, y) and not le(z, q.meet([x, y])):
            rep._fail("meet_greatest", x, y, z)
        rep._count("tensor_associative")
        if t(t(x, y), z) != t(x, t(y, z)):
            rep._fail("tensor_associative", x, y, z)
        rep._count("tensor_monotone")
        if le(y, z) and not le(t(x, y), t(x, z)):
            rep._fail("tensor_monotone", x, y, z)
        rep._count("adjunction")
        if le(t(x, y), z) != le(y, h(x, z)):
            rep._fail("adjunction", x, y, z)
        rep._count("tensor_distributes_over_join")
        if t(x, q.join([y, z])) != q.join([t(x, y), t(x, z)]):
            rep._fail("tensor_distributes_over_join", x, y, z)
    return rep
