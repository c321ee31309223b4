"""Rationals mod Z, finite abelian groups given by prime-power cyclic factors, and their elements."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from typing import Iterable, Iterator, Sequence

from sympy import factorint, isprime


class _Infinity:
    """Sentinel for an infinite valuation (and for sigma = infinity).

    Compares greater than every integer and absorbs addition.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __str__(self):
        return "infinity"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("tyind-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


def vp(n: int, p: int):
    """p-adic valuation of an integer; INFINITY for 0."""
    if n == 0:
        return INFINITY
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True, order=True)
class QZ:
    """An element num/den of Q/Z in lowest terms with 0 <= num < den."""

    num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError("denominator must be positive")
        if not (0 <= self.num < self.den) or math.gcd(self.num, self.den) != 1:
            raise ValueError(f"QZ({self.num}, {self.den}) is not normalized; use QZ.of")

    @classmethod
    def of(cls, value, den: int = 1) -> "QZ":
        if isinstance(value, QZ):
            value = Fraction(value.num, value.den)
        elif isinstance(value, str):
            value = Fraction(value.strip())
        frac = Fraction(value) / den
        n, d = frac.numerator % frac.denominator, frac.denominator
        if n == 0:
            return cls(0, 1)
        return cls(n, d)

    @classmethod
    def zero(cls) -> "QZ":
        return cls(0, 1)

    def __add__(self, other):
        other = QZ.of(other)
        return QZ.of(Fraction(self.num, self.den) + Fraction(other.num, other.den))

    __radd__ = __add__

    def __neg__(self):
        return QZ.of(-self.num, self.den)

    def __sub__(self, other):
        return self + (-QZ.of(other))

    def __rsub__(self, other):
        return QZ.of(other) - self

    def __mul__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        return QZ.of(self.num * n, self.den)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.num == 0

    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self):
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


GroupElem = tuple  # tuple[int, ...], coordinates reduced mod factor orders


class SpecError(ValueError):
    """Malformed spec string; `position` is the 0-based character offset of the problem."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


def _prime_power(n: int):
    fac = factorint(n)
    if len(fac) != 1:
        return None
    (p, r), = fac.items()
    return p, r


class FinAbGroup:
    """Direct sum of cyclic groups Z/p^r, one per entry of `factors`.

    Factor order is kept as given (coordinates follow it); `canonical()` sorts
    into p ascending, r descending, and `same_type` compares isomorphism types.
    """

    __slots__ = ("factors", "orders", "_hash")

    def __init__(self, factors: Iterable[Sequence[int]] = ()):
        fs = []
        for f in factors:
            p, r = int(f[0]), int(f[1])
            if not isprime(p):
                raise ValueError(f"factor Z/{p}^{r}: {p} is not prime")
            if r < 1:
                raise ValueError(f"factor exponent must be >= 1, got {r}")
            fs.append((p, r))
        self.factors = tuple(fs)
        self.orders = tuple(p ** r for p, r in fs)
        self._hash = hash(self.factors)

    @classmethod
    def cyclic(cls, n: int) -> "FinAbGroup":
        """Z/n pre-factored into its Sylow components."""
        return cls(sorted(factorint(n).items()))

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.factors == other.factors

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FinAbGroup({list(self.factors)})"

    def __str__(self):
        if not self.factors:
            return "0"
        return " + ".join(f"Z/{n}" for n in self.orders)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return reduce(math.lcm, self.orders, 1)

    def primes(self) -> list[int]:
        return sorted({p for p, _ in self.factors})

    def indices(self, p: int) -> list[int]:
        return [i for i, (q, _) in enumerate(self.factors) if q == p]

    def multiplicity(self, p: int, r: int) -> int:
        return self.factors.count((p, r))

    def canonical_key(self):
        return tuple(sorted(self.factors, key=lambda f: (f[0], -f[1])))

    def canonical(self) -> tuple["FinAbGroup", list[int]]:
        """Sorted group and the permutation `perm` with new factor i = old factor perm[i]."""
        perm = sorted(range(self.rank), key=lambda i: (self.factors[i][0], -self.factors[i][1]))
        return FinAbGroup(self.factors[i] for i in perm), perm

    def same_type(self, other: "FinAbGroup") -> bool:
        return self.canonical_key() == other.canonical_key()

    def __add__(self, other: "FinAbGroup") -> "FinAbGroup":
        return FinAbGroup(self.factors + other.factors)

    def power(self, n: int) -> "FinAbGroup":
        return FinAbGroup(self.factors * n)

    def sub(self, idx: Sequence[int]) -> "FinAbGroup":
        return FinAbGroup(self.factors[i] for i in idx)

    # elements

    def elem(self, coords: Iterable[int]) -> GroupElem:
        c = tuple(int(x) for x in coords)
        if len(c) != self.rank:
            raise ValueError(f"element has {len(c)} coordinates, group has {self.rank} factors")
        return tuple(x % n for x, n in zip(c, self.orders))

    def zero(self) -> GroupElem:
        return (0,) * self.rank

    def gen(self, i: int) -> GroupElem:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def add(self, x: GroupElem, y: GroupElem) -> GroupElem:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x: GroupElem) -> GroupElem:
        return tuple((-a) % n for a, n in zip(x, self.orders))

    def scale(self, k: int, x: GroupElem) -> GroupElem:
        return tuple((k * a) % n for a, n in zip(x, self.orders))

    def elements(self) -> Iterator[GroupElem]:
        return product(*(range(n) for n in self.orders))

    def check(self, x: GroupElem) -> None:
        if len(x) != self.rank:
            raise ValueError(f"element has {len(x)} coordinates, group has {self.rank} factors")


def element_order(G: FinAbGroup, x: GroupElem) -> int:
    G.check(x)
    return reduce(math.lcm, (n // math.gcd(a, n) for a, n in zip(x, G.orders)), 1)


def p_valuation(G: FinAbGroup, x: GroupElem, p: int):
    """-log_p(order(x)), or INFINITY for x = 0. x must lie in the p-Sylow part."""
    n = element_order(G, x)
    if n == 1:
        return INFINITY
    v = vp(n, p)
    if p ** v != n:
        raise ValueError(f"element {x} does not lie in the {p}-Sylow subgroup")
    return -v


def torsion_order(G: FinAbGroup, k: int) -> int:
    """|G[k]| = |{x : kx = 0}|."""
    if k < 1:
        raise ValueError("k must be positive")
    return math.prod(p ** min(r, vp(k, p)) for p, r in G.factors)


def torsion_subgroup_gens(G: FinAbGroup, k: int) -> list[GroupElem]:
    gens = []
    for i, (p, r) in enumerate(G.factors):
        s = min(r, vp(k, p))
        if s:
            gens.append(G.scale(p ** (r - s), G.gen(i)))
    return gens


def sylow_split(G: FinAbGroup) -> tuple[FinAbGroup, FinAbGroup]:
    even = [f for f in G.factors if f[0] == 2]
    odd = [f for f in G.factors if f[0] != 2]
    return FinAbGroup(even), FinAbGroup(odd)


_TERM = re.compile(r"\s*Z\s*/\s*(\d+)(?:\s*\^\s*(\d+))?\s*")


def parse_group(spec: str, allow_composite: bool = False) -> FinAbGroup:
    """Parse `Z/8 + Z/8 + Z/3` (terms `Z/p^r` or `Z/n`, n a prime power).

    With allow_composite, `Z/12` is split into `Z/4 + Z/3`.
    The result is in canonical order.
    """
    factors = []
    pos = 0
    text = spec
    if not text.strip():
        raise SpecError("empty group spec", 0)
    while True:
        m = _TERM.match(text, pos)
        if not m:
            raise SpecError("expected a term of the form Z/n", pos)
        base = int(m.group(1))
        n = base ** int(m.group(2)) if m.group(2) else base
        start = m.start(1)
        if n < 2:
            raise SpecError(f"Z/{n} is trivial or invalid", start)
        pp = _prime_power(n)
        if pp is None:
            if not allow_composite:
                raise SpecError(f"Z/{n} is not a prime-power cyclic group; pre-factor it", start)
            factors.extend(factorint(n).items())
        else:
            factors.append(pp)
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "+":
            raise SpecError(f"unexpected character {text[pos]!r}", pos)
        pos += 1
    return FinAbGroup(factors).canonical()[0]
