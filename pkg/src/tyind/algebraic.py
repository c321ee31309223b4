"""Exact elements of Q(zeta_8) + Q(zeta_8) * sqrt(d), d odd and squarefree."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from sympy import factorint

from .gauss import GaussValue

_ZETA = cmath.exp(2j * math.pi / 8)
_SQRT2 = (0, 1, 0, -1)  # zeta - zeta^3


def _vec(xs) -> tuple:
    return tuple(Fraction(x) for x in xs)


_ZERO4 = _vec((0, 0, 0, 0))


def _cyc_mul(u, v) -> tuple:
    out = [Fraction(0)] * 4
    for i, a in enumerate(u):
        if not a:
            continue
        for j, b in enumerate(v):
            if b:
                k = i + j
                if k >= 4:
                    out[k - 4] -= a * b
                else:
                    out[k] += a * b
    return tuple(out)


def _zeta_power(j: int) -> tuple:
    j %= 8
    v = [Fraction(0)] * 4
    v[j % 4] = Fraction(1 if j < 4 else -1)
    return tuple(v)


def _split_sqrt(m: int):
    """m = s^2 * 2^e * d with d odd squarefree, e in {0, 1}: returns (s, e, d)."""
    s, e, d = 1, 0, 1
    for p, k in factorint(m).items():
        s *= p ** (k // 2)
        if k % 2:
            if p == 2:
                e = 1
            else:
                d *= p
    return s, e, d


class AlgebraicValue:
    """base + rad_coeff * sqrt(radicand), coordinates in the basis 1, z, z^2, z^3 with z = e(1/8)."""

    __slots__ = ("base", "rad_coeff", "radicand")

    def __init__(self, base=_ZERO4, rad_coeff=_ZERO4, radicand: int = 1):
        base, rad = _vec(base), _vec(rad_coeff)
        if len(base) != 4 or len(rad) != 4:
            raise ValueError("coordinates need four entries")
        if radicand < 1:
            raise ValueError("radicand must be positive")
        s, e, d = _split_sqrt(radicand)
        factor = tuple(Fraction(s) * x for x in (_SQRT2 if e else (1, 0, 0, 0)))
        rad = _cyc_mul(rad, factor)
        if d == 1:
            base = tuple(a + b for a, b in zip(base, rad))
            rad = _ZERO4
        if not any(rad):
            d = 1
        self.base, self.rad_coeff, self.radicand = base, rad, d

    @classmethod
    def rational(cls, x) -> "AlgebraicValue":
        return cls((Fraction(x), 0, 0, 0))

    @classmethod
    def from_gauss(cls, g: GaussValue) -> "AlgebraicValue":
        if g.is_zero:
            return cls()
        return cls(_ZERO4, _zeta_power(g.phase), g.radicand)

    def _terms(self):
        out = {1: self.base}
        if self.radicand != 1:
            out[self.radicand] = self.rad_coeff
        return out

    @classmethod
    def _from_terms(cls, terms: dict) -> "AlgebraicValue":
        base = terms.pop(1, _ZERO4)
        live = {d: v for d, v in terms.items() if any(v)}
        if len(live) > 1:
            raise ValueError("sum involves two different square roots; not representable")
        if not live:
            return cls(base)
        (d, v), = live.items()
        return cls(base, v, d)

    def __add__(self, other):
        other = _coerce(other)
        terms = self._terms()
        for d, v in other._terms().items():
            terms[d] = tuple(a + b for a, b in zip(terms.get(d, _ZERO4), v))
        return AlgebraicValue._from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicValue(tuple(-x for x in self.base), tuple(-x for x in self.rad_coeff), self.radicand)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        terms: dict = {}
        for d1, u in self._terms().items():
            for d2, v in other._terms().items():
                if not any(u) or not any(v):
                    continue
                g = math.gcd(d1, d2)
                d = d1 * d2 // (g * g)
                w = tuple(Fraction(g) * x for x in _cyc_mul(u, v))
                terms[d] = tuple(a + b for a, b in zip(terms.get(d, _ZERO4), w))
        return AlgebraicValue._from_terms(terms)

    __rmul__ = __mul__

    def __truediv__(self, x):
        x = Fraction(x)
        return AlgebraicValue(tuple(a / x for a in self.base), tuple(a / x for a in self.rad_coeff),
                              self.radicand)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicValue.rational(other)
        if not isinstance(other, AlgebraicValue):
            return NotImplemented
        return (self.base == other.base and self.rad_coeff == other.rad_coeff
                and self.radicand == other.radicand)

    def __hash__(self):
        return hash((self.base, self.rad_coeff, self.radicand))

    def is_rational(self) -> bool:
        return self.radicand == 1 and not any(self.base[1:])

    def to_complex(self) -> complex:
        z = sum(float(a) * _ZETA ** i for i, a in enumerate(self.base))
        r = sum(float(a) * _ZETA ** i for i, a in enumerate(self.rad_coeff))
        return z + r * math.sqrt(self.radicand)

    def to_json(self):
        return {"base": [_qjson(x) for x in self.base],
                "rad_coeff": [_qjson(x) for x in self.rad_coeff],
                "radicand": self.radicand}

    def __repr__(self):
        return f"AlgebraicValue({self.to_json()})"


def _qjson(x: Fraction):
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _coerce(x) -> AlgebraicValue:
    if isinstance(x, AlgebraicValue):
        return x
    if isinstance(x, GaussValue):
        return AlgebraicValue.from_gauss(x)
    return AlgebraicValue.rational(x)
