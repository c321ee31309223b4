"""Quadratic Gauss sums: exact values and a floating-point enumeration oracle."""
from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np
from sympy import legendre_symbol

from .decompose import IrreducibleBlock, wall_decompose
from .forms import DiscForm, QuadForm, lift_quadratic, nonresidue, quotient_by_radical

DEFAULT_ORACLE_CAP = 2 ** 20


def oracle_cap() -> int:
    env = os.environ.get("TYIND_ORACLE_CAP")
    return int(env) if env else DEFAULT_ORACLE_CAP


class OracleCapError(ValueError):
    """The enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class GaussValue:
    """sqrt(radicand) * e(phase/8); radicand 0 is the zero value (phase None)."""

    radicand: int
    phase: int | None = 0

    def __post_init__(self):
        if self.radicand < 0:
            raise ValueError("radicand must be non-negative")
        if self.radicand == 0:
            object.__setattr__(self, "phase", None)
        else:
            object.__setattr__(self, "phase", int(self.phase) % 8)

    @classmethod
    def zero(cls) -> "GaussValue":
        return cls(0, None)

    @classmethod
    def one(cls) -> "GaussValue":
        return cls(1, 0)

    @classmethod
    def sign(cls, s: int) -> "GaussValue":
        return cls(1, 0 if s > 0 else 4)

    @property
    def is_zero(self) -> bool:
        return self.radicand == 0

    def __mul__(self, other: "GaussValue") -> "GaussValue":
        if self.is_zero or other.is_zero:
            return GaussValue.zero()
        return GaussValue(self.radicand * other.radicand, self.phase + other.phase)

    def __neg__(self):
        return self if self.is_zero else GaussValue(self.radicand, self.phase + 4)

    def __pow__(self, k: int) -> "GaussValue":
        """Integer powers; for unit-modulus values negative k conjugates. 0^k = 0 for k != 0."""
        if k == 0:
            return GaussValue.one()
        if self.is_zero:
            return GaussValue.zero()
        if k < 0 and self.radicand != 1:
            raise ValueError("negative powers are only defined for unit-modulus values")
        return GaussValue(self.radicand ** abs(k), self.phase * k)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return math.sqrt(self.radicand) * cmath.exp(2j * math.pi * self.phase / 8)

    def to_json(self):
        if self.is_zero:
            return "zero"
        return {"radicand": self.radicand, "phase_eighth": self.phase}

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"sqrt({self.radicand})*e({self.phase}/8)"


def _eps_phase(m: int) -> int:
    # eps_m = 1 for m = 1 mod 4, i for m = 3 mod 4
    return 0 if m % 4 == 1 else 2


def theta_irreducible(block: IrreducibleBlock) -> GaussValue:
    p, r = block.p, block.r
    if p != 2:
        alpha = 1 if block.tag == "A" else nonresidue(p)
        sign = legendre_symbol((2 * alpha) % p, p) ** r
        return GaussValue(1, (0 if sign == 1 else 4) + _eps_phase(p ** r))
    if block.tag in ("E", "F"):
        return GaussValue(1, 4 * r if block.tag == "F" else 0)
    delta = {"A": 1, "B": -1, "C": 5, "D": -5}[block.tag]
    flip = (r * (delta * delta - 1) // 8) % 2
    return GaussValue(1, delta + 4 * flip)


def theta_scaled(block: IrreducibleBlock, s: int) -> GaussValue:
    """Gauss sum of p^s times the block's standard quadratic form."""
    if s < 0:
        raise ValueError("scale exponent must be non-negative")
    p, r = block.p, block.r
    if s == 0:
        return theta_irreducible(block)
    order = p ** (r * block.rank)
    if p == 2 and block.rank == 1 and s == r:
        return GaussValue.zero()
    if s >= r:
        return GaussValue(order, 0)
    return GaussValue(p ** (s * block.rank), 0) * theta_irreducible(IrreducibleBlock(block.tag, p, r - s))


def theta(q: QuadForm) -> GaussValue:
    """Exact Theta(G, q) = |G|^-1/2 sum_x e(q(x)); degenerate forms allowed."""
    if q.group.rank == 0:
        return GaussValue.one()
    quot, ok = quotient_by_radical(q)
    if not ok:
        return GaussValue.zero()
    rad_order = q.group.order // quot.group.order
    value = GaussValue(rad_order, 0)
    if quot.group.rank == 0:
        return value
    for blk in wall_decompose(quot).blocks:
        value = value * theta_irreducible(blk)
    return value


def _decode(start, stop, orders):
    idx = np.arange(start, stop, dtype=np.int64)
    cols = []
    for n in reversed(orders):
        cols.append(idx % n)
        idx = idx // n
    return np.stack(cols[::-1], axis=1) if cols else np.zeros((stop - start, 0), dtype=np.int64)


def theta_bruteforce(q: QuadForm, cap: int | None = None) -> complex:
    """Enumerate the Gauss sum in double precision (histogram of q values, then one exp per value)."""
    cap = oracle_cap() if cap is None else cap
    order = q.group.order
    if order > cap:
        raise OracleCapError(f"|G| = {order} exceeds oracle cap {cap}")
    M = 2 * q.N
    counts = np.zeros(M, dtype=np.int64)
    chunk = 1 << 16
    for start in range(0, order, chunk):
        X = _decode(start, min(order, start + chunk), q.group.orders)
        vals = np.asarray(q.qnums(X), dtype=np.int64)
        counts += np.bincount(vals, minlength=M)
    ang = 2 * np.pi * np.arange(M) / M
    re = math.fsum(counts * np.cos(ang))
    im = math.fsum(counts * np.sin(ang))
    return complex(re, im) / math.sqrt(order)


def powsum_check(b: DiscForm, k: int, cap: int | None = None):
    """(sum over y of (|G|^-1/2 sum_x e(q(x) - b(x,y)))^k, sqrt|G| * Theta(F_k(G, q)))."""
    from .ty import fk_form

    cap = oracle_cap() if cap is None else cap
    G = b.group
    n = G.order
    if n * n > cap or n ** k > cap:
        raise OracleCapError(f"enumeration for |G| = {n}, k = {k} exceeds oracle cap {cap}")
    q = lift_quadratic(b)
    X = _decode(0, n, G.orders)
    qv = np.asarray(q.qnums(X), dtype=np.int64)
    bv = np.asarray(q.gram_nums(X), dtype=np.int64)
    phase = (qv[:, None] - 2 * bv) / (2 * q.N) if n else np.zeros((0, 0))
    sums = np.exp(2j * np.pi * phase).sum(axis=0) / math.sqrt(n)
    lhs = complex(np.sum(sums ** k))
    rhs = GaussValue(n, 0) * theta(fk_form(q, k))
    return lhs, rhs
