"""Isometry invariants: reduced groups, characteristic elements, sigma_k, and the isometry test."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .decompose import wall_decompose
from .forms import DegenerateFormError, DiscForm, QuadForm, boundary, is_nondegenerate, restrict
from .gauss import GaussValue, theta
from .groups import INFINITY, FinAbGroup, torsion_order
from .linalg import solve_mod2


@dataclass(frozen=True)
class SigmaValue:
    """An element of Z/8 or INFINITY."""

    value: object

    def __post_init__(self):
        if self.value is not INFINITY:
            object.__setattr__(self, "value", int(self.value) % 8)

    @property
    def is_infinite(self) -> bool:
        return self.value is INFINITY

    def __add__(self, other: "SigmaValue") -> "SigmaValue":
        if self.is_infinite or other.is_infinite:
            return SigmaValue(INFINITY)
        return SigmaValue(self.value + other.value)

    def image(self) -> GaussValue:
        """e(sigma/8), or 0 for infinity."""
        return GaussValue.zero() if self.is_infinite else GaussValue(1, self.value)

    def to_json(self):
        return "infinity" if self.is_infinite else self.value


def _as_bilinear(f) -> DiscForm:
    return boundary(f) if isinstance(f, QuadForm) else f


def reduced_group(G: FinAbGroup, p: int, k: int) -> FinAbGroup:
    """G[p^k] / (G[p^(k-1)] + p G[p^(k+1)]): one Z/p per Z/p^k factor."""
    return FinAbGroup([(p, 1)] * G.multiplicity(p, k))


def characteristic_element(b, k: int) -> tuple:
    """Class c in the reduced 2-group with 2^(k-1) b(x, x) = 2^(k-1) b(x, c); coordinates over F_2."""
    b = _as_bilinear(b)
    if not is_nondegenerate(b):
        raise DegenerateFormError("characteristic element needs a non-degenerate form")
    G = b.group
    idx = [i for i, f in enumerate(G.factors) if f == (2, k)]
    if not idx:
        return ()
    scale = 2 ** k
    M = [[(int(b.B[i, j]) * scale // b.N) % 2 for j in idx] for i in idx]
    c = solve_mod2(M, [M[a][a] for a in range(len(idx))])
    if c is None:
        raise ArithmeticError("reduced form is singular")
    return tuple(c)


def _two_part(b: DiscForm) -> DiscForm:
    return restrict(b, b.group.indices(2))


def scaled_diagonal_form(b: DiscForm, k: int) -> QuadForm:
    """x -> 2^(k-1) b(x, x) as a quadratic form."""
    s = 2 ** k
    Q = [(int(b.B[i, i]) * s) % (2 * b.N) for i in range(b.group.rank)]
    B = [[(int(v) * s) % b.N for v in row] for row in b.B]
    return QuadForm.from_numerators(b.group, Q, B)


def varsigma(b, k: int) -> SigmaValue:
    """sigma_k of the 2-part of b, extracted from Theta(G, 2^(k-1) b(x, x))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    b = _as_bilinear(b)
    if not is_nondegenerate(b):
        raise DegenerateFormError("sigma_k needs a non-degenerate form")
    be = _two_part(b)
    if be.group.rank == 0:
        return SigmaValue(0)
    t = theta(scaled_diagonal_form(be, k))
    if t.is_zero:
        return SigmaValue(INFINITY)
    expected = torsion_order(be.group, 2 ** k)
    if t.radicand != expected:
        raise AssertionError(f"Gauss sum modulus {t.radicand} != |G[2^k]| = {expected}")
    return SigmaValue(t.phase)


def two_adic_range(G: FinAbGroup) -> range:
    """k values for which sigma_k can be nontrivial: 1 .. v_2(exp(G_2))."""
    e = max((r for p, r in G.factors if p == 2), default=0)
    return range(1, e + 1)


def sigma_invariants(b) -> tuple:
    b = _as_bilinear(b)
    return tuple(varsigma(b, k) for k in two_adic_range(b.group))


def odd_invariants(b) -> dict:
    """{(p, r): (N_{p,r}, parity of the number of non-residue units)} for odd p."""
    b = _as_bilinear(b)
    out = {}
    for p in b.group.primes():
        if p == 2:
            continue
        dec = wall_decompose(restrict(b, b.group.indices(p)))
        counts = Counter()
        nonres = Counter()
        for blk in dec.blocks:
            counts[blk.r] += 1
            nonres[blk.r] += blk.tag == "B"
        for r in counts:
            out[(p, r)] = (counts[r], nonres[r] % 2)
    return out


def isometry_test(f1, f2) -> bool:
    b1, b2 = _as_bilinear(f1), _as_bilinear(f2)
    for b in (b1, b2):
        if not is_nondegenerate(b):
            raise DegenerateFormError("isometry_test needs non-degenerate forms")
    if not b1.group.same_type(b2.group):
        return False
    if odd_invariants(b1) != odd_invariants(b2):
        return False
    return sigma_invariants(b1) == sigma_invariants(b2)


def differing_sigma(b1, b2):
    """Smallest k with sigma_k(b1) != sigma_k(b2), or None."""
    b1, b2 = _as_bilinear(b1), _as_bilinear(b2)
    ks = set(two_adic_range(b1.group)) | set(two_adic_range(b2.group))
    for k in sorted(ks):
        if varsigma(b1, k) != varsigma(b2, k):
            return k
    return None

