"""Tambara-Yamagami categories: indicators of the non-invertible object, lens invariants, equivalence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

from sympy import legendre_symbol

from .algebraic import AlgebraicValue
from .decompose import IrreducibleBlock, _run_two, _Work, diagonalize_odd, wall_decompose
from .forms import (
    DegenerateFormError,
    DiscForm,
    QuadForm,
    boundary,
    is_nondegenerate,
    lift_quadratic,
    restrict,
    tensor_matrix,
    trivial_quadform,
)
from .gauss import GaussValue, theta, theta_scaled
from .groups import FinAbGroup, torsion_order, vp
from .invariants import differing_sigma, isometry_test, odd_invariants, varsigma
from .linalg import det_int


@dataclass(frozen=True, eq=False)
class TYCategory:
    """TY(G, chi, tau) with chi(x, y) = e(-b(x, y)) and tau = tau_sign / sqrt|G|."""

    bform: DiscForm
    tau_sign: int
    qform: QuadForm | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.tau_sign not in (1, -1):
            raise ValueError("tau_sign must be +1 or -1")
        if not is_nondegenerate(self.bform):
            raise DegenerateFormError("a TY category needs a non-degenerate bicharacter")
        if self.qform is not None and boundary(self.qform) != self.bform:
            raise ValueError("qform must have boundary equal to bform")

    @classmethod
    def from_form(cls, form, tau_sign: int) -> "TYCategory":
        if isinstance(form, QuadForm):
            return cls(boundary(form), tau_sign, form)
        return cls(form, tau_sign)

    @property
    def group(self) -> FinAbGroup:
        return self.bform.group

    @cached_property
    def q(self) -> QuadForm:
        return self.qform if self.qform is not None else lift_quadratic(self.bform)

    def _key(self):
        return (self.bform, self.tau_sign)

    def __eq__(self, other):
        return isinstance(other, TYCategory) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def t_matrix(k: int) -> list[list[int]]:
    """I + J of size k - 1."""
    if k < 2:
        raise ValueError("T_k needs k >= 2")
    return [[2 if i == j else 1 for j in range(k - 1)] for i in range(k - 1)]


def fk_form(q: QuadForm, k: int) -> QuadForm:
    """(G^(k-1), T_k (x) q); the trivial form for k = 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return trivial_quadform()
    return tensor_matrix(t_matrix(k), q)


@dataclass(frozen=True)
class TkDecomposition:
    k: int
    s1: int
    s2: int
    beta: int | None
    S: tuple
    blocks: tuple  # "F", "E" or ("beta", 2^v) in order
    modulus: int


def decompose_tk(k: int, r: int) -> TkDecomposition:
    """Odd-determinant S with S^t T_k S = F-blocks + E-blocks (+ beta 2^v_2(k)) mod 2^r."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n = vp(k, 2)
    if k % 2 == 0 and r <= n:
        raise ValueError("modulus exponent must exceed v_2(k)")
    T = t_matrix(k)
    w = _Work(2, r, T)
    local = []
    _run_two(w, local, quad=False)
    s1 = sum(1 for b, _ in local if b.tag == "F")
    s2 = sum(1 for b, _ in local if b.tag == "E")
    beta = None
    layout = []
    for blk, pos in local:
        if blk.rank == 2:
            layout.append(blk.tag)
        else:
            beta = {"A": 1, "B": -1, "C": 5, "D": -5}[blk.tag]
            layout.append(("beta", 2 ** (r - blk.r)))
            if r - blk.r != n:
                raise AssertionError("unexpected valuation of the rank-1 piece of T_k")
    if (s1, s2) != ((k + 1) // 4, (k - 1) // 4):
        raise AssertionError(f"T_{k} block counts {(s1, s2)} disagree with the floor formulas")
    S = tuple(tuple(int(x) for x in row) for row in w.S)
    if beta is not None and r - n >= 3:
        # determinant relation k det(S)^2 = 3^s1 (-1)^s2 beta 2^n
        a = k >> n
        d2 = det_int(S) ** 2
        if (a * d2 - 3 ** s1 * (-1) ** s2 * beta) % 8:
            raise AssertionError("beta fails the determinant cross-check")
    _check_tk(T, S, layout, r)
    return TkDecomposition(k, s1, s2, beta, S, tuple(layout), r)


def _check_tk(T, S, layout, r):
    P = 2 ** r
    n = len(T)
    target = [[0] * n for _ in range(n)]
    i = 0
    for item in layout:
        if item == "F":
            target[i][i] = target[i + 1][i + 1] = 2
            target[i][i + 1] = target[i + 1][i] = 1
            i += 2
        elif item == "E":
            target[i][i + 1] = target[i + 1][i] = 1
            i += 2
        else:
            i += 1
    TS = [[sum(T[a][c] * S[c][b] for c in range(n)) for b in range(n)] for a in range(n)]
    got = [[sum(S[c][a] * TS[c][b] for c in range(n)) % P for b in range(n)] for a in range(n)]
    i = 0
    for item in layout:
        if isinstance(item, tuple):
            target[i][i] = got[i][i]
            i += 1
        else:
            i += 2
    if any((got[a][b] - target[a][b]) % P for a in range(n) for b in range(n)):
        raise AssertionError("S^t T_k S does not have the expected block shape")


# indicators


@lru_cache(maxsize=4096)
def _theta_fk_cached(q: QuadForm, k: int) -> GaussValue:
    return theta(fk_form(q, k))


def indicator_m(C: TYCategory, n: int, method: str = "general") -> GaussValue:
    """nu_n(m): zero for odd n, sign(tau)^k Theta(F_k(G, q)) for n = 2k."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n % 2:
        return GaussValue.zero()
    k = n // 2
    if method == "general":
        t = _theta_fk_cached(C.q, k)
    elif method == "closed":
        t = theta_fk_closed(C.q, k)
    else:
        raise ValueError(f"unknown method {method!r}")
    return t * GaussValue.sign(C.tau_sign ** k)


def indicator_sum_invertibles(C: TYCategory, k: int) -> int:
    """Sum of nu_k over the invertible simple objects, |G[k]|."""
    return torsion_order(C.group, k)


# closed forms


def _odd_alpha_tag(q: QuadForm) -> IrreducibleBlock:
    G = q.group
    if G.rank != 1 or G.factors[0][0] == 2:
        raise ValueError("closed odd formula needs a cyclic group of odd prime-power order")
    p, r = G.factors[0]
    bnum = int(q.B[0, 0])
    if bnum % p == 0:
        raise DegenerateFormError("form is degenerate")
    return IrreducibleBlock("A" if legendre_symbol(bnum % p, p) == 1 else "B", p, r)


def odd_class_comparator(p: int, r: int, k: int) -> int:
    """(-1)^(r(k-1) - min(r, v_p(k))): ratio of Theta(F_k) between the two unit classes."""
    return -1 if (r * (k - 1) - min(r, vp(k, p))) % 2 else 1


def theta_fk_closed_odd(q: QuadForm, k: int) -> GaussValue:
    """Theta(F_k(Z/p^r, q)) from a diagonalization of p^-r T_k."""
    blk = _odd_alpha_tag(q)
    p, r = blk.p, blk.r
    if k == 1:
        return GaussValue.one()
    u_is_b = blk.tag == "B"
    _, diag = diagonalize_odd([[Fraction(x, p ** r) for x in row] for row in t_matrix(k)], p)
    value = GaussValue.one()
    for d in diag:
        if d.num == 0:
            value = value * GaussValue(p ** r, 0)
            continue
        s = r - vp(d.den, p)
        eps_b = d.num != 1
        tag = "B" if eps_b != u_is_b else "A"
        value = value * theta_scaled(IrreducibleBlock(tag, p, r), s)
    return value


def theta_fk_closed_two(q: QuadForm, k: int) -> GaussValue:
    """Theta(F_k(G, q)) on a 2-group from T_k's block pattern and sigma invariants."""
    G = q.group
    if any(p != 2 for p, _ in G.factors):
        raise ValueError("closed two-primary formula needs a 2-group")
    if not is_nondegenerate(q):
        raise DegenerateFormError("form is degenerate")
    if k == 1:
        return GaussValue.one()
    s1 = (k + 1) // 4
    weight = sum(r for _, r in G.factors)
    n = vp(k, 2)
    if n == 0:
        return GaussValue.sign(-1 if (s1 * weight) % 2 else 1)
    e = max((r for _, r in G.factors), default=0)
    beta = decompose_tk(k, max(e + 1, n + 3)).beta
    gamma = sum(r * s1 + max(r - n, 0) * (beta * beta - 1) // 8 for _, r in G.factors)
    sig = varsigma(boundary(q), n).image()
    return GaussValue.sign(-1 if gamma % 2 else 1) * GaussValue(torsion_order(G, 2 ** n), 0) * sig ** beta


def theta_fk_closed(q: QuadForm, k: int) -> GaussValue:
    """Closed-form Theta(F_k(G, q)) for non-degenerate q, prime by prime."""
    if not is_nondegenerate(q):
        raise DegenerateFormError("closed forms need a non-degenerate q")
    G = q.group
    value = GaussValue.one()
    even = G.indices(2)
    if even:
        value = value * theta_fk_closed_two(restrict(q, even), k)
    odd = [i for i in range(G.rank) if G.factors[i][0] != 2]
    if odd:
        for blk in wall_decompose(restrict(q, odd)).blocks:
            value = value * theta_fk_closed_odd(blk.quadratic(), k)
    return value


# lens space invariant


def lens_invariant(C: TYCategory, k: int) -> AlgebraicValue:
    """|L_(k,1)| = (|G[k]| + sqrt|G| nu_k(m)) / (2|G|), cross-checked against the pdim-weighted sum."""
    if k < 1:
        raise ValueError("k must be >= 1")
    order = C.group.order
    nu = indicator_m(C, k)
    value = (AlgebraicValue.rational(torsion_order(C.group, k))
             + AlgebraicValue.from_gauss(GaussValue(order, 0) * nu)) / (2 * order)
    pdim_m = AlgebraicValue.from_gauss(GaussValue(order, 0))
    weighted = (AlgebraicValue.rational(indicator_sum_invertibles(C, k))
                + AlgebraicValue.from_gauss(nu) * pdim_m) * AlgebraicValue.rational(Fraction(1, 2 * order))
    if weighted != value:
        raise AssertionError("lens invariant disagrees with the pdim-weighted indicator sum")
    return value


# equivalence


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    witness_k: int | None = None
    reason: str = ""
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {"equivalent": self.equivalent, "witness_k": self.witness_k, "reason": self.reason}
        out.update(self.details)
        return out


def _invariant_pair(C: TYCategory, k: int):
    return torsion_order(C.group, k), indicator_m(C, k)


def _torsion_witness(G1: FinAbGroup, G2: FinAbGroup):
    L = math.lcm(G1.exponent, G2.exponent)
    return next((k for k in range(1, L + 1) if torsion_order(G1, k) != torsion_order(G2, k)), None)


def _odd_witness(b1: DiscForm, b2: DiscForm):
    inv1, inv2 = odd_invariants(b1), odd_invariants(b2)
    A = {key for key in inv1 if inv1[key][1] != inv2.get(key, (0, 0))[1]}
    if not A:
        return None
    A_max = {(p, r) for p, r in A if not any(q == p and s > r for q, s in A)}
    case1 = sorted(p for p, r in A_max if r == 1)
    if case1:
        return case1[0]
    p0, _ = min(A_max)
    e = max((r for p, r in b1.group.factors if p == 2), default=0)
    prod = math.prod(p ** r for p, r in A_max)
    return 2 ** (e + 1) * prod // p0


def _scan(C1, C2, bound):
    for k in range(1, bound + 1):
        if _invariant_pair(C1, k) != _invariant_pair(C2, k):
            return k
    return None


def distinguish(C1: TYCategory, C2: TYCategory) -> Verdict:
    """Decide equivalence; otherwise return an index k where the indicator data differ."""
    G1, G2 = C1.group, C2.group
    witness, reason = None, ""
    if not G1.same_type(G2):
        witness, reason = _torsion_witness(G1, G2), "torsion"
    elif C1.tau_sign != C2.tau_sign:
        witness, reason = 2, "tau"
    elif isometry_test(C1.bform, C2.bform):
        return Verdict(True, None, "isometric")
    else:
        k = _odd_witness(C1.bform, C2.bform)
        if k is not None:
            witness, reason = 2 * k, "odd-part"
        else:
            n = differing_sigma(C1.bform, C2.bform)
            if n is not None:
                witness, reason = 2 ** (n + 1), "two-part"
    bound = 8 * max(G1.exponent, G2.exponent)
    if witness is None or _invariant_pair(C1, witness) == _invariant_pair(C2, witness):
        witness, reason = _scan(C1, C2, bound), "scan"
        if witness is None:
            raise RuntimeError(f"no distinguishing index found up to {bound} for inequivalent categories")
    t1, nu1 = _invariant_pair(C1, witness)
    t2, nu2 = _invariant_pair(C2, witness)
    details = {"torsion": [t1, t2], "nu_m": [nu1.to_json(), nu2.to_json()]}
    return Verdict(False, witness, reason, details)
