"""Wall decomposition of non-degenerate forms by valid row-column operations."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from sympy import legendre_symbol
from sympy.ntheory import sqrt_mod

from .forms import (
    DegenerateFormError,
    DiscForm,
    QuadForm,
    _prime_block,
    boundary,
    is_nondegenerate,
    nonresidue,
    subgroup_order,
    block_quadratic,
)
from .groups import QZ, FinAbGroup, element_order, vp
from .linalg import int_dtype, inverse_mod


@dataclass(frozen=True)
class RowColOp:
    """Flip(i, j): swap e_i, e_j.  Add(r, j->i): e_i += r e_j.  Scale(r, i): e_i *= r."""

    kind: str
    i: int
    j: int = -1
    r: int = 1

    def __post_init__(self):
        if self.kind not in ("flip", "add", "scale"):
            raise ValueError(f"unknown operation kind {self.kind!r}")
        if self.kind == "add" and self.i == self.j:
            raise ValueError("Add needs i != j")

    @classmethod
    def flip(cls, i, j):
        return cls("flip", i, j)

    @classmethod
    def add(cls, r, j, i):
        return cls("add", i, j, r)

    @classmethod
    def scale(cls, r, i):
        return cls("scale", i, -1, r)

    def matrix(self, n: int) -> list[list[int]]:
        """Elementary S whose columns express the new generators in the old ones."""
        S = [[int(a == b) for b in range(n)] for a in range(n)]
        if self.kind == "flip":
            S[self.i][self.i] = S[self.j][self.j] = 0
            S[self.i][self.j] = S[self.j][self.i] = 1
        elif self.kind == "add":
            S[self.j][self.i] = self.r
        else:
            S[self.i][self.i] = self.r
        return S

    def apply_to_generators(self, G: FinAbGroup, gens: list) -> list:
        gens = list(gens)
        if self.kind == "flip":
            gens[self.i], gens[self.j] = gens[self.j], gens[self.i]
        elif self.kind == "add":
            gens[self.i] = G.add(gens[self.i], G.scale(self.r, gens[self.j]))
        else:
            gens[self.i] = G.scale(self.r, gens[self.i])
        return gens

    def to_json(self):
        if self.kind == "flip":
            return ["flip", self.i, self.j]
        if self.kind == "add":
            return ["add", self.r, self.j, self.i]
        return ["scale", self.r, self.i]

    def __str__(self):
        if self.kind == "flip":
            return f"Flip({self.i},{self.j})"
        if self.kind == "add":
            return f"Add({self.r}, {self.j}->{self.i})"
        return f"Scale({self.r}, {self.i})"


def _check_indices(op: RowColOp, n: int):
    for k in (op.i,) + ((op.j,) if op.kind != "scale" else ()):
        if not 0 <= k < n:
            raise IndexError(f"{op} is out of range for {n} generators")


def apply_rowcol(gram, op: RowColOp):
    """S^t A S for the elementary matrix of op, on a QZ matrix."""
    n = len(gram)
    _check_indices(op, n)
    A = [[QZ.of(v).fraction() for v in row] for row in gram]
    S = op.matrix(n)
    AS = [[sum(A[a][k] * S[k][b] for k in range(n)) for b in range(n)] for a in range(n)]
    out = [[sum(S[k][a] * AS[k][b] for k in range(n)) for b in range(n)] for a in range(n)]
    return [[QZ.of(v) for v in row] for row in out]


def validity_check(G: FinAbGroup, generators, op: RowColOp) -> bool:
    """True when the transformed generators keep their orders and still generate G."""
    _check_indices(op, len(generators))
    new = op.apply_to_generators(G, generators)
    if any(element_order(G, a) != element_order(G, b) for a, b in zip(generators, new)):
        return False
    return subgroup_order(G, new) == G.order


@dataclass(frozen=True)
class IrreducibleBlock:
    tag: str
    p: int
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("block exponent must be >= 1")
        if self.p != 2 and self.tag not in ("A", "B"):
            raise ValueError(f"tag {self.tag} only exists for p = 2")
        if self.tag not in "ABCDEF":
            raise ValueError(f"unknown tag {self.tag}")

    @property
    def rank(self) -> int:
        return 2 if self.tag in ("E", "F") else 1

    @property
    def name(self) -> str:
        return f"{self.tag}{self.p ** self.r}"

    def quadratic(self) -> QuadForm:
        return block_quadratic(self.tag, self.p, self.r)

    def bilinear(self) -> DiscForm:
        return boundary(self.quadratic())

    def __str__(self):
        return self.name


_DELTA_TAG = {1: "A", -1: "B", 5: "C", -5: "D"}


def two_adic_unit_class(alpha: int, k: int) -> int:
    """First of 1, -1, 5, -5 congruent to the odd alpha mod 2^min(k, 3)."""
    mod = 2 ** min(k, 3)
    return next(d for d in (1, -1, 5, -5) if (d - alpha) % mod == 0)


# Hensel lifting for the two rank-2 systems


def _sys_polys(system: str, s):
    s11, s12, s21, s22 = s
    if system == "a":
        return (s11 * s11 + s11 * s12 + s12 * s12,
                2 * s11 * s21 + s11 * s22 + s21 * s12 + 2 * s12 * s22,
                s21 * s21 + s21 * s22 + s22 * s22)
    if system == "b":
        return (s11 * s12, s11 * s22 + s21 * s12, s21 * s22)
    raise ValueError(f"unknown system {system!r}")


def _sys_jacobian_mod2(system: str, s):
    s11, s12, s21, s22 = (x & 1 for x in s)
    if system == "a":
        rows = [(2 * s11 + s12, s11 + 2 * s12, 0, 0),
                (2 * s21 + s22, s21 + 2 * s22, 2 * s11 + s12, s11 + 2 * s12),
                (0, 0, 2 * s21 + s22, s21 + 2 * s22)]
    else:
        rows = [(s12, s11, 0, 0), (s22, s21, s12, s11), (0, 0, s22, s21)]
    return [tuple(x & 1 for x in row) for row in rows]


def _rank_mod2(rows) -> int:
    rows = [int("".join(map(str, r)), 2) for r in rows]
    rank = 0
    for bit in reversed(range(4)):
        piv = next((r for r in rows if (r >> bit) & 1), None)
        if piv is None:
            continue
        rows.remove(piv)
        rows = [r ^ piv if (r >> bit) & 1 else r for r in rows]
        rank += 1
    return rank


def hensel_lift(system: str, targets, n: int) -> list[list[int]]:
    """2x2 S with (A(S), B(S), C(S)) = targets mod 2^n.

    System "a" (A, B, C all odd) lifts from S = I; system "b" (B odd, AC even)
    lifts from S = ((A, 1), (1, C)) mod 2.
    """
    A, B, C = (int(t) for t in targets)
    if system == "a":
        if not (A % 2 and B % 2 and C % 2):
            raise ValueError("system (a) needs A, B, C odd")
        s = [1, 0, 0, 1]
    elif system == "b":
        if not (B % 2) or (A * C) % 2:
            raise ValueError("system (b) needs B odd and AC even")
        s = [A % 2, 1, 1, C % 2]
    else:
        raise ValueError(f"unknown system {system!r}")
    if n < 1:
        raise ValueError("modulus exponent must be >= 1")
    J = _sys_jacobian_mod2(system, s)
    if _rank_mod2(J) != 3:
        raise ArithmeticError("Jacobian is not of rank 3 at the seed")
    deltas = list(product((0, 1), repeat=4))
    for k in range(1, n):
        f = [a - t for a, t in zip(_sys_polys(system, s), (A, B, C))]
        assert all(x % 2 ** k == 0 for x in f)
        rhs = [(-x // 2 ** k) & 1 for x in f]
        d = next(d for d in deltas
                 if all(sum(a * b for a, b in zip(row, d)) % 2 == rhs[i] for i, row in enumerate(J)))
        s = [x + 2 ** k * y for x, y in zip(s, d)]
    mod = 2 ** n
    s = [x % mod for x in s]
    got = _sys_polys(system, s)
    if any((g - t) % mod for g, t in zip(got, (A, B, C))):
        raise ArithmeticError("Hensel lift failed substitution check")
    return [[s[0], s[1]], [s[2], s[3]]]


# elimination state for one prime


class _Work:
    """Gram numerators over P = p^m (and q numerators over 2P) with tracked basis change."""

    def __init__(self, p, m, A, Q=None, rorig=None):
        self.p, self.m = p, m
        self.P = p ** m
        n = len(A)
        self.n = n
        dt = int_dtype(2 * self.P)
        self.A = np.array(A, dtype=object).reshape(n, n).astype(dt) % self.P
        self.Q = None if Q is None else np.array(Q, dtype=object).reshape(n).astype(dt) % (2 * self.P)
        self.S = np.eye(n, dtype=dt)
        self.rorig = rorig
        self.ops: list[RowColOp] = []

    def val(self, x) -> int:
        x = int(x) % self.P
        return self.m if x == 0 else vp(x, self.p)

    def order_exp(self, col: int) -> int:
        """log_p of the order of the current generator `col` (needs rorig)."""
        e = 0
        for k, r in enumerate(self.rorig):
            x = int(self.S[k, col]) % self.p ** r
            if x:
                e = max(e, r - vp(x, self.p))
        return e

    def flip(self, i, j):
        if i == j:
            return
        A = self.A
        A[[i, j]] = A[[j, i]]
        A[:, [i, j]] = A[:, [j, i]]
        self.S[:, [i, j]] = self.S[:, [j, i]]
        if self.Q is not None:
            self.Q[[i, j]] = self.Q[[j, i]]
        self.ops.append(RowColOp.flip(i, j))

    def scale(self, s, i):
        s = int(s) % self.P
        if s % self.p == 0:
            raise ArithmeticError("scale factor must be a unit")
        if s == 1:
            return
        P = self.P
        self.A[i] = (self.A[i] * s) % P
        self.A[:, i] = (self.A[:, i] * s) % P
        self.S[:, i] = (self.S[:, i] * s) % P
        if self.Q is not None:
            self.Q[i] = (int(self.Q[i]) * s * s) % (2 * P)
        self.ops.append(RowColOp.scale(s, i))

    def add_many(self, cs, j, targets):
        """e_i += c_i e_j for every i in targets (j not among them)."""
        pairs = [(int(c) % self.P, i) for c, i in zip(cs, targets) if int(c) % self.P]
        if not pairs:
            return
        P = self.P
        cs = np.array([c for c, _ in pairs], dtype=self.A.dtype)
        idx = [i for _, i in pairs]
        if self.rorig is not None:
            before = [self.order_exp(i) for i in idx]
        if self.Q is not None:
            Aj = self.A[j, idx]
            self.Q[idx] = (self.Q[idx] + (cs * cs % (2 * P)) * int(self.Q[j]) + 2 * cs * Aj) % (2 * P)
        self.A[idx] = (self.A[idx] + np.outer(cs, self.A[j])) % P
        self.A[:, idx] = (self.A[:, idx] + np.outer(self.A[:, j], cs)) % P
        self.S[:, idx] = (self.S[:, idx] + np.outer(self.S[:, j], cs)) % P
        for c, i in pairs:
            self.ops.append(RowColOp.add(c, j, i))
        if self.rorig is not None:
            after = [self.order_exp(i) for i in idx]
            if before != after:
                raise AssertionError("row-column operation changed a generator order")

    def min_val(self, t):
        sub = self.A[t:, t:]
        if not sub.any():
            return None
        p = self.p
        e = 0
        pe1 = p
        while not (sub % pe1).any():
            e += 1
            pe1 *= p
        return e

    # pivots

    def pivot_1x1(self, t, v, unit_target):
        """Pivot at (t, t) with valuation v: scale to unit_target(alpha) * p^v and sweep."""
        p, P = self.p, self.P
        pv = p ** v
        alpha = int(self.A[t, t]) // pv
        eps, s = unit_target(alpha)
        self.scale(s, t)
        if int(self.A[t, t]) != (eps * pv) % P:
            raise AssertionError("pivot normalization failed")
        rest = list(range(t + 1, self.n))
        if rest:
            mod = p ** (self.m - v)
            inv = pow(eps, -1, mod)
            cs = [(-(int(self.A[t, i]) // pv) * inv) % mod for i in rest]
            self.add_many(cs, t, rest)
        return eps

    def pivot_2x2(self, t, v):
        """Sweep with the 2x2 block at (t, t+1) whose off-diagonal has valuation v."""
        P = self.P
        pv = 2 ** v
        mod = 2 ** (self.m - v)
        a2 = int(self.A[t, t]) // pv
        b = int(self.A[t, t + 1]) // pv
        c2 = int(self.A[t + 1, t + 1]) // pv
        d = pow(a2 * c2 - b * b, -1, mod)
        rest = list(range(t + 2, self.n))
        if not rest:
            return
        r1s, r2s = [], []
        for k in rest:
            u = int(self.A[t, k]) // pv
            w = int(self.A[t + 1, k]) // pv
            r1s.append((-d * (c2 * u - b * w)) % mod)
            r2s.append((-d * (a2 * w - b * u)) % mod)
        self.add_many(r1s, t, rest)
        self.add_many(r2s, t + 1, rest)
        if (self.A[t:t + 2, t + 2:] % P).any():
            raise AssertionError("2x2 sweep left nonzero entries")

    def realize_2x2(self, t, S2, mod):
        """Replace (e_t, e_{t+1}) by the columns of S2 using elementary operations."""
        u = t + 1
        S2 = [[x % mod for x in row] for row in S2]
        if S2[0][0] % 2 == 0:
            self.flip(t, u)
            S2 = [S2[1], S2[0]]
        s11, s12 = S2[0]
        s21, s22 = S2[1]
        det = (s11 * s22 - s12 * s21) % mod
        inv11 = pow(s11, -1, mod)
        self.scale(s11, t)
        self.add_many([s21], u, [t])
        d = (det * inv11) % mod
        c = (s12 * inv11) % mod
        self.scale(d, u)
        self.add_many([c], t, [u])


def _odd_unit_target(p, m, v):
    u = nonresidue(p)
    mod = p ** (m - v)

    def target(alpha):
        eps = 1 if legendre_symbol(alpha % p, p) == 1 else u
        s = sqrt_mod((eps * pow(alpha, -1, mod)) % mod, mod)
        return eps, s
    return target


def _two_unit_target(m, v, quad_alpha=None):
    r = m - v

    def target(alpha):
        if quad_alpha is None:
            eps = two_adic_unit_class(alpha, r)
            mod = 2 ** r
            s = sqrt_mod((eps * pow(alpha, -1, mod)) % mod, mod)
        else:
            aq = quad_alpha()
            eps = two_adic_unit_class(aq, r + 1)
            mod = 2 ** (r + 1)
            s = sqrt_mod((eps * pow(aq, -1, mod)) % mod, mod)
        return eps, s
    return target


def _run_odd(w: _Work, blocks: list, degenerate_ok=False):
    p, m = w.p, w.m
    diag = []
    for t in range(w.n):
        v = w.min_val(t)
        if v is None:
            if not degenerate_ok:
                raise DegenerateFormError("form is degenerate")
            diag.extend([(0, m)] * (w.n - t))
            break
        d = next((i for i in range(t, w.n) if w.val(w.A[i, i]) == v), None)
        if d is None:
            i, j = next((i, j) for i in range(t, w.n) for j in range(i + 1, w.n)
                        if w.val(w.A[i, j]) == v)
            w.add_many([1], j, [i])
            d = i
        w.flip(t, d)
        eps = w.pivot_1x1(t, v, _odd_unit_target(p, m, v))
        diag.append((eps, v))
        if blocks is not None:
            blocks.append((IrreducibleBlock("A" if eps == 1 else "B", p, m - v), (t,)))
    return diag


def normalize_rank2(block, qvals=None):
    """Classify a 2x2 block 2^-r((2a, b), (b, 2c)), b odd, as E or F.

    `block` is a 2x2 QZ gram. With `qvals` (the q values of the two generators)
    the quadratic data is normalized too. Returns (IrreducibleBlock, S) where
    the columns of S are the new generators.
    """
    g = [[QZ.of(x) for x in row] for row in block]
    if g[0][1] != g[1][0]:
        raise ValueError("block is not symmetric")
    r = vp(g[0][1].den, 2) if g[0][1].den > 1 else 0
    if r == 0 or g[0][1].den != 2 ** r:
        raise ValueError("off-diagonal entry must be an odd multiple of 2^-r")
    R = 2 ** r
    bnum = g[0][1].num
    for x in (g[0][0], g[1][1]):
        if (x.fraction() * R / 2).denominator != 1:
            raise ValueError("diagonal entries must lie in 2^(1-r) Z")
    if qvals is None:
        a = int(g[0][0].fraction() * R / 2) % (R // 2 if R > 1 else 1)
        c = int(g[1][1].fraction() * R / 2) % (R // 2 if R > 1 else 1)
    else:
        qa, qc = (QZ.of(x).fraction() * R for x in qvals)
        if qa.denominator != 1 or qc.denominator != 1:
            raise ValueError("q values of a rank-2 block must lie in 2^-r Z")
        a, c = int(qa) % R, int(qc) % R
    tag = "F" if (a * c) % 2 else "E"
    s = hensel_lift("a" if tag == "F" else "b", (a, bnum, c), r + 1)
    X = inverse_mod(s, 2 ** (r + 1), 2)
    S = [[X[0][0], X[1][0]], [X[0][1], X[1][1]]]
    return IrreducibleBlock(tag, 2, r), S


def _run_two(w: _Work, blocks: list, quad: bool, degenerate_ok=False):
    m = w.m
    out = []
    t = 0
    while t < w.n:
        v = w.min_val(t)
        if v is None:
            if not degenerate_ok:
                raise DegenerateFormError("form is degenerate")
            for i in range(t, w.n):
                out.append(((i,), 0, m))
            break
        d = next((i for i in range(t, w.n) if w.val(w.A[i, i]) == v), None)
        r = m - v
        if d is not None:
            w.flip(t, d)
            qa = (lambda: int(w.Q[t]) // 2 ** v) if quad else None
            eps = w.pivot_1x1(t, v, _two_unit_target(m, v, qa))
            if quad and (int(w.Q[t]) - eps * 2 ** v) % (2 * w.P):
                raise AssertionError("quadratic pivot normalization failed")
            out.append(((t,), eps, v))
            if blocks is not None:
                blocks.append((IrreducibleBlock(_DELTA_TAG[eps], 2, r), (t,)))
            t += 1
            continue
        i, j = next((i, j) for i in range(t, w.n) for j in range(i + 1, w.n) if w.val(w.A[i, j]) == v)
        w.flip(t, i)
        if j == t:
            j = i
        w.flip(t + 1, j)
        w.pivot_2x2(t, v)
        if blocks is not None:
            pv = 2 ** v
            R = 2 ** r
            gram = [[QZ.of(int(w.A[a, b]) // pv, R) for b in (t, t + 1)] for a in (t, t + 1)]
            qv = None
            if quad:
                qv = [QZ.of(int(w.Q[a]), 2 * w.P) for a in (t, t + 1)]
            blk, S2 = normalize_rank2(gram, qv)
            w.realize_2x2(t, S2, 2 ** (r + 1))
            std = blk.quadratic()
            sh = w.P // R
            for a in range(2):
                for b in range(2):
                    if (int(w.A[t + a, t + b]) - int(std.B[a, b]) * sh) % w.P:
                        raise AssertionError("rank-2 normalization failed")
                if quad and (int(w.Q[t + a]) - int(std.Q[a]) * sh) % (2 * w.P):
                    raise AssertionError("rank-2 quadratic normalization failed")
            blocks.append((blk, (t, t + 1)))
        out.append(((t, t + 1), None, v))
        t += 2
    return out


@dataclass
class Decomposition:
    """Blocks in basis order; column j of basis_change is the j-th new generator in old coordinates."""

    group: FinAbGroup
    blocks: list
    positions: list
    basis_change: list
    provenance: list = field(default_factory=list)
    quadratic: bool = False

    def block_names(self) -> list[str]:
        return [b.name for b in self.blocks]

    def new_generators(self) -> list[tuple]:
        n = self.group.rank
        return [self.group.elem(self.basis_change[a][j] for a in range(n)) for j in range(n)]

    def block_form(self):
        """Orthogonal sum of the blocks' standard forms laid out in the new basis order."""
        n = self.group.rank
        N = self.group.exponent
        factors = [None] * n
        Q = [0] * n
        B = [[0] * n for _ in range(n)]
        for blk, pos in zip(self.blocks, self.positions):
            std = blk.quadratic()
            sh = N // std.N
            for a, i in enumerate(pos):
                factors[i] = (blk.p, blk.r)
                Q[i] = int(std.Q[a]) * sh
                for b, j in enumerate(pos):
                    B[i][j] = int(std.B[a, b]) * sh
        H = FinAbGroup(factors)
        if self.quadratic:
            return QuadForm.from_numerators(H, Q, B)
        return DiscForm.from_numerators(H, B)


def _local_sub(f, p):
    idx, m, sub = _prime_block(f, p)
    Q = None
    if isinstance(f, QuadForm):
        shift = f.N // p ** m
        Q = [int(f.Q[i]) // shift for i in idx]
    return idx, m, sub, Q


def wall_decompose(f) -> Decomposition:
    """Orthogonal decomposition of a non-degenerate form into standard irreducible blocks."""
    if not is_nondegenerate(f):
        raise DegenerateFormError("wall_decompose needs a non-degenerate form")
    G = f.group
    n = G.rank
    quad = isinstance(f, QuadForm)
    S = [[int(a == b) for b in range(n)] for a in range(n)]
    blocks, positions, ops = [], [], []
    for p in G.primes():
        idx, m, sub, Q = _local_sub(f, p)
        rorig = [G.factors[i][1] for i in idx]
        w = _Work(p, m, sub, Q if (quad and p == 2) else None, rorig)
        local = []
        if p == 2:
            _run_two(w, local, quad)
        else:
            _run_odd(w, local)
        for blk, pos in local:
            blocks.append(blk)
            positions.append(tuple(idx[a] for a in pos))
        for op in w.ops:
            ops.append(RowColOp(op.kind, idx[op.i], idx[op.j] if op.j >= 0 else -1, op.r))
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                S[i][j] = int(w.S[a, b])
    dec = Decomposition(G, blocks, positions, S, ops, quad)
    _verify(f, dec)
    return dec


def _verify(f, dec: Decomposition) -> None:
    gens = dec.new_generators()
    H = dec.block_form()
    if not gens:
        return
    X = np.array(gens, dtype=object)
    got = f.gram_nums(X)
    sh = f.N // H.N if H.N else 1
    if ((got - np.asarray(H.B, dtype=object) * sh) % f.N).any():
        raise AssertionError("decomposition does not reproduce the gram matrix")
    if dec.quadratic:
        qs = f.qnums(X)
        if ((qs - np.asarray(H.Q, dtype=object) * sh) % (2 * f.N)).any():
            raise AssertionError("decomposition does not reproduce the quadratic values")


def new_to_old_coords(dec: Decomposition) -> list[list[int]]:
    """Matrix whose row i gives the original generator e_i in the new basis."""
    G = dec.group
    n = G.rank
    out = [[0] * n for _ in range(n)]
    for p in G.primes():
        idx = G.indices(p)
        m = max(G.factors[i][1] for i in idx)
        Sp = [[dec.basis_change[i][j] for j in idx] for i in idx]
        X = inverse_mod(Sp, p ** m, p)
        for a, i in enumerate(idx):
            for b, j in enumerate(idx):
                out[i][j] = X[b][a]
    return out


def lift_via_decomposition(b: DiscForm) -> QuadForm:
    dec = wall_decompose(b)
    dec.quadratic = True
    H = dec.block_form()
    coords = new_to_old_coords(dec)
    G = b.group
    if G.rank == 0:
        return QuadForm.from_numerators(G, [], [])
    Qn = H.qnums(np.array(coords, dtype=object))
    q = QuadForm.from_numerators(G, [int(v) for v in Qn], b.B)
    for i in range(G.rank):
        if (int(q.Q[i]) - int(q.B[i, i])) % q.N:
            raise AssertionError("lifted quadratic form is inconsistent with b")
    return q


def _qz_to_prime_nums(A, p):
    F = [[QZ.of(x).fraction() for x in row] for row in A]
    m = 0
    for row in F:
        for x in row:
            d = x.denominator
            if d > 1:
                k = vp(d, p)
                if p ** k != d:
                    raise ValueError(f"entry {x} is not p-primary for p = {p}")
                m = max(m, k)
    P = p ** m
    return m, [[int(x * P) % P for x in row] for row in F]


def diagonalize_odd(A, p: int):
    """(S, diagonal) with S^t A S diagonal, entries eps * p^-r, eps in {1, u_p, 0}."""
    if p == 2:
        raise ValueError("diagonalize_odd needs an odd prime; use block_diagonalize_two")
    m, nums = _qz_to_prime_nums(A, p)
    n = len(nums)
    if m == 0:
        return [[int(a == b) for b in range(n)] for a in range(n)], [QZ.zero()] * n
    w = _Work(p, m, nums)
    diag = _run_odd(w, None, degenerate_ok=True)
    S = [[int(x) for x in row] for row in w.S]
    return S, [QZ.of(eps, p ** (m - v)) if eps else QZ.zero() for eps, v in diag]


def block_diagonalize_two(A):
    """(S, blocks): blocks are (positions, QZ sub-gram) of sizes 1 and 2."""
    m, nums = _qz_to_prime_nums(A, 2)
    n = len(nums)
    if m == 0:
        return [[int(a == b) for b in range(n)] for a in range(n)], [((i,), [[QZ.zero()]]) for i in range(n)]
    w = _Work(2, m, nums)
    out = _run_two(w, None, False, degenerate_ok=True)
    S = [[int(x) for x in row] for row in w.S]
    blocks = []
    for pos, _, _ in out:
        blocks.append((pos, [[QZ.of(int(w.A[a, b]), w.P) for b in pos] for a in pos]))
    return S, blocks
