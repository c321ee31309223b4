"""Bilinear and quadratic forms on finite abelian groups.

Values are stored as integer numerators: a bilinear gram over N = exp(G) and
quadratic generator values over 2N. The public surface speaks QZ.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from sympy import legendre_symbol

from .groups import (
    QZ,
    FinAbGroup,
    GroupElem,
    SpecError,
    _prime_power,
    parse_group,
)
from .linalg import smith_rows, span_order


@lru_cache(maxsize=None)
def nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue mod an odd prime p."""
    return next(u for u in range(2, p) if legendre_symbol(u, p) == -1)


def _frac_parts(value):
    v = QZ.of(value)
    return v.num, v.den


class DegenerateFormError(ValueError):
    """A non-degenerate form was required."""


def _safe_dtype(bound: int):
    return np.int64 if bound < 2 ** 62 else object


class _FormBase:
    __slots__ = ("group", "N", "B")

    def _arr(self, X):
        X = np.asarray(X, dtype=object)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        return X

    def _check_elem(self, x):
        if len(x) != self.group.rank:
            raise ValueError(f"element has {len(x)} coordinates, group has {self.group.rank} factors")

    def bnum(self, x, y) -> int:
        """Numerator of b(x, y) over N."""
        self._check_elem(x)
        self._check_elem(y)
        B = self.B
        n = len(x)
        s = 0
        for i in range(n):
            if x[i]:
                row = B[i]
                s += x[i] * sum(int(row[j]) * y[j] for j in range(n) if y[j])
        return s % self.N

    def gram_nums(self, X, Y=None) -> np.ndarray:
        """Matrix of numerators b(x_a, y_c) over N for rows X, Y."""
        X = self._arr(X)
        Y = X if Y is None else self._arr(Y)
        if X.shape[1] == 0:
            return np.zeros((X.shape[0], Y.shape[0]), dtype=object)
        Xr = X % self.N
        Yr = Y % self.N
        n = self.group.rank
        dt = _safe_dtype(n * n * self.N ** 3 + 1)
        out = (Xr.astype(dt) @ self.B.astype(dt)) % self.N
        out = (out @ Yr.astype(dt).T) % self.N
        return out

    @property
    def gram(self) -> list[list[QZ]]:
        return [[QZ.of(int(v), self.N) for v in row] for row in self.B]

    def is_nondegenerate(self) -> bool:
        return radical(self).order == 1


def _validate_gram(group: FinAbGroup, Bn, N: int) -> None:
    n = group.rank
    for i in range(n):
        for j in range(n):
            if Bn[i][j] != Bn[j][i]:
                raise ValueError("gram matrix is not symmetric")
            g = math.gcd(group.orders[i], group.orders[j])
            if (Bn[i][j] * g) % N:
                raise ValueError(
                    f"gram entry ({i},{j}) = {QZ.of(Bn[i][j], N)} has denominator not dividing "
                    f"gcd of generator orders {g}"
                )


def _to_nums(entries, N: int) -> list[int]:
    out = []
    for v in entries:
        num, den = _frac_parts(v)
        if N % den:
            raise ValueError(f"value {QZ.of(v)} has denominator not dividing {N}")
        out.append(num * (N // den) % N)
    return out


class DiscForm(_FormBase):
    """Symmetric bilinear form b: G x G -> Q/Z given by its gram matrix on the factor generators."""

    __slots__ = ()

    def __init__(self, group: FinAbGroup, gram: Sequence[Sequence]):
        N = group.exponent
        n = group.rank
        if len(gram) != n or any(len(row) != n for row in gram):
            raise ValueError(f"gram must be {n}x{n} for group {group}")
        Bn = [_to_nums(row, N) for row in gram]
        _validate_gram(group, Bn, N)
        self._set(group, Bn)

    def _set(self, group, Bn):
        self.group = group
        self.N = group.exponent
        B = np.array(Bn, dtype=object).reshape(group.rank, group.rank) % self.N
        B = B.astype(_safe_dtype(self.N))
        B.flags.writeable = False
        self.B = B

    @classmethod
    def from_numerators(cls, group: FinAbGroup, Bn) -> "DiscForm":
        self = cls.__new__(cls)
        self._set(group, [[int(v) for v in row] for row in np.asarray(Bn).reshape(group.rank, group.rank)])
        return self

    def __eq__(self, other):
        return (type(other) is DiscForm and self.group == other.group
                and np.array_equal(self.B, other.B))

    def __hash__(self):
        return hash((self.group, tuple(map(int, self.B.flat))))

    def __repr__(self):
        return f"DiscForm({self.group}, gram={[[str(v) for v in r] for r in self.gram]})"


class QuadForm(_FormBase):
    """Quadratic form q: G -> Q/Z given by q on generators and the gram of its boundary."""

    __slots__ = ("Q",)

    def __init__(self, group: FinAbGroup, qdiag: Sequence, bgram: Sequence[Sequence] | None = None):
        N = group.exponent
        n = group.rank
        if len(qdiag) != n:
            raise ValueError(f"need {n} generator values for group {group}")
        Qn = _to_nums(qdiag, 2 * N)
        if bgram is None:
            if n > 1:
                raise ValueError("bgram is required for groups with more than one factor")
            bgram = [[QZ.of(2 * QZ.of(qdiag[0]).fraction())]] if n else []
        Bn = [_to_nums(row, N) for row in bgram]
        if len(Bn) != n or any(len(r) != n for r in Bn):
            raise ValueError(f"bgram must be {n}x{n}")
        _validate_gram(group, Bn, N)
        for i in range(n):
            if (Qn[i] - Bn[i][i]) % N:
                raise ValueError(f"bgram[{i}][{i}] must equal 2 q(e_{i})")
            n_i = group.orders[i]
            if (n_i * n_i * Qn[i]) % (2 * N):
                raise ValueError(f"q(e_{i}) = {QZ.of(Qn[i], 2 * N)} is not well defined on Z/{n_i}")
        self._set(group, Qn, Bn)

    def _set(self, group, Qn, Bn):
        self.group = group
        self.N = group.exponent
        n = group.rank
        B = np.array(Bn, dtype=object).reshape(n, n) % self.N
        B = B.astype(_safe_dtype(self.N))
        B.flags.writeable = False
        Q = np.array(list(Qn), dtype=object).reshape(n) % (2 * self.N)
        Q = Q.astype(_safe_dtype(2 * self.N))
        Q.flags.writeable = False
        self.B = B
        self.Q = Q

    @classmethod
    def from_numerators(cls, group: FinAbGroup, Qn, Bn) -> "QuadForm":
        """Trusted constructor from numerators (Q over 2N, B over N), N = exp(group)."""
        self = cls.__new__(cls)
        n = group.rank
        self._set(group, [int(v) for v in np.asarray(Qn).reshape(n)],
                  [[int(v) for v in row] for row in np.asarray(Bn).reshape(n, n)])
        return self

    @property
    def qdiag(self) -> list[QZ]:
        return [QZ.of(int(v), 2 * self.N) for v in self.Q]

    def qnum(self, x) -> int:
        """Numerator of q(x) over 2N."""
        self._check_elem(x)
        B, Q = self.B, self.Q
        n = len(x)
        s = 0
        for i in range(n):
            xi = x[i]
            if xi:
                s += xi * xi * int(Q[i])
                row = B[i]
                s += 2 * xi * sum(int(row[j]) * x[j] for j in range(i + 1, n) if x[j])
        return s % (2 * self.N)

    def qnums(self, X) -> np.ndarray:
        """Vector of numerators q(x) over 2N for the rows of X."""
        X = self._arr(X)
        M = 2 * self.N
        if X.shape[1] == 0:
            return np.zeros(X.shape[0], dtype=object)
        n = self.group.rank
        dt = _safe_dtype(4 * n * n * M ** 3 + 1)
        Xr = (X % M).astype(dt)
        Bm = self.B.astype(dt)
        sq = (Xr * Xr) % M
        XB = (Xr @ Bm) % M
        full = ((XB * Xr) % M).sum(axis=1)
        diag = sq @ (self.Q.astype(dt) - np.diagonal(Bm))
        return (full + diag) % M

    def __eq__(self, other):
        return (type(other) is QuadForm and self.group == other.group
                and np.array_equal(self.B, other.B) and np.array_equal(self.Q, other.Q))

    def __hash__(self):
        return hash((self.group, tuple(map(int, self.B.flat)), tuple(map(int, self.Q))))

    def __repr__(self):
        return (f"QuadForm({self.group}, q={[str(v) for v in self.qdiag]}, "
                f"gram={[[str(v) for v in r] for r in self.gram]})")


@dataclass(frozen=True)
class Subgroup:
    group: FinAbGroup
    generators: tuple
    order: int

    def elements(self) -> set:
        """Enumerate the subgroup (desk scale only)."""
        G = self.group
        seen = {G.zero()}
        frontier = [G.zero()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = G.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen


def subgroup_order(G: FinAbGroup, gens) -> int:
    total = 1
    for p in G.primes():
        idx = G.indices(p)
        m = max(G.factors[i][1] for i in idx)
        rows = [[(g[i] % G.orders[i]) * p ** (m - G.factors[i][1]) for i in idx] for g in gens]
        rows = [r for r in rows if any(r)]
        total *= span_order(rows, p, m)
    return total


def eval_b(f: _FormBase, x: GroupElem, y: GroupElem) -> QZ:
    return QZ.of(f.bnum(x, y), f.N)


def eval_q(f: QuadForm, x: GroupElem) -> QZ:
    return QZ.of(f.qnum(x), 2 * f.N)


def boundary(q: QuadForm) -> DiscForm:
    return DiscForm.from_numerators(q.group, q.B)


def _prime_block(f: _FormBase, p: int):
    """Indices of the p-part, its exponent m, and gram numerators over p^m."""
    G = f.group
    idx = G.indices(p)
    m = max(G.factors[i][1] for i in idx)
    shift = f.N // p ** m
    sub = [[int(f.B[i, j]) // shift for j in idx] for i in idx]
    return idx, m, sub


def radical(b: _FormBase) -> Subgroup:
    """rad(b) by elimination modulo each prime power."""
    G = b.group
    gens = []
    for p in G.primes():
        idx, m, sub = _prime_block(b, p)
        U, ks = smith_rows(sub, p, m)
        for row, k in zip(U, ks):
            if k == 0:
                continue
            g = [0] * G.rank
            for a, i in enumerate(idx):
                g[i] = int(row[a]) * p ** (m - k)
            g = G.elem(g)
            if any(g):
                gens.append(g)
    return Subgroup(G, tuple(gens), subgroup_order(G, gens))


def radical_bruteforce(b: _FormBase) -> set:
    G = b.group
    elems = list(G.elements())
    gens = [G.gen(i) for i in range(G.rank)]
    if not elems or G.rank == 0:
        return {G.zero()}
    X = np.array(elems, dtype=object)
    vals = b.gram_nums(X, np.array(gens, dtype=object))
    return {elems[i] for i in range(len(elems)) if not vals[i].any()}


def is_nondegenerate(b: _FormBase) -> bool:
    return radical(b).order == 1


def _same_kind(f1, f2):
    if type(f1) is not type(f2):
        raise TypeError("direct_sum needs two forms of the same kind")


def direct_sum(f1, f2):
    _same_kind(f1, f2)
    G = f1.group + f2.group
    N = G.exponent
    n1, n2 = f1.group.rank, f2.group.rank
    B = [[0] * (n1 + n2) for _ in range(n1 + n2)]
    s1, s2 = N // f1.N, N // f2.N
    for i in range(n1):
        for j in range(n1):
            B[i][j] = int(f1.B[i, j]) * s1
    for i in range(n2):
        for j in range(n2):
            B[n1 + i][n1 + j] = int(f2.B[i, j]) * s2
    if isinstance(f1, QuadForm):
        Q = [int(v) * s1 for v in f1.Q] + [int(v) * s2 for v in f2.Q]
        return QuadForm.from_numerators(G, Q, B)
    return DiscForm.from_numerators(G, B)


def orthogonal_sum(forms):
    forms = list(forms)
    if not forms:
        raise ValueError("need at least one form")
    out = forms[0]
    for f in forms[1:]:
        out = direct_sum(out, f)
    return out


def trivial_quadform() -> QuadForm:
    return QuadForm.from_numerators(FinAbGroup(), [], [])


def restrict(f, idx: Sequence[int]):
    """Restriction to the sub-sum spanned by the listed factor generators."""
    idx = list(idx)
    G = f.group.sub(idx)
    N = G.exponent
    s = f.N // N if N else 1
    B = [[int(f.B[i, j]) // s for j in idx] for i in idx]
    if isinstance(f, QuadForm):
        Q = [int(f.Q[i]) // s for i in idx]
        return QuadForm.from_numerators(G, Q, B)
    return DiscForm.from_numerators(G, B)


def canonicalize(f):
    """Reorder factors into canonical order."""
    _, perm = f.group.canonical()
    return restrict(f, perm)


def scale_form(q: QuadForm, s: int) -> QuadForm:
    """The quadratic form s*q."""
    return QuadForm.from_numerators(q.group, [int(v) * s for v in q.Q],
                                    [[int(v) * s for v in row] for row in q.B])


def tensor_matrix(M, f):
    """M (x) f on G^n, coordinates ordered copy by copy."""
    M = [[int(v) for v in row] for row in M]
    n = len(M)
    if any(len(row) != n for row in M) or any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
        raise ValueError("M must be a symmetric square integer matrix")
    G = f.group.power(n)
    Mo = np.array(M, dtype=object).reshape(n, n)
    B = np.kron(Mo, np.asarray(f.B, dtype=object)) if n else np.zeros((0, 0), dtype=object)
    if isinstance(f, QuadForm):
        Q = np.kron(np.diagonal(Mo), np.asarray(f.Q, dtype=object)) if n else np.zeros(0, dtype=object)
        return QuadForm.from_numerators(G, Q, B)
    return DiscForm.from_numerators(G, B)


def _quotient_reps(b: _FormBase):
    """Coset representatives of G/rad(b) with their orders (a basis of the quotient)."""
    G = b.group
    reps, factors = [], []
    for p in G.primes():
        idx, m, sub = _prime_block(b, p)
        U, ks = smith_rows(sub, p, m)
        for row, k in zip(U, ks):
            if k < m:
                g = [0] * G.rank
                for a, i in enumerate(idx):
                    g[i] = int(row[a])
                reps.append(G.elem(g))
                factors.append((p, m - k))
    return reps, FinAbGroup(factors)


def quotient_by_radical(q: QuadForm):
    """(induced form on G/rad, True) if q vanishes on rad(dq), else (None, False)."""
    rad = radical(q)
    if any(q.qnum(g) for g in rad.generators):
        return None, False
    if rad.order == 1:
        return q, True
    reps, H = _quotient_reps(q)
    if not reps:
        return trivial_quadform(), True
    X = np.array(reps, dtype=object)
    Bq = q.gram_nums(X)
    Qq = q.qnums(X)
    s = q.N // H.exponent
    return QuadForm.from_numerators(H, [int(v) // s for v in Qq],
                                    [[int(v) // s for v in row] for row in Bq]), True


def odd_lift(b: DiscForm) -> QuadForm:
    """The unique quadratic form with boundary b on a group of odd order."""
    if b.N % 2 == 0:
        raise ValueError("odd_lift needs a group of odd order")
    h = (b.N + 1) // 2
    Q = [(2 * h * int(b.B[i, i])) % (2 * b.N) for i in range(b.group.rank)]
    return QuadForm.from_numerators(b.group, Q, b.B)


def lift_quadratic(b: DiscForm) -> QuadForm:
    """A quadratic form q with boundary(q) == b, via a Wall decomposition of b."""
    from .decompose import lift_via_decomposition
    return lift_via_decomposition(b)


# standard irreducible blocks

_TWO_ADIC_DELTA = {"A": 1, "B": -1, "C": 5, "D": -5}


def block_quadratic(tag: str, p: int, r: int) -> QuadForm:
    n = p ** r
    if p != 2:
        if tag not in ("A", "B"):
            raise ValueError(f"tag {tag} is only defined for p = 2")
        alpha = 1 if tag == "A" else nonresidue(p)
        G = FinAbGroup([(p, r)])
        return QuadForm.from_numerators(G, [alpha * (n + 1)], [[alpha]])
    if tag in _TWO_ADIC_DELTA:
        d = _TWO_ADIC_DELTA[tag]
        return QuadForm.from_numerators(FinAbGroup([(2, r)]), [d], [[d]])
    G = FinAbGroup([(2, r), (2, r)])
    if tag == "E":
        return QuadForm.from_numerators(G, [0, 0], [[0, 1], [1, 0]])
    if tag == "F":
        return QuadForm.from_numerators(G, [2, 2], [[2, 1], [1, 2]])
    raise ValueError(f"unknown block tag {tag!r}")


def block_bilinear(tag: str, p: int, r: int) -> DiscForm:
    return boundary(block_quadratic(tag, p, r))


_BLOCK = re.compile(r"\s*([A-Fa-f])\s*(\d+)\s*")


def parse_block_list(spec: str) -> list[tuple[str, int, int]]:
    """`A8 + B9 + E4` -> [(tag, p, r), ...]."""
    out = []
    pos = 0
    if not spec.strip():
        raise SpecError("empty form spec", 0)
    while True:
        m = _BLOCK.match(spec, pos)
        if not m:
            raise SpecError("expected a block name such as A4 or E2", pos)
        tag = m.group(1).upper()
        n = int(m.group(2))
        pp = _prime_power(n) if n > 1 else None
        if pp is None:
            raise SpecError(f"block subscript {n} is not a prime power", m.start(2))
        p, r = pp
        if p != 2 and tag not in ("A", "B"):
            raise SpecError(f"block {tag}{n}: only A and B exist for odd p", m.start(1))
        out.append((tag, p, r))
        pos = m.end()
        if pos == len(spec):
            return out
        if spec[pos] != "+":
            raise SpecError(f"unexpected character {spec[pos]!r}", pos)
        pos += 1


def form_from_blocks(blocks) -> QuadForm:
    if not blocks:
        return trivial_quadform()
    return orthogonal_sum(block_quadratic(*b) for b in blocks)


def _parse_group_field(g) -> FinAbGroup:
    if isinstance(g, str):
        G = parse_group(g, allow_composite=False)
        return G
    factors = []
    for item in g:
        if isinstance(item, (list, tuple)):
            factors.append((int(item[0]), int(item[1])))
        else:
            pp = _prime_power(int(item)) if int(item) > 1 else None
            if pp is None:
                raise SpecError(f"group entry {item} is not a prime power", 0)
            factors.append(pp)
    return FinAbGroup(factors)


def parse_form(spec: str):
    """A named-block spec (QuadForm) or a JSON object with `group`, `gram` and optional `q`.

    JSON `group` may be a spec string (factors then follow the given order) or a
    list of prime powers / [p, r] pairs.
    """
    text = spec.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecError(f"invalid JSON: {e.msg}", e.pos) from None
        return form_from_json(obj)
    return form_from_blocks(parse_block_list(spec))


def form_from_json(obj):
    if "gram" not in obj or "group" not in obj:
        raise SpecError("JSON form needs 'group' and 'gram'", 0)
    g = obj["group"]
    if isinstance(g, str):
        # keep the written order so the gram rows line up with it
        terms = [t for t in g.split("+")]
        G = FinAbGroup([parse_group(t).factors[0] for t in terms])
    else:
        G = _parse_group_field(g)
    gram = [[str(v) for v in row] for row in obj["gram"]]
    try:
        if "q" in obj:
            return QuadForm(G, [str(v) for v in obj["q"]], gram)
        return DiscForm(G, gram)
    except (ValueError, ZeroDivisionError) as e:
        raise SpecError(str(e), 0) from None
