"""Integer matrix elimination modulo prime powers."""
from __future__ import annotations

import numpy as np


def int_dtype(modulus: int):
    # products of two residues must fit in int64
    return np.int64 if modulus < 2 ** 31 else object


def as_mod_array(M, modulus: int) -> np.ndarray:
    a = np.array(M, dtype=object) if len(M) else np.zeros((0, 0), dtype=object)
    a = a % modulus
    return a.astype(int_dtype(modulus))


def smith_rows(M, p: int, m: int):
    """Row transform U (invertible mod p) and exponents k with U·M·V = diag(p^k_i) mod p^m.

    Rows of U·M beyond the rank are zero (k_i = m). Column operations are not returned.
    """
    P = p ** m
    A = as_mod_array(M, P)
    rows = A.shape[0]
    cols = A.shape[1] if A.ndim == 2 else 0
    U = np.eye(rows, dtype=A.dtype) if rows else np.zeros((0, 0), dtype=A.dtype)
    ks = [m] * rows
    for t in range(min(rows, cols)):
        sub = A[t:, t:]
        if not sub.any():
            break
        e = 0
        pe1 = p
        while not (sub % pe1).any():
            e += 1
            pe1 *= p
        i, j = np.argwhere(sub % pe1 != 0)[0]
        i += t
        j += t
        if i != t:
            A[[t, i]] = A[[i, t]]
            U[[t, i]] = U[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
        pe = pe1 // p
        unit = int(A[t, t]) // pe
        uinv = pow(unit, -1, P)
        A[t] = (A[t] * uinv) % P
        U[t] = (U[t] * uinv) % P
        below = A[t + 1:, t] // pe
        if below.any():
            A[t + 1:] = (A[t + 1:] - np.outer(below, A[t])) % P
            U[t + 1:] = (U[t + 1:] - np.outer(below, U[t])) % P
        A[t, t + 1:] = 0
        ks[t] = e
    return U, ks


def span_order(rows, p: int, m: int) -> int:
    """Order of the subgroup of (Z/p^m)^n spanned by the given row vectors."""
    if len(rows) == 0:
        return 1
    _, ks = smith_rows(rows, p, m)
    return p ** sum(m - k for k in ks)


def inverse_mod(M, modulus: int, p: int) -> list[list[int]]:
    """Inverse of a square integer matrix modulo p^m, given that it is invertible mod p."""
    n = len(M)
    A = [[int(x) % modulus for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] % p), None)
        if piv is None:
            raise ValueError("matrix is singular modulo p")
        A[c], A[piv] = A[piv], A[c]
        inv = pow(A[c][c], -1, modulus)
        A[c] = [(x * inv) % modulus for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % modulus for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def det_int(M) -> int:
    """Exact determinant of an integer matrix (fraction-free Bareiss)."""
    n = len(M)
    if n == 0:
        return 1
    A = [[int(x) for x in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((r for r in range(k + 1, n) if A[r][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def solve_mod2(M, rhs) -> list[int] | None:
    """Solve M x = rhs over F_2 for square non-singular M; None if singular."""
    n = len(M)
    A = [[int(x) & 1 for x in row] + [int(rhs[i]) & 1] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        for r in range(n):
            if r != c and A[r][c]:
                A[r] = [x ^ y for x, y in zip(A[r], A[c])]
    return [A[i][n] for i in range(n)]


def matmul(A, B, modulus: int | None = None) -> list[list[int]]:
    out = [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]
    if modulus is not None:
        out = [[x % modulus for x in row] for row in out]
    return out


def transpose(A) -> list[list[int]]:
    return [list(r) for r in zip(*A)]
