"""Exact linear algebra over the rationals, plus a modular rank check.

Matrices are lists of rows of Fractions.  Ranks use fraction-free
(Bareiss) elimination on integer-scaled rows; kernels and solutions use
reduced row echelon form.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm


def _integer_rows(rows):
    out = []
    for row in rows:
        den = 1
        for v in row:
            if v:
                den = lcm(den, Fraction(v).denominator)
        out.append([int(Fraction(v) * den) for v in row])
    return out


def rank(rows, ncols: int = None) -> int:
    """Rank by fraction-free elimination."""
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    M = _integer_rows(rows)
    nrows = len(M)
    r = 0
    prev = 1
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        pr = M[r]
        for i in range(r + 1, nrows):
            row = M[i]
            a = row[c]
            for j in range(c + 1, ncols):
                q, rem = divmod(p * row[j] - a * pr[j], prev)
                assert rem == 0
                row[j] = q
            row[c] = 0
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def rref(rows, ncols: int = None):
    """Reduced row echelon form; returns ``(nonzero rows, pivot columns)``."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    M = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        pr = M[r]
        for i in range(len(M)):
            if i != r and M[i][c]:
                a = M[i][c]
                M[i] = [x - a * y for x, y in zip(M[i], pr)]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace(rows, ncols: int) -> list:
    """Basis of ``{v : M v = 0}``, one vector per free column, in column order."""
    R, pivots = rref(rows, ncols) if rows else ([], [])
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def solve(rows, rhs, ncols: int):
    """One solution of ``M x = rhs`` or ``None``."""
    aug = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    R, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return x


def transpose(rows, nrows: int, ncols: int):
    """Transpose a matrix with known shape (works for empty matrices)."""
    return [[rows[i][j] for i in range(nrows)] for j in range(ncols)]


def mat_mul(A, B, inner: int, ncols: int):
    return [[sum((row[k] * B[k][j] for k in range(inner)), Fraction(0)) for j in range(ncols)] for row in A]


def rank_mod_p(rows, p: int, ncols: int = None) -> int:
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    M = []
    for row in rows:
        out = []
        for v in row:
            v = Fraction(v)
            if v.denominator % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            out.append(v.numerator * pow(v.denominator, -1, p) % p)
        M.append(out)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        pr = [v * inv % p for v in M[r]]
        M[r] = pr
        for i in range(r + 1, len(M)):
            a = M[i][c]
            if a:
                M[i] = [(x - a * y) % p for x, y in zip(M[i], pr)]
        r += 1
        if r == len(M):
            break
    return r


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int = 30, rng: random.Random = None) -> int:
    rng = rng or random.Random()
    while True:
        n = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_probable_prime(n):
            return n
