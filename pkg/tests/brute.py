"""Independent slow implementations used to derive the frozen oracle values.

Nothing here reuses the package's normalization, sign or rank code.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

import sympy


def bubble_sign(degrees, word):
    """Sort a word by adjacent swaps, flipping the sign for each odd-odd swap.

    Returns ``(sign, sorted word)``; sign 0 when an odd letter repeats.
    """
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                if degrees[w[j]] % 2 and degrees[w[j + 1]] % 2:
                    sign = -sign
                w[j], w[j + 1] = w[j + 1], w[j]
    for a, b in zip(w, w[1:]):
        if a == b and degrees[a] % 2:
            return 0, tuple(w)
    return sign, tuple(w)


def _wedge(I, J):
    """e^I ^ e^J for sorted index tuples; returns (sign, sorted tuple) or (0, None)."""
    if set(I) & set(J):
        return 0, None
    inversions = sum(1 for a in I for b in J if a > b)
    return (-1) ** inversions, tuple(sorted(I + J))


def ce_differential_on_basis(C, n, I):
    """d e^I in CE(g) with d e^a = -1/2 sum_{b,c} C[a][b][c] e^b e^c, as {J: coeff}."""
    out = {}
    for pos, a in enumerate(I):
        before, after = I[:pos], I[pos + 1:]
        sign_before = (-1) ** len(before)
        for b in range(n):
            for c in range(n):
                v = C.get((a, b, c), 0)
                if not v or b == c:
                    continue
                s1, K = _wedge(before, (b,))
                if not s1:
                    continue
                s2, K = _wedge(K, (c,))
                if not s2:
                    continue
                s3, K = _wedge(K, after)
                if not s3:
                    continue
                out[K] = out.get(K, 0) + Fraction(-1, 2) * v * sign_before * s1 * s2 * s3
    return {k: v for k, v in out.items() if v}


def lie_betti(C, n, top=None):
    """Betti numbers of CE(g) for structure constants C[(a, b, c)] (0-based, all orders)."""
    top = n if top is None else top
    ranks = {}
    for k in range(top + 1):
        src = list(combinations(range(n), k))
        tgt = list(combinations(range(n), k + 1))
        if not src or not tgt:
            ranks[k] = 0
            continue
        index = {J: i for i, J in enumerate(tgt)}
        M = sympy.zeros(len(tgt), len(src))
        for j, I in enumerate(src):
            for J, v in ce_differential_on_basis(C, n, I).items():
                M[index[J], j] = sympy.Rational(v.numerator, v.denominator)
        ranks[k] = M.rank()
    betti = []
    for k in range(top + 1):
        dim = len(list(combinations(range(n), k)))
        betti.append(dim - ranks[k] - (ranks[k - 1] if k > 0 else 0))
    return betti


def constants_zero_based(lie):
    return {(a - 1, b - 1, c - 1): v for (a, b, c), v in lie.constants.items()}


def literal_homotopy(f, g, images, word):
    """Average over all n! orderings of the prefix/eta/suffix sum, straight from the definition.

    ``images`` maps generator ids to eta images.
    """
    n = len(word)
    total = f.target.algebra.zero()
    degs = f.source.algebra.degrees
    for perm in permutations(range(n)):
        w = [word[i] for i in perm]
        # Koszul sign of the reordering, by bubble sort back to the original word
        sign, _ = bubble_sign({i: degs[word[i]] for i in range(n)}, list(perm))
        for k in range(n):
            eta = images.get(w[k])
            if eta is None:
                continue
            prefix_deg = sum(degs[x] for x in w[:k])
            term = g.on_word(tuple(w[:k])) * eta * f.on_word(tuple(w[k + 1:]))
            total = total + term.scale(Fraction(sign * (-1) ** prefix_deg, factorial(n)))
    return total
