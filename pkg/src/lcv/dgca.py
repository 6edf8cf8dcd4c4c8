"""Quasi-free differential graded-commutative algebras and their homotopies."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Optional

from . import config
from .errors import AlgebraError, HomotopyError, LimitError, MorphismError, NilpotencyError
from .gca import (
    Derivation,
    Element,
    GradedAlgebra,
    Morphism,
    _accumulate,
    compose,
)

KINDS = ("CE", "Weil", "Free", "Cone", "Extension", "Other")


@dataclass
class Report:
    """Outcome of a verification.  ``failures`` pairs a label with the offending element."""

    ok: bool
    failures: list = field(default_factory=list)
    note: str = ""

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "pass" + (f" ({self.note})" if self.note else "")
        lines = ["fail" + (f" ({self.note})" if self.note else "")]
        for label, value in self.failures:
            lines.append(f"  {label}: {value}")
        return "\n".join(lines)


class DgcaPresentation:
    """Generators plus a degree +1 differential given on generators.

    Nilpotency is checked on construction unless ``check=False``; the
    ``checked`` attribute records which happened.
    """

    def __init__(self, algebra, differential: Mapping, kind: str = "Other",
                 name: str = "", provenance: Optional[dict] = None, check: bool = True):
        if not isinstance(algebra, GradedAlgebra):
            algebra = GradedAlgebra(algebra)
        if kind not in KINDS:
            raise AlgebraError(f"unknown presentation kind {kind!r}")
        self.algebra = algebra
        self.kind = kind
        self.name = name
        self.provenance = dict(provenance or {})
        self.d = Derivation(algebra, 1, differential)
        self.checked = False
        if check:
            report = check_differential(self)
            if not report:
                raise NilpotencyError(f"d^2 != 0 in {name or 'presentation'}:\n{report.describe()}", report)
            self.checked = True

    @property
    def generators(self):
        return self.algebra.generators

    def var(self, key) -> Element:
        return self.algebra.var(key)

    def element(self, text: str) -> Element:
        return self.algebra.element(text)

    def zero(self) -> Element:
        return self.algebra.zero()

    def one(self) -> Element:
        return self.algebra.one()

    def differential_of(self, key) -> Element:
        return self.d.image(key)

    def same_as(self, other: "DgcaPresentation") -> bool:
        """Equal generators (names, degrees, shift links) and equal differentials."""
        if self.algebra != other.algebra:
            return False
        return all(self.d.image(g.id) == other.d.image(g.id) for g in self.generators)

    def __repr__(self):
        return f"DgcaPresentation({self.name or self.kind}, {len(self.generators)} generators)"


def check_differential(p: DgcaPresentation) -> Report:
    failures = []
    for g in p.generators:
        dd = p.d(p.d.image(g.id))
        if not dd.is_zero():
            failures.append((g.name, dd))
    return Report(not failures, failures, "d^2 = 0 on all generators" if not failures else "d^2 != 0")


def check_morphism(f: Morphism) -> Report:
    src, tgt = f.source, f.target
    if not isinstance(src, DgcaPresentation) or not isinstance(tgt, DgcaPresentation):
        raise AlgebraError("check_morphism needs presentations at both ends")
    failures = []
    for g in src.generators:
        try:
            residual = f(src.d.image(g.id)) - tgt.d(f.image(g.id))
        except AlgebraError as exc:
            failures.append((g.name, str(exc)))
            continue
        if not residual.is_zero():
            failures.append((g.name, residual))
    return Report(not failures, failures, f"f(d g) - d f(g) for {f.name or 'morphism'}")


def require_morphism(f: Morphism) -> Morphism:
    report = check_morphism(f)
    if not report:
        raise MorphismError(f"{f.name or 'map'} is not a dg-morphism:\n{report.describe()}", report)
    return f


def _koszul_parity(alg: GradedAlgebra, word, perm) -> int:
    odd = alg.odd
    parity = 0
    for a in range(len(perm)):
        if not odd[word[perm[a]]]:
            continue
        pa = perm[a]
        for b in range(a + 1, len(perm)):
            if odd[word[perm[b]]] and perm[b] < pa:
                parity += 1
    return parity & 1


class HomotopyOperator:
    """Degree -1 operator extending generator images by the symmetrized formula.

    On a monomial x_1...x_n it averages, over all n! orderings with their
    Koszul signs, the sum over k of
    ``(-1)^{|x_1|+...+|x_{k-1}|} g*(x_1...x_{k-1}) eta(x_k) f*(x_{k+1}...x_n)``.
    The average is evaluated as a sum over prefix sets, n 2^(n-1) terms.
    """

    def __init__(self, f: Morphism, g: Morphism, images: Mapping, max_len: Optional[int] = None):
        if f.source.algebra != g.source.algebra or f.target.algebra != g.target.algebra:
            raise AlgebraError("homotopy endpoints must share source and target")
        self.f = f
        self.g = g
        self.source = f.source
        self.target = f.target
        src, tgt = f.source.algebra, f.target.algebra
        self.max_len = max_len if max_len is not None else config.limits().max_monomial_len
        self.images = {}
        for key, img in images.items():
            gid = src.index(key)
            if not isinstance(img, Element):
                img = tgt.scalar(img)
            elif img.alg != tgt:
                raise AlgebraError(f"homotopy image of {src.generators[gid].name!r} is not in the target")
            if img.terms and img.degree() != src.degrees[gid] - 1:
                raise AlgebraError(
                    f"homotopy image of {src.generators[gid].name!r} has degree {img.degree()}, "
                    f"expected {src.degrees[gid] - 1}"
                )
            if img.terms:
                self.images[gid] = img
        self._cache = {}
        self._f_words = {}
        self._g_words = {}

    def _fw(self, word):
        hit = self._f_words.get(word)
        if hit is None:
            hit = self.f.on_word(word)
            self._f_words[word] = hit
        return hit

    def _gw(self, word):
        hit = self._g_words.get(word)
        if hit is None:
            hit = self.g.on_word(word)
            self._g_words[word] = hit
        return hit

    def on_monomial(self, m) -> dict:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        src = self.source.algebra
        word = tuple(g for g, e in m for _ in range(e))
        n = len(word)
        if n > self.max_len:
            raise LimitError(
                f"monomial of length {n} exceeds the homotopy length cap {self.max_len} "
                f"(raise --max-monomial-len)"
            )
        out = {}
        degs = src.degrees
        # The orderings that put the same set A before position j all give the
        # same term, so the average over n! orderings is a weighted sum over subsets.
        weight = [Fraction(factorial(a) * factorial(n - 1 - a), factorial(n)) for a in range(n)]
        for j in range(n):
            eta = self.images.get(word[j])
            if eta is None:
                continue
            rest = [i for i in range(n) if i != j]
            for mask in range(1 << (n - 1)):
                A = [rest[i] for i in range(n - 1) if mask >> i & 1]
                B = [rest[i] for i in range(n - 1) if not mask >> i & 1]
                tail = self._fw(tuple(word[i] for i in B))
                if not tail.terms:
                    continue
                head = self._gw(tuple(word[i] for i in A))
                if not head.terms:
                    continue
                parity = _koszul_parity(src, word, A + [j] + B) + sum(degs[word[i]] for i in A)
                c = weight[len(A)] * (-1 if parity % 2 else 1)
                for mm, v in (head * eta * tail).terms.items():
                    _accumulate(out, mm, c * v)
        self._cache[m] = out
        return out

    def __call__(self, x: Element) -> Element:
        if x.alg != self.source.algebra:
            raise AlgebraError("homotopy applied outside its source")
        out = {}
        for m, c in x.terms.items():
            for mm, v in self.on_monomial(m).items():
                _accumulate(out, mm, c * v)
        return Element(self.target.algebra, out)


def extend_homotopy(f: Morphism, g: Morphism, images: Mapping, max_len: Optional[int] = None) -> HomotopyOperator:
    return HomotopyOperator(f, g, images, max_len)


@dataclass
class Homotopy:
    """A degree -1 homotopy from ``f`` to ``g`` (so that ``g = f + [d, eta]``)."""

    f: Morphism
    g: Morphism
    images: dict
    vertical: bool = False
    name: str = ""
    max_len: Optional[int] = None

    def __post_init__(self):
        if self.f.source.algebra != self.g.source.algebra or self.f.target.algebra != self.g.target.algebra:
            raise AlgebraError("homotopy endpoints must share source and target")
        self.operator = extend_homotopy(self.f, self.g, self.images, self.max_len)
        if self.vertical:
            bad = [g.name for g in self.f.source.algebra.generators
                   if g.shift_of is not None and g.id in self.operator.images]
            if bad:
                raise AlgebraError(f"homotopy declared vertical but nonzero on shifted generators {bad}")

    def __call__(self, x: Element) -> Element:
        return self.operator(x)

    def bracket(self, x: Element) -> Element:
        """``[d, eta](x) = d(eta x) + eta(d x)``."""
        src, tgt = self.f.source, self.f.target
        return tgt.d(self.operator(x)) + self.operator(src.d(x))


def verify_homotopy(h: Homotopy) -> Report:
    src = h.f.source
    if not isinstance(src, DgcaPresentation) or not isinstance(h.f.target, DgcaPresentation):
        raise AlgebraError("verify_homotopy needs presentations at both ends")
    failures = []
    for gen in src.generators:
        x = src.var(gen.id)
        residual = h.g(x) - h.f(x) - h.bracket(x)
        if not residual.is_zero():
            failures.append((gen.name, residual))
    return Report(not failures, failures, f"g - f - [d, eta] on generators for {h.name or 'homotopy'}")


def require_homotopy(h: Homotopy) -> Homotopy:
    report = verify_homotopy(h)
    if not report:
        raise HomotopyError(f"{h.name or 'homotopy'} fails g = f + [d, eta]:\n{report.describe()}", report)
    return h


def verify_homotopy_on(h: Homotopy, monomials) -> Report:
    """Check ``g = f + [d, eta]`` on arbitrary monomials, not only generators."""
    src = h.f.source.algebra
    failures = []
    for m in monomials:
        x = src.monomial(m)
        residual = h.g(x) - h.f(x) - h.bracket(x)
        if not residual.is_zero():
            failures.append((src.format_monomial(m), residual))
    return Report(not failures, failures, "g - f - [d, eta] on monomials")


def composite(f: Morphism, g: Morphism, name: str = "") -> Morphism:
    return compose(f, g, name)


# Two-term data and the Baez-Crans equations


@dataclass
class TwoTermTensors:
    """Structure tensors read off a CE algebra with generators in degrees 1 and 2.

    Conventions (all indices are positions within the degree-1 or degree-2
    generator lists):
      d t^a = -1/2 C[a][b][c] t^b t^c + T[a][i] b^i
      d b^i = -A[i][a][j] t^a b^j + (cubic in t)
    """

    ts: list
    bs: list
    C: dict
    T: dict
    A: dict


def two_term_tensors(p: DgcaPresentation) -> TwoTermTensors:
    alg = p.algebra
    degs = {g.degree for g in alg.generators}
    if not degs <= {1, 2}:
        raise AlgebraError("not a 2-term presentation: generators must have degree 1 or 2")
    ts = [g.id for g in alg.generators if g.degree == 1]
    bs = [g.id for g in alg.generators if g.degree == 2]
    tpos = {g: k for k, g in enumerate(ts)}
    bpos = {g: k for k, g in enumerate(bs)}
    C, T, A = {}, {}, {}
    for a, ga in enumerate(ts):
        for m, c in p.d.image(ga).terms.items():
            if len(m) == 2:
                (x, _), (y, _) = m
                C[(a, tpos[x], tpos[y])] = -c
                C[(a, tpos[y], tpos[x])] = c
            elif len(m) == 1 and m[0][0] in bpos:
                T[(a, bpos[m[0][0]])] = c
            else:
                raise AlgebraError(f"unexpected term in d of {alg.generators[ga].name!r}")
    for i, gi in enumerate(bs):
        for m, c in p.d.image(gi).terms.items():
            if len(m) == 2 and m[0][0] in tpos and m[1][0] in bpos:
                A[(i, tpos[m[0][0]], bpos[m[1][0]])] = -c
            elif len(m) == 3 and all(g in tpos for g, _ in m):
                continue
            else:
                raise AlgebraError(f"unexpected term in d of {alg.generators[gi].name!r}")
    return TwoTermTensors(ts, bs, C, T, A)


def _linear_coeffs(x: Element, ids) -> list:
    pos = {g: k for k, g in enumerate(ids)}
    out = [Fraction(0)] * len(ids)
    for m, c in x.terms.items():
        if len(m) != 1 or m[0][1] != 1 or m[0][0] not in pos:
            raise AlgebraError(f"expected a linear combination of generators, got {x}")
        out[pos[m[0][0]]] = c
    return out


def _morphism_tensors(phi: Morphism, src: TwoTermTensors, tgt: TwoTermTensors):
    """Components of a 2-term morphism: t^a -> P1[a][b] t'^b,  b^i -> P0[i][j] b'^j + 1/2 P2[i][b][c] t'^b t'^c."""
    P1 = [_linear_coeffs(phi.image(ga), tgt.ts) for ga in src.ts]
    P0, P2 = [], []
    tpos = {g: k for k, g in enumerate(tgt.ts)}
    bpos = {g: k for k, g in enumerate(tgt.bs)}
    n = len(tgt.ts)
    for gi in src.bs:
        row0 = [Fraction(0)] * len(tgt.bs)
        row2 = [[Fraction(0)] * n for _ in range(n)]
        for m, c in phi.image(gi).terms.items():
            if len(m) == 1 and m[0][0] in bpos and m[0][1] == 1:
                row0[bpos[m[0][0]]] = c
            elif len(m) == 2 and m[0][0] in tpos and m[1][0] in tpos:
                b, cc = tpos[m[0][0]], tpos[m[1][0]]
                row2[b][cc] = c
                row2[cc][b] = -c
            else:
                raise AlgebraError("morphism image is not of 2-term shape")
        P0.append(row0)
        P2.append(row2)
    return P1, P0, P2


@dataclass
class BaezCransResiduals:
    """Residual tensors of the three 2-morphism equations; all zero iff the data is a 2-morphism."""

    r0: list  # (psi - phi) on degree-1 generators minus T tau
    r1: list  # (psi - phi) on degree-2 linear part minus tau T'
    r2: list  # quadratic part against the bracket expression

    def vanish(self) -> bool:
        flat = [v for row in self.r0 for v in row] + [v for row in self.r1 for v in row]
        flat += [v for mat in self.r2 for row in mat for v in row]
        return not any(flat)

    def nonzero(self) -> list:
        out = []
        for name, block in (("r0", self.r0), ("r1", self.r1)):
            if any(v for row in block for v in row):
                out.append(name)
        if any(v for mat in self.r2 for row in mat for v in row):
            out.append("r2")
        return out


def baez_crans_residuals(phi: Morphism, psi: Morphism, tau: Mapping) -> BaezCransResiduals:
    """Residuals of the 2-morphism equations for ``tau: phi => psi``.

    ``phi`` and ``psi`` map the CE algebra of a 2-term L-infinity algebra to
    another one; ``tau`` sends each degree-2 source generator to a linear
    combination of degree-1 target generators (degree-1 generators are sent
    to zero).  With the tensor conventions of :class:`TwoTermTensors` the
    equations read
      (Psi - Phi)^a_c = T^a_i tau^i_c
      (Psi - Phi)^i_j = tau^i_a T'^a_j
      (Psi - Phi)^i_bc = -tau^i_a C'^a_bc
                         + 1/2 [A^i_aj (Psi+Phi)^a_b tau^j_c - (b <-> c)]
    """
    S, Tg = phi.source, phi.target
    if psi.source.algebra != S.algebra or psi.target.algebra != Tg.algebra:
        raise AlgebraError("phi and psi must share source and target")
    src = two_term_tensors(S)
    tgt = two_term_tensors(Tg)
    salg = S.algebra
    tau_m = []
    for gi in src.bs:
        name = salg.generators[gi].name
        img = tau.get(name, tau.get(gi))
        if img is None:
            tau_m.append([Fraction(0)] * len(tgt.ts))
        else:
            tau_m.append(_linear_coeffs(img, tgt.ts))
    for ga in src.ts:
        img = tau.get(salg.generators[ga].name, tau.get(ga))
        if img is not None and not img.is_zero():
            raise AlgebraError("2-morphism data must vanish on degree-1 generators")
    F1, F0, F2 = _morphism_tensors(phi, src, tgt)
    G1, G0, G2 = _morphism_tensors(psi, src, tgt)
    n, m = len(src.ts), len(src.bs)
    n2, m2 = len(tgt.ts), len(tgt.bs)
    r0 = [[G1[a][c] - F1[a][c] - sum(src.T.get((a, i), 0) * tau_m[i][c] for i in range(m))
           for c in range(n2)] for a in range(n)]
    r1 = [[G0[i][j] - F0[i][j] - sum(tau_m[i][a] * tgt.T.get((a, j), 0) for a in range(n2))
           for j in range(m2)] for i in range(m)]
    S1 = [[G1[a][b] + F1[a][b] for b in range(n2)] for a in range(n)]
    r2 = []
    for i in range(m):
        mat = [[Fraction(0)] * n2 for _ in range(n2)]
        for b in range(n2):
            for c in range(n2):
                if b == c:
                    continue
                bracket = Fraction(0)
                for a in range(n):
                    for j in range(m):
                        coef = src.A.get((i, a, j), 0)
                        if coef:
                            bracket += coef * (S1[a][b] * tau_m[j][c] - S1[a][c] * tau_m[j][b])
                val = G2[i][b][c] - F2[i][b][c]
                val += sum(tau_m[i][a] * tgt.C.get((a, b, c), 0) for a in range(n2))
                val -= bracket / 2
                mat[b][c] = val
        r2.append(mat)
    return BaezCransResiduals(r0, r1, r2)
