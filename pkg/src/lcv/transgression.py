"""Contracting homotopy, transgression, string-like extensions and Chern-Simons algebras."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dgca import DgcaPresentation, require_morphism
from .errors import AlgebraError, VerificationError
from .families import WeilPackage, shifted_u1, weil, weil_free_iso
from .gca import Element, GradedAlgebra, Morphism, augmentation, by_name, identity, transport
from .homology import CohomologyResult, Subcomplex, is_basic


class ContractingHomotopy:
    """tau = f . tau_F . f^-1 on W(g), with tau_F the homotopy from 0 to Id on F(g)."""

    def __init__(self, w: WeilPackage, max_len: Optional[int] = None):
        from .dgca import Homotopy

        self.w = w
        self.f, self.f_inv, self.F = weil_free_iso(w)
        F = self.F
        k = len(w.base_ids)
        images = {i: F.zero() for i in range(k)}
        images.update({k + i: F.var(i) for i in range(k)})
        self.free_homotopy = Homotopy(augmentation(F, F), identity(F), images,
                                      name="tau_F", max_len=max_len)

    def __call__(self, x: Element) -> Element:
        return self.f(self.free_homotopy(self.f_inv(x)))

    def bracket(self, x: Element) -> Element:
        d = self.w.W.d
        return d(self(x)) + self(d(x))


def contracting_homotopy(w: WeilPackage, max_len: Optional[int] = None) -> ContractingHomotopy:
    return ContractingHomotopy(w, max_len)


@dataclass
class TransgressionTriple:
    P: Element
    cs: Element
    mu: Element
    weil: WeilPackage

    def verify(self):
        W = self.weil.W
        if W.d(self.cs) != self.P:
            raise VerificationError("d cs != P")
        if self.weil.iota_star(self.cs) != self.mu:
            raise VerificationError("i* cs != mu")
        if not self.weil.ce.d(self.mu).is_zero():
            raise VerificationError("mu is not closed")
        return self


def transgress(w: WeilPackage, P: Element, tau: Optional[ContractingHomotopy] = None) -> TransgressionTriple:
    W = w.W
    if P.alg != W.algebra:
        P = transport(P, W)
    if not P.is_homogeneous() or P.is_zero():
        raise AlgebraError("P must be a nonzero homogeneous element")
    if not W.d(P).is_zero():
        raise AlgebraError(f"P is not closed: d P = {W.d(P)}")
    cert = is_basic(w, P)
    if not cert:
        raise AlgebraError(f"P is not an invariant polynomial: {cert.describe()}")
    tau = tau or contracting_homotopy(w)
    cs = tau(P)
    mu = w.iota_star(cs)
    return TransgressionTriple(P, cs, mu, w).verify()


def quadratic_polynomial(w: WeilPackage, matrix=None) -> Element:
    """P = P_ab sigma t^a sigma t^b over degree-1 base generators (identity matrix by default)."""
    W = w.W.algebra
    ones = [g for g in w.base_ids if W.degrees[g] == 1]
    k = len(w.base_ids)
    P = W.zero()
    for a, ga in enumerate(ones):
        for b, gb in enumerate(ones):
            v = (1 if a == b else 0) if matrix is None else matrix[a][b]
            if v:
                P = P + (W.var(k + ga) * W.var(k + gb)).scale(v)
    return P


def structure_constants(p: DgcaPresentation) -> dict:
    """C^a_bc over degree-1 generators, read back from d t^a = -sum_{b<c} C^a_bc t^b t^c + ...

    Keys are generator ids; both orders of (b, c) are filled in.
    """
    alg = p.algebra
    ones = [g.id for g in alg.generators if g.degree == 1]
    C = {}
    for a in ones:
        for m, v in p.d.image(a).terms.items():
            if len(m) == 2 and all(g in ones and e == 1 for g, e in m):
                (b, _), (c, _) = m
                C[(a, b, c)] = -v
                C[(a, c, b)] = v
    return C


def killing_form(p: DgcaPresentation) -> list:
    """tr(ad_a ad_b), scaled so that its first nonzero diagonal entry is 1."""
    ones = [g.id for g in p.generators if g.degree == 1]
    C = structure_constants(p)
    K = [[sum(C.get((c, a, d), 0) * C.get((d, b, c), 0) for c in ones for d in ones) for b in ones] for a in ones]
    pivot = next((K[i][i] for i in range(len(ones)) if K[i][i]), None)
    if pivot is None:
        raise AlgebraError("the Killing form vanishes on the diagonal; give the polynomial explicitly")
    return [[v / pivot for v in row] for row in K]


def quadratic_cs_formula(w: WeilPackage, matrix=None) -> Element:
    """P_ab (d_W t^a) t^b + 1/3 P_ad C^d_bc t^a t^b t^c for a quadratic P on a Lie algebra."""
    W = w.W
    alg = W.algebra
    ones = [g for g in w.base_ids if alg.degrees[g] == 1]
    P = lambda i, j: (1 if i == j else 0) if matrix is None else matrix[i][j]
    C = structure_constants(w.ce)
    out = alg.zero()
    for i, a in enumerate(ones):
        for j, b in enumerate(ones):
            if P(i, j):
                out = out + (W.d.image(a) * alg.var(b)).scale(P(i, j))
    for i, a in enumerate(ones):
        for j, dd in enumerate(ones):
            if not P(i, j):
                continue
            for b in ones:
                for c in ones:
                    v = C.get((dd, b, c), 0)
                    if v:
                        out = out + (alg.var(a) * alg.var(b) * alg.var(c)).scale(P(i, j) * v / 3)
    return out


@dataclass
class ExtensionPackage:
    """CE(g_mu) with its inclusion of CE(g) and projection onto CE(b^{n-1}u(1))."""

    base: DgcaPresentation
    mu: Element
    ce: DgcaPresentation
    inclusion: Morphism   # CE(g) -> CE(g_mu)
    projection: Morphism  # CE(g_mu) -> CE(b^{n-1}u(1))
    u1: DgcaPresentation
    b_name: str

    @property
    def b(self) -> Element:
        return self.ce.var(self.b_name)

    def pushed_mu(self) -> Element:
        return self.inclusion(self.mu)


def string_extension(g: DgcaPresentation, mu: Element, name: str = "b") -> ExtensionPackage:
    if mu.alg != g.algebra:
        mu = transport(mu, g)
    if mu.is_zero() or not mu.is_homogeneous():
        raise AlgebraError("mu must be a nonzero homogeneous cocycle")
    n = mu.degree() - 1
    if n < 1:
        raise AlgebraError("mu must have degree >= 2")
    dmu = g.d(mu)
    if not dmu.is_zero():
        raise AlgebraError(f"mu is not closed: d mu = {dmu}")
    gens = [(x.name, x.degree, x.shift_of) for x in g.generators] + [(name, n)]
    alg = GradedAlgebra(gens)
    d = {x.id: Element(alg, dict(g.d.image(x.id).terms)) for x in g.generators}
    d[len(g.generators)] = -Element(alg, dict(mu.terms))
    ce = DgcaPresentation(alg, d, kind="Extension",
                          name=f"{g.name}_mu" if g.name else "g_mu",
                          provenance={"base": g, "cocycle": mu, "generator": name})
    u1 = shifted_u1(n, name)
    inclusion = require_morphism(by_name(g, ce, name="u*"))
    projection = require_morphism(by_name(ce, u1, name="t*", missing_to_zero=True))
    return ExtensionPackage(g, mu, ce, inclusion, projection, u1, name)


def chern_algebra(w: WeilPackage, P: Element, name: str = "c") -> DgcaPresentation:
    W = w.W
    if P.alg != W.algebra:
        P = transport(P, W)
    if P.is_zero() or not P.is_homogeneous():
        raise AlgebraError("P must be a nonzero homogeneous element")
    if not W.d(P).is_zero():
        raise AlgebraError("P is not closed")
    deg = P.degree()
    gens = [(x.name, x.degree, x.shift_of) for x in W.generators] + [(name, deg - 1)]
    alg = GradedAlgebra(gens)
    d = {x.id: Element(alg, dict(W.d.image(x.id).terms)) for x in W.generators}
    d[len(W.generators)] = Element(alg, dict(P.terms))
    return DgcaPresentation(alg, d, kind="Other", name="ch_P",
                            provenance={"weil": w, "P": P, "generator": name})


def chern_simons_algebra(w: WeilPackage, triple: TransgressionTriple,
                         names=("b", "c")) -> DgcaPresentation:
    triple.verify()
    W = w.W
    if triple.weil.W.algebra != W.algebra:
        raise AlgebraError("transgression data lives over a different Weil algebra")
    deg = triple.P.degree()
    if deg < 3:
        raise AlgebraError("the Chern-Simons algebra needs |P| >= 3")
    bname, cname = names
    gens = [(x.name, x.degree, x.shift_of) for x in W.generators] + [(bname, deg - 2), (cname, deg - 1)]
    alg = GradedAlgebra(gens)
    k = len(W.generators)
    d = {x.id: Element(alg, dict(W.d.image(x.id).terms)) for x in W.generators}
    d[k] = alg.var(k + 1) - Element(alg, dict(triple.cs.terms))
    d[k + 1] = Element(alg, dict(triple.P.terms))
    return DgcaPresentation(alg, d, kind="Other", name="cs_P",
                            provenance={"weil": w, "triple": triple, "generators": list(names)})


@dataclass
class WeilExtensionIso:
    f: Morphism       # W(g_mu) -> CE(cs_P)
    f_inv: Morphism   # CE(cs_P) -> W(g_mu)
    weil_ext: WeilPackage
    cs_algebra: DgcaPresentation


def weil_gmu_iso(ext: ExtensionPackage, triple: TransgressionTriple,
                 cs_algebra: Optional[DgcaPresentation] = None) -> WeilExtensionIso:
    P, cs, mu = triple.P, triple.cs, triple.mu
    if P.degree() != mu.degree() + 1:
        raise AlgebraError("degrees do not match: need |P| = |mu| + 1")
    if transport(mu, ext.base) != transport(ext.mu, ext.base):
        raise AlgebraError("the extension was built from a different cocycle")
    wg = weil(ext.ce)
    csa = cs_algebra or chern_simons_algebra(triple.weil, triple, names=(ext.b_name, "c"))
    if not csa.algebra.has("c"):
        raise AlgebraError("Chern-Simons algebra must have a generator named 'c'")
    src = wg.W.algebra
    sb = src.generators[wg.shifted_ids[wg.base_ids.index(src.index(ext.b_name))]].name
    images = {}
    for x in src.generators:
        if x.name == sb:
            images[x.id] = csa.var("c") + transport(mu, csa) - transport(cs, csa)
        else:
            images[x.id] = csa.var(x.name)
    f = require_morphism(Morphism(wg.W, csa, images, name="f"))
    inv = {}
    for x in csa.generators:
        if x.name == "c":
            inv[x.id] = src.var(sb) - transport(mu, wg.W) + transport(cs, wg.W)
        else:
            inv[x.id] = src.var(x.name)
    f_inv = require_morphism(Morphism(csa, wg.W, inv, name="f^-1"))
    for x in src.generators:
        if f_inv(f(src.var(x.id))) != src.var(x.id):
            raise VerificationError(f"f^-1 f differs from the identity on {x.name}")
    for x in csa.generators:
        if f(f_inv(csa.var(x.id))) != csa.var(x.id):
            raise VerificationError(f"f f^-1 differs from the identity on {x.name}")
    return WeilExtensionIso(f, f_inv, wg, csa)


def vertical_generators(p: DgcaPresentation) -> set:
    """Generators that have a shifted partner: the directions contracted by vertical derivations."""
    return {g.shift_of for g in p.generators if g.shift_of is not None}


def basic_subcomplex(cs_alg: DgcaPresentation, max_degree: Optional[int] = None) -> Subcomplex:
    vert = vertical_generators(cs_alg)
    return Subcomplex(cs_alg, lambda m: all(g not in vert for g, _ in m), max_degree)


def cs_basic_cohomology(cs_alg: DgcaPresentation, degree: int,
                        max_degree: Optional[int] = None) -> CohomologyResult:
    return basic_subcomplex(cs_alg, max_degree).cohomology(degree)
