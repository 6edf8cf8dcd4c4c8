"""Constructors for CE algebras, free DGCAs and the Weil functor."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .dgca import DgcaPresentation, Report, require_morphism
from .errors import AlgebraError, NilpotencyError, VerificationError
from .gca import Derivation, Element, GradedAlgebra, Morphism, as_fraction


class JacobiError(NilpotencyError):
    pass


class CrossedModuleError(NilpotencyError):
    pass


@dataclass
class LieStructureConstants:
    """Structure constants ``C[(a, b, c)] = C^a_{bc}`` with 1-based indices."""

    dimension: int
    constants: dict = field(default_factory=dict)
    names: Optional[list] = None

    def __post_init__(self):
        if self.dimension < 1:
            raise AlgebraError("dimension must be >= 1")
        clean = {}
        for key, v in self.constants.items():
            a, b, c = key
            for idx in key:
                if not 1 <= idx <= self.dimension:
                    raise AlgebraError(f"index {idx} out of range 1..{self.dimension}")
            v = as_fraction(v)
            if v:
                clean[(a, b, c)] = v
        for (a, b, c), v in clean.items():
            if clean.get((a, c, b), 0) != -v:
                raise AlgebraError(f"constants not antisymmetric at C^{a}_{b}{c}")
        self.constants = clean
        if self.names is None:
            self.names = [f"t{a}" for a in range(1, self.dimension + 1)]
        if len(self.names) != self.dimension:
            raise AlgebraError("one name per basis element is required")

    def C(self, a, b, c) -> Fraction:
        return self.constants.get((a, b, c), Fraction(0))

    @classmethod
    def from_brackets(cls, dimension, brackets: Mapping, names=None):
        """From ``{(b, c): {a: C^a_bc}}`` listing each bracket [e_b, e_c] once."""
        consts = {}
        for (b, c), out in brackets.items():
            for a, v in out.items():
                v = as_fraction(v)
                consts[(a, b, c)] = consts.get((a, b, c), 0) + v
                consts[(a, c, b)] = consts.get((a, c, b), 0) - v
        return cls(dimension, consts, names)


def so3_constants() -> LieStructureConstants:
    eps = {}
    for a, b, c in ((1, 2, 3), (2, 3, 1), (3, 1, 2)):
        eps[(a, b, c)] = 1
        eps[(a, c, b)] = -1
    return LieStructureConstants(3, eps)


def lie_to_ce(c: LieStructureConstants, name: str = "", check: bool = True) -> DgcaPresentation:
    alg = GradedAlgebra([(n, 1) for n in c.names])
    d = {}
    for a in range(1, c.dimension + 1):
        img = alg.zero()
        for b in range(1, c.dimension + 1):
            for cc in range(b + 1, c.dimension + 1):
                v = c.C(a, b, cc)
                if v:
                    # -1/2 C^a_bc t^b t^c summed over all b, c equals -C^a_bc t^b t^c over b < c
                    img = img + (alg.var(b - 1) * alg.var(cc - 1)).scale(-v)
        d[a - 1] = img
    try:
        return DgcaPresentation(alg, d, kind="CE", name=name,
                                provenance={"constants": c}, check=check)
    except NilpotencyError as exc:
        raise JacobiError(f"Jacobi identity fails:\n{exc.report.describe()}", exc.report)


@dataclass
class CrossedModuleData:
    """A differential crossed module ``t: h -> g``.

    ``t[(a, i)]`` is the component t^a_i of the map h -> g, and
    ``alpha[(i, a, j)]`` the action of e_a on f_j along f_i (1-based).
    ``h_bracket[(i, j, k)]`` optionally gives [f_j, f_k] = sum_i h^i_jk f_i;
    it is used only to check the Peiffer identity.
    """

    g: LieStructureConstants
    h_dimension: int
    t: dict = field(default_factory=dict)
    alpha: dict = field(default_factory=dict)
    h_bracket: Optional[dict] = None
    h_names: Optional[list] = None

    def __post_init__(self):
        self.t = {k: as_fraction(v) for k, v in self.t.items() if as_fraction(v)}
        self.alpha = {k: as_fraction(v) for k, v in self.alpha.items() if as_fraction(v)}
        if self.h_bracket is not None:
            self.h_bracket = {k: as_fraction(v) for k, v in self.h_bracket.items() if as_fraction(v)}
        if self.h_names is None:
            self.h_names = [f"b{i}" for i in range(1, self.h_dimension + 1)]
        n, m = self.g.dimension, self.h_dimension
        for (a, i) in self.t:
            if not (1 <= a <= n and 1 <= i <= m):
                raise AlgebraError(f"t index ({a}, {i}) out of range")
        for (i, a, j) in self.alpha:
            if not (1 <= i <= m and 1 <= a <= n and 1 <= j <= m):
                raise AlgebraError(f"alpha index ({i}, {a}, {j}) out of range")

    @classmethod
    def inner(cls, g: LieStructureConstants, h_names=None):
        """The identity crossed module ``g -> g`` with the adjoint action."""
        n = g.dimension
        t = {(a, a): 1 for a in range(1, n + 1)}
        alpha = {(i, a, j): v for (i, a, j), v in g.constants.items()}
        return cls(g, n, t, alpha, h_bracket=dict(g.constants), h_names=h_names)


def crossed_module_to_ce(cm: CrossedModuleData, name: str = "", check: bool = True) -> DgcaPresentation:
    """CE algebra of the strict Lie 2-algebra of a crossed module.

    d t^a = -1/2 C^a_bc t^b t^c - t^a_i b^i,   d b^i = -alpha^i_aj t^a b^j.
    The sign in front of t^a_i is the one for which the curvature of a
    connection (A, B) reads F_A + t(B).
    """
    g = cm.g
    n, m = g.dimension, cm.h_dimension
    alg = GradedAlgebra([(x, 1) for x in g.names] + [(x, 2) for x in cm.h_names])
    t = lambda a: alg.var(a - 1)
    b = lambda i: alg.var(n + i - 1)
    d = {}
    for a in range(1, n + 1):
        img = alg.zero()
        for p in range(1, n + 1):
            for q in range(p + 1, n + 1):
                v = g.C(a, p, q)
                if v:
                    img = img + (t(p) * t(q)).scale(-v)
        for i in range(1, m + 1):
            v = cm.t.get((a, i), 0)
            if v:
                img = img - b(i).scale(v)
        d[a - 1] = img
    for i in range(1, m + 1):
        img = alg.zero()
        for a in range(1, n + 1):
            for j in range(1, m + 1):
                v = cm.alpha.get((i, a, j), 0)
                if v:
                    img = img - (t(a) * b(j)).scale(v)
        d[n + i - 1] = img
    if cm.h_bracket is not None:
        _check_peiffer(cm)
    try:
        return DgcaPresentation(alg, d, kind="CE", name=name,
                                provenance={"crossed_module": cm}, check=check)
    except NilpotencyError as exc:
        raise CrossedModuleError(f"crossed-module axioms fail:\n{exc.report.describe()}", exc.report)


def _check_peiffer(cm: CrossedModuleData):
    """alpha(t(f_j)) f_k = [f_j, f_k] for all basis elements."""
    n, m = cm.g.dimension, cm.h_dimension
    bad = []
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            for k in range(1, m + 1):
                lhs = sum(cm.t.get((a, j), 0) * cm.alpha.get((i, a, k), 0) for a in range(1, n + 1))
                rhs = cm.h_bracket.get((i, j, k), 0)
                if lhs != rhs:
                    bad.append(((i, j, k), lhs - rhs))
    if bad:
        raise CrossedModuleError(f"Peiffer identity fails at {bad[:3]}",
                                 Report(False, [(str(k), v) for k, v in bad]))


def shifted_u1(n: int, name: str = "b") -> DgcaPresentation:
    if not isinstance(n, int) or n < 1:
        raise AlgebraError("shifted u(1) needs n >= 1")
    alg = GradedAlgebra([(name, n)])
    return DgcaPresentation(alg, {}, kind="CE", name=f"b^{n - 1}u(1)")


def free_dgca(degrees: Sequence[int], names: Optional[Sequence[str]] = None,
              d_prefix: str = "d") -> DgcaPresentation:
    """Free DGCA: generators a_k and da_k with d a_k = da_k."""
    if names is None:
        names = [f"a{k}" for k in range(1, len(degrees) + 1)]
    if len(names) != len(degrees):
        raise AlgebraError("one name per degree is required")
    for deg in degrees:
        if not isinstance(deg, int) or deg < 1:
            raise AlgebraError(f"free generators need degree >= 1, got {deg}")
    gens = [(nm, deg) for nm, deg in zip(names, degrees)]
    gens += [(d_prefix + nm, deg + 1) for nm, deg in zip(names, degrees)]
    alg = GradedAlgebra(gens)
    k = len(degrees)
    d = {i: alg.var(k + i) for i in range(k)}
    return DgcaPresentation(alg, d, kind="Free", name="F(V)")


@dataclass
class WeilPackage:
    W: DgcaPresentation
    ce: DgcaPresentation
    iota_star: Morphism
    base_ids: list
    shifted_ids: list
    sigma: Derivation

    def shift_of(self, x: Element) -> Element:
        return self.sigma(x)

    def embed(self, x: Element) -> Element:
        """CE(g) -> W(g) on the underlying algebras (not a dg-map)."""
        return Element(self.W.algebra, dict(x.terms)) if x.alg == self.ce.algebra else _reindex(x, self.W.algebra)


def _reindex(x: Element, target: GradedAlgebra) -> Element:
    from .gca import transport
    return transport(x, target)


SHIFT_PREFIX = "s:"


def weil(g: DgcaPresentation, prefix: str = SHIFT_PREFIX) -> WeilPackage:
    """Weil algebra: the mapping cone of the identity on ``g``."""
    base = g.algebra
    k = len(base.generators)
    gens = [(x.name, x.degree, x.shift_of) for x in base.generators]
    gens += [(prefix + x.name, x.degree + 1, x.id) for x in base.generators]
    alg = GradedAlgebra(gens)
    sigma = Derivation(alg, 1, {i: alg.var(k + i) for i in range(k)})
    d = {}
    for x in base.generators:
        dce = Element(alg, dict(g.d.image(x.id).terms))
        d[x.id] = dce + alg.var(k + x.id)
        d[k + x.id] = -sigma(dce)
    W = DgcaPresentation(alg, d, kind="Weil", name=f"W({g.name})" if g.name else "W",
                         provenance={"base": g})
    iota = Morphism(W, g, {**{i: base.var(i) for i in range(k)}, **{k + i: base.zero() for i in range(k)}},
                    name="i*")
    require_morphism(iota)
    return WeilPackage(W, g, iota, list(range(k)), list(range(k, 2 * k)), sigma)


def weil_free_iso(w: WeilPackage):
    """The isomorphism F(g) -> W(g) and its inverse, both verified."""
    base = w.ce.algebra
    k = len(base.generators)
    F = free_dgca([x.degree for x in base.generators], [x.name for x in base.generators])
    F.name = f"F({w.ce.name})" if w.ce.name else "F"
    Wa, Fa = w.W.algebra, F.algebra
    f_images = {}
    finv_images = {}
    for x in base.generators:
        f_images[x.id] = Wa.var(x.id)
        f_images[k + x.id] = w.W.d.image(x.id)
        finv_images[x.id] = Fa.var(x.id)
        dce = Element(Fa, dict(w.ce.d.image(x.id).terms))
        finv_images[k + x.id] = Fa.var(k + x.id) - dce
    f = require_morphism(Morphism(F, w.W, f_images, name="f"))
    f_inv = require_morphism(Morphism(w.W, F, finv_images, name="f^-1"))
    for x in Fa.generators:
        if f_inv(f(Fa.var(x.id))) != Fa.var(x.id):
            raise VerificationError(f"f^-1 f is not the identity on {x.name}")
    for x in Wa.generators:
        if f(f_inv(Wa.var(x.id))) != Wa.var(x.id):
            raise VerificationError(f"f f^-1 is not the identity on {x.name}")
    return f, f_inv, F


def weil_morphism(phi: Morphism, w_src: WeilPackage, w_tgt: WeilPackage) -> Morphism:
    """W(phi): a -> phi(a), sigma a -> sigma phi(a); verified."""
    k = len(w_src.base_ids)
    images = {}
    for x in w_src.ce.algebra.generators:
        img = w_tgt.embed(phi.image(x.id))
        images[x.id] = img
        images[k + x.id] = w_tgt.sigma(img)
    return require_morphism(Morphism(w_src.W, w_tgt.W, images, name=f"W({phi.name})"))
