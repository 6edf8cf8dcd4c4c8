"""Normal morphisms, mapping cones, weak inverses, lifting obstructions and the BF expansion."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Optional

from .dgca import (
    DgcaPresentation,
    Homotopy,
    check_morphism,
    require_homotopy,
    require_morphism,
)
from .errors import AlgebraError, NormalityError, VerificationError, WeakInverseError
from .families import CrossedModuleData, WeilPackage, crossed_module_to_ce, lie_to_ce, shifted_u1, weil
from .gca import (
    Derivation,
    Element,
    GradedAlgebra,
    Morphism,
    augmentation,
    by_name,
    compose,
    identity,
    transport,
)
from .homology import is_basic
from .linalg import nullspace, rank, solve
from .transgression import ExtensionPackage, TransgressionTriple, chern_simons_algebra


def linear_part_matrix(t_star: Morphism):
    """Rows indexed by target generators, columns by source generators."""
    src, tgt = t_star.source.algebra, t_star.target.algebra
    M = [[Fraction(0)] * len(src.generators) for _ in tgt.generators]
    for g in src.generators:
        for m, c in t_star.image(g.id).terms.items():
            if len(m) == 1 and m[0][1] == 1:
                M[m[0][0]][g.id] = c
    return M


def _is_linear(x: Element) -> bool:
    return all(len(m) == 1 and m[0][1] == 1 for m in x.terms)


def _dual_contractions(t_star: Morphism) -> list:
    """For each target generator h, the contraction on the source pairing a with the h-coefficient of t*(a)."""
    src, tgt = t_star.source.algebra, t_star.target.algebra
    M = linear_part_matrix(t_star)
    out = []
    for h in tgt.generators:
        images = {g.id: M[h.id][g.id] for g in src.generators if g.degree == h.degree and M[h.id][g.id]}
        out.append((h, Derivation(src, -h.degree, images)))
    return out


@dataclass
class NormalityReport:
    ok: bool
    surjective: bool
    kernel: list
    missed: list = field(default_factory=list)
    failure: Optional[tuple] = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        lines = ["normal" if self.ok else "not normal"]
        lines.append(f"  linear part surjective: {self.surjective}")
        if self.missed:
            lines.append(f"  target generators missed: {', '.join(self.missed)}")
        if self.failure:
            k, expr = self.failure
            lines.append(f"  d({k}) leaves the subalgebra generated by the kernel: {expr}")
        return "\n".join(lines)


def kernel_basis(t_star: Morphism) -> list:
    src = t_star.source.algebra
    M = linear_part_matrix(t_star)
    vecs = nullspace(M, len(src.generators)) if M else [
        [Fraction(int(i == j)) for j in range(len(src.generators))] for i in range(len(src.generators))]
    return [Element(src, {((j, 1),): c for j, c in enumerate(v) if c}) for v in vecs]


def check_normal(t_star: Morphism) -> NormalityReport:
    src, tgt = t_star.source, t_star.target
    M = linear_part_matrix(t_star)
    r = rank(M, len(src.generators)) if M else 0
    surjective = r == len(tgt.generators)
    missed = []
    if not surjective:
        for h in tgt.generators:
            if not any(M[h.id]):
                missed.append(h.name)
    kernel = kernel_basis(t_star)
    contractions = _dual_contractions(t_star)
    failure = None
    for k in kernel:
        dk = src.d(k)
        for h, X in contractions:
            v = X(dk)
            if not v.is_zero():
                failure = (str(k), dk)
                break
        if failure:
            break
    return NormalityReport(surjective and failure is None, surjective, kernel, missed, failure)


def _fresh(alg_names: set, name: str) -> str:
    while name in alg_names:
        name += "'"
    alg_names.add(name)
    return name


@dataclass
class ConePackage:
    t_star: Morphism
    cone: DgcaPresentation
    canonical: Morphism       # cone -> CE(g)
    nullhomotopy: Homotopy    # from 0 to t* . canonical
    kernel: list
    split: list               # ids of the complement V1 in the source
    preimages: dict           # target generator id -> element of the V1 span in the source
    shifted: dict             # target generator id -> cone generator id
    sigma_t: Derivation       # a -> sigma t*(a) on the cone
    surjective: bool


def _choose_split(t_star: Morphism, split: Optional[list]):
    src = t_star.source.algebra
    M = linear_part_matrix(t_star)
    if split is not None:
        ids = [src.index(s) for s in split]
        if ids and (not M or rank([[row[j] for j in ids] for row in M], len(ids)) != len(ids)):
            raise AlgebraError("the chosen complement is not mapped injectively")
        return ids
    ids = []
    cols = []
    r = 0
    for g in src.generators:
        if not M:
            break
        trial = cols + [[row[g.id] for row in M]]
        r2 = rank(trial)
        if r2 > r:
            ids.append(g.id)
            cols = trial
            r = r2
    return ids


def mapping_cone(t_star: Morphism, split: Optional[list] = None, strict: bool = True) -> ConePackage:
    """Cone on g* + h*[1] with d a = d a + sigma t*(a) and d sigma t*(a) = -sigma t*(d a).

    With ``strict=False`` target generators missed by the linear part are
    allowed when they are closed; their shifts become closed generators.
    """
    src, tgt = t_star.source, t_star.target
    require_morphism(t_star)
    for g in src.generators:
        if not _is_linear(t_star.image(g.id)):
            raise AlgebraError(f"t*({g.name}) is not linear in the target generators; the cone uses linear data only")
    report = check_normal(t_star)
    if not report.ok:
        if strict or report.failure is not None:
            raise NormalityError(f"t* is not normal:\n{report.describe()}", report)
        for name in report.missed:
            if not tgt.d.image(name).is_zero():
                raise NormalityError(f"missed target generator {name} is not closed", report)
    salg, talg = src.algebra, tgt.algebra
    M = linear_part_matrix(t_star)
    V1 = _choose_split(t_star, split)
    preimages = {}
    for h in talg.generators:
        if not any(M[h.id]):
            continue
        rhs = [Fraction(int(i == h.id)) for i in range(len(talg.generators))]
        sol = solve([[row[j] for j in V1] for row in M], rhs, len(V1))
        if sol is None:
            raise AlgebraError(f"no preimage of {h.name} in the complement")
        preimages[h.id] = Element(salg, {((V1[k], 1),): c for k, c in enumerate(sol) if c})
    names = set(salg.names)
    gens = [(g.name, g.degree, g.shift_of) for g in salg.generators]
    shifted = {}
    n = len(gens)
    for h in talg.generators:
        pre = preimages.get(h.id)
        link = None
        if pre is not None and len(pre.terms) == 1:
            (m, c), = pre.terms.items()
            if c == 1:
                link = m[0][0]
        shifted[h.id] = n + len(shifted)
        gens.append((_fresh(names, "s:" + h.name), h.degree + 1, link))
    alg = GradedAlgebra(gens)

    def lift(x: Element) -> Element:
        return Element(alg, dict(x.terms))

    sigma_images = {}
    for g in salg.generators:
        img = alg.zero()
        for m, c in t_star.image(g.id).terms.items():
            img = img + alg.var(shifted[m[0][0]]).scale(c)
        sigma_images[g.id] = img
    sigma_t = Derivation(alg, 1, sigma_images)
    d = {}
    for g in salg.generators:
        d[g.id] = lift(src.d.image(g.id)) + sigma_images[g.id]
    for h in talg.generators:
        if h.id in preimages:
            d[shifted[h.id]] = -sigma_t(lift(src.d(preimages[h.id])))
        else:
            d[shifted[h.id]] = alg.zero()
    for k in report.kernel:
        if not sigma_t(lift(src.d(k))).is_zero():
            raise NormalityError(f"cone differential depends on the representative: sigma t*(d {k}) != 0", report)
    cone = DgcaPresentation(alg, d, kind="Cone", name=f"cone({t_star.name})" if t_star.name else "cone",
                            provenance={"t_star": t_star})
    can_images = {g.id: salg.var(g.id) for g in salg.generators}
    can_images.update({shifted[h.id]: salg.zero() for h in talg.generators})
    canonical = require_morphism(Morphism(cone, src, can_images, name="can"))
    composite = compose(t_star, canonical, name="t*.can")
    eta = {shifted[h.id]: talg.var(h.id) for h in talg.generators}
    nullhomotopy = require_homotopy(Homotopy(augmentation(cone, tgt), composite, eta, name="cone nullhomotopy"))
    return ConePackage(t_star, cone, canonical, nullhomotopy, report.kernel, V1, preimages,
                       shifted, sigma_t, report.surjective)


@dataclass
class WeakInverse:
    ce_f: DgcaPresentation
    f: Morphism          # CE(f) -> cone
    f_inv: Morphism      # cone -> CE(f)
    homotopy: Homotopy   # from f . f_inv to Id on the cone


def weak_inverse(pkg: ConePackage) -> WeakInverse:
    if not pkg.surjective:
        raise WeakInverseError("t* is not surjective on generators, so the cone has no weak inverse to CE(f)")
    t_star = pkg.t_star
    src = t_star.source
    salg = src.algebra
    V1 = set(pkg.split)
    kernel_ids = [g.id for g in salg.generators if g.id not in V1]
    M = linear_part_matrix(t_star)
    for gid in kernel_ids:
        if any(row[gid] for row in M):
            raise WeakInverseError(
                f"the kernel of t* is not spanned by generators ({salg.generators[gid].name} is not in it)")
    if len(kernel_ids) != len(pkg.kernel):
        raise WeakInverseError("the kernel of t* is not spanned by generators")
    old_to_new = {gid: k for k, gid in enumerate(kernel_ids)}
    gens = []
    for gid in kernel_ids:
        g = salg.generators[gid]
        link = old_to_new.get(g.shift_of) if g.shift_of is not None else None
        gens.append((g.name, g.degree, link))
    alg = GradedAlgebra(gens)
    restrict_images = {g.id: (alg.var(old_to_new[g.id]) if g.id in old_to_new else alg.zero())
                       for g in salg.generators}
    restrict = Morphism(salg, alg, restrict_images, name="restrict")
    d = {}
    for gid in kernel_ids:
        dk = src.d.image(gid)
        if any(g in V1 for g in dk.generators_used()):
            raise WeakInverseError(f"d({salg.generators[gid].name}) leaves the kernel subalgebra: {dk}")
        d[old_to_new[gid]] = restrict(dk)
    ce_f = DgcaPresentation(alg, d, kind="CE", name="CE(f)", provenance={"cone": pkg})
    cone = pkg.cone
    calg = cone.algebra
    f = require_morphism(Morphism(ce_f, cone, {k: calg.var(gid) for gid, k in old_to_new.items()}, name="f"))
    inv = {}
    for g in salg.generators:
        inv[g.id] = alg.var(old_to_new[g.id]) if g.id in old_to_new else alg.zero()
    talg = t_star.target.algebra
    for h in talg.generators:
        sid = pkg.shifted[h.id]
        pre = pkg.preimages.get(h.id)
        inv[sid] = alg.zero() if pre is None else -restrict(src.d(pre))
    f_inv = Morphism(cone, ce_f, inv, name="f^-1")
    report = check_morphism(f_inv)
    if not report:
        raise WeakInverseError(f"f^-1 is not a dg-morphism:\n{report.describe()}", report)
    for k in range(len(kernel_ids)):
        if f_inv(f(alg.var(k))) != alg.var(k):
            raise WeakInverseError("f^-1 f is not the identity on CE(f)")
    eta = {pkg.shifted[h]: Element(calg, dict(pre.terms)) for h, pre in pkg.preimages.items()}
    homotopy = require_homotopy(Homotopy(compose(f, f_inv, name="f.f^-1"), identity(cone), eta,
                                         name="f.f^-1 ~ Id"))
    return WeakInverse(ce_f, f, f_inv, homotopy)


@dataclass
class ObstructionResult:
    H: Element
    G: Element
    consistent: bool
    image_h: Element
    image_dh: Element
    cone: ConePackage
    weak: WeakInverse
    injection: Morphism
    sign_convention: str = "H = A(f^-1(j(h))), G = -A(f^-1(j(dh))), so that dH + G = 0"

    def describe(self) -> str:
        return (f"H = {self.H}\nG = {self.G}\n"
                f"dH + G = 0: {self.consistent}\nconvention: {self.sign_convention}")


def obstruction_cocycle(ext: ExtensionPackage, triple: TransgressionTriple,
                        A: Optional[Morphism] = None) -> ObstructionResult:
    w = triple.weil
    if transport(triple.mu, ext.base) != transport(ext.mu, ext.base):
        raise AlgebraError("the extension was built from a different cocycle")
    csa = chern_simons_algebra(w, triple, names=(ext.b_name, "c"))
    n = ext.mu.degree() - 1
    wu = weil(shifted_u1(n, ext.b_name))
    Wu = wu.W
    b, sb = Wu.generators[0], Wu.generators[1]
    t_images = {}
    for g in csa.generators:
        if g.name == ext.b_name:
            t_images[g.id] = Wu.var(b.id)
        elif g.name == "c":
            t_images[g.id] = Wu.var(sb.id)
        else:
            t_images[g.id] = Wu.zero()
    t_star = require_morphism(Morphism(csa, Wu, t_images, name="t*"))
    pkg = mapping_cone(t_star)
    weak = weak_inverse(pkg)
    top = weil(shifted_u1(n + 1, "h")).W
    cone = pkg.cone.algebra
    j = require_morphism(Morphism(top, pkg.cone, {
        0: cone.var(pkg.shifted[b.id]),
        1: -cone.var(pkg.shifted[sb.id]),
    }, name="j"))
    if A is None:
        A = identity(w.W, name="A")
    if A.source.algebra != w.W.algebra:
        raise AlgebraError("A must be defined on W(g)")
    require_morphism(A)
    ident = require_morphism(by_name(weak.ce_f, w.W, name="CE(f) = W(g)"))
    for g in w.W.generators:
        if transport(weak.ce_f.d.image(g.name), w.W) != w.W.d.image(g.id):
            raise VerificationError("CE(f) differs from W(g)")
    image_h = A(ident(weak.f_inv(j(top.var(0)))))
    image_dh = A(ident(weak.f_inv(j(top.var(1)))))
    H = image_h
    G = -image_dh
    target = A.target
    consistent = (target.d(H) + G).is_zero()
    if not consistent:
        raise VerificationError(f"dH + G = {target.d(H) + G}")
    return ObstructionResult(H, G, consistent, image_h, image_dh, pkg, weak, j)


@dataclass
class BFResult:
    weil: WeilPackage
    P: Element
    basic: object
    dP: Element
    formula: Element
    formula_matches: bool
    terms: dict
    expansion: Optional[Element]
    expansion_matches: Optional[bool]


def _symmetric_tensor(P: Element, w: WeilPackage):
    """P_{a1..an} for P = sum over ordered tuples of P_{a1..an} s:t^{a1}...s:t^{an}."""
    W = w.W.algebra
    base_of = {g: W.generators[g].shift_of for g in w.shifted_ids}
    pos = {gid: k for k, gid in enumerate(w.base_ids)}
    n = None
    tensor = {}
    for m, c in P.terms.items():
        idx = []
        for g, e in m:
            if g not in base_of:
                raise AlgebraError("P must be a polynomial in shifted generators")
            idx.extend([pos[base_of[g]]] * e)
        if n is None:
            n = len(idx)
        elif n != len(idx):
            raise AlgebraError("P must be homogeneous in polynomial degree")
        mult = 1
        for _, e in m:
            mult *= factorial(e)
        share = c * mult / factorial(len(idx))
        for perm in set(permutations(idx)):
            tensor[perm] = share
    return n, tensor


def bf_lift_and_expand(cm: CrossedModuleData, P: Element) -> BFResult:
    wg = weil(lie_to_ce(cm.g))
    if P.alg != wg.W.algebra:
        P = transport(P, wg.W)
    if not wg.W.d(P).is_zero():
        raise AlgebraError("P is not closed on g")
    w = weil(crossed_module_to_ce(cm))
    W = w.W
    Wa = W.algebra
    P2 = transport(P, W)
    cert = is_basic(w, P2)
    dP = W.d(P2)
    n_g = cm.g.dimension
    t_ids = list(range(n_g))
    b_ids = list(range(n_g, n_g + cm.h_dimension))
    k = len(w.base_ids)
    st = lambda a: Wa.var(k + t_ids[a])
    sbv = lambda i: Wa.var(k + b_ids[i])
    n, tensor = _symmetric_tensor(transport(P, wg.W), wg)
    formula = Wa.zero()
    tb = [sum((sbv(i).scale(cm.t.get((a + 1, i + 1), 0)) for i in range(cm.h_dimension)), Wa.zero())
          for a in range(n_g)]
    for idx, coef in tensor.items():
        term = tb[idx[0]]
        for a in idx[1:]:
            term = term * st(a)
        formula = formula + term.scale(coef * n)
    terms = {}
    expansion = None
    matches = None
    if n == 2:
        F = []
        B = []
        for a in range(n_g):
            quad = Wa.zero()
            for p in range(n_g):
                for q in range(n_g):
                    v = cm.g.C(a + 1, p + 1, q + 1)
                    if v:
                        quad = quad + (Wa.var(t_ids[p]) * Wa.var(t_ids[q])).scale(v / 2)
            F.append(W.d.image(t_ids[a]) + quad)
            B.append(sum((Wa.var(b_ids[i]).scale(cm.t.get((a + 1, i + 1), 0))
                          for i in range(cm.h_dimension)), Wa.zero()))
        pont, bf, cosmo, total = Wa.zero(), Wa.zero(), Wa.zero(), Wa.zero()
        for (a, b), coef in tensor.items():
            pont = pont + (F[a] * F[b]).scale(coef)
            bf = bf + (B[a] * F[b]).scale(coef)
            cosmo = cosmo + (B[a] * B[b]).scale(coef)
            total = total + (st(a) * st(b)).scale(coef)
        terms = {"Pontryagin term": pont, "BF-term": bf, "cosmological constant": cosmo}
        expansion = total
        matches = (pont + bf.scale(2) + cosmo) == total and total == P2
    return BFResult(w, P2, cert, dP, formula, dP == formula, terms, expansion, matches)
