"""Builders for the bundled algebras.  The JSON files under ``lcv/data`` are serialized from these."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .dgca import DgcaPresentation
from .errors import AlgebraError
from .families import (
    CrossedModuleData,
    LieStructureConstants,
    crossed_module_to_ce,
    lie_to_ce,
    so3_constants,
    weil,
)
from .gca import GradedAlgebra, Morphism
from .linalg import solve
from .transgression import quadratic_polynomial, string_extension, transgress


def _mat_mul(A, B):
    # entries are (re, im) pairs of Fractions
    n = len(A)
    out = [[(Fraction(0), Fraction(0)) for _ in range(n)] for _ in range(n)]
    for i, j, k in product(range(n), repeat=3):
        (ar, ai), (br, bi) = A[i][k], B[k][j]
        r, im = out[i][j]
        out[i][j] = (r + ar * br - ai * bi, im + ar * bi + ai * br)
    return out


def _bracket(A, B):
    AB, BA = _mat_mul(A, B), _mat_mul(B, A)
    return [[(x[0] - y[0], x[1] - y[1]) for x, y in zip(r1, r2)] for r1, r2 in zip(AB, BA)]


def _flatten(M):
    return [v for row in M for entry in row for v in entry]


def constants_from_matrices(basis, names=None) -> LieStructureConstants:
    """Structure constants of the span of complex-rational matrices (closed under brackets)."""
    cols = [_flatten(M) for M in basis]
    rows = [list(r) for r in zip(*cols)]
    n = len(basis)
    consts = {}
    for b in range(n):
        for c in range(b + 1, n):
            sol = solve(rows, _flatten(_bracket(basis[b], basis[c])), n)
            if sol is None:
                raise AlgebraError("matrices do not span a Lie algebra")
            for a, v in enumerate(sol):
                if v:
                    consts[(a + 1, b + 1, c + 1)] = v
                    consts[(a + 1, c + 1, b + 1)] = -v
    return LieStructureConstants(n, consts, names)


def su3_constants() -> LieStructureConstants:
    """su(3) in the rational basis E_jk - E_kj, i(E_jk + E_kj), i(E_11 - E_22), i(E_22 - E_33)."""
    z = (Fraction(0), Fraction(0))

    def mat(entries):
        M = [[z] * 3 for _ in range(3)]
        for (i, j), v in entries.items():
            M[i][j] = v
        return M

    one, i_ = (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))
    neg = lambda v: (-v[0], -v[1])
    basis = []
    for j, k in ((0, 1), (0, 2), (1, 2)):
        basis.append(mat({(j, k): one, (k, j): neg(one)}))
    for j, k in ((0, 1), (0, 2), (1, 2)):
        basis.append(mat({(j, k): i_, (k, j): i_}))
    basis.append(mat({(0, 0): i_, (1, 1): neg(i_)}))
    basis.append(mat({(1, 1): i_, (2, 2): neg(i_)}))
    return constants_from_matrices(basis)


def heisenberg_constants() -> LieStructureConstants:
    return LieStructureConstants(3, {(3, 1, 2): 1, (3, 2, 1): -1}, ["x", "y", "z"])


def abelian(n: int) -> DgcaPresentation:
    if n < 1:
        raise AlgebraError("abelian-n needs n >= 1")
    return lie_to_ce(LieStructureConstants(n, {}), name=f"abelian-{n}")


def broken_jacobi_constants() -> LieStructureConstants:
    # so(3) brackets plus a stray e1 component in [e1,e2]
    return LieStructureConstants.from_brackets(3, {(1, 2): {3: 1, 1: 1}, (2, 3): {1: 1}, (3, 1): {2: 1}})


def broken_crossed_module() -> CrossedModuleData:
    g = so3_constants()
    alpha = {(i, a, j): 2 * v for (i, a, j), v in g.constants.items()}
    return CrossedModuleData(g, 3, {(a, a): 1 for a in range(1, 4)}, alpha)


def su5_sp5_model() -> Morphism:
    """Abelian cohomology models of sp(5) and su(5) and the restriction between them."""
    sp = DgcaPresentation(GradedAlgebra([("v", 3), ("w", 7), ("x", 11), ("y", 15), ("z", 19)]), {},
                          kind="CE", name="sp5")
    su = DgcaPresentation(GradedAlgebra([("a", 3), ("b", 5), ("c", 7), ("d", 9)]), {},
                          kind="CE", name="su5")
    images = {"v": su.var("a"), "w": su.var("c"), "x": 0, "y": 0, "z": 0}
    return Morphism(sp, su, images, name="su5-sp5")


def string_so3():
    g = lie_to_ce(so3_constants(), name="so3")
    w = weil(g)
    triple = transgress(w, quadratic_polynomial(w))
    ext = string_extension(g, triple.mu)
    ext.ce.name = "string-so3"
    return ext


def build(name: str):
    """Presentation (or morphism for su5-sp5) for a library name, together with its metadata."""
    if name in ("so3", "su2"):
        c = so3_constants()
        return lie_to_ce(c, name=name), {"lie": c}
    if name == "su3":
        c = su3_constants()
        return lie_to_ce(c, name=name), {"lie": c}
    if name == "heisenberg3":
        c = heisenberg_constants()
        return lie_to_ce(c, name=name), {"lie": c}
    if name.startswith("abelian-"):
        try:
            n = int(name.split("-", 1)[1])
        except ValueError:
            raise AlgebraError(f"bad abelian size in {name!r}")
        p = abelian(n)
        return p, {"lie": p.provenance["constants"]}
    if name == "inn-so3":
        cm = CrossedModuleData.inner(so3_constants())
        return crossed_module_to_ce(cm, name=name), {"crossed_module": cm}
    if name == "string-so3":
        ext = string_so3()
        return ext.ce, {"extension": ext}
    if name == "broken-jacobi":
        c = broken_jacobi_constants()
        return lie_to_ce(c, name=name, check=False), {}
    if name == "broken-crossed-module":
        cm = broken_crossed_module()
        return crossed_module_to_ce(cm, name=name, check=False), {}
    if name == "su5-sp5":
        return su5_sp5_model(), {"cone": {"strict": False}}
    raise AlgebraError(f"no bundled algebra named {name!r}")


BUNDLED = ("so3", "su2", "su3", "heisenberg3", "abelian-1", "abelian-3", "inn-so3", "string-so3",
           "su5-sp5", "broken-jacobi", "broken-crossed-module")


def document(name: str) -> dict:
    """The JSON document shipped for a bundled name."""
    from .io import morphism_to_json, presentation_to_json

    obj, meta = build(name)
    if isinstance(obj, Morphism):
        return morphism_to_json(obj, meta)
    return presentation_to_json(obj, meta)
