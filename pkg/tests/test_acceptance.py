"""Acceptance criteria, each timed against its budget.

A one-line PASS/FAIL summary per criterion is printed at the end of the run
(see conftest.py).
"""

import random
import time
from collections import Counter
from itertools import combinations_with_replacement

from brute import literal_homotopy
from instances import _complete, perturb, random_instance, so3_instance
from lcv.dgca import (
    Homotopy,
    baez_crans_residuals,
    check_differential,
    check_morphism,
    verify_homotopy,
    verify_homotopy_on,
)
from lcv.families import lie_to_ce, so3_constants, weil
from lcv.gca import monomial_basis, transport
from lcv.homology import Subcomplex, coboundary_witness, cohomology, suspension_witness
from lcv.io import load
from lcv.library import BUNDLED, build, su3_constants, su5_sp5_model
from lcv.obstruction import bf_lift_and_expand, mapping_cone, obstruction_cocycle, weak_inverse
from lcv.transgression import (
    basic_subcomplex,
    chern_algebra,
    chern_simons_algebra,
    contracting_homotopy,
    killing_form,
    quadratic_cs_formula,
    quadratic_polynomial,
    string_extension,
    transgress,
    vertical_generators,
    weil_gmu_iso,
)

RESULTS = {}


class criterion:
    """Times the body, records PASS/FAIL for the summary and enforces the budget."""

    def __init__(self, number, label, budget):
        self.number, self.label, self.budget = number, label, budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        ok = exc_type is None and elapsed < self.budget
        RESULTS[self.number] = (ok, self.label, elapsed, self.budget)
        if exc_type is None:
            assert elapsed < self.budget, f"criterion {self.number} took {elapsed:.2f}s (budget {self.budget}s)"
        return False


def so3_killing():
    g = lie_to_ce(so3_constants(), name="so3")
    w = weil(g)
    K = killing_form(g)
    return g, w, K, quadratic_polynomial(w, K)


def monomials_up_to(alg, max_len):
    out = []
    ids = [g.id for g in alg.generators]
    for n in range(1, max_len + 1):
        for combo in combinations_with_replacement(ids, n):
            counts = Counter(combo)
            if any(c > 1 and alg.generators[g].degree % 2 for g, c in counts.items()):
                continue
            out.append(tuple(sorted(counts.items())))
    return out


def test_1_nilpotency():
    with criterion(1, "nilpotency suite", 5):
        presentations = []
        for name in BUNDLED:
            if name in ("broken-jacobi", "broken-crossed-module", "su5-sp5"):
                continue
            p, _ = build(name)
            presentations.append(p)
            presentations.append(weil(p).W)
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        ext = string_extension(g, tr.mu)
        presentations += [ext.ce, weil(ext.ce).W, chern_algebra(w, P), chern_simons_algebra(w, tr)]
        cone_inputs = [su5_sp5_model(), ext.projection]
        presentations += [mapping_cone(cone_inputs[0], strict=False).cone, mapping_cone(cone_inputs[1]).cone]
        for p in presentations:
            assert check_differential(p), p.name
        for name in ("broken-jacobi", "broken-crossed-module"):
            report = check_differential(load(name, verify=False).presentation)
            assert not report
            assert report.failures and all(not v.is_zero() for _, v in report.failures)


def test_2_chern_simons_coefficients():
    with criterion(2, "Chern-Simons coefficients", 1):
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        assert tr.cs == quadratic_cs_formula(w, K)
        W = w.W
        assert (W.d(tr.cs) - P).is_zero()
        expected = W.element("s:t1*t1 + s:t2*t2 + s:t3*t3 - t1*t2*t3")
        assert tr.cs == expected


def test_3_contraction_identity():
    with criterion(3, "contraction identity on W(so3)", 30):
        _, w, _, _ = so3_killing()
        tau = contracting_homotopy(w)
        count = 0
        for k in range(1, 7):
            for m in monomial_basis(w.W, k):
                x = w.W.algebra.monomial(m)
                assert tau.bracket(x) == x, m
                count += 1
        # generating series (1+x)^3/(1-x^2)^3 = 1/(1-x)^3
        assert count == sum((k + 1) * (k + 2) // 2 for k in range(1, 7)) == 83


def test_4_cohomology_dimensions():
    with criterion(4, "cohomology dimensions", 60):
        so3 = lie_to_ce(so3_constants())
        assert [cohomology(so3, k).dim_H for k in range(4)] == [1, 0, 0, 1]
        su3 = lie_to_ce(su3_constants())
        for k in (3, 5):
            r = cohomology(su3, k, rng=random.Random(k))
            assert r.dim_H == 1
            assert r.modular_agrees is True
        W = weil(so3).W
        assert [cohomology(W, k, modular_check=False).dim_H for k in range(1, 7)] == [0] * 6


def test_5_string_extension_exactness():
    with criterion(5, "string extension exactness", 30):
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        ext = string_extension(g, tr.mu)
        mu = ext.pushed_mu()
        y = coboundary_witness(ext.ce, mu)
        assert y is not None and ext.ce.d(y) == mu
        # before the extension mu is a nontrivial class
        assert coboundary_witness(g, tr.mu) is None
        wg = weil(ext.ce)
        res = suspension_witness(wg, transport(P, wg.W))
        assert res
        assert wg.W.d(res.witness) == transport(P, wg.W)
        assert wg.iota_star(res.witness).is_zero()


def test_6_isomorphism_roundtrip():
    with criterion(6, "W(g_mu) isomorphism round trip", 5):
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        ext = string_extension(g, tr.mu)
        iso = weil_gmu_iso(ext, tr)
        src = iso.weil_ext.W
        csa = iso.cs_algebra
        image = iso.f(src.var("s:b"))
        assert image == csa.var("c") + transport(tr.mu, csa) - transport(tr.cs, csa)
        for x in src.generators:
            assert iso.f_inv(iso.f(src.var(x.id))) == src.var(x.id)
        for x in csa.generators:
            assert iso.f(iso.f_inv(csa.var(x.id))) == csa.var(x.id)


def test_7_basic_cs_cohomology():
    with criterion(7, "basic Chern-Simons cohomology", 60):
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        csa = chern_simons_algebra(w, tr)
        sub = basic_subcomplex(csa)
        Pc = transport(P, csa)
        assert csa.d(Pc).is_zero()
        y = sub.coboundary_witness(Pc)
        assert y is not None and csa.d(y) == Pc
        assert sub.cohomology(4).dim_H == 0
        # in W(g) itself P still represents a nonzero basic class
        vert = vertical_generators(w.W)
        basic_w = Subcomplex(w.W, lambda m: all(x not in vert for x, _ in m))
        assert basic_w.coboundary_witness(P) is None


def test_8_cone_cohomology():
    with criterion(8, "su5 -> sp5 cone cohomology", 60):
        L = load("su5-sp5")
        pkg = mapping_cone(L.morphism, strict=L.metadata["cone"]["strict"])
        dims = {k: cohomology(pkg.cone, k, modular_check=False).dim_H for k in (6, 10)}
        assert dims == {6: 1, 10: 1}


def test_9_obstruction_pipeline():
    with criterion(9, "obstruction pipeline", 10):
        g, w, K, P = so3_killing()
        tr = transgress(w, P)
        ext = string_extension(g, tr.mu)
        res = obstruction_cocycle(ext, tr)
        W = w.W
        assert res.H == tr.cs
        assert res.G == -P
        assert (W.d(res.H) + res.G).is_zero()
        assert res.consistent
        flat = obstruction_cocycle(ext, tr, A=w.iota_star)
        assert flat.G.is_zero()
        assert flat.H == tr.mu
        assert flat.consistent


def test_10_bf_identities():
    with criterion(10, "BF identities on inn(so3)", 5):
        cm = build("inn-so3")[1]["crossed_module"]
        wg = weil(lie_to_ce(cm.g))
        P = quadratic_polynomial(wg, killing_form(wg.ce))
        res = bf_lift_and_expand(cm, P)
        W = res.weil.W
        n = cm.g.dimension
        # 2 P_ab (t^a_i sigma b^i) sigma t^b with P_ab = delta_ab and t = Id
        expected = W.zero()
        for a in range(1, n + 1):
            expected = expected + (W.var(f"s:b{a}") * W.var(f"s:t{a}")).scale(2)
        assert res.dP == expected
        assert res.formula == expected
        assert res.basic
        total = sum(res.terms.values(), W.zero())
        total = total + res.terms["BF-term"]
        assert total == res.expansion
        assert res.expansion == transport(P, W)
        assert res.expansion_matches


def test_11_homotopy_calculus():
    with criterion(11, "homotopy calculus (products: library and linear-differential homotopies)", 120):
        rng = random.Random(20240611)
        agree = 0
        for _ in range(120):
            phi, psi, tau = random_instance(rng)
            for t in (tau, perturb(rng, tau, phi.target)):
                h = Homotopy(phi, psi, t)
                assert bool(verify_homotopy(h)) == baez_crans_residuals(phi, psi, t).vanish()
                agree += 1
        assert agree >= 200

        # g = f + [d, eta] on every monomial up to length 6 for the homotopies the library builds
        g, w, K, P = so3_killing()
        homotopies = [contracting_homotopy(w).free_homotopy]
        tr = transgress(w, P)
        string_cone = mapping_cone(string_extension(g, tr.mu).projection)
        homotopies += [string_cone.nullhomotopy, weak_inverse(string_cone).homotopy,
                       mapping_cone(su5_sp5_model(), strict=False).nullhomotopy]
        # and for random 2-term instances with linear differential
        rng = random.Random(11)
        while len(homotopies) < 9:
            phi, psi, tau = random_instance(rng)
            if all(len(m) == 1 for gen in phi.source.generators for m in phi.source.d.image(gen.id).terms):
                homotopies.append(Homotopy(phi, psi, tau))
        for h in homotopies:
            mons = monomials_up_to(h.f.source.algebra, 6)
            assert verify_homotopy(h)
            report = verify_homotopy_on(h, mons)
            assert report, report.describe()


def test_11_product_identity_is_not_automatic():
    """A valid generator-level homotopy whose extension fails on a product.

    The source is the CE algebra of the inner crossed module so3 -> so3,
    whose differential has quadratic terms.
    """
    rng = random.Random(7)
    while True:
        phi = so3_instance(rng)
        ta = phi.target.algebra
        tau = {"b1": ta.var("t2"), "b2": ta.var("t3") - ta.var("t1"), "b3": ta.var("t1")}
        psi = _complete(phi, tau)
        if check_morphism(phi) and check_morphism(psi):
            break
    h = Homotopy(phi, psi, tau)
    assert verify_homotopy(h)
    assert baez_crans_residuals(phi, psi, tau).vanish()
    S = phi.source.algebra
    word = (S.index("t1"), S.index("b1"))
    x = S.monomial(((word[0], 1), (word[1], 1)))
    images = {S.index(k): v for k, v in tau.items()}
    assert h(x) == literal_homotopy(phi, psi, images, word)
    assert psi(x) - phi(x) - h.bracket(x) == ta.element("-1/3*t1*t2*t3")
