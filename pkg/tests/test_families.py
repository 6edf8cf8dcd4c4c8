import pytest

from lcv.dgca import check_differential, check_morphism
from lcv.errors import AlgebraError
from lcv.families import (
    CrossedModuleData,
    CrossedModuleError,
    JacobiError,
    LieStructureConstants,
    crossed_module_to_ce,
    free_dgca,
    lie_to_ce,
    shifted_u1,
    so3_constants,
    weil,
    weil_free_iso,
    weil_morphism,
)
from lcv.gca import Morphism
from lcv.library import broken_crossed_module, broken_jacobi_constants, heisenberg_constants, su3_constants


@pytest.fixture
def so3():
    return lie_to_ce(so3_constants(), name="so3")


def test_so3_differential(so3):
    assert so3.d.image("t1") == so3.element("-t2*t3")
    assert so3.d.image("t2") == so3.element("t1*t3")
    assert so3.d.image("t3") == so3.element("-t1*t2")


def test_from_brackets_matches_constants():
    c = LieStructureConstants.from_brackets(3, {(1, 2): {3: 1}}, names=["x", "y", "z"])
    p = lie_to_ce(c)
    assert p.d.image("z") == p.element("-x*y")
    assert p.same_as(lie_to_ce(heisenberg_constants()))


def test_constants_validated():
    with pytest.raises(AlgebraError):
        LieStructureConstants(2, {(1, 1, 2): 1})
    with pytest.raises(AlgebraError):
        LieStructureConstants(2, {(3, 1, 2): 1, (3, 2, 1): -1})


def test_su3_satisfies_jacobi():
    p = lie_to_ce(su3_constants())
    assert len(p.generators) == 8
    assert check_differential(p)


def test_jacobi_failure():
    with pytest.raises(JacobiError) as info:
        lie_to_ce(broken_jacobi_constants())
    assert info.value.report.failures


def test_weil_differential(so3):
    w = weil(so3)
    W = w.W
    assert W.d.image("t1") == W.element("-t2*t3 + s:t1")
    assert W.d.image("s:t1") == W.element("s:t2*t3 - t2*s:t3")
    assert w.iota_star(W.element("t1*s:t2 + t2")) == so3.element("t2")
    assert w.shift_of(W.element("t1*t2")) == W.element("s:t1*t2 - t1*s:t2")
    assert check_differential(W)


def test_weil_free_iso(so3):
    w = weil(so3)
    f, f_inv, F = weil_free_iso(w)
    assert f(F.var("dt1")) == w.W.d.image("t1")
    assert f_inv(w.W.var("s:t1")) == F.element("dt1 + t2*t3")


def test_free_dgca():
    F = free_dgca([1, 2])
    assert [g.degree for g in F.generators] == [1, 2, 2, 3]
    assert F.d.image("a2") == F.var("da2")
    with pytest.raises(AlgebraError):
        free_dgca([0])


def test_shifted_u1():
    p = shifted_u1(3)
    assert p.generators[0].degree == 3 and p.d.image("b").is_zero()
    with pytest.raises(AlgebraError):
        shifted_u1(0)


def test_inner_crossed_module_is_weil(so3):
    inn = crossed_module_to_ce(CrossedModuleData.inner(so3_constants()))
    assert inn.d.image("t1") == inn.element("-t2*t3 - b1")
    assert inn.d.image("b1") == inn.element("-t2*b3 + t3*b2")
    W = weil(so3).W
    f = Morphism(inn, W, {"t1": W.var("t1"), "t2": W.var("t2"), "t3": W.var("t3"),
                          "b1": -W.var("s:t1"), "b2": -W.var("s:t2"), "b3": -W.var("s:t3")})
    assert check_morphism(f)


def test_crossed_module_failures():
    with pytest.raises(CrossedModuleError):
        crossed_module_to_ce(broken_crossed_module())
    g = so3_constants()
    cm = CrossedModuleData(g, 3, {(a, a): 1 for a in range(1, 4)}, dict(g.constants), h_bracket={})
    with pytest.raises(CrossedModuleError):
        crossed_module_to_ce(cm)
    with pytest.raises(AlgebraError):
        CrossedModuleData(g, 1, {(4, 1): 1})


def test_weil_morphism(so3):
    swap = Morphism(so3, so3, {"t1": so3.var("t2"), "t2": so3.var("t1"), "t3": -so3.var("t3")})
    assert check_morphism(swap)
    w = weil(so3)
    Wf = weil_morphism(swap, w, w)
    assert Wf(w.W.var("s:t3")) == -w.W.var("s:t3")
