from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brute import bubble_sign
from lcv import config
from lcv.errors import AlgebraError, LimitError
from lcv.gca import (
    Derivation,
    GradedAlgebra,
    Morphism,
    apply_derivation,
    augmentation,
    by_name,
    compose,
    graded_commutator,
    identity,
    linear_combine,
    monomial_basis,
    normalize,
    normalize_ids,
    parse,
    transport,
)

# two odd, two even generators
ALG = GradedAlgebra([("x", 1), ("y", 1), ("u", 2), ("v", 3), ("w", 4)])


def words(max_len=5):
    return st.lists(st.integers(0, len(ALG) - 1), max_size=max_len)


def elements(max_terms=4):
    term = st.tuples(st.integers(-4, 4), words(4))
    return st.lists(term, max_size=max_terms).map(lambda raw: _from_raw(raw))


def _from_raw(raw):
    return normalize_ids(ALG, raw)


class TestMonomials:
    def test_odd_square_vanishes(self):
        assert ALG.element("x*x").is_zero()
        assert ALG.element("v*x*v").is_zero()

    def test_even_powers(self):
        assert ALG.element("u*u") == ALG.element("u^2")
        assert ALG.element("u^3").coefficient("u^3") == 1

    def test_koszul_swap(self):
        assert ALG.element("y*x") == -ALG.element("x*y")
        assert ALG.element("u*x") == ALG.element("x*u")
        assert ALG.element("v*x") == -ALG.element("x*v")

    def test_parse_format_roundtrip(self):
        x = parse(ALG, "-1/2*x*y + u^2 - 3*v + 2")
        assert str(x) == "2 - 1/2*x*y - 3*v + u^2"
        assert parse(ALG, str(x)) == x

    @pytest.mark.parametrize("bad", ["x +", "* x", "x^", "q", "x^1/2", ""])
    def test_parse_errors(self, bad):
        with pytest.raises(AlgebraError):
            parse(ALG, bad)

    def test_normalize_by_names(self):
        x = normalize(ALG, [(1, ["y", "x"]), (1, ["x", "y"])])
        assert x.is_zero()

    def test_mixed_degree_raises(self):
        with pytest.raises(AlgebraError):
            (ALG.var("x") + ALG.var("u")).degree()

    def test_basis_degree_zero_is_unit(self):
        assert monomial_basis(ALG, 0) == [()]

    def test_basis_counts(self):
        # degree 4: x*v, y*v, x*y*u, u^2, w
        assert len(monomial_basis(ALG, 4)) == 5
        assert monomial_basis(ALG, 4) == sorted(monomial_basis(ALG, 4))

    def test_exponent_cap(self):
        with config.override(exponent_cap=3):
            with pytest.raises(LimitError):
                ALG.element("u^4")

    def test_duplicate_names_rejected(self):
        with pytest.raises(AlgebraError):
            GradedAlgebra([("a", 1), ("a", 2)])

    def test_shift_link_degree(self):
        with pytest.raises(AlgebraError):
            GradedAlgebra([("a", 1), ("s:a", 3, "a")])


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(words(7))
    def test_sign_matches_bubble_sort(self, word):
        s, m = ALG.word_to_monomial(word)
        bs, sorted_word = bubble_sign(ALG.degrees, word)
        assert s == bs
        if s:
            assert tuple(g for g, e in m for _ in range(e)) == sorted_word

    @settings(max_examples=150, deadline=None)
    @given(elements(), elements())
    def test_graded_commutativity(self, a, b):
        for da in {ALG.mono_degree(m) for m in a.terms}:
            for db in {ALG.mono_degree(m) for m in b.terms}:
                x, y = a.homogeneous_part(da), b.homogeneous_part(db)
                assert x * y == (y * x).scale((-1) ** (da * db))

    @settings(max_examples=150, deadline=None)
    @given(elements(3), elements(3), elements(3))
    def test_associativity(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @settings(max_examples=150, deadline=None)
    @given(elements(3), elements(3), elements(3))
    def test_distributivity(self, a, b, c):
        assert a * (b + c) == a * b + a * c

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(-3, 3), words(4)), max_size=5))
    def test_normalization_idempotent(self, raw):
        x = _from_raw(raw)
        again = _from_raw([(c, [g for g, e in m for _ in range(e)]) for m, c in x.terms.items()])
        assert again == x
        if x.terms:
            assert parse(ALG, str(x)) == x

    @settings(max_examples=100, deadline=None)
    @given(elements(3), elements(3))
    def test_leibniz(self, a, b):
        D = Derivation(ALG, 1, {"x": ALG.element("u"), "y": ALG.element("x*y"), "u": ALG.element("v"),
                                "v": ALG.element("u^2 + x*v")})
        for da in {ALG.mono_degree(m) for m in a.terms}:
            x = a.homogeneous_part(da)
            assert D(x * b) == D(x) * b + (x * D(b)).scale((-1) ** da)


class TestDerivations:
    def test_unlisted_generators_vanish(self):
        D = Derivation(ALG, 1, {"x": ALG.var("u")})
        assert D(ALG.var("y")).is_zero()
        assert D(ALG.element("x*y")) == ALG.element("u*y")

    def test_even_exponent_rule(self):
        D = Derivation(ALG, 1, {"u": ALG.var("v")})
        assert D(ALG.element("u^3")) == ALG.element("3*u^2*v")

    def test_degree_checked(self):
        with pytest.raises(AlgebraError):
            Derivation(ALG, 1, {"x": ALG.var("v")})

    def test_commutator_of_odd_derivations(self):
        D = Derivation(ALG, 1, {"x": ALG.var("u")})
        E = Derivation(ALG, -1, {"u": ALG.var("x")})
        K = graded_commutator(D, E)
        assert K.degree == 0
        x = ALG.element("x*u")
        assert K(x) == D(E(x)) + E(D(x))
        assert apply_derivation(D, x) == D(x)


class TestMorphisms:
    def setup_method(self):
        self.B = GradedAlgebra([("p", 1), ("q", 2)])

    def test_apply_and_compose(self):
        f = Morphism(ALG, self.B, {"x": self.B.var("p"), "y": 0, "u": self.B.var("q"), "v": self.B.element("p*q"),
                                  "w": self.B.element("q^2")})
        assert f(ALG.element("x*u + w")) == self.B.element("p*q + q^2")
        g = identity(self.B)
        assert compose(g, f)(ALG.element("v")) == self.B.element("p*q")

    def test_unmapped_generator_is_an_error(self):
        f = Morphism(ALG, self.B, {"x": self.B.var("p")})
        with pytest.raises(AlgebraError):
            f(ALG.var("u"))

    def test_degree_mismatch(self):
        with pytest.raises(AlgebraError):
            Morphism(ALG, self.B, {"x": self.B.var("q")})

    def test_augmentation_and_by_name(self):
        z = augmentation(ALG, self.B)
        assert z(ALG.element("3 + x*u")) == 3
        C = GradedAlgebra([("x", 1), ("u", 2)])
        f = by_name(C, ALG)
        assert f(C.element("x*u")) == ALG.element("x*u")
        with pytest.raises(AlgebraError):
            by_name(ALG, C)
        assert by_name(ALG, C, missing_to_zero=True)(ALG.element("x*u + y*x")) == C.element("x*u")

    def test_transport(self):
        C = GradedAlgebra([("u", 2), ("x", 1)])
        assert transport(ALG.element("x*u"), C) == C.element("u*x")

    def test_linear_combine(self):
        x = linear_combine([Fraction(1, 2), 2], [ALG.var("u"), ALG.var("u")])
        assert x == ALG.element("5/2*u")
