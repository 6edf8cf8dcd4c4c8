"""Degree-wise cohomology, invariant polynomials and suspension witnesses."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import config
from .dgca import DgcaPresentation
from .errors import AlgebraError, LimitError, VerificationError
from .families import WeilPackage
from .gca import Derivation, Element, monomial_basis
from .linalg import mat_mul, nullspace, random_prime, rank, rank_mod_p, rref, solve, transpose


def _cap(degree: int, max_degree: Optional[int]):
    cap = max_degree if max_degree is not None else config.limits().max_degree
    if degree > cap:
        raise LimitError(f"degree {degree} exceeds the degree cap {cap} (set --max-degree or LINFTY_MAX_DEGREE)")
    if degree < 0:
        raise AlgebraError("degree must be >= 0")


def _d_matrix(p: DgcaPresentation, src, tgt):
    index = {m: i for i, m in enumerate(tgt)}
    rows = [[Fraction(0)] * len(src) for _ in tgt]
    for j, m in enumerate(src):
        for mm, c in p.d.on_monomial(m).items():
            rows[index[mm]][j] = c
    return rows


def vector_to_element(p, basis, v) -> Element:
    alg = p.algebra
    return Element(alg, {m: c for m, c in zip(basis, v) if c})


def element_to_vector(x: Element, basis) -> list:
    index = {m: i for i, m in enumerate(basis)}
    v = [Fraction(0)] * len(basis)
    for m, c in x.terms.items():
        if m not in index:
            raise AlgebraError("element has a monomial outside the given basis")
        v[index[m]] = c
    return v


@dataclass
class DegreeSlice:
    algebra: DgcaPresentation
    degree: int
    basis: list
    basis_prev: list
    basis_next: list
    d_out: list  # len(basis_next) x len(basis)
    d_in: list   # len(basis) x len(basis_prev)

    def image_columns(self) -> list:
        return transpose(self.d_in, len(self.basis), len(self.basis_prev))


def differential_matrix(p: DgcaPresentation, degree: int, max_degree: Optional[int] = None) -> DegreeSlice:
    _cap(degree + 1, max_degree)
    basis = monomial_basis(p, degree)
    prev = monomial_basis(p, degree - 1) if degree > 0 else []
    nxt = monomial_basis(p, degree + 1)
    d_out = _d_matrix(p, basis, nxt)
    d_in = _d_matrix(p, prev, basis)
    if basis and prev and nxt:
        prod = mat_mul(d_out, d_in, len(basis), len(prev))
        if any(v for row in prod for v in row):
            raise VerificationError(f"matrix nilpotency fails in degree {degree}")
    return DegreeSlice(p, degree, basis, prev, nxt, d_out, d_in)


@dataclass
class CohomologyResult:
    degree: int
    dim_kernel: int
    dim_image: int
    dim_H: int
    representatives: list
    modular_prime: Optional[int] = None
    modular_agrees: Optional[bool] = None
    notes: dict = field(default_factory=dict)


def _complement(image_vectors, kernel_vectors):
    """Greedily pick kernel vectors, in order, that are independent modulo the image."""
    chosen = []
    current = [list(v) for v in image_vectors]
    r = rank(current) if current else 0
    for z in kernel_vectors:
        trial = current + [list(z)]
        r2 = rank(trial)
        if r2 > r:
            chosen.append(z)
            current = trial
            r = r2
    return chosen


def _echelon_basis(vectors, ncols):
    if not vectors:
        return []
    R, _ = rref(vectors, ncols)
    return R


def cohomology(p: DgcaPresentation, degree: int, max_degree: Optional[int] = None,
               modular_check: bool = True, rng: Optional[random.Random] = None) -> CohomologyResult:
    s = differential_matrix(p, degree, max_degree)
    n = len(s.basis)
    kernel = nullspace(s.d_out, n) if s.basis_next else [
        [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    image = _echelon_basis(s.image_columns(), n)
    dim_image = len(image)
    reps_v = _complement(image, kernel)
    reps = [vector_to_element(p, s.basis, v) for v in reps_v]
    for r in reps:
        if not p.d(r).is_zero():
            raise VerificationError("cohomology representative is not closed")
    if reps and rank(image + [list(v) for v in reps_v]) != dim_image + len(reps):
        raise VerificationError("cohomology representatives are dependent modulo the image")
    result = CohomologyResult(degree, len(kernel), dim_image, len(kernel) - dim_image, reps)
    if result.dim_H != len(reps):
        raise VerificationError("representative count disagrees with the dimension")
    if modular_check:
        prime = random_prime(30, rng)
        out_rank = n - len(kernel)
        agree = rank_mod_p(s.d_out, prime, n) == out_rank if s.basis_next and n else True
        if s.basis_prev and n:
            agree = agree and rank_mod_p(s.d_in, prime, len(s.basis_prev)) == dim_image
        result.modular_prime = prime
        result.modular_agrees = agree
    return result


def coboundary_witness(p: DgcaPresentation, x: Element, max_degree: Optional[int] = None):
    """Some ``y`` with ``d y = x``, or ``None`` if ``x`` is not exact."""
    if x.is_zero():
        return p.zero()
    deg = x.degree()
    if deg == 0:
        return None
    _cap(deg, max_degree)
    prev = monomial_basis(p, deg - 1)
    basis = monomial_basis(p, deg)
    M = _d_matrix(p, prev, basis)
    sol = solve(M, element_to_vector(x, basis), len(prev))
    if sol is None:
        return None
    y = vector_to_element(p, prev, sol)
    assert p.d(y) == x
    return y


class Subcomplex:
    """The largest subcomplex inside the span of monomials accepted by ``allowed``.

    In degree n it consists of combinations x of allowed monomials whose
    differential is again a combination of allowed monomials.
    """

    def __init__(self, p: DgcaPresentation, allowed: Callable, max_degree: Optional[int] = None):
        self.p = p
        self.allowed = allowed
        self.max_degree = max_degree
        self._cache = {}

    def span(self, n: int) -> list:
        return [m for m in monomial_basis(self.p, n) if self.allowed(m)] if n >= 0 else []

    def basis(self, n: int) -> list:
        """Basis vectors of the subcomplex in degree n, in coordinates of ``span(n)``."""
        if n in self._cache:
            return self._cache[n]
        _cap(n + 1, self.max_degree)
        V = self.span(n)
        if not V:
            self._cache[n] = []
            return []
        outside = [m for m in monomial_basis(self.p, n + 1) if not self.allowed(m)]
        if outside:
            M = _d_matrix(self.p, V, monomial_basis(self.p, n + 1))
            index = {m: i for i, m in enumerate(monomial_basis(self.p, n + 1))}
            rows = [M[index[m]] for m in outside]
            vecs = nullspace(rows, len(V))
        else:
            vecs = [[Fraction(int(i == j)) for j in range(len(V))] for i in range(len(V))]
        self._cache[n] = vecs
        return vecs

    def elements(self, n: int) -> list:
        V = self.span(n)
        return [vector_to_element(self.p, V, v) for v in self.basis(n)]

    def cohomology(self, n: int) -> CohomologyResult:
        V = self.span(n)
        A = self.basis(n)
        Vn1 = self.span(n + 1)
        # d restricted to the subcomplex lands in span(n + 1)
        dA = [element_to_vector(self.p.d(vector_to_element(self.p, V, a)), Vn1) for a in A]
        cycles_coeffs = nullspace(transpose(dA, len(dA), len(Vn1)), len(A)) if Vn1 else [
            [Fraction(int(i == j)) for j in range(len(A))] for i in range(len(A))]
        cycles = [[sum((c * a[k] for c, a in zip(coeffs, A)), Fraction(0)) for k in range(len(V))]
                  for coeffs in cycles_coeffs]
        prevV = self.span(n - 1)
        boundaries = [element_to_vector(self.p.d(vector_to_element(self.p, prevV, a)), V)
                      for a in self.basis(n - 1)] if n > 0 else []
        image = _echelon_basis(boundaries, len(V))
        reps_v = _complement(image, cycles)
        reps = [vector_to_element(self.p, V, v) for v in reps_v]
        return CohomologyResult(n, len(cycles), len(image), len(cycles) - len(image), reps)

    def coboundary_witness(self, x: Element):
        """``y`` in the subcomplex with ``d y = x``, or ``None``."""
        n = x.degree()
        if n is None:
            return self.p.zero()
        prevV = self.span(n - 1)
        A = self.basis(n - 1)
        if not A:
            return None
        V = self.span(n)
        try:
            target = element_to_vector(x, V)
        except AlgebraError:
            return None
        cols = [element_to_vector(self.p.d(vector_to_element(self.p, prevV, a)), V) for a in A]
        sol = solve(transpose(cols, len(cols), len(V)), target, len(A))
        if sol is None:
            return None
        y = vector_to_element(self.p, prevV,
                              [sum((c * a[k] for c, a in zip(sol, A)), Fraction(0)) for k in range(len(prevV))])
        assert self.p.d(y) == x
        return y


# Weil-algebra specific notions


def vertical_contractions(w: WeilPackage) -> list:
    """One contraction per unshifted generator; each kills all shifted generators."""
    alg = w.W.algebra
    out = []
    for gid in w.base_ids:
        g = alg.generators[gid]
        out.append(Derivation(alg, -g.degree, {gid: alg.one()}))
    return out


def _contraction_label(w: WeilPackage, X: Derivation) -> str:
    (gid,) = X.images
    return f"i_{w.W.algebra.generators[gid].name}"


@dataclass
class BasicCertificate:
    ok: bool
    contraction: str = ""
    which: str = ""
    expression: Optional[Element] = None

    def __bool__(self):
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "basic"
        return f"not basic: {self.contraction}({self.which}) = {self.expression}"


def is_basic(w: WeilPackage, x: Element) -> BasicCertificate:
    if not x.is_homogeneous():
        raise AlgebraError("is_basic needs a homogeneous element")
    dx = w.W.d(x)
    for X in vertical_contractions(w):
        v = X(x)
        if not v.is_zero():
            return BasicCertificate(False, _contraction_label(w, X), "x", v)
        v = X(dx)
        if not v.is_zero():
            return BasicCertificate(False, _contraction_label(w, X), "dx", v)
    return BasicCertificate(True)


def invariant_polynomials(w: WeilPackage, degree: int, max_degree: Optional[int] = None) -> list:
    """Basis of the degree-n solutions of i_X(w) = 0 and i_X(d w) = 0 for all vertical X."""
    _cap(degree + 1, max_degree)
    W = w.W
    basis = monomial_basis(W, degree)
    contractions = vertical_contractions(w)
    rows_index = {}
    entries = []
    for j, m in enumerate(basis):
        dm = W.d.on_monomial(m)
        for k, X in enumerate(contractions):
            for mm, c in X.on_monomial(m).items():
                entries.append(((k, 0, mm), j, c))
            for m2, c2 in dm.items():
                for mm, c in X.on_monomial(m2).items():
                    entries.append(((k, 1, mm), j, c * c2))
    acc = {}
    for key, j, c in entries:
        r = rows_index.setdefault(key, len(rows_index))
        acc[(r, j)] = acc.get((r, j), 0) + c
    rows = [[Fraction(0)] * len(basis) for _ in rows_index]
    for (r, j), c in acc.items():
        rows[r][j] = Fraction(c)
    sols = nullspace(rows, len(basis)) if rows else [
        [Fraction(int(i == j)) for j in range(len(basis))] for i in range(len(basis))]
    out = [vector_to_element(W, basis, v) for v in sols]
    shifted = set(w.shifted_ids)
    ordinary = all(W.algebra.degrees[g] == 1 for g in w.base_ids)
    for P in out:
        if ordinary:
            if any(g not in shifted for g in P.generators_used()):
                raise VerificationError("invariant polynomial involves unshifted generators")
            if not W.d(P).is_zero():
                raise VerificationError("invariant polynomial of an ordinary Lie algebra is not closed")
    return out


@dataclass
class SuspensionResult:
    witness: Optional[Element]
    rank_matrix: int
    rank_augmented: int
    search_dimension: int

    def __bool__(self):
        return self.witness is not None

    def describe(self) -> str:
        verdict = "suspends to 0" if self.witness is not None else "does not suspend to 0"
        return (f"{verdict}: rank d|ker(i*) = {self.rank_matrix}, "
                f"rank with P adjoined = {self.rank_augmented}, search space dim {self.search_dimension}")


def suspension_witness(w: WeilPackage, P: Element, max_degree: Optional[int] = None) -> SuspensionResult:
    """Look for alpha in ker(i*) with d alpha = P."""
    W = w.W
    if P.alg != W.algebra:
        raise AlgebraError("P must be an element of the Weil algebra")
    if not W.d(P).is_zero():
        raise AlgebraError("P is not closed")
    cert = is_basic(w, P)
    if not cert:
        raise AlgebraError(f"P is not basic: {cert.describe()}")
    n = P.degree()
    if n is None or n < 1:
        raise AlgebraError("P must be nonzero of positive degree")
    _cap(n, max_degree)
    shifted = set(w.shifted_ids)
    search = [m for m in monomial_basis(W, n - 1) if any(g in shifted for g, _ in m)]
    target_basis = monomial_basis(W, n)
    M = _d_matrix(W, search, target_basis)
    rhs = element_to_vector(P, target_basis)
    r = rank(M, len(search)) if search else 0
    aug = [row + [b] for row, b in zip(M, rhs)]
    r_aug = rank(aug, len(search) + 1)
    if r_aug > r:
        return SuspensionResult(None, r, r_aug, len(search))
    sol = solve(M, rhs, len(search))
    alpha = vector_to_element(W, search, sol)
    if W.d(alpha) != P or not w.iota_star(alpha).is_zero():
        raise VerificationError("suspension witness failed re-verification")
    return SuspensionResult(alpha, r, r_aug, len(search))
