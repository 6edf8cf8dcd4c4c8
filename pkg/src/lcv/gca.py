"""Graded-commutative polynomial algebras over the rationals.

A monomial is a tuple of ``(generator id, exponent)`` pairs sorted by id.
Odd generators appear with exponent 1 only.  The canonical sign of a
monomial is the one obtained by writing its factors in ascending id order,
so two elements are equal exactly when their term dictionaries are equal.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import config
from .errors import AlgebraError, LimitError

Monomial = tuple  # tuple[tuple[int, int], ...]
UNIT: Monomial = ()

Scalar = Union[int, Fraction]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise AlgebraError("booleans are not coefficients")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise AlgebraError(f"not a rational number: {value!r}")
    raise AlgebraError(f"coefficients must be exact rationals, got {type(value).__name__}")


@dataclass(frozen=True)
class Generator:
    id: int
    name: str
    degree: int
    shift_of: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise AlgebraError("generator names must be nonempty strings")
        if not isinstance(self.degree, int) or self.degree < 1:
            raise AlgebraError(f"generator {self.name!r} has degree {self.degree}; degrees must be >= 1")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


class GradedAlgebra:
    """Free graded-commutative algebra on a finite list of generators."""

    __slots__ = ("generators", "degrees", "odd", "_index", "_hash")

    def __init__(self, generators: Iterable):
        gens = []
        raw = list(generators)
        names = {}
        for i, g in enumerate(raw):
            if isinstance(g, Generator):
                name, degree, shift = g.name, g.degree, g.shift_of
            else:
                name, degree, *rest = g
                shift = rest[0] if rest else None
            if name in names:
                raise AlgebraError(f"duplicate generator name {name!r}")
            names[name] = i
            gens.append((name, degree, shift))
        built = []
        for i, (name, degree, shift) in enumerate(gens):
            if isinstance(shift, str):
                if shift not in names:
                    raise AlgebraError(f"{name!r} is declared the shift of unknown generator {shift!r}")
                shift = names[shift]
            gen = Generator(i, name, degree, shift)
            built.append(gen)
        for gen in built:
            if gen.shift_of is not None:
                if not 0 <= gen.shift_of < len(built) or gen.shift_of == gen.id:
                    raise AlgebraError(f"bad shift link on {gen.name!r}")
                if gen.degree != built[gen.shift_of].degree + 1:
                    raise AlgebraError(
                        f"{gen.name!r} has degree {gen.degree} but shifts "
                        f"{built[gen.shift_of].name!r} of degree {built[gen.shift_of].degree}"
                    )
        self.generators = tuple(built)
        self.degrees = tuple(g.degree for g in built)
        self.odd = tuple(g.degree % 2 == 1 for g in built)
        self._index = names
        self._hash = hash(self.generators)

    # identity

    @property
    def algebra(self) -> "GradedAlgebra":
        return self

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return self._hash == other._hash and self.generators == other.generators

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.generators)

    def __repr__(self):
        inner = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"GradedAlgebra({inner})"

    # lookup

    def index(self, key) -> int:
        if isinstance(key, Generator):
            key = key.id
        if isinstance(key, int) and not isinstance(key, bool):
            if 0 <= key < len(self.generators):
                return key
            raise AlgebraError(f"no generator with id {key}")
        try:
            return self._index[key]
        except KeyError:
            raise AlgebraError(f"unknown generator {key!r}")

    def gen(self, key) -> Generator:
        return self.generators[self.index(key)]

    def has(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> list:
        return [g.name for g in self.generators]

    # element constructors

    def zero(self) -> "Element":
        return Element(self, {})

    def one(self) -> "Element":
        return Element(self, {UNIT: Fraction(1)})

    def scalar(self, c) -> "Element":
        c = as_fraction(c)
        return Element(self, {UNIT: c} if c else {})

    def var(self, key) -> "Element":
        return Element(self, {((self.index(key), 1),): Fraction(1)})

    def monomial(self, m: Monomial, coeff=1) -> "Element":
        c = as_fraction(coeff)
        return Element(self, {m: c} if c else {})

    def element(self, text: str) -> "Element":
        return parse(self, text)

    # monomial arithmetic

    def mono_degree(self, m: Monomial) -> int:
        degs = self.degrees
        return sum(degs[g] * e for g, e in m)

    def mono_mul(self, m1: Monomial, m2: Monomial):
        """Return ``(sign, monomial)`` with ``m1*m2 = sign*monomial``; sign 0 if it vanishes."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        odd = self.odd
        cap = config.limits().exponent_cap
        out = []
        i = j = 0
        n1, n2 = len(m1), len(m2)
        remaining_odd = sum(1 for g, _ in m1 if odd[g])
        parity = 0
        while i < n1 and j < n2:
            g1, e1 = m1[i]
            g2, e2 = m2[j]
            if g1 < g2:
                out.append(m1[i])
                if odd[g1]:
                    remaining_odd -= 1
                i += 1
            elif g2 < g1:
                if odd[g2]:
                    parity += remaining_odd
                out.append(m2[j])
                j += 1
            else:
                if odd[g1]:
                    return 0, None
                e = e1 + e2
                if e > cap:
                    raise LimitError(f"exponent {e} of {self.generators[g1].name!r} exceeds cap {cap}")
                out.append((g1, e))
                i += 1
                j += 1
        if i < n1:
            out.extend(m1[i:])
        elif j < n2:
            out.extend(m2[j:])
        return (-1 if parity & 1 else 1), tuple(out)

    def word_to_monomial(self, word: Sequence[int]):
        """Sort a word of generator ids; return ``(sign, monomial)`` (sign 0 if it vanishes)."""
        odd = self.odd
        odds = [g for g in word if odd[g]]
        parity = 0
        for a in range(len(odds)):
            x = odds[a]
            for b in range(a + 1, len(odds)):
                y = odds[b]
                if x == y:
                    return 0, None
                if x > y:
                    parity += 1
        counts = Counter(word)
        cap = config.limits().exponent_cap
        for g, e in counts.items():
            if e > cap:
                raise LimitError(f"exponent {e} of {self.generators[g].name!r} exceeds cap {cap}")
        return (-1 if parity & 1 else 1), tuple(sorted(counts.items()))

    def format_monomial(self, m: Monomial) -> str:
        if not m:
            return "1"
        parts = []
        for g, e in m:
            name = self.generators[g].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts)


def term_key(alg: GradedAlgebra, m: Monomial):
    return (alg.mono_degree(m), m)


class Element:
    """Finite rational combination of normalized monomials.  Treat as immutable."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: GradedAlgebra, terms: Mapping):
        self.alg = alg
        self.terms = terms

    # helpers

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.alg is not self.alg and other.alg != self.alg:
                raise AlgebraError("elements belong to different algebras")
            return other
        return self.alg.scalar(other)

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        """Common degree of all terms, ``None`` for zero; raises on mixed degree."""
        degs = {self.alg.mono_degree(m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise AlgebraError(f"element of mixed degree {sorted(degs)}: {self}")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({self.alg.mono_degree(m) for m in self.terms}) <= 1

    def coefficient(self, m) -> Fraction:
        if isinstance(m, str):
            single = parse(self.alg, m)
            if len(single.terms) != 1:
                raise AlgebraError(f"{m!r} is not a single monomial")
            (m, c), = single.terms.items()
            return self.terms.get(m, Fraction(0)) / c
        return self.terms.get(m, Fraction(0))

    def sorted_terms(self) -> list:
        alg = self.alg
        return sorted(self.terms.items(), key=lambda kv: term_key(alg, kv[0]))

    def generators_used(self) -> set:
        return {g for m in self.terms for g, _ in m}

    def homogeneous_part(self, degree: int) -> "Element":
        alg = self.alg
        return Element(alg, {m: c for m, c in self.terms.items() if alg.mono_degree(m) == degree})

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Element(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Element":
        c = as_fraction(c)
        if not c:
            return self.alg.zero()
        return Element(self.alg, {m: c * v for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        other = self._coerce(other)
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        return self.scale(1 / as_fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative powers are undefined")
        result = self.alg.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Element):
            return (self.alg is other.alg or self.alg == other.alg) and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == self.alg.scalar(other).terms
        return NotImplemented

    __hash__ = None

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({format_element(self)})"


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_element(x: Element) -> str:
    if not x.terms:
        return "0"
    pieces = []
    for m, c in x.sorted_terms():
        sign = "-" if c < 0 else "+"
        a = -c if c < 0 else c
        if not m:
            body = format_coefficient(a)
        elif a == 1:
            body = x.alg.format_monomial(m)
        else:
            body = f"{format_coefficient(a)}*{x.alg.format_monomial(m)}"
        pieces.append((sign, body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][\w:'.]*)|(?P<op>[-+*^()]))")


def _tokens(text: str):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise AlgebraError(f"cannot parse {text!r} at position {pos}")
        pos = m.end()
        kind = m.lastgroup
        yield kind, m.group(kind), m.start(kind)


def parse(alg: GradedAlgebra, text: str) -> Element:
    """Parse text such as ``"-1/2*t1*t2 + s:t1^2"`` into an element of ``alg``.

    Terms are products of an optional rational coefficient and factors
    ``name`` or ``name^k``; factors are multiplied in the written order,
    so the Koszul sign of the reordering is applied.
    """
    toks = list(_tokens(text))
    if not toks:
        raise AlgebraError("empty expression")
    raw = []
    i = 0
    sign = 1
    pending = False
    while i < len(toks):
        kind, val, pos = toks[i]
        if kind == "op" and val in "+-":
            sign = sign * (-1 if val == "-" else 1)
            pending = True
            i += 1
            continue
        coeff = Fraction(sign)
        word = []
        seen_factor = False
        while i < len(toks):
            kind, val, pos = toks[i]
            if kind == "num":
                if seen_factor and not (i > 0 and toks[i - 1][1] == "*"):
                    raise AlgebraError(f"unexpected number at position {pos} in {text!r}")
                coeff *= Fraction(val)
                seen_factor = True
                i += 1
            elif kind == "name":
                gid = alg.index(val)
                exp = 1
                if i + 1 < len(toks) and toks[i + 1][1] == "^":
                    if i + 2 >= len(toks) or toks[i + 2][0] != "num" or "/" in toks[i + 2][1]:
                        raise AlgebraError(f"bad exponent after {val!r} in {text!r}")
                    exp = int(toks[i + 2][1])
                    i += 2
                word.extend([gid] * exp)
                seen_factor = True
                i += 1
            elif kind == "op" and val == "*":
                if not seen_factor:
                    raise AlgebraError(f"dangling '*' at position {pos} in {text!r}")
                i += 1
            elif kind == "op" and val in "+-":
                break
            else:
                raise AlgebraError(f"unexpected {val!r} at position {pos} in {text!r}")
        if not seen_factor:
            raise AlgebraError(f"missing term in {text!r}")
        raw.append((coeff, word))
        sign = 1
        pending = False
    if pending or not raw:
        raise AlgebraError(f"expression {text!r} ends without a term")
    return normalize_ids(alg, raw)


def normalize_ids(alg: GradedAlgebra, raw) -> Element:
    out = {}
    for coeff, word in raw:
        c = as_fraction(coeff)
        if not c:
            continue
        s, m = alg.word_to_monomial(list(word))
        if not s:
            continue
        v = out.get(m, 0) + s * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return Element(alg, out)


def normalize(alg: GradedAlgebra, raw) -> Element:
    """Build an element from ``(coefficient, [generator names in written order])`` pairs."""
    return normalize_ids(alg, [(c, [alg.index(n) for n in names]) for c, names in raw])


def multiply(a: Element, b: Element) -> Element:
    if a.alg is not b.alg and a.alg != b.alg:
        raise AlgebraError("cannot multiply elements of different algebras")
    alg = a.alg
    out = {}
    mono_mul = alg.mono_mul
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s, m = mono_mul(m1, m2)
            if not s:
                continue
            v = out.get(m, 0) + (c1 * c2 if s > 0 else -(c1 * c2))
            if v:
                out[m] = v
            else:
                del out[m]
    return Element(alg, out)


def linear_combine(coeffs: Sequence, elems: Sequence[Element], alg: GradedAlgebra = None) -> Element:
    if len(coeffs) != len(elems):
        raise AlgebraError("coefficient and element lists differ in length")
    if alg is None:
        if not elems:
            raise AlgebraError("empty combination needs an explicit algebra")
        alg = elems[0].alg
    out = {}
    for c, x in zip(coeffs, elems):
        if x.alg is not alg and x.alg != alg:
            raise AlgebraError("elements belong to different algebras")
        c = as_fraction(c)
        if not c:
            continue
        for m, v in x.terms.items():
            w = out.get(m, 0) + c * v
            if w:
                out[m] = w
            else:
                out.pop(m, None)
    return Element(alg, out)


def _accumulate(out: dict, m, c):
    v = out.get(m, 0) + c
    if v:
        out[m] = v
    else:
        out.pop(m, None)


class Derivation:
    """Graded derivation given by generator images; unlisted generators map to zero."""

    __slots__ = ("alg", "degree", "images", "_cache")

    def __init__(self, alg, degree: int, images: Mapping):
        alg = alg.algebra
        self.alg = alg
        self.degree = degree
        self.images = {}
        for key, img in images.items():
            gid = alg.index(key)
            if not isinstance(img, Element):
                img = alg.scalar(img)
            elif img.alg is not alg and img.alg != alg:
                raise AlgebraError(f"image of {alg.generators[gid].name!r} lies in another algebra")
            if img.terms:
                d = img.degree()
                if d != alg.degrees[gid] + degree:
                    raise AlgebraError(
                        f"image of {alg.generators[gid].name!r} has degree {d}, "
                        f"expected {alg.degrees[gid] + degree}"
                    )
                self.images[gid] = img
        self._cache = {}

    def image(self, key) -> Element:
        return self.images.get(self.alg.index(key), self.alg.zero())

    def on_monomial(self, m: Monomial) -> dict:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        alg = self.alg
        mono_mul = alg.mono_mul
        degs = alg.degrees
        odd_d = self.degree % 2 == 1
        out = {}
        prefix_deg = 0
        for pos, (g, e) in enumerate(m):
            img = self.images.get(g)
            if img is not None:
                before = m[:pos]
                after = m[pos + 1:]
                if e > 1:
                    after = ((g, e - 1),) + after
                base = -e if (odd_d and prefix_deg % 2) else e
                for mi, ci in img.terms.items():
                    s1, mm = mono_mul(before, mi)
                    if not s1:
                        continue
                    s2, mm = mono_mul(mm, after)
                    if not s2:
                        continue
                    _accumulate(out, mm, base * s1 * s2 * ci)
            prefix_deg += degs[g] * e
        self._cache[m] = out
        return out

    def __call__(self, x: Element) -> Element:
        return apply_derivation(self, x)

    def __repr__(self):
        inner = ", ".join(f"{self.alg.generators[g].name} -> {img}" for g, img in sorted(self.images.items()))
        return f"Derivation(degree={self.degree}; {inner})"


def apply_derivation(D: Derivation, x: Element) -> Element:
    if x.alg is not D.alg and x.alg != D.alg:
        raise AlgebraError("derivation applied to an element of another algebra")
    out = {}
    for m, c in x.terms.items():
        for mm, v in D.on_monomial(m).items():
            _accumulate(out, mm, c * v)
    return Element(D.alg, out)


def graded_commutator(D1: Derivation, D2: Derivation) -> Derivation:
    if D1.alg != D2.alg:
        raise AlgebraError("derivations act on different algebras")
    alg = D1.alg
    sign = -1 if (D1.degree * D2.degree) % 2 else 1
    images = {}
    for g in range(len(alg.generators)):
        v = alg.var(g)
        img = D1(D2(v)) - D2(D1(v)).scale(sign)
        if img.terms:
            images[g] = img
    return Derivation(alg, D1.degree + D2.degree, images)


class Morphism:
    """Degree-preserving algebra map given by generator images.

    ``source`` and ``target`` may be bare algebras or presentations; the
    map only uses their underlying graded algebras, while checks against
    differentials look at the presentations.
    """

    __slots__ = ("source", "target", "images", "name", "_cache")

    def __init__(self, source, target, images: Mapping, name: str = ""):
        self.source = source
        self.target = target
        self.name = name
        src, tgt = source.algebra, target.algebra
        self.images = {}
        for key, img in images.items():
            gid = src.index(key)
            if not isinstance(img, Element):
                img = tgt.scalar(img)
            elif img.alg is not tgt and img.alg != tgt:
                raise AlgebraError(f"image of {src.generators[gid].name!r} is not in the target algebra")
            if img.terms and img.degree() != src.degrees[gid]:
                raise AlgebraError(
                    f"image of {src.generators[gid].name!r} has degree {img.degree()}, "
                    f"expected {src.degrees[gid]}"
                )
            self.images[gid] = img
        self._cache = {}

    def image(self, key) -> Element:
        gid = self.source.algebra.index(key)
        if gid not in self.images:
            raise AlgebraError(f"unmapped generator {self.source.algebra.generators[gid].name!r}")
        return self.images[gid]

    def on_monomial(self, m: Monomial) -> Element:
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        tgt = self.target.algebra
        result = tgt.one()
        for g, e in m:
            img = self.images.get(g)
            if img is None:
                raise AlgebraError(f"unmapped generator {self.source.algebra.generators[g].name!r}")
            for _ in range(e):
                result = multiply(result, img)
                if not result.terms:
                    break
            if not result.terms:
                break
        self._cache[m] = result
        return result

    def on_word(self, word: Sequence[int]) -> Element:
        tgt = self.target.algebra
        result = tgt.one()
        for g in word:
            img = self.images.get(g)
            if img is None:
                raise AlgebraError(f"unmapped generator {self.source.algebra.generators[g].name!r}")
            result = multiply(result, img)
            if not result.terms:
                break
        return result

    def __call__(self, x: Element) -> Element:
        return apply_morphism(self, x)

    def __repr__(self):
        src = self.source.algebra
        inner = ", ".join(f"{src.generators[g].name} -> {img}" for g, img in sorted(self.images.items()))
        return f"Morphism({self.name or '?'}: {inner})"


def apply_morphism(f: Morphism, x: Element) -> Element:
    src = f.source.algebra
    if x.alg is not src and x.alg != src:
        raise AlgebraError("morphism applied to an element outside its source")
    out = {}
    for m, c in x.terms.items():
        for mm, v in f.on_monomial(m).terms.items():
            _accumulate(out, mm, c * v)
    return Element(f.target.algebra, out)


def compose(f: Morphism, g: Morphism, name: str = "") -> Morphism:
    """``f ∘ g``: apply g first."""
    if g.target.algebra != f.source.algebra:
        raise AlgebraError("morphisms are not composable")
    images = {gid: f(g.image(gid)) for gid in range(len(g.source.algebra.generators))}
    return Morphism(g.source, f.target, images, name=name or f"{f.name}∘{g.name}")


def identity(space, name: str = "id") -> Morphism:
    alg = space.algebra
    return Morphism(space, space, {g.id: alg.var(g.id) for g in alg.generators}, name=name)


def augmentation(source, target, name: str = "0") -> Morphism:
    """The projection to scalars: every generator goes to zero."""
    zero = target.algebra.zero()
    return Morphism(source, target, {g.id: zero for g in source.algebra.generators}, name=name)


def by_name(source, target, name: str = "", missing_to_zero: bool = False) -> Morphism:
    """Send each source generator to the target generator with the same name."""
    src, tgt = source.algebra, target.algebra
    images = {}
    for g in src.generators:
        if tgt.has(g.name):
            if tgt.gen(g.name).degree != g.degree:
                raise AlgebraError(f"generator {g.name!r} changes degree")
            images[g.id] = tgt.var(g.name)
        elif missing_to_zero:
            images[g.id] = tgt.zero()
        else:
            raise AlgebraError(f"target has no generator named {g.name!r}")
    return Morphism(source, target, images, name=name)


def transport(x: Element, target) -> Element:
    """Re-read an element in another algebra through matching generator names."""
    if x.alg == target.algebra:
        return Element(target.algebra, x.terms)
    used = x.generators_used()
    src = x.alg
    mapping = {}
    tgt = target.algebra
    for g in used:
        gen = src.generators[g]
        if not tgt.has(gen.name) or tgt.gen(gen.name).degree != gen.degree:
            raise AlgebraError(f"cannot transport: target lacks {gen.name!r} in degree {gen.degree}")
        mapping[g] = tgt.index(gen.name)
    raw = []
    for m, c in x.terms.items():
        word = [mapping[g] for g, e in m for _ in range(e)]
        raw.append((c, word))
    return normalize_ids(tgt, raw)


@lru_cache(maxsize=4096)
def _basis(alg: GradedAlgebra, degree: int) -> tuple:
    gens = alg.generators
    out = []
    acc = []

    def rec(i, remaining):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if i == len(gens):
            return
        g = gens[i]
        top = 1 if g.odd else remaining // g.degree
        top = min(top, remaining // g.degree)
        for e in range(top, 0, -1):
            acc.append((g.id, e))
            rec(i + 1, remaining - e * g.degree)
            acc.pop()
        rec(i + 1, remaining)

    rec(0, degree)
    out.sort()
    return tuple(out)


def monomial_basis(space, degree: int) -> list:
    if degree < 0:
        raise AlgebraError("degree must be >= 0")
    return list(_basis(space.algebra, degree))
