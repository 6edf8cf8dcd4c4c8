"""Command-line front end.

Exit codes: 0 success, 1 a mathematical verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

from . import config
from .dgca import DgcaPresentation, Report, check_differential, check_morphism
from .errors import FormatError, LcvError, VerificationError
from .families import crossed_module_to_ce, lie_to_ce, weil
from .gca import Element, parse, transport
from .homology import cohomology, invariant_polynomials
from .io import (
    Loaded,
    bundled_names,
    dumps,
    element_to_terms,
    load,
    presentation_to_json,
)
from .obstruction import bf_lift_and_expand, check_normal, mapping_cone, obstruction_cocycle
from .transgression import (
    killing_form,
    quadratic_cs_formula,
    quadratic_polynomial,
    string_extension,
    transgress,
)


# formatting


def latex_name(name: str) -> str:
    shifts = 0
    while name.startswith("s:"):
        shifts += 1
        name = name[2:]
    m = re.fullmatch(r"([A-Za-z]+)(\d+)('*)", name)
    body = f"{m.group(1)}_{{{m.group(2)}}}{m.group(3)}" if m else name.replace("_", r"\_")
    return r"\sigma " * shifts + body


def latex_element(x: Element) -> str:
    if x.is_zero():
        return "0"
    alg = x.alg
    out = []
    for k, (m, c) in enumerate(x.sorted_terms()):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        factors = []
        for g, e in m:
            f = latex_name(alg.generators[g].name)
            factors.append(f if e == 1 else f"({f})^{{{e}}}")
        mono = r" \wedge ".join(factors)
        coef = "" if a == 1 and m else (str(a.numerator) if a.denominator == 1
                                        else rf"\frac{{{a.numerator}}}{{{a.denominator}}}")
        body = f"{coef} {mono}".strip()
        out.append((sign if k or sign == "-" else "") + (" " if k else "") + body)
    return " ".join(out)


def describe_presentation(p: DgcaPresentation) -> str:
    alg = p.algebra
    lines = [f"{p.name or p.kind}: {len(alg.generators)} generators ({p.kind})"]
    width = max(len(g.name) for g in alg.generators)
    for g in alg.generators:
        lines.append(f"  d {g.name.ljust(width)} = {p.d.image(g.id)}    [degree {g.degree}]")
    return "\n".join(lines)


def latex_presentation(p: DgcaPresentation) -> str:
    rows = [rf"  d {latex_name(g.name)} &= {latex_element(p.d.image(g.id))} \\" for g in p.generators]
    return "\\begin{aligned}\n" + "\n".join(rows) + "\n\\end{aligned}"


def latex_equations(pairs) -> str:
    rows = [rf"  {label} &= {latex_element(x)} \\" for label, x in pairs]
    return "\\begin{aligned}\n" + "\n".join(rows) + "\n\\end{aligned}"


class Output:
    def __init__(self, args):
        self.args = args

    @property
    def mode(self):
        if self.args.json:
            return "json"
        if self.args.latex:
            return "latex"
        return "text"

    def emit(self, text: str = "", doc=None, latex: str = None):
        if self.mode == "json":
            print(dumps(doc if doc is not None else {"text": text}), end="")
        elif self.mode == "latex" and latex is not None:
            print(latex)
        else:
            print(text)

    def save(self, doc):
        if self.args.out:
            Path(self.args.out).write_text(dumps(doc), encoding="utf-8")


def _terms(x: Element) -> list:
    return element_to_terms(x)


# inputs


def _load(args) -> Loaded:
    return load(args.file, verify=not args.no_verify)


def _presentation(args) -> tuple:
    L = _load(args)
    if L.presentation is None:
        raise FormatError(f"{L.source}: expected an algebra file, found a morphism file")
    return L.presentation, L


def _lie_presentation(p: DgcaPresentation, L: Loaded) -> DgcaPresentation:
    if "crossed_module" in L.metadata:
        return lie_to_ce(L.metadata["crossed_module"].g, name=p.name + ".g")
    if "lie" in L.metadata:
        return lie_to_ce(L.metadata["lie"], name=p.name)
    return p


def _polynomial(w, choice: str):
    """(P, matrix) where matrix is the symmetric form of a named quadratic polynomial, else False."""
    choice = (choice or "killing").strip()
    if choice == "killing":
        K = killing_form(w.ce)
        return quadratic_polynomial(w, K), K
    if choice == "delta":
        return quadratic_polynomial(w), None
    return parse(w.W.algebra, choice), False


def _degrees(raw) -> list:
    out = []
    for item in raw or []:
        for part in str(item).split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    return out


def _check_metadata(p: DgcaPresentation, L: Loaded) -> list:
    """Compare the file's differential with the one rebuilt from its metadata."""
    rebuilt = None
    if "lie" in L.metadata:
        rebuilt = lie_to_ce(L.metadata["lie"], check=False)
    elif "crossed_module" in L.metadata:
        rebuilt = crossed_module_to_ce(L.metadata["crossed_module"], check=False)
    elif "extension" in L.metadata:
        rebuilt = L.metadata["extension"].ce
    if rebuilt is None:
        return []
    bad = []
    for g in p.generators:
        if not rebuilt.algebra.has(g.name):
            bad.append((g.name, "missing from metadata"))
            continue
        diff = transport(p.d.image(g.id), rebuilt) - rebuilt.d.image(g.name)
        if not diff.is_zero():
            bad.append((g.name, diff))
    return bad


# commands


def cmd_library(args, out: Output):
    names = bundled_names()
    out.emit("\n".join(names), {"bundled": names})
    return 0


def cmd_validate(args, out: Output):
    L = load(args.file, verify=False)
    if L.morphism is not None:
        f = L.morphism
        reports = [("source d^2", check_differential(f.source)), ("target d^2", check_differential(f.target)),
                   ("dg-morphism", check_morphism(f))]
    else:
        p = L.presentation
        reports = [("d^2 = 0", check_differential(p))]
        bad = _check_metadata(p, L)
        if "lie" in L.metadata or "crossed_module" in L.metadata or "extension" in L.metadata:
            reports.append(("metadata agrees", Report(not bad, bad, "differential rebuilt from metadata")))
    ok = all(r for _, r in reports)
    lines = [f"{L.source}: {'pass' if ok else 'fail'}"]
    for label, r in reports:
        lines.append(f"  {label}: {'pass' if r else 'fail'}")
        for name, value in r.failures:
            lines.append(f"    {name}: {value}")
    doc = {"file": L.source, "ok": ok,
           "checks": {label: {"ok": bool(r), "residuals": {n: (_terms(v) if isinstance(v, Element) else str(v))
                                                         for n, v in r.failures}} for label, r in reports}}
    out.emit("\n".join(lines), doc)
    return 0 if ok else 1


def cmd_weil(args, out: Output):
    p, L = _presentation(args)
    w = weil(p)
    doc = presentation_to_json(w.W)
    out.save(doc)
    out.emit(describe_presentation(w.W), doc, latex_presentation(w.W))
    return 0


def cmd_cohomology(args, out: Output):
    p, L = _presentation(args)
    if args.weil:
        p = weil(p).W
    degrees = _degrees(args.degree) or [0, 1, 2, 3]
    rows = []
    for k in degrees:
        r = cohomology(p, k, max_degree=args.max_degree)
        rows.append(r)
    lines = [f"{p.name or p.kind}", "  degree  dim H"]
    for r in rows:
        lines.append(f"  {r.degree:>6}  {r.dim_H}")
        if args.reps:
            for x in r.representatives:
                lines.append(f"          {x}")
    doc = {"algebra": presentation_to_json(p),
           "cohomology": [{"degree": r.degree, "dim": r.dim_H, "kernel": r.dim_kernel, "image": r.dim_image,
                           "modular_check": r.modular_agrees,
                           **({"representatives": [_terms(x) for x in r.representatives]} if args.reps else {})}
                          for r in rows]}
    latex = latex_equations([(rf"\dim H^{{{r.degree}}}", p.algebra.scalar(r.dim_H)) for r in rows])
    out.emit("\n".join(lines), doc, latex)
    return 0


def cmd_inv(args, out: Output):
    p, L = _presentation(args)
    w = weil(p)
    degrees = _degrees(args.degree) or [4]
    found = []
    lines = []
    for k in degrees:
        basis = invariant_polynomials(w, k, max_degree=args.max_degree)
        found.append((k, basis))
        lines.append(f"degree {k}: {len(basis)} invariant polynomial(s)")
        lines.extend(f"  {x}" for x in basis)
    doc = {"algebra": presentation_to_json(w.W),
           "invariants": [{"degree": k, "basis": [_terms(x) for x in b]} for k, b in found]}
    latex = latex_equations([(f"P_{{{k},{i + 1}}}", x) for k, b in found for i, x in enumerate(b)])
    out.emit("\n".join(lines), doc, latex)
    return 0


def cmd_transgress(args, out: Output):
    p, L = _presentation(args)
    g = _lie_presentation(p, L)
    w = weil(g)
    P, K = _polynomial(w, args.poly)
    tr = transgress(w, P)
    W = w.W
    checks = [("d_W cs - P = 0", (W.d(tr.cs) - tr.P).is_zero()),
              ("i* cs = mu", w.iota_star(tr.cs) == tr.mu),
              ("d mu = 0", g.d(tr.mu).is_zero())]
    worked = None
    if K is not False and all(x.degree == 1 for x in g.generators):
        worked = quadratic_cs_formula(w, K)
        checks.append(("cs = P_ab (d_W t^a) t^b + 1/3 C_abc t^a t^b t^c", worked == tr.cs))
    lines = [f"P  = {tr.P}", f"cs = {tr.cs}", f"mu = {tr.mu}"]
    if worked is not None:
        lines.append(f"P_ab (d_W t^a) t^b + 1/3 C_abc t^a t^b t^c = {worked}")
    lines.append("checks:")
    lines.extend(f"  {label}: {'pass' if ok else 'FAIL'}" for label, ok in checks)
    doc = {"algebra": presentation_to_json(W), "P": _terms(tr.P), "cs": _terms(tr.cs),
           "cocycle": {"algebra": presentation_to_json(g), "mu": _terms(tr.mu)},
           "checks": {label: ok for label, ok in checks}}
    latex = latex_equations([("P", tr.P), (r"\mathrm{cs}", tr.cs), (r"\mu", tr.mu)])
    out.emit("\n".join(lines), doc, latex)
    if not all(ok for _, ok in checks):
        raise VerificationError("transgression checks failed")
    return 0


def cmd_extend(args, out: Output):
    p, L = _presentation(args)
    if args.cocycle:
        mu = parse(p.algebra, args.cocycle)
    else:
        g = _lie_presentation(p, L)
        w = weil(g)
        P, _ = _polynomial(w, args.poly)
        mu = transport(transgress(w, P).mu, p)
    ext = string_extension(p, mu, args.name)
    doc = presentation_to_json(ext.ce, {"extension": ext})
    out.save(doc)
    out.emit(describe_presentation(ext.ce) + f"\n  mu = {ext.mu}", doc, latex_presentation(ext.ce))
    return 0


def cmd_cone(args, out: Output):
    L = _load(args)
    strict = True
    if L.morphism is not None:
        t_star = L.morphism
        strict = bool(L.metadata.get("cone", {}).get("strict", True))
    elif "extension" in L.metadata:
        t_star = L.metadata["extension"].projection
    else:
        raise FormatError(f"{L.source}: cone needs a morphism file or a string-like extension")
    if args.strict:
        strict = True
    report = check_normal(t_star)
    pkg = mapping_cone(t_star, strict=strict)
    cone = pkg.cone
    lines = [report.describe(), describe_presentation(cone),
             "canonical morphism and nullhomotopy: verified"]
    degrees = _degrees(args.degree)
    rows = [cohomology(cone, k, max_degree=args.max_degree) for k in degrees]
    for r in rows:
        lines.append(f"  dim H^{r.degree}(cone) = {r.dim_H}")
    doc = presentation_to_json(cone)
    out.save(doc)
    if rows:
        doc = {"cone": doc, "normal": report.ok, "cohomology": [{"degree": r.degree, "dim": r.dim_H} for r in rows]}
    out.emit("\n".join(lines), doc, latex_presentation(cone))
    return 0


def cmd_obstruct(args, out: Output):
    p, L = _presentation(args)
    if "extension" in L.metadata:
        g = L.metadata["extension"].base
    else:
        g = _lie_presentation(p, L)
    w = weil(g)
    P, _ = _polynomial(w, args.poly)
    tr = transgress(w, P)
    ext = string_extension(g, tr.mu)
    A = w.iota_star if args.flat else None
    res = obstruction_cocycle(ext, tr, A=A)
    lines = [res.describe()]
    if not args.flat:
        lines.append(f"H = cs: {res.H == tr.cs}")
        lines.append(f"G = -P: {res.G == -tr.P}")
    target = A.target if A is not None else w.W
    doc = {"algebra": presentation_to_json(target), "H": _terms(res.H), "G": _terms(res.G),
           "consistent": res.consistent, "convention": res.sign_convention}
    out.emit("\n".join(lines), doc, latex_equations([("H", res.H), ("G", res.G)]))
    return 0


def cmd_bf(args, out: Output):
    p, L = _presentation(args)
    if "crossed_module" not in L.metadata:
        raise FormatError(f"{L.source}: bf needs crossed-module metadata")
    cm = L.metadata["crossed_module"]
    wg = weil(lie_to_ce(cm.g))
    P, _ = _polynomial(wg, args.poly)
    res = bf_lift_and_expand(cm, P)
    lines = [f"P  = {res.P}", f"basic in W(h -> g): {bool(res.basic)}", f"dP = {res.dP}",
             f"dP = n P(t(sigma b), sigma t, ...): {res.formula_matches}"]
    for label, x in res.terms.items():
        lines.append(f"{label}: {x}")
    if res.expansion is not None:
        lines.append(f"Pontryagin + 2 BF + cosmological = P: {res.expansion_matches}")
    doc = {"algebra": presentation_to_json(res.weil.W), "P": _terms(res.P), "dP": _terms(res.dP),
           "formula_matches": res.formula_matches,
           "terms": {k: _terms(v) for k, v in res.terms.items()},
           "expansion_matches": res.expansion_matches}
    latex = latex_equations([("P", res.P), ("dP", res.dP)] +
                            [(rf"\text{{{k}}}", v) for k, v in res.terms.items()])
    out.emit("\n".join(lines), doc, latex)
    if not res.formula_matches or res.expansion_matches is False or not res.basic:
        raise VerificationError("BF identities failed")
    return 0


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--latex", action="store_true", help="LaTeX output")
    common.add_argument("--out", help="write the resulting algebra file here")
    common.add_argument("--no-verify", action="store_true", help="skip the d^2 = 0 check on input files")
    common.add_argument("--max-degree", type=int, help="degree cap for enumerations")
    common.add_argument("--max-monomial-len", type=int, help="word-length cap for homotopy extension")

    parser = argparse.ArgumentParser(prog="lcv", description="Exact computations with quasi-free DGCAs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, file=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if file:
            sp.add_argument("file", help="JSON file or bundled name (see `lcv library`)")
        sp.set_defaults(func=func)
        return sp

    add("library", cmd_library, "list bundled algebras", file=False)
    add("validate", cmd_validate, "parse and check d^2 = 0")
    add("weil", cmd_weil, "Weil algebra")
    sp = add("cohomology", cmd_cohomology, "cohomology dimensions")
    sp.add_argument("--degree", action="append", help="degree, list or range like 1..6 (repeatable)")
    sp.add_argument("--reps", action="store_true", help="print representatives")
    sp.add_argument("--weil", action="store_true", help="use the Weil algebra of the input")
    sp = add("inv", cmd_inv, "invariant polynomials")
    sp.add_argument("--degree", action="append")
    sp = add("transgress", cmd_transgress, "Chern-Simons element and cocycle of an invariant polynomial")
    sp.add_argument("--poly", help="'killing' (default), 'delta' or an element such as 's:t1^2 + s:t2^2'")
    sp = add("extend", cmd_extend, "string-like extension by a cocycle")
    sp.add_argument("--cocycle", help="cocycle as text; default: transgression of --poly")
    sp.add_argument("--poly")
    sp.add_argument("--name", default="b", help="name of the new generator")
    sp = add("cone", cmd_cone, "mapping cone of a normal morphism")
    sp.add_argument("--degree", action="append", help="also report cone cohomology in these degrees")
    sp.add_argument("--strict", action="store_true", help="require a surjective linear part")
    sp = add("obstruct", cmd_obstruct, "lifting obstruction through the string-like extension")
    sp.add_argument("--poly")
    sp.add_argument("--flat", action="store_true", help="use the flat connection i* instead of the identity")
    sp = add("bf", cmd_bf, "BF expansion on a crossed module")
    sp.add_argument("--poly")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        with config.override(max_degree=args.max_degree, max_monomial_len=args.max_monomial_len):
            return args.func(args, out)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except LcvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
