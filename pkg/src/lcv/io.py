"""JSON presentation files: algebras, morphisms and the metadata needed to rebuild structured inputs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from .dgca import DgcaPresentation
from .errors import AlgebraError, FormatError
from .families import CrossedModuleData, LieStructureConstants
from .gca import Element, GradedAlgebra, Morphism, format_coefficient

SCHEMA_VERSION = 1
_COEFF = re.compile(r"^-?\d+(/\d+)?$")


@dataclass
class Loaded:
    """A parsed file: a presentation or a morphism, plus rebuilt metadata."""

    doc: dict
    presentation: Optional[DgcaPresentation] = None
    morphism: Optional[Morphism] = None
    metadata: dict = field(default_factory=dict)
    source: str = ""


# element <-> terms


def element_to_terms(x: Element) -> list:
    alg = x.alg
    out = []
    for m, c in x.sorted_terms():
        mono = []
        for g, e in m:
            mono.extend([alg.generators[g].name] * e)
        out.append({"coeff": format_coefficient(c), "mono": mono})
    return out


def _coeff(raw, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise FormatError(f"{where}: coefficient must be a string like \"p\" or \"p/q\"")
    text = str(raw).strip()
    if not _COEFF.match(text):
        raise FormatError(f"{where}: bad coefficient {raw!r}")
    return Fraction(text)


def terms_to_element(alg: GradedAlgebra, terms, where: str) -> Element:
    if not isinstance(terms, list):
        raise FormatError(f"{where}: expected a list of terms")
    x = alg.zero()
    for k, t in enumerate(terms):
        here = f"{where}[{k}]"
        if not isinstance(t, dict) or set(t) - {"coeff", "mono"} or "mono" not in t:
            raise FormatError(f"{here}: a term is {{\"coeff\": ..., \"mono\": [...]}}")
        c = _coeff(t.get("coeff", "1"), here)
        mono = t["mono"]
        if not isinstance(mono, list) or not all(isinstance(n, str) for n in mono):
            raise FormatError(f"{here}: mono must be a list of generator names")
        for n in mono:
            if not alg.has(n):
                raise FormatError(f"{here}: unknown generator {n!r}")
        try:
            m = alg.one()
            for n in mono:
                m = m * alg.var(n)
        except AlgebraError as exc:
            raise FormatError(f"{here}: {exc}")
        x = x + m.scale(c)
    return x


# metadata


def _lie_to_json(c: LieStructureConstants) -> dict:
    consts = [[a, b, cc, format_coefficient(v)] for (a, b, cc), v in sorted(c.constants.items()) if b < cc]
    return {"dimension": c.dimension, "names": list(c.names), "constants": consts}


def _lie_from_json(d: dict, where: str) -> LieStructureConstants:
    try:
        consts = {}
        for a, b, c, v in d["constants"]:
            v = _coeff(v, where)
            consts[(a, b, c)] = v
            consts[(a, c, b)] = -v
        return LieStructureConstants(d["dimension"], consts, d.get("names"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: malformed Lie data ({exc})")


def _cm_to_json(cm: CrossedModuleData) -> dict:
    out = {
        "g": _lie_to_json(cm.g),
        "h_dimension": cm.h_dimension,
        "h_names": list(cm.h_names),
        "t": [[a, i, format_coefficient(v)] for (a, i), v in sorted(cm.t.items())],
        "alpha": [[i, a, j, format_coefficient(v)] for (i, a, j), v in sorted(cm.alpha.items())],
    }
    if cm.h_bracket is not None:
        out["h_bracket"] = [[i, j, k, format_coefficient(v)] for (i, j, k), v in sorted(cm.h_bracket.items())]
    return out


def _cm_from_json(d: dict, where: str) -> CrossedModuleData:
    try:
        g = _lie_from_json(d["g"], where + ".g")
        t = {(a, i): _coeff(v, where) for a, i, v in d.get("t", [])}
        alpha = {(i, a, j): _coeff(v, where) for i, a, j, v in d.get("alpha", [])}
        hb = d.get("h_bracket")
        if hb is not None:
            hb = {(i, j, k): _coeff(v, where) for i, j, k, v in hb}
        return CrossedModuleData(g, d["h_dimension"], t, alpha, hb, d.get("h_names"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: malformed crossed-module data ({exc})")


def _base_metadata(p: DgcaPresentation) -> dict:
    lie = p.provenance.get("constants") or p.provenance.get("lie")
    return {"lie": lie} if isinstance(lie, LieStructureConstants) else {}


def metadata_to_json(meta: dict) -> dict:
    out = {}
    for key, value in meta.items():
        if key == "lie":
            out[key] = _lie_to_json(value)
        elif key == "crossed_module":
            out[key] = _cm_to_json(value)
        elif key == "extension":
            out[key] = {
                "base": presentation_to_json(value.base, _base_metadata(value.base)),
                "cocycle": element_to_terms(value.mu),
                "generator": value.b_name,
            }
        else:
            out[key] = value
    return out


def metadata_from_json(meta, where: str) -> dict:
    from .transgression import string_extension

    if meta is None:
        return {}
    if not isinstance(meta, dict):
        raise FormatError(f"{where}: metadata must be an object")
    out = dict(meta)
    if "lie" in meta:
        out["lie"] = _lie_from_json(meta["lie"], where + ".lie")
    if "crossed_module" in meta:
        out["crossed_module"] = _cm_from_json(meta["crossed_module"], where + ".crossed_module")
    if "extension" in meta:
        e = meta["extension"]
        if not isinstance(e, dict) or not {"base", "cocycle"} <= set(e):
            raise FormatError(f"{where}.extension: needs base and cocycle")
        base = presentation_from_json(e["base"], where=where + ".extension.base")
        mu = terms_to_element(base.presentation.algebra, e["cocycle"], where + ".extension.cocycle")
        try:
            out["extension"] = string_extension(base.presentation, mu, e.get("generator", "b"))
        except AlgebraError as exc:
            raise FormatError(f"{where}.extension: {exc}")
    return out


# presentations


def presentation_to_json(p: DgcaPresentation, metadata: Optional[dict] = None) -> dict:
    alg = p.algebra
    gens = []
    for g in alg.generators:
        entry = {"name": g.name, "degree": g.degree}
        if g.shift_of is not None:
            entry["shift_of"] = alg.generators[g.shift_of].name
        gens.append(entry)
    diff = {g.name: element_to_terms(p.d.image(g.id)) for g in alg.generators if not p.d.image(g.id).is_zero()}
    doc = {"lcv": SCHEMA_VERSION, "name": p.name, "kind": p.kind, "generators": gens, "differential": diff}
    if metadata:
        doc["metadata"] = metadata_to_json(metadata)
    return doc


def _check_version(doc, where):
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: top level must be an object")
    if doc.get("lcv") != SCHEMA_VERSION:
        raise FormatError(f"{where}: missing or unsupported schema version (\"lcv\": {SCHEMA_VERSION})")


def algebra_from_json(doc: dict, where: str) -> GradedAlgebra:
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens:
        raise FormatError(f"{where}: generators must be a non-empty list")
    names = []
    for k, g in enumerate(gens):
        if not isinstance(g, dict) or not isinstance(g.get("name"), str) or not isinstance(g.get("degree"), int) \
                or isinstance(g.get("degree"), bool):
            raise FormatError(f"{where}.generators[{k}]: needs a string name and an integer degree")
        names.append(g["name"])
    entries = []
    for k, g in enumerate(gens):
        link = g.get("shift_of")
        if link is not None and link not in names:
            raise FormatError(f"{where}.generators[{k}]: shift_of names an unknown generator {link!r}")
        entries.append((g["name"], g["degree"], names.index(link) if link is not None else None))
    try:
        return GradedAlgebra(entries)
    except AlgebraError as exc:
        raise FormatError(f"{where}: {exc}")


def presentation_from_json(doc: dict, verify: bool = True, where: str = "file") -> Loaded:
    _check_version(doc, where)
    if doc.get("kind") == "Morphism":
        raise FormatError(f"{where}: expected an algebra, found a morphism file")
    alg = algebra_from_json(doc, where)
    diff = doc.get("differential", {})
    if not isinstance(diff, dict):
        raise FormatError(f"{where}.differential: must map generator names to term lists")
    images = {}
    for name, terms in diff.items():
        if not alg.has(name):
            raise FormatError(f"{where}.differential: unknown generator {name!r}")
        images[name] = terms_to_element(alg, terms, f"{where}.differential.{name}")
    kind = doc.get("kind", "Other")
    try:
        p = DgcaPresentation(alg, images, kind=kind, name=str(doc.get("name", "")), check=verify)
    except AlgebraError as exc:
        raise FormatError(f"{where}: {exc}")
    meta = metadata_from_json(doc.get("metadata"), where + ".metadata")
    p.provenance.update(meta)
    return Loaded(doc, presentation=p, metadata=meta)


def morphism_to_json(f: Morphism, metadata: Optional[dict] = None) -> dict:
    src = f.source.algebra
    doc = {
        "lcv": SCHEMA_VERSION,
        "name": f.name,
        "kind": "Morphism",
        "source": presentation_to_json(f.source),
        "target": presentation_to_json(f.target),
        "images": {src.generators[g].name: element_to_terms(img) for g, img in sorted(f.images.items())},
    }
    if metadata:
        doc["metadata"] = metadata_to_json(metadata)
    return doc


def morphism_from_json(doc: dict, verify: bool = True, where: str = "file") -> Loaded:
    _check_version(doc, where)
    for key in ("source", "target", "images"):
        if key not in doc:
            raise FormatError(f"{where}: morphism file needs {key!r}")
    src = presentation_from_json(doc["source"], verify, where + ".source").presentation
    tgt = presentation_from_json(doc["target"], verify, where + ".target").presentation
    images = {}
    raw = doc["images"]
    if not isinstance(raw, dict):
        raise FormatError(f"{where}.images: must map generator names to term lists")
    for name, terms in raw.items():
        if not src.algebra.has(name):
            raise FormatError(f"{where}.images: unknown source generator {name!r}")
        images[name] = terms_to_element(tgt.algebra, terms, f"{where}.images.{name}")
    try:
        f = Morphism(src, tgt, images, name=str(doc.get("name", "")))
    except AlgebraError as exc:
        raise FormatError(f"{where}.images: {exc}")
    meta = metadata_from_json(doc.get("metadata"), where + ".metadata")
    return Loaded(doc, morphism=f, metadata=meta)


# files and the bundled library


def data_dir():
    return resources.files("lcv") / "data"


def bundled_names() -> list:
    return sorted(p.name[:-5] for p in data_dir().iterdir() if p.name.endswith(".json"))


def read_text(ref: str) -> tuple:
    """Contents and a display label for a path or a bundled name."""
    path = Path(ref)
    if path.is_file():
        return path.read_text(encoding="utf-8"), str(path)
    name = ref[:-5] if ref.endswith(".json") else ref
    candidate = data_dir() / f"{name}.json"
    if candidate.is_file():
        return candidate.read_text(encoding="utf-8"), f"{name} (bundled)"
    raise FormatError(f"{ref}: no such file or bundled algebra")


def parse_document(text: str, label: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{label}:{exc.lineno}:{exc.colno}: {exc.msg}")


def load(ref: str, verify: bool = True) -> Loaded:
    text, label = read_text(ref)
    doc = parse_document(text, label)
    if isinstance(doc, dict) and doc.get("kind") == "Morphism":
        loaded = morphism_from_json(doc, verify, label)
    else:
        loaded = presentation_from_json(doc, verify, label)
    loaded.source = label
    return loaded


def _render(value, indent: int) -> str:
    # objects nest; lists of scalars, terms and generator entries stay on one line
    flat = lambda v: json.dumps(v, ensure_ascii=False)
    pad = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        if all(not isinstance(v, (dict, list)) for v in value.values()):
            return flat(value)
        body = ",\n".join(f"{pad}{flat(k)}: {_render(v, indent + 1)}" for k, v in value.items())
        return "{\n" + body + "\n" + "  " * indent + "}"
    if isinstance(value, list):
        if not value or all(not isinstance(v, (dict, list)) for v in value):
            return flat(value)
        if all(isinstance(v, dict) and set(v) <= {"coeff", "mono", "name", "degree", "shift_of"} for v in value) \
                or all(isinstance(v, list) for v in value):
            body = ",\n".join(pad + flat(v) for v in value)
        else:
            body = ",\n".join(pad + _render(v, indent + 1) for v in value)
        return "[\n" + body + "\n" + "  " * indent + "]"
    return flat(value)


def dumps(doc: dict) -> str:
    return _render(doc, 0) + "\n"
