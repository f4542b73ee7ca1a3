"""JSON manifests for chart manifolds and chart maps.

Structure is checked against the shipped JSON schemas; expression strings
are opaque to the schema and are parsed here, so every error can name the
offending field.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema

from . import exprlang
from .diffeo import DiffeoMap
from .errors import InputError, ManifestError
from .geometry import ChartManifold, ComplexStructure

SCHEMA_VERSION = 1
PathLike = Union[str, Path]


@lru_cache(maxsize=None)
def load_schema(kind: str) -> dict:
    text = resources.files("indefgeom").joinpath("schemas", f"{kind}.schema.json").read_text()
    return json.loads(text)


def _field_name(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def validate_schema(doc: Any, kind: str) -> None:
    validator = jsonschema.Draft202012Validator(load_schema(kind))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        field = _field_name(err.absolute_path)
        if err.validator == "required":
            missing = err.message.split("'")[1]
            field = missing if field == "<root>" else f"{field}.{missing}"
        raise ManifestError(field, err.message)


def read_json(path: PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ManifestError(str(path), f"cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(str(path), f"invalid JSON at line {exc.lineno} column {exc.colno}") from None


def _parse(text: str, coords, field: str) -> exprlang.Expr:
    try:
        return exprlang.parse_expr(text, coords)
    except InputError as exc:
        raise ManifestError(field, str(exc)) from None


# ---------------------------------------------------------------------------
# Manifolds
# ---------------------------------------------------------------------------


def manifold_from_doc(doc: Any) -> ChartManifold:
    validate_schema(doc, "manifold")
    n = doc["dim"]
    coords = tuple(doc["coords"])
    if len(coords) != n:
        raise ManifestError("coords", f"expected {n} coordinates, got {len(coords)}")
    reserved = set(exprlang.FUNCTIONS)
    for c in coords:
        if c in reserved:
            raise ManifestError("coords", f"coordinate name {c!r} collides with a function name")
    metric = doc["metric"]
    if len(metric) != n or any(len(row) != n for row in metric):
        raise ManifestError("metric", f"must be a {n}x{n} array of expression strings")
    rows: list[list[Optional[exprlang.Expr]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            e = _parse(metric[i][j], coords, f"metric[{i}][{j}]")
            rows[i][j] = rows[j][i] = e
    cs = None
    if "complex_structure" in doc:
        pairs = tuple(tuple(p) for p in doc["complex_structure"]["pairs"])
        try:
            cs = ComplexStructure(pairs)
            cs.validate(n)
        except InputError as exc:
            raise ManifestError("complex_structure.pairs", str(exc)) from None
    v = None
    if "recurrence_function" in doc:
        v = _parse(doc["recurrence_function"], coords, "recurrence_function")
    return ChartManifold(doc["name"], coords, tuple(tuple(r) for r in rows), cs, v)


def manifold_to_doc(m: ChartManifold) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": m.name,
        "dim": m.dim,
        "coords": list(m.coords),
        "metric": m.metric_strings(),
    }
    if m.complex_structure is not None:
        doc["complex_structure"] = {"pairs": [list(p) for p in m.complex_structure.pairs]}
    if m.recurrence_function is not None:
        doc["recurrence_function"] = exprlang.render(m.recurrence_function)
    return doc


def load_manifold(path: PathLike) -> ChartManifold:
    return manifold_from_doc(read_json(path))


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


def _resolve_side(ref: Any, base: Optional[Path], field: str) -> ChartManifold:
    if isinstance(ref, str):
        path = Path(ref)
        if base is not None and not path.is_absolute():
            path = base / path
        doc = read_json(path)
    else:
        doc = ref
    try:
        return manifold_from_doc(doc)
    except ManifestError as exc:
        raise ManifestError(f"{field}.{exc.field}", str(exc).split(": ", 1)[-1]) from None


def diffeo_from_doc(doc: Any, base: Optional[Path] = None) -> DiffeoMap:
    validate_schema(doc, "diffeo")
    source = _resolve_side(doc["source"], base, "source")
    target = _resolve_side(doc["target"], base, "target")
    n = source.dim
    if target.dim != n:
        raise ManifestError("target.dim", f"target dimension {target.dim} differs from source dimension {n}")
    comps = doc["components"]
    if len(comps) != n:
        raise ManifestError("components", f"expected {n} expressions, got {len(comps)}")
    parsed = tuple(_parse(c, source.coords, f"components[{k}]") for k, c in enumerate(comps))
    inverse = None
    if "inverse" in doc:
        inv = doc["inverse"]
        if len(inv) != n:
            raise ManifestError("inverse", f"expected {n} expressions, got {len(inv)}")
        inverse = tuple(_parse(c, target.coords, f"inverse[{k}]") for k, c in enumerate(inv))
    return DiffeoMap(source, target, parsed, inverse, doc.get("name", "map"))


def diffeo_to_doc(f: DiffeoMap) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": f.name,
        "source": manifold_to_doc(f.source),
        "target": manifold_to_doc(f.target),
        "components": [exprlang.render(e) for e in f.components],
    }
    if f.inverse is not None:
        doc["inverse"] = [exprlang.render(e) for e in f.inverse]
    return doc


def load_diffeo(path: PathLike) -> DiffeoMap:
    path = Path(path)
    return diffeo_from_doc(read_json(path), path.parent)


def to_doc(obj: Union[ChartManifold, DiffeoMap]) -> dict:
    return diffeo_to_doc(obj) if isinstance(obj, DiffeoMap) else manifold_to_doc(obj)
