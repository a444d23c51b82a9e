"""JSON persistence, run manifests and ingredient resolution.

Design files look like::

    {"n": 7, "groups": [[0], ...], "blocks": [[0, 1, 3], ...],
     "distinguished": [], "meta": {...}}

written in canonical order, one group/block per line so that fixtures
diff cleanly.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .algebra import DifferenceFamily
from .constructions import (
    TruncatedTd,
    build_affine_plane,
    build_projective_plane,
    build_td,
    delete_point,
)
from .core import Design
from .errors import DesignError, IngredientMissing, ParseError, SchemaError

INGREDIENT_DIR_ENV = "DESIGN_FORGE_INGREDIENTS"


def _rows(name, rows, last=False):
    if not rows:
        return [f'  "{name}": []' + ("" if last else ",")]
    out = [f'  "{name}": [']
    out += ["    " + json.dumps(list(r)) + ("," if i < len(rows) - 1 else "") for i, r in enumerate(rows)]
    out.append("  ]" + ("" if last else ","))
    return out


def dumps_design(d: Design, **extra) -> str:
    lines = ["{", f'  "n": {d.n},']
    lines += _rows("groups", d.groups)
    lines += _rows("blocks", d.blocks)
    lines.append(f'  "distinguished": {json.dumps(list(d.distinguished))},')
    tail = [f'  "meta": {json.dumps(d.meta, sort_keys=True)}']
    for key, value in extra.items():
        tail.append(f'  "{key}": {json.dumps(value)}')
    lines.append(",\n".join(tail))
    lines.append("}")
    return "\n".join(lines) + "\n"


def design_to_dict(d: Design) -> dict:
    return {
        "n": d.n,
        "groups": [list(g) for g in d.groups],
        "blocks": [list(b) for b in d.blocks],
        "distinguished": list(d.distinguished),
        "meta": d.meta,
    }


def _int_list(value, field_name):
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise SchemaError(field_name, "expected a list of integers")
    return value


def design_from_dict(data) -> Design:
    if not isinstance(data, dict):
        raise SchemaError("<root>", "expected a JSON object")
    for key in ("n", "groups", "blocks"):
        if key not in data:
            raise SchemaError(key, "missing")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise SchemaError("n", "expected a non-negative integer")
    if not isinstance(data["groups"], list):
        raise SchemaError("groups", "expected a list of lists")
    if not isinstance(data["blocks"], list):
        raise SchemaError("blocks", "expected a list of lists")
    groups = [_int_list(g, f"groups[{i}]") for i, g in enumerate(data["groups"])]
    blocks = [_int_list(b, f"blocks[{i}]") for i, b in enumerate(data["blocks"])]
    distinguished = _int_list(data.get("distinguished", []), "distinguished")
    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("meta", "expected an object")

    seen = set()
    for i, g in enumerate(groups):
        for p in g:
            if not 0 <= p < n:
                raise SchemaError(f"groups[{i}]", f"point {p} outside 0..{n - 1}")
            if p in seen:
                raise SchemaError(f"groups[{i}]", f"point {p} already lies in another group")
            seen.add(p)
    if len(seen) != n:
        raise SchemaError("groups", f"groups cover {len(seen)} of {n} points")
    for i, b in enumerate(blocks):
        for p in b:
            if not 0 <= p < n:
                raise SchemaError(f"blocks[{i}]", f"point {p} outside 0..{n - 1}")
    try:
        return Design(n, groups, blocks, distinguished, meta)
    except DesignError as exc:
        raise SchemaError("design", str(exc)) from exc


def load_json(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_design(path) -> Design:
    return design_from_dict(load_json(path))


def save_design(d: Design, path, **extra) -> str:
    """Write ``d`` canonically; returns the sha256 of the bytes written."""
    text = dumps_design(d, **extra)
    Path(path).write_text(text)
    return sha256_text(text)


def save_truncated(tt: TruncatedTd, path) -> str:
    return save_design(tt.design, path, deleted_classes=[list(c) for c in tt.deleted_classes])


def load_family(path) -> DifferenceFamily:
    data = load_json(path)
    if not isinstance(data, dict) or "v" not in data or "base_blocks" not in data:
        raise SchemaError("<root>", "expected {'v', 'base_blocks', 'orbit_lengths'}")
    try:
        return DifferenceFamily.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise SchemaError("base_blocks", str(exc)) from exc


def save_family(df: DifferenceFamily, path) -> str:
    text = json.dumps(df.to_dict()) + "\n"
    Path(path).write_text(text)
    return sha256_text(text)


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def design_hash(d: Design) -> str:
    return sha256_text(dumps_design(d))


@dataclass
class RunManifest:
    """Written next to every constructed file as ``<output>.manifest.json``.

    ``timestamp`` is informational and excluded from ``digest()``.
    """

    command: str
    argv: list
    parameters: dict
    ingredients: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    output: str | None = None
    output_sha256: str | None = None
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_dict(self):
        return asdict(self)

    def digest(self) -> str:
        data = self.to_dict()
        data.pop("timestamp")
        return sha256_text(json.dumps(data, sort_keys=True))

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        data = load_json(path)
        try:
            return cls(**data)
        except TypeError as exc:
            raise SchemaError("manifest", str(exc)) from exc


def manifest_path(output) -> Path:
    return Path(str(output) + ".manifest.json")


def _ints(text):
    return [int(x) for x in text.split(",")]


def resolve_ingredient(source: str | None, role: str):
    """Turn an ingredient source into ``(design, disjoint_blocks, provenance)``.

    ``source`` is ``builtin:<name>:<args>`` or a path.  When it is ``None``
    the directory in ``$DESIGN_FORGE_INGREDIENTS`` is searched for
    ``<role>.json``; if nothing is found the result is ``(None, None, None)``.
    Relative paths that do not exist are also looked up in that directory.
    """
    from .parallel import bibd_from_search, parallel_class_from_td, td_from_affine_plane

    if source is None:
        folder = os.environ.get(INGREDIENT_DIR_ENV)
        if folder and (Path(folder) / f"{role}.json").exists():
            source = str(Path(folder) / f"{role}.json")
        else:
            return None, None, None
    disjoint = None
    if source.startswith("builtin:"):
        name, _, args = source[len("builtin:"):].partition(":")
        if name == "td":
            k, q = _ints(args)
            d = build_td(k, q)
        elif name == "affine":
            d = build_affine_plane(int(args))
        elif name == "projective":
            d = build_projective_plane(int(args))
        elif name == "affine-minus-point":
            d = delete_point(build_affine_plane(int(args)), 0)
        elif name == "projective-minus-point":
            d = delete_point(build_projective_plane(int(args)), 0)
        elif name == "td-from-td":
            k, q = _ints(args)
            d, dbs = parallel_class_from_td(build_td(k + 1, q))
            disjoint = dbs.blocks
        elif name == "affine-td":
            d, dbs = td_from_affine_plane(int(args))
            disjoint = dbs.blocks
        elif name == "df":
            v, k = _ints(args)
            d = bibd_from_search(v, k)
        else:
            raise IngredientMissing(f"unknown builtin ingredient {source!r}")
        return d, disjoint, {"source": source, "sha256": design_hash(d)}
    path = Path(source)
    folder = os.environ.get(INGREDIENT_DIR_ENV)
    if not path.exists() and folder and not path.is_absolute():
        path = Path(folder) / path
    if not path.exists():
        raise IngredientMissing(f"{role}: no such file {source}")
    text = path.read_text()
    d = load_design(path)
    return d, None, {"source": str(path), "sha256": sha256_text(text)}
