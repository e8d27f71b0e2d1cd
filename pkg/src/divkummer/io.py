"""JSON documents: schema validation, parsing into objects and printing back.

Every integer is written as a decimal string and every rational as ``"a/b"``.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

import jsonschema

from .errors import InvariantViolation, SchemaError
from .exactalg import ZZ, FgModule, IntMatrix, ModuleMap, quadratic_order
from .exactalg.module import Ring
from .kummer import BoundInputs, GaloisSimInstance
from .modfilter import IdealFilter
from .pointed import JTExtension, PointedMap, PointedModule, TorsionTarget, fmt_fraction

INT = {"type": "string", "pattern": "^-?[0-9]+$"}
POS = {"type": "string", "pattern": "^[0-9]*[1-9][0-9]*$"}
RAT = {"type": "string", "pattern": "^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"}
ROWS = {"type": "array", "items": {"type": "array", "items": INT}}

MODULE = {
    "type": "object",
    "required": ["generators", "relations"],
    "additionalProperties": False,
    "properties": {"generators": INT, "relations": ROWS, "action": ROWS},
}
POINTING = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "s": INT,
        "prime": INT,
        "action": ROWS,
        "gens": ROWS,
        "images": {"type": "array", "items": {"type": "array", "items": RAT}},
    },
}
GALOIS = {
    "type": "object",
    "required": ["level"],
    "additionalProperties": False,
    "properties": {
        "level": POS,
        "s": POS,
        "torsion": {"type": "array", "items": ROWS},
        "kummer": {"type": "array", "items": ROWS},
        "rho": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kummer", "torsion"],
                "additionalProperties": False,
                "properties": {"kummer": ROWS, "torsion": ROWS},
            },
        },
        "points": ROWS,
    },
}
SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["ring", "module"],
    "additionalProperties": False,
    "properties": {
        "ring": {
            "oneOf": [
                {"const": "Z"},
                {
                    "type": "object",
                    "required": ["t", "n"],
                    "additionalProperties": False,
                    "properties": {"t": INT, "n": INT},
                },
            ]
        },
        "module": MODULE,
        "pointing": POINTING,
        "filter": {"type": "string"},
        "submodule": ROWS,
        "map": {
            "type": "object",
            "required": ["source", "matrix"],
            "additionalProperties": False,
            "properties": {"source": MODULE, "pointing": POINTING, "matrix": ROWS},
        },
        "extension": {
            "type": "object",
            "required": ["module", "inclusion"],
            "additionalProperties": False,
            "properties": {"module": MODULE, "pointing": POINTING, "inclusion": ROWS},
        },
        "hull": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"level": POS},
        },
        "galois": GALOIS,
        "bound": {
            "type": "object",
            "required": ["d", "n", "m", "rank", "s"],
            "additionalProperties": False,
            "properties": {
                "d": POS, "n": POS, "m": POS, "rank": INT, "s": POS, "level": POS,
                "torsion": {"type": "array", "items": INT},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"s": POS, "k": POS},
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def validate(doc: Any) -> None:
    """Raise ``SchemaError`` carrying the JSON path of the first violation."""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = "/" + "/".join(str(p) for p in e.absolute_path)
        raise SchemaError(f"{path}: {e.message}", path)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


# printing


def int_str(x: int) -> str:
    return str(int(x))


def rows_json(rows) -> list:
    data = rows.data if isinstance(rows, IntMatrix) else rows
    return [[int_str(c) for c in r] for r in data]


def ring_json(ring: Ring):
    return "Z" if ring.is_integers else {"t": int_str(ring.t), "n": int_str(ring.n)}


def module_json(m: FgModule) -> dict:
    out = {"generators": int_str(m.ngens), "relations": rows_json(m.relations)}
    if not m.ring.is_integers:
        out["action"] = rows_json(m.action)
    return out


def pointing_json(p: PointedModule) -> dict:
    t = p.target
    out = {
        "s": int_str(t.s),
        "gens": rows_json(p.gens),
        "images": [[fmt_fraction(x) for x in v] for v in p.images],
    }
    if t.prime is not None:
        out["prime"] = int_str(t.prime)
    if t.action is not None:
        out["action"] = rows_json(t.action)
    return out


def pointed_document(p: PointedModule) -> dict:
    return {
        "ring": ring_json(p.module.ring),
        "module": module_json(p.module),
        "pointing": pointing_json(p),
        "filter": str(p.filter),
    }


def extension_document(e: JTExtension) -> dict:
    doc = pointed_document(e.base)
    doc["extension"] = {
        "module": module_json(e.total.module),
        "pointing": pointing_json(e.total),
        "inclusion": rows_json(e.inc.matrix),
    }
    return doc


def bound_json(b: BoundInputs, level: int | None = None, torsion=()) -> dict:
    out = {k: int_str(getattr(b, k)) for k in ("d", "n", "m", "rank", "s")}
    if level is not None:
        out["level"] = int_str(level)
    if torsion:
        out["torsion"] = [int_str(t) for t in torsion]
    return out


def galois_json(g: GaloisSimInstance) -> dict:
    return {
        "level": int_str(g.level),
        "s": int_str(g.s),
        "rho": [{"kummer": rows_json(f), "torsion": rows_json(sg)} for f, sg in sorted(g.elements)],
    }


def galois_document(g: GaloisSimInstance) -> dict:
    return {"ring": "Z", "module": module_json(g.x), "galois": galois_json(g)}


# parsing


def _int(s: str) -> int:
    return int(s)


def _rows(rows) -> list[tuple[int, ...]]:
    return [tuple(_int(c) for c in r) for r in rows]


def _matrix(rows, cols: int) -> IntMatrix:
    return IntMatrix(_rows(rows), cols=cols)


def parse_ring(r) -> Ring:
    if r == "Z":
        return ZZ
    return quadratic_order(_int(r["t"]), _int(r["n"]))


def parse_module(d: dict, ring: Ring) -> FgModule:
    n = _int(d["generators"])
    if n < 0:
        raise InvariantViolation("number of generators must be non-negative")
    rels = _rows(d["relations"])
    if any(len(r) != n for r in rels):
        raise InvariantViolation(f"every relation needs {n} entries")
    action = _matrix(d["action"], n) if "action" in d else None
    return FgModule(n, IntMatrix(rels, cols=n), action=action, ring=ring)


def parse_filter(text: str) -> IdealFilter:
    return IdealFilter.parse(text)


def parse_target(p: dict, ring: Ring, filt: IdealFilter | None) -> TorsionTarget:
    s = _int(p.get("s", "0"))
    prime = _int(p["prime"]) if "prime" in p else None
    if prime is None and filt is not None and filt.kind == "ppower":
        prime = filt.p
    if filt is not None and filt.kind not in ("ppower", "all"):
        raise InvariantViolation("pointed modules need the filter p^inf or inf")
    if filt is not None and (filt.p if filt.kind == "ppower" else None) != prime:
        raise InvariantViolation("pointing prime does not match the filter")
    action = _matrix(p["action"], s) if "action" in p else None
    return TorsionTarget(s, prime, ring, action)


def parse_pointing(p: dict | None, m: FgModule, target: TorsionTarget) -> PointedModule:
    p = p or {}
    gens = _rows(p.get("gens", []))
    images = [tuple(Fraction(x) for x in v) for v in p.get("images", [])]
    return PointedModule(m, target, gens, images)


class Document:
    """A validated input document with lazily built objects."""

    def __init__(self, raw: dict, filter_override: IdealFilter | None = None):
        validate(raw)
        self.raw = raw
        self.ring = parse_ring(raw["ring"])
        self.module = parse_module(raw["module"], self.ring)
        self.filter = parse_filter(raw["filter"]) if "filter" in raw else None
        if filter_override is not None:
            self.filter = filter_override
        self._pointed = None
        self._target = None
        if "pointing" in raw:
            self.pointed  # validate eagerly

    def _get_target(self) -> TorsionTarget:
        if self._target is None:
            self._target = parse_target(self.raw.get("pointing", {}), self.ring, self.filter)
        return self._target

    @property
    def target(self) -> TorsionTarget:
        return self._get_target()

    @property
    def pointed(self) -> PointedModule:
        if self._pointed is None:
            self._pointed = parse_pointing(self.raw.get("pointing"), self.module, self.target)
        return self._pointed

    def require(self, key: str):
        if key not in self.raw:
            raise SchemaError(f"/{key}: required for this command", "/" + key)
        return self.raw[key]

    def submodule(self) -> IntMatrix:
        return _matrix(self.require("submodule"), self.module.ngens)

    def map(self) -> ModuleMap:
        d = self.require("map")
        src = parse_module(d["source"], self.ring)
        return ModuleMap(src, self.module, _matrix(d["matrix"], self.module.ngens))

    def pointed_map(self) -> PointedMap:
        """``map`` as a pointed map from its source into this document's pointed module."""
        d = self.require("map")
        f = self.map()
        src = parse_pointing(d.get("pointing"), f.source, self.target)
        return PointedMap(f, src, self.pointed)

    def extension(self) -> JTExtension:
        d = self.require("extension")
        total_m = parse_module(d["module"], self.ring)
        total = parse_pointing(d.get("pointing"), total_m, self.target)
        f = ModuleMap(self.module, total_m, _matrix(d["inclusion"], total_m.ngens))
        return JTExtension(self.pointed, total, PointedMap(f, self.pointed, total))

    def bound(self) -> tuple[BoundInputs, int, list[int]]:
        d = self.require("bound")
        b = BoundInputs(*(_int(d[k]) for k in ("d", "n", "m", "rank", "s")))
        level = _int(d["level"]) if "level" in d else b.dnm
        return b, level, [_int(t) for t in d.get("torsion", [])]

    def galois(self) -> GaloisSimInstance:
        d = self.require("galois")
        level = _int(d["level"])
        if "rho" in d:
            s = _int(d["s"]) if "s" in d else len(d["rho"][0]["torsion"]) if d["rho"] else 1
            rho = [(_rows(r["kummer"]), _rows(r["torsion"])) for r in d["rho"]]
            return GaloisSimInstance(level, self.module, s, rho)
        tors = [_rows(t) for t in d.get("torsion", [])]
        s = _int(d["s"]) if "s" in d else (len(tors[0]) if tors else 1)
        kum = [_rows(k) for k in d.get("kummer", [])]
        return GaloisSimInstance.split(level, self.module, s, tors, kum)

    def galois_matrices(self) -> tuple[list, int]:
        d = self.require("galois")
        return [_rows(t) for t in d.get("torsion", [])], _int(d["level"])

    def points(self):
        d = self.require("galois")
        return _matrix(d["points"], self.module.ngens) if "points" in d else None

    def param(self, key: str, default: int) -> int:
        return _int(self.raw.get("params", {}).get(key, str(default)))


    def to_json(self) -> dict:
        """Canonical document rebuilt from the parsed objects."""
        out = {"ring": ring_json(self.ring), "module": module_json(self.module)}
        if self.filter is not None:
            out["filter"] = str(self.filter)
        if "pointing" in self.raw:
            out["pointing"] = pointing_json(self.pointed)
        if "submodule" in self.raw:
            out["submodule"] = rows_json(self.submodule())
        if "map" in self.raw:
            f = self.map()
            out["map"] = {"source": module_json(f.source), "matrix": rows_json(f.matrix)}
            if "pointing" in self.raw["map"]:
                out["map"]["pointing"] = pointing_json(self.pointed_map().source)
        if "extension" in self.raw:
            e = self.extension()
            out["extension"] = {
                "module": module_json(e.total.module),
                "pointing": pointing_json(e.total),
                "inclusion": rows_json(e.inc.matrix),
            }
        if "hull" in self.raw:
            out["hull"] = dict(self.raw["hull"])
        if "galois" in self.raw:
            g = self.raw["galois"]
            if "rho" in g or "kummer" in g:
                out["galois"] = galois_json(self.galois())
                if "points" in g:
                    out["galois"]["points"] = rows_json(self.points())
            else:
                mats, level = self.galois_matrices()
                out["galois"] = {"level": int_str(level), "torsion": [rows_json(m) for m in mats]}
                if "s" in g:
                    out["galois"]["s"] = int_str(_int(g["s"]))
        if "bound" in self.raw:
            b, level, tors = self.bound()
            out["bound"] = bound_json(b, level, tors)
        if "params" in self.raw:
            out["params"] = {k: int_str(_int(v)) for k, v in sorted(self.raw["params"].items())}
        return out


def load(path: str) -> tuple[dict, Document]:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(f"/: not valid JSON ({e.msg})", "/") from None
    return raw, Document(raw)


__all__ = [
    "Document",
    "SCHEMA",
    "bound_json",
    "canonical_json",
    "digest",
    "extension_document",
    "galois_document",
    "galois_json",
    "load",
    "module_json",
    "parse_filter",
    "parse_module",
    "parse_ring",
    "pointed_document",
    "pointing_json",
    "rows_json",
    "validate",
]
