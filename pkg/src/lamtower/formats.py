"""JSON and DOT encodings for every value the CLI reads or writes.

Each JSON document carries a ``format`` tag such as ``"codingtree/1"``.
Documents are checked against a JSON schema before decoding; the first
violation is reported with its path.
"""

from __future__ import annotations

import json
from typing import Any

import jsonschema

from .cover_lab import Circle, GluingPresentation, PermCover, Piece, TubeCertificate
from .forest_kit import Forest, ForestOfCodingTrees, LeafCensus
from .hyp_cert import Bound, NoBound, bound_from_json
from .surface_kit import (
    CantorBlock,
    ClassifyingTriple,
    CodingTree,
    Composite,
    DepthLimited,
    DepthLimitedTree,
    FinitePoints,
    GoodTreeInclusion,
    INFINITE,
    Kind,
    RationalTree,
)
from .tower_builder import ComplementRecord, PlanStep, TowerLevel, TowerPlan


class SchemaError(ValueError):
    def __init__(self, fmt: str, path: str, message: str) -> None:
        super().__init__(f"{fmt}: {path}: {message}")
        self.path = path


_ID = {"type": "integer"}
_KIND = {"enum": ["simple", "boundary"]}
_PAIR = {"type": "array", "items": _ID, "minItems": 2, "maxItems": 2}

SCHEMAS: dict[str, dict] = {
    "codingtree/1": {
        "type": "object",
        "required": ["format"],
        "properties": {
            "format": {"const": "codingtree/1"},
            "vertices": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["id", "kind"],
                    "properties": {"id": _ID, "kind": _KIND},
                },
            },
            "edges": {"type": "array", "items": _PAIR},
            "root": _ID,
            "rational": {
                "type": "object",
                "required": ["states", "start"],
                "properties": {
                    "start": _ID,
                    "states": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["id", "kind", "children"],
                            "properties": {
                                "id": _ID,
                                "kind": _KIND,
                                "children": {"type": "array", "items": _ID},
                            },
                        },
                    },
                },
            },
            "radius": _ID,
            "last_floor": {"type": ["integer", "null"]},
        },
        "anyOf": [{"required": ["rational"]}, {"required": ["vertices", "edges", "root"]}],
    },
    "cover/1": {
        "type": "object",
        "required": ["format", "degree", "monodromy"],
        "properties": {
            "format": {"const": "cover/1"},
            "degree": {"type": "integer", "minimum": 1},
            "alphabet": {"type": "array", "items": {"type": "string"}},
            "monodromy": {"type": "object", "additionalProperties": {"type": "string"}},
        },
    },
    "gluing/1": {
        "type": "object",
        "required": ["format", "pieces", "gluing"],
        "properties": {
            "format": {"const": "gluing/1"},
            "pieces": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["name", "circles"],
                    "properties": {
                        "name": {"type": "string"},
                        "connected": {"type": "boolean"},
                        "stays_connected_when_cut": {"type": "boolean"},
                        "circles": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["name", "side"],
                                "properties": {
                                    "name": {"type": "string"},
                                    "side": {"enum": ["+", "-"]},
                                    "degree": {"type": "integer", "minimum": 1},
                                },
                            },
                        },
                        "certificate": {"type": ["object", "null"]},
                    },
                },
            },
            "gluing": {
                "type": "array",
                "items": {
                    "type": "array",
                    "minItems": 2,
                    "maxItems": 2,
                    "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                },
            },
        },
    },
    "cert/1": {
        "type": "object",
        "required": ["format", "quantity", "value"],
        "properties": {
            "format": {"const": "cert/1"},
            "quantity": {"type": "string"},
            "value": {"type": "number", "minimum": 0},
            "premises": {"type": "array", "items": {"type": "object"}},
        },
    },
    "forest/1": {
        "type": "object",
        "required": ["format", "floors", "edges", "trees", "inclusions"],
        "properties": {
            "format": {"const": "forest/1"},
            "floors": {"type": "array", "items": {"type": "array", "items": _ID}},
            "edges": {"type": "array", "items": _PAIR},
            "trees": {"type": "object"},
            "inclusions": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["edge", "map"],
                    "properties": {"edge": _PAIR, "map": {"type": "array", "items": _PAIR}},
                },
            },
            "sources": {"type": "object"},
            "radius": {"type": "object"},
            "partial": {"type": "boolean"},
        },
    },
    "tower/1": {
        "type": "object",
        "required": ["format", "forest", "levels", "steps"],
        "properties": {
            "format": {"const": "tower/1"},
            "forest": {"type": "object"},
            "levels": {"type": "array", "items": {"type": "object", "required": ["floor", "complement"]}},
            "steps": {"type": "array", "items": {"type": "array"}},
            "base_systole": {"type": "number"},
        },
    },
    "census/1": {
        "type": "object",
        "required": ["format", "marked", "generic"],
        "properties": {"format": {"const": "census/1"}, "marked": {"type": "array"}},
    },
}


def check(doc: Any, fmt: str | None = None) -> str:
    """Validate ``doc`` against its schema and return its format tag."""
    if not isinstance(doc, dict):
        raise SchemaError(fmt or "?", "$", "document must be a JSON object")
    tag = doc.get("format")
    if fmt is not None and tag != fmt:
        raise SchemaError(fmt, "$.format", f"expected {fmt!r}, got {tag!r}")
    if tag not in SCHEMAS:
        raise SchemaError(str(tag), "$.format", "unknown format tag")
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(SCHEMAS[tag]).iter_errors(doc))
    if err is not None:
        raise SchemaError(tag, err.json_path, err.message)
    return tag


# --------------------------------------------------------------------------
# coding trees


def tree_to_json(t: CodingTree | RationalTree | DepthLimitedTree) -> dict:
    if isinstance(t, RationalTree):
        return {
            "format": "codingtree/1",
            "rational": {
                "start": t.start,
                "states": [{"id": s, "kind": k.value, "children": list(ch)} for s, k, ch in t.states],
            },
        }
    out: dict = {"format": "codingtree/1"}
    if isinstance(t, DepthLimitedTree):
        out["radius"] = t.radius
        out["last_floor"] = t.last_floor
        t = t.ball
    out.update(
        vertices=[{"id": v, "kind": k.value} for v, k in t.vertex_kinds],
        edges=[list(e) for e in t.edges],
        root=t.root,
    )
    return out


def tree_from_json(d: dict) -> CodingTree | RationalTree | DepthLimitedTree:
    check(d, "codingtree/1")
    if "rational" in d:
        r = d["rational"]
        return RationalTree.build({s["id"]: (s["kind"], s["children"]) for s in r["states"]}, r["start"])
    t = CodingTree.build({v["id"]: v["kind"] for v in d["vertices"]}, [tuple(e) for e in d["edges"]], d["root"])
    if "radius" in d:
        return DepthLimitedTree(t, d["radius"], d.get("last_floor"))
    return t


def tree_to_dot(t: CodingTree, name: str = "tree") -> str:
    lines = [f"graph {name} {{"]
    for v, k in t.vertex_kinds:
        shape = "circle" if k is Kind.SIMPLE else "box"
        extra = ", peripheries=2" if v == t.root else ""
        lines.append(f'  v{v} [shape={shape}, label="{v}"{extra}];')
    for a, b in t.edges:
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# covers and gluings


def cover_to_json(c: PermCover) -> dict:
    return {
        "format": "cover/1",
        "degree": c.degree,
        "alphabet": list(c.alphabet),
        "monodromy": {g: str(p) for g, p in zip(c.alphabet, c.monodromy)},
    }


def cover_from_json(d: dict) -> PermCover:
    check(d, "cover/1")
    try:
        c = PermCover.build(d["degree"], d["monodromy"])
    except ValueError as exc:
        raise SchemaError("cover/1", "$.monodromy", str(exc)) from None
    if "alphabet" in d and tuple(sorted(d["alphabet"])) != c.alphabet:
        raise SchemaError("cover/1", "$.alphabet", "alphabet does not match the monodromy keys")
    return c


def cert_to_json(c: TubeCertificate | None) -> dict | None:
    if c is None:
        return None
    return {
        "K": c.K,
        "collar_width": c.collar_width,
        "attached_collar_width": c.attached_collar_width,
        "genus_lower": c.genus_lower,
        "unique_short_lift": c.unique_short_lift,
    }


def tubecert_from_json(d: dict | None) -> TubeCertificate | None:
    if d is None:
        return None
    att = d.get("attached_collar_width")
    return TubeCertificate(
        float(d["K"]), float(d["collar_width"]), int(d["genus_lower"]), bool(d["unique_short_lift"]),
        None if att is None else float(att),
    )


def gluing_to_json(p: GluingPresentation) -> dict:
    return {
        "format": "gluing/1",
        "pieces": [
            {
                "name": pc.name,
                "connected": pc.connected,
                "stays_connected_when_cut": pc.stays_connected_when_cut,
                "circles": [{"name": c.name, "side": c.side, "degree": c.degree} for c in pc.circles],
                "certificate": cert_to_json(pc.certificate),
            }
            for pc in p.pieces
        ],
        "gluing": [[list(a), list(b)] for a, b in p.gluing],
    }


def gluing_from_json(d: dict) -> GluingPresentation:
    check(d, "gluing/1")
    pieces = tuple(
        Piece(
            pc["name"],
            tuple(Circle(c["name"], c["side"], c.get("degree", 1)) for c in pc["circles"]),
            pc.get("connected", True),
            pc.get("stays_connected_when_cut", True),
            tubecert_from_json(pc.get("certificate")),
        )
        for pc in d["pieces"]
    )
    try:
        return GluingPresentation(pieces, tuple((tuple(a), tuple(b)) for a, b in d["gluing"]))
    except ValueError as exc:
        raise SchemaError("gluing/1", "$.gluing", str(exc)) from None


def gluing_to_dot(p: GluingPresentation) -> str:
    lines = ["graph gluing {"]
    for pc in p.pieces:
        shape = "doubleoctagon" if pc.certificate else "ellipse"
        lines.append(f'  "{pc.name}" [shape={shape}];')
    circ = p.circles()
    for a, b in p.gluing:
        lines.append(f'  "{a[0]}" -- "{b[0]}" [label="{a[1]}/{b[1]} d={circ[a].degree}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# certificates


def bound_to_json(b: Bound | NoBound) -> dict:
    if isinstance(b, NoBound):
        return {"format": "cert/1", "quantity": "none", "value": 0, "nobound": b.reason, "failed": list(b.failed)}
    return b.to_json()


def bound_from_doc(d: dict) -> Bound | NoBound:
    check(d, "cert/1")
    if "nobound" in d:
        return NoBound(d["nobound"], tuple(d.get("failed", ())))
    return bound_from_json(d)


# --------------------------------------------------------------------------
# forests


def forest_to_json(f: ForestOfCodingTrees) -> dict:
    return {
        "format": "forest/1",
        "floors": [list(fl) for fl in f.forest.floors],
        "edges": [list(e) for e in f.forest.edges],
        "trees": {str(v): tree_to_json(t) for v, t in sorted(f.tree_at.items())},
        "inclusions": [
            {"edge": list(e), "map": [list(p) for p in inc.vertex_map]}
            for e, inc in sorted(f.inclusion_at.items())
        ],
        "sources": {str(v): tree_to_json(t) for v, t in sorted(f.sources.items())},
        "radius": {str(v): r for v, r in sorted(f.radius_at.items())},
        "partial": f.partial,
        "note": f.note,
    }


def forest_from_json(d: dict) -> ForestOfCodingTrees:
    check(d, "forest/1")
    trees = {}
    for k, td in d["trees"].items():
        t = tree_from_json(td)
        if not isinstance(t, CodingTree):
            raise SchemaError("forest/1", f"$.trees.{k}", "vertex trees must be finite")
        trees[int(k)] = t
    incs = {}
    for i, inc in enumerate(d["inclusions"]):
        a, b = inc["edge"]
        if a not in trees or b not in trees:
            raise SchemaError("forest/1", f"$.inclusions[{i}].edge", "edge joins unknown vertices")
        incs[(a, b)] = GoodTreeInclusion(trees[a], trees[b], tuple(sorted(tuple(p) for p in inc["map"])))
    forest = Forest(tuple(tuple(fl) for fl in d["floors"]), tuple(tuple(e) for e in d["edges"]))
    sources = {int(k): tree_from_json(v) for k, v in d.get("sources", {}).items()}
    radius = {int(k): int(v) for k, v in d.get("radius", {}).items()}
    return ForestOfCodingTrees(forest, trees, incs, sources, radius, d.get("partial", False), d.get("note", ""))


def forest_to_dot(f: ForestOfCodingTrees) -> str:
    lines = ["digraph forest {", "  rankdir=BT;"]
    from .surface_kit import surface_of

    for n, fl in enumerate(f.forest.floors):
        lines.append(f"  subgraph floor{n} {{ rank=same;")
        for v in fl:
            s = surface_of(f.tree_at[v])
            lines.append(f'    v{v} [label="{v}: g{s.genus} b{s.boundary_count}"];')
        lines.append("  }")
    for a, b in f.forest.edges:
        lines.append(f"  v{a} -> v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# triples and census


def descriptor_to_json(d) -> dict:
    if isinstance(d, FinitePoints):
        return {"kind": "points", "labels": list(d.labels)}
    if isinstance(d, CantorBlock):
        return {"kind": "cantor", "label": d.label}
    if isinstance(d, Composite):
        return {"kind": "composite", "parts": [descriptor_to_json(p) for p in d.parts]}
    return {"kind": "depth_limited", "depth": d.depth, "approx": list(d.approx), "reason": d.reason}


def descriptor_from_json(d: dict):
    k = d["kind"]
    if k == "points":
        return FinitePoints(tuple(d["labels"]))
    if k == "cantor":
        return CantorBlock(d["label"])
    if k == "composite":
        return Composite(tuple(descriptor_from_json(p) for p in d["parts"]))
    return DepthLimited(d["depth"], tuple(d["approx"]), d.get("reason", ""))


def triple_to_json(t: ClassifyingTriple) -> dict:
    return {
        "genus": "inf" if t.genus == INFINITE else int(t.genus),
        "ends": descriptor_to_json(t.ends),
        "accumulated": descriptor_to_json(t.ends_accumulated),
        "exact": t.exact,
    }


def triple_from_json(d: dict) -> ClassifyingTriple:
    g = INFINITE if d["genus"] == "inf" else int(d["genus"])
    return ClassifyingTriple(g, descriptor_from_json(d["ends"]), descriptor_from_json(d["accumulated"]))


def census_to_json(c: LeafCensus) -> dict:
    return {
        "format": "census/1",
        "depth": c.depth,
        "marked": [{"end": e, "triple": triple_to_json(t)} for e, t in c.marked],
        "generic": c.generic,
        "distinct": c.distinct,
        "unresolved": list(c.unresolved),
        "witnesses": [list(w) for w in c.witnesses],
    }


def census_from_json(d: dict) -> LeafCensus:
    check(d, "census/1")
    return LeafCensus(
        tuple((m["end"], triple_from_json(m["triple"])) for m in d["marked"]),
        d["generic"],
        d.get("distinct", True),
        tuple(d.get("unresolved", ())),
        d.get("depth", 0),
        tuple(tuple(w) for w in d.get("witnesses", ())),
    )


# --------------------------------------------------------------------------
# towers


def _step_to_json(s: PlanStep) -> dict:
    cert = None
    if isinstance(s.certificate, TubeCertificate):
        cert = {"tube": cert_to_json(s.certificate)}
    elif isinstance(s.certificate, Bound):
        cert = {"bound": s.certificate.to_json()}
    return {
        "kind": s.kind,
        "level": s.level,
        "target": s.target,
        "parameter": s.parameter,
        "certificate": cert,
        "room": list(s.room) if s.room is not None else None,
        "justification": list(s.justification),
    }


def _step_from_json(d: dict) -> PlanStep:
    cert = d.get("certificate")
    if cert is not None:
        cert = tubecert_from_json(cert["tube"]) if "tube" in cert else bound_from_json(cert["bound"])
    room = tuple(d["room"]) if d.get("room") is not None else None
    return PlanStep(d["kind"], d["level"], d["target"], float(d["parameter"]), cert, room, tuple(d["justification"]))


def tower_to_json(p: TowerPlan) -> dict:
    return {
        "format": "tower/1",
        "base_systole": p.base_systole,
        "forest": forest_to_json(p.forest),
        "levels": [
            {
                "floor": lvl.floor,
                "marked": sorted(lvl.marked_surfaces),
                "complement": {
                    "internal_systole": lvl.complement.internal_systole.to_json(),
                    "half_collar": lvl.complement.half_collar.to_json(),
                    "boundary_length": lvl.complement.boundary_length.to_json(),
                },
                "star_complement": bound_to_json(lvl.star_complement),
                "lift_maps": [
                    {"edge": list(e), "map": [list(x) for x in j.vertex_map]}
                    for e, j in sorted(lvl.lift_maps.items())
                ],
                "star_images": {str(v): list(img) for v, img in sorted(lvl.star_images.items())},
                "genus_reserve": lvl.genus_reserve,
            }
            for lvl in p.levels
        ],
        "steps": [[_step_to_json(s) for s in steps] for steps in p.steps],
    }


def tower_from_json(d: dict) -> TowerPlan:
    check(d, "tower/1")
    f = forest_from_json(d["forest"])
    levels = []
    for i, ld in enumerate(d["levels"]):
        lm = {}
        for m in ld.get("lift_maps", []):
            a, b = m["edge"]
            if a not in f.tree_at or b not in f.tree_at:
                raise SchemaError("tower/1", f"$.levels[{i}].lift_maps", "edge joins unknown vertices")
            lm[(a, b)] = GoodTreeInclusion(f.tree_at[a], f.tree_at[b], tuple(sorted(tuple(x) for x in m["map"])))
        comp = ld["complement"]
        levels.append(
            TowerLevel(
                ld["floor"],
                {v: f.tree_at[v] for v in ld.get("marked", [])},
                ComplementRecord(
                    bound_from_json(comp["internal_systole"]),
                    bound_from_json(comp["half_collar"]),
                    bound_from_json(comp["boundary_length"]),
                ),
                bound_from_doc(ld["star_complement"]),
                lm,
                {int(k): tuple(v) for k, v in ld.get("star_images", {}).items()},
                ld.get("genus_reserve", 0),
            )
        )
    steps = tuple(tuple(_step_from_json(s) for s in st) for st in d["steps"])
    return TowerPlan(f, tuple(levels), steps, float(d.get("base_systole", 1.0)))


def tower_to_dot(p: TowerPlan) -> str:
    lines = ["graph tower {"]
    for lvl in p.levels:
        n = lvl.floor
        lines.append(f"  subgraph cluster_level{n} {{")
        lines.append(f'    label="level {n}: sigma>={lvl.sigma:g} K>={lvl.K:g}";')
        lines.append(f'    X{n} [shape=box, label="X_{n}"];')
        for v in sorted(lvl.marked_surfaces):
            lines.append(f'    S{n}_{v} [label="S_{v}"];')
            lines.append(f"    X{n} -- S{n}_{v};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
