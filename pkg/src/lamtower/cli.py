"""Command-line front end.

Exit status: 0 on success, 1 when a validation or verification fails,
2 on usage errors and malformed input (the schema path of the first
violation is printed).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from . import cover_lab as cl
from . import formats as fm
from . import forest_kit as fk
from . import hyp_cert as hc
from . import surface_kit as sk
from . import tower_builder as tb

OK, INVALID, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def _read_json(path: str | None, stdin) -> dict:
    try:
        if path in (None, "-"):
            text = stdin.read()
            where = "<stdin>"
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
            where = path
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise fm.SchemaError("json", "$", f"{where}: {exc.msg} (line {exc.lineno})") from None


def _load(path: str | None, stdin, decode: Callable[[dict], object]):
    return decode(_read_json(path, stdin))


class Emitter:
    def __init__(self, args: argparse.Namespace, stdout) -> None:
        self.fmt = args.format
        self.out = args.out
        self.stdout = stdout
        self.chunks: list[str] = []

    def text(self, *lines: str) -> None:
        self.chunks.append("".join(line + "\n" for line in lines))

    def emit(self, doc: dict | None = None, text: Sequence[str] = (), dot: str | None = None) -> None:
        if self.fmt == "json" and doc is not None:
            self.chunks.append(fm.dumps(doc))
        elif self.fmt == "dot" and dot is not None:
            self.chunks.append(dot)
        elif self.fmt == "dot" and dot is None and doc is not None and not text:
            raise UsageError("no DOT rendering for this output")
        else:
            self.text(*text)

    def flush(self) -> None:
        data = "".join(self.chunks)
        if self.out:
            with open(self.out, "w", encoding="utf-8") as fh:
                fh.write(data)
        else:
            self.stdout.write(data)


def _parse_ref(text: str) -> tuple[str, str]:
    if ":" not in text:
        raise UsageError(f"circle reference must look like PIECE:CIRCLE, got {text!r}")
    a, b = text.split(":", 1)
    return a, b


# --------------------------------------------------------------------------
# tree


def cmd_tree(args, em: Emitter, stdin) -> int:
    t = _load(args.file, stdin, fm.tree_from_json)
    rep = sk.validate_coding_tree(t)
    if args.action == "validate":
        em.emit({"format": "report/1", "valid": rep.ok, "violations": [str(v) for v in rep.violations]}, rep.lines())
        return OK if rep.ok else INVALID
    if not rep.ok:
        em.text(*rep.lines())
        return INVALID
    if args.action == "info":
        if isinstance(t, sk.CodingTree):
            sig = sk.surface_of(t)
            tri = sk.classify_limit(t)
            em.emit(
                {
                    "genus": sig.genus,
                    "boundary": sig.boundary_count,
                    "euler_characteristic": sig.euler_characteristic,
                    "interior": fm.triple_to_json(tri),
                },
                [str(sig)],
                fm.tree_to_dot(t),
            )
        else:
            tri = sk.classify_limit(t, args.depth)
            em.emit({"interior": fm.triple_to_json(tri)}, [f"interior {tri}"])
        return OK
    if args.action == "truncate":
        b = sk.truncate(t, _radius(args, "tree truncate"))
        em.emit(fm.tree_to_json(b), [sk.canonical_form(b)], fm.tree_to_dot(b))
        return OK
    if args.action == "canon":
        if not isinstance(t, sk.CodingTree):
            t = sk.truncate(t, _radius(args, "tree canon of an infinite tree"))
        code = sk.canonical_form(t)
        em.emit({"canonical": code}, [code], fm.tree_to_dot(sk.canonical_relabel(t)))
        return OK
    raise UsageError(args.action)


# --------------------------------------------------------------------------
# forest


def _radius(args, what: str) -> int:
    # --n and --depth are interchangeable where only one level is meant
    n = args.n if args.n is not None else args.depth
    if n is None or n < 0:
        raise UsageError(f"{what} needs --n (a non-negative level)")
    return n


def cmd_forest(args, em: Emitter, stdin) -> int:
    a = args.action
    if a == "universal":
        f = fk.universal_forest(_radius(args, "forest universal"))
        em.emit(
            fm.forest_to_json(f),
            [f"floor {i}: {len(fl)} classes" for i, fl in enumerate(f.forest.floors)] + ([f.note] if f.note else []),
            fm.forest_to_dot(f),
        )
        return INVALID if f.partial else OK
    if a == "countable":
        if not args.files:
            raise UsageError("forest countable needs at least one tree file")
        trees = [_load(p, stdin, fm.tree_from_json) for p in args.files]
        for p, t in zip(args.files, trees):
            if not sk.validate_coding_tree(t).ok:
                em.text(f"{p}: not a valid coding tree")
                return INVALID
        floors = max(len(trees), args.depth if args.depth is not None else len(trees))
        f = fk.countable_forest(trees, floors)
        em.emit(fm.forest_to_json(f), [f"{len(trees)} trees, {floors} floors, {len(f.forest.roots())} roots"], fm.forest_to_dot(f))
        return OK
    f = _load(args.files[0] if args.files else None, stdin, fm.forest_from_json)
    if a == "validate":
        rep = fk.validate_forest_of_trees(f)
        em.emit({"format": "report/1", "valid": rep.ok, "violations": [str(v) for v in rep.violations]}, rep.lines())
        return OK if rep.ok else INVALID
    if a == "ends":
        rs = fk.rays(f.forest, args.depth)
        lines = []
        doc = []
        for r in rs:
            lim = fk.limit_tree(f, r, args.depth)
            kind = type(lim).__name__
            lines.append(f"{r.end_id}: ray length {len(r.vertices)}, limit {kind}")
            doc.append({"end": r.end_id, "vertices": list(r.vertices), "limit": fm.tree_to_json(lim)})
        em.emit({"format": "ends/1", "ends": doc}, lines or ["no ends"])
        return OK
    if a == "census":
        c = fk.leaf_census(f, args.depth)
        em.emit(fm.census_to_json(c), c.lines())
        return OK
    raise UsageError(a)


# --------------------------------------------------------------------------
# cover


def cmd_cover(args, em: Emitter, stdin) -> int:
    a = args.action
    if a in ("eval", "spectrum"):
        if len(args.files) != 2:
            raise UsageError(f"cover {a} needs COVER.json WORD")
        c = _load(args.files[0], stdin, fm.cover_from_json)
        try:
            w = cl.Word.parse(args.files[1])
            if a == "eval":
                p = cl.evaluate_word(c, w)
                em.emit({"word": str(w), "permutation": str(p)}, [str(p)])
            else:
                s = cl.lift_spectrum(c, w)
                em.emit({"word": str(w), "spectrum": list(s.degrees)}, [str(s)])
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        return OK
    if a == "case":
        if args.case is None or args.n is None:
            raise UsageError("cover case needs --case and --n")
        try:
            cc = cl.build_case(args.case, args.n, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        r = cc.report
        em.emit(
            {
                "case": cc.case_id,
                "N": cc.N,
                "cover": fm.cover_to_json(cc.cover),
                "alpha_word": str(cc.alpha_word),
                "beta_word": str(cc.beta_word),
                "alpha_spectrum": list(r.alpha_spectrum.degrees),
                "beta_spectrum": list(r.beta_spectrum.degrees),
                "ok": r.ok,
            },
            [r.line()],
        )
        return OK if r.ok else INVALID
    if a == "product":
        covers = [_load(p, stdin, fm.cover_from_json) for p in args.files]
        try:
            pc = cl.product_cover(covers)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        doc = {"cover": fm.cover_to_json(pc.product), "components": [list(c) for c in pc.components]}
        lines = [f"degree {pc.product.degree}, {len(pc.components)} components"]
        if args.word:
            s = pc.spectrum_on(args.word)
            b = pc.spectrum_on(args.word, pc.component_of(pc.basepoint))
            doc["spectrum"] = list(s.degrees)
            doc["basepoint_spectrum"] = list(b.degrees)
            lines += [f"spectrum {s}", f"basepoint component spectrum {b}"]
        em.emit(doc, lines)
        return OK
    if a == "surgery":
        if len(args.files) != 4:
            raise UsageError("cover surgery needs P1.json PIECE:CIRCLE P2.json PIECE:CIRCLE")
        p1 = _load(args.files[0], stdin, fm.gluing_from_json)
        p2 = _load(args.files[2], stdin, fm.gluing_from_json)
        try:
            p = cl.surgery(p1, _parse_ref(args.files[1]), p2, _parse_ref(args.files[3]))
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        comps = cl.connectivity(p)
        em.emit(fm.gluing_to_json(p), [f"degree {p.degree}, spectrum {p.spectrum()}, components {len(comps)}"], fm.gluing_to_dot(p))
        return OK
    if a == "tube":
        if len(args.files) != 2 or args.k is None:
            raise UsageError("cover tube needs P.json PIECE:CIRCLE --k K")
        p = _load(args.files[0], stdin, fm.gluing_from_json)
        try:
            q = cl.attach_tube(p, _parse_ref(args.files[1]), args.k)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        cert = q.piece("T").certificate
        em.emit(
            fm.gluing_to_json(q),
            [
                f"degree {q.degree}, spectrum {q.spectrum()}, components {len(cl.connectivity(q))}",
                f"tube K={cert.K:g}: collar >= {cert.collar_width:g} in the tube, "
                f">= {cert.attached_collar_width:g} once attached, genus >= {cert.genus_lower}",
            ],
            fm.gluing_to_dot(q),
        )
        return OK
    if a == "driver":
        if args.n is None or not args.cases:
            raise UsageError("cover driver needs --cases and --n")
        try:
            cases = [int(x) for x in args.cases.split(",")]
            rep = cl.second_systole_driver([(c, None) for c in cases], args.n, args.l1, args.l2)
        except cl.SearchFailure as exc:
            em.text(str(exc))
            return INVALID
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        em.emit(
            {
                "N": rep.N,
                "cases": list(rep.cases),
                "components": rep.components,
                "basepoint_component_size": rep.component_size,
                "alpha_degree_one_on_basepoint": rep.alpha_degree_one_on_base,
                "beta_degree_one": list(rep.beta_degree_one),
                "ok": rep.ok,
            },
            rep.lines(),
        )
        return OK if rep.ok else INVALID
    raise UsageError(a)


# --------------------------------------------------------------------------
# cert


def cmd_cert(args, em: Emitter, stdin) -> int:
    kind = args.kind
    need = {
        "half-collar": ("sigma", "l_alpha"),
        "inj-radius": ("sys", "k0", "sigma"),
        "crossing": ("k0",),
        "tube-genus": ("k",),
        "glue": ("k",),
    }[kind]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"cert eval {kind} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if kind == "tube-genus":
        if not args.k > 0:
            raise UsageError("K must be positive")
        g = hc.tube_genus_bound(args.k)
        raw = hc.tube_genus_raw(args.k)
        em.emit(
            {"format": "cert/1", "quantity": "genus", "value": g, "raw": raw, "area": hc.tube_area_bound(args.k)},
            [f"genus >= {g} (raw {raw:.6g}, area >= {hc.tube_area_bound(args.k):.6g})"],
        )
        return OK
    if kind == "half-collar":
        b = hc.half_collar_bound(args.sigma, args.l_alpha, args.pants)
    elif kind == "inj-radius":
        b = hc.inj_radius_bound(args.sys, args.k0, args.sigma)
    elif kind == "crossing":
        if not args.k0 > 0:
            raise UsageError("K0 must be positive")
        b = hc.crossing_bound(args.k0)
    else:
        parts = _read_json(args.parts, stdin)
        try:
            gp = [
                hc.GluePart(
                    p["name"],
                    p.get("internal_systole"),
                    tuple(p.get("interior_circles", ())),
                    p.get("collars", {}),
                    p.get("boundary_lengths", {}),
                )
                for p in parts["parts"]
            ]
        except (KeyError, TypeError) as exc:
            raise fm.SchemaError("parts", "$.parts", f"bad part description ({exc})") from None
        b = hc.glue_systole(gp, args.k)
    if isinstance(b, hc.NoBound):
        em.emit(fm.bound_to_json(b), [f"no bound: {b.reason}"])
        return INVALID
    em.emit(b.to_json(), b.derivation())
    return OK


# --------------------------------------------------------------------------
# tower


def cmd_tower(args, em: Emitter, stdin) -> int:
    a = args.action
    if a == "build":
        if args.levels is None:
            raise UsageError("tower build needs --levels")
        if args.file == "empty":
            f = tb.empty_forest(args.levels)
        else:
            f = _load(args.file, stdin, fm.forest_from_json)
        try:
            p = tb.build_tower_plan(f, args.levels)
        except ValueError as exc:
            em.text(str(exc))
            return INVALID
        em.emit(fm.tower_to_json(p), p.audit(), fm.tower_to_dot(p))
        return OK
    p = _load(args.file, stdin, fm.tower_from_json)
    rep = tb.verify_admissible(p)
    if a == "verify":
        em.emit({"format": "report/1", "valid": rep.ok, "violations": [str(v) for v in rep.violations]}, rep.lines())
        return OK if rep.ok else INVALID
    if a == "census":
        if not rep.ok:
            em.text(*rep.lines())
            return INVALID
        c = tb.census_of_tower(p, args.depth)
        em.emit(fm.census_to_json(c), c.lines())
        return OK
    raise UsageError(a)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=float)
    common.add_argument("--levels", type=int)
    common.add_argument("--format", choices=("json", "dot", "text"), default="text")
    common.add_argument("--out")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="lamtower", description="coding trees, covers and tower certificates")
    sub = parser.add_subparsers(dest="group", required=True)

    p = sub.add_parser("tree", parents=[common])
    p.add_argument("action", choices=("validate", "info", "truncate", "canon"))
    p.add_argument("file", nargs="?")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("forest", parents=[common])
    p.add_argument("action", choices=("validate", "universal", "countable", "ends", "census"))
    p.add_argument("files", nargs="*")
    p.set_defaults(func=cmd_forest)

    p = sub.add_parser("cover", parents=[common])
    p.add_argument("action", choices=("eval", "spectrum", "case", "product", "surgery", "tube", "driver"))
    p.add_argument("files", nargs="*")
    p.add_argument("--case", type=int)
    p.add_argument("--cases")
    p.add_argument("--word")
    p.add_argument("--l1", type=float)
    p.add_argument("--l2", type=float)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("cert", parents=[common])
    p.add_argument("action", choices=("eval",))
    p.add_argument("kind", choices=("half-collar", "inj-radius", "crossing", "tube-genus", "glue"))
    p.add_argument("parts", nargs="?")
    p.add_argument("--sigma", type=float)
    p.add_argument("--l-alpha", dest="l_alpha", type=float)
    p.add_argument("--sys", type=float)
    p.add_argument("--k0", type=float)
    p.add_argument("--pants", action="store_true")
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("tower", parents=[common])
    p.add_argument("action", choices=("build", "verify", "census"))
    p.add_argument("file", nargs="?")
    p.set_defaults(func=cmd_tower)
    return parser


def run(argv: Sequence[str] | None = None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    em = Emitter(args, stdout)
    try:
        status = args.func(args, em, stdin)
    except fm.SchemaError as exc:
        stderr.write(f"error: malformed input: {exc}\n")
        return USAGE
    except UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return USAGE
    em.flush()
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
