"""Floored forests, forests of coding trees and their ends.

Only a finite prefix of floors is ever stored.  The last stored floor is a
frontier: its vertices have their outgoing edges in floors that were not
built, so the "every vertex is an origin" axiom is checked on all floors
but the last one.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .surface_kit import (
    ClassifyingTriple,
    CodingTree,
    DepthLimitedTree,
    GoodTreeInclusion,
    Kind,
    RationalTree,
    TreeLike,
    ValidationReport,
    Violation,
    ball,
    canonical_form,
    canonical_relabel,
    classify_limit,
    find_good_inclusion,
    identity_inclusion,
    is_good_inclusion,
    truncate,
    validate_coding_tree,
)

BUDGET_ENV = "LAMTOWER_ENUM_BUDGET"
DEFAULT_BUDGET = 250_000


@dataclass(frozen=True)
class Forest:
    floors: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]

    def floor_of(self) -> dict[int, int]:
        return {v: n for n, fl in enumerate(self.floors) for v in fl}

    def out_edges(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v: [] for fl in self.floors for v in fl}
        for a, b in self.edges:
            out.setdefault(a, []).append(b)
        return out

    def in_edges(self) -> dict[int, list[int]]:
        inn: dict[int, list[int]] = {v: [] for fl in self.floors for v in fl}
        for a, b in self.edges:
            inn.setdefault(b, []).append(a)
        return inn

    def roots(self) -> list[int]:
        inn = self.in_edges()
        return [v for fl in self.floors for v in fl if not inn[v]]


def validate_forest(f: Forest, frontier_exempt: bool = True) -> ValidationReport:
    out: list[Violation] = []
    floor = {}
    for n, fl in enumerate(f.floors):
        for v in fl:
            if v in floor:
                out.append(Violation("duplicate-vertex", "vertex on two floors", (v,)))
            floor[v] = n
    for a, b in f.edges:
        if a not in floor or b not in floor:
            out.append(Violation("unknown-vertex", "edge uses an unknown vertex", (a, b)))
        elif floor[b] != floor[a] + 1:
            out.append(Violation("floor-jump", "edge does not go up exactly one floor", (a, b)))
    inn = f.in_edges()
    outg = f.out_edges()
    last = len(f.floors) - 1
    for v, n in floor.items():
        if len(inn.get(v, ())) > 1:
            out.append(Violation("multi-terminal", "vertex is the terminal of several edges", (v,)))
        if not outg.get(v) and not (frontier_exempt and n == last):
            out.append(Violation("no-origin", "vertex is the origin of no edge", (v,)))
    checks = ("finite floors", "edges go up one floor", "at most one incoming edge", "at least one outgoing edge")
    return ValidationReport(tuple(out), checks)


@dataclass(frozen=True)
class ForestOfCodingTrees:
    forest: Forest
    tree_at: Mapping[int, CodingTree]
    inclusion_at: Mapping[tuple[int, int], GoodTreeInclusion]
    # optional stored limit trees, keyed by root vertex
    sources: Mapping[int, TreeLike] = field(default_factory=dict)
    # radius of tree_at(v) as a ball of its limit tree, when known
    radius_at: Mapping[int, int] = field(default_factory=dict)
    partial: bool = False
    note: str = ""


def validate_forest_of_trees(f: ForestOfCodingTrees) -> ValidationReport:
    rep = validate_forest(f.forest)
    out = list(rep.violations)
    for fl in f.forest.floors:
        for v in fl:
            t = f.tree_at.get(v)
            if t is None:
                out.append(Violation("missing-tree", "vertex carries no coding tree", (v,)))
            elif not validate_coding_tree(t).ok:
                out.append(Violation("bad-tree", "vertex tree is not a coding tree", (v,)))
    for e in f.forest.edges:
        inc = f.inclusion_at.get(e)
        if inc is None:
            out.append(Violation("missing-inclusion", "edge carries no inclusion", e))
            continue
        a, b = e
        if inc.source != f.tree_at.get(a) or inc.target != f.tree_at.get(b):
            out.append(Violation("inclusion-ends", "inclusion does not join the edge's trees", e))
        elif not is_good_inclusion(inc.source, inc.target, inc.mapping):
            out.append(Violation("bad-inclusion", "edge map is not a good inclusion", e))
    if f.partial:
        out.append(Violation("partial", "enumeration budget exceeded; floors are incomplete"))
    return ValidationReport(tuple(out), rep.checks + ("trees valid", "edge maps are good inclusions"))


# ---------------------------------------------------------------------------
# rays


@dataclass(frozen=True)
class Ray:
    root: int
    vertices: tuple[int, ...]  # root first

    @property
    def edge_sequence(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.vertices, self.vertices[1:]))

    @property
    def last(self) -> int:
        return self.vertices[-1]

    @property
    def end_id(self) -> str:
        return f"e{self.root}" if len(self.vertices) == 1 else f"e{self.root}~{self.last}"

    def extend(self, f: Forest) -> list["Ray"]:
        outg = f.out_edges()
        return [Ray(self.root, self.vertices + (w,)) for w in outg.get(self.last, [])]


def rays(f: Forest, depth: int | None = None) -> list[Ray]:
    """All rays followed up to floor ``depth`` (default: the last floor)."""
    top = len(f.floors) - 1 if depth is None else min(depth, len(f.floors) - 1)
    floor = f.floor_of()
    outg = f.out_edges()
    out = []
    for r in f.roots():
        if floor[r] > top:
            continue
        stack = [(r,)]
        while stack:
            path = stack.pop()
            nxt = outg.get(path[-1], []) if floor[path[-1]] < top else []
            if not nxt:
                out.append(Ray(r, path))
            for w in reversed(nxt):
                stack.append(path + (w,))
    return out


def descendants_on_last_floor(f: Forest, v: int) -> int:
    outg = f.out_edges()
    level = [v]
    while True:
        nxt = [w for u in level for w in outg.get(u, [])]
        if not nxt:
            return len(level)
        level = nxt


# ---------------------------------------------------------------------------
# constructions


def countable_forest(trees: Sequence[TreeLike] | Iterable[TreeLike], floors: int | None = None) -> ForestOfCodingTrees:
    """One ray per input tree.

    Tree ``i`` (0-indexed) has its root on floor ``i``; on floor ``n`` it
    contributes the ball of radius ``2 (n - i) + 1``.  A generator of trees
    is consumed for the first ``floors`` items.
    """
    if not isinstance(trees, Sequence):
        if floors is None:
            raise ValueError("a tree generator needs an explicit number of floors")
        trees = list(itertools.islice(trees, floors))
    trees = list(trees)
    if not trees:
        raise ValueError("empty tree list")
    n_floors = len(trees) if floors is None else max(floors, len(trees))
    vid = {}
    tree_at: dict[int, CodingTree] = {}
    radius_at: dict[int, int] = {}
    floor_lists: list[list[int]] = []
    counter = itertools.count()
    for n in range(n_floors):
        fl = []
        for i, t in enumerate(trees[: n + 1]):
            v = next(counter)
            vid[(i, n)] = v
            tree_at[v] = truncate(t, n - i)
            radius_at[v] = 2 * (n - i) + 1
            fl.append(v)
        floor_lists.append(fl)
    edges = []
    inclusions = {}
    for (i, n), v in vid.items():
        w = vid.get((i, n + 1))
        if w is not None:
            edges.append((v, w))
            inclusions[(v, w)] = identity_inclusion(tree_at[v], tree_at[w])
    forest = Forest(tuple(tuple(fl) for fl in floor_lists), tuple(sorted(edges)))
    sources = {vid[(i, i)]: t for i, t in enumerate(trees)}
    return ForestOfCodingTrees(forest, tree_at, inclusions, sources, radius_at)


def _extensions(t: CodingTree, radius: int) -> Iterator[CodingTree]:
    """All coding trees whose radius-``radius + 2`` ball restricts to ``t``.

    Each boundary leaf at depth ``radius`` stays a leaf or receives a
    genus piece (one new boundary) or a pair of pants (two new boundaries).
    """
    d = t.depth_of
    frontier = [v for v in t.vertices if d[v] == radius and t.kind[v] is Kind.BOUNDARY and t.valency(v) == 1]
    base = max(t.vertices) + 1
    for choice in itertools.product((0, 1, 2), repeat=len(frontier)):
        kinds = dict(t.kind)
        edges = list(t.edges)
        nxt = base
        for v, c in zip(frontier, choice):
            if c == 0:
                continue
            s = nxt
            kinds[s] = Kind.SIMPLE
            edges.append((v, s))
            nxt += 1
            for _ in range(c):
                kinds[nxt] = Kind.BOUNDARY
                edges.append((s, nxt))
                nxt += 1
        yield CodingTree.build(kinds, edges, t.root)


def enumeration_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


def universal_forest(n_max: int, budget: int | None = None) -> ForestOfCodingTrees:
    """Floors ``0..n_max`` of the universal forest.

    Floor ``n`` holds one canonical representative per isomorphism class of
    radius-``2n+1`` root balls of coding trees.  Each floor-``n+1`` class
    is joined to the class of its own radius-``2n+1`` ball, which keeps
    every vertex the terminal of exactly one edge; the edge carries the
    least good inclusion between the representatives.  If the number of
    candidates examined exceeds ``budget`` the floors built so far are
    returned with ``partial`` set.
    """
    budget = enumeration_budget() if budget is None else budget
    counter = itertools.count()
    tree_at: dict[int, CodingTree] = {}
    radius_at: dict[int, int] = {}
    floors: list[list[int]] = []
    edges: list[tuple[int, int]] = []
    inclusions: dict[tuple[int, int], GoodTreeInclusion] = {}
    examined = 0
    partial = False

    level: dict[str, int] = {}
    for k in (1, 2, 3):
        t = canonical_relabel(_root_piece(k))
        v = next(counter)
        tree_at[v] = t
        radius_at[v] = 1
        level[canonical_form(t)] = v
    floors.append(sorted(level.values()))

    for n in range(1, n_max + 1):
        radius = 2 * n - 1
        new: dict[str, int] = {}
        pending: list[tuple[int, CodingTree]] = []
        for parent in floors[-1]:
            for ext in _extensions(tree_at[parent], radius):
                examined += 1
                if examined > budget:
                    partial = True
                    break
                code = canonical_form(ext)
                if code not in new:
                    new[code] = -1
                    pending.append((parent, canonical_relabel(ext)))
            if partial:
                break
        if partial:
            break
        fl = []
        for parent, t in sorted(pending, key=lambda p: (p[0], canonical_form(p[1]))):
            v = next(counter)
            tree_at[v] = t
            radius_at[v] = radius + 2
            inc = find_good_inclusion(tree_at[parent], t)
            assert inc is not None, "ball growth must give a good inclusion"
            edges.append((parent, v))
            inclusions[(parent, v)] = inc
            fl.append(v)
        floors.append(fl)

    forest = Forest(tuple(tuple(fl) for fl in floors), tuple(edges))
    note = f"examined {min(examined, budget)} candidates" + (f"; budget {budget} exceeded" if partial else "")
    return ForestOfCodingTrees(forest, tree_at, inclusions, {}, radius_at, partial, note)


def _root_piece(valency: int) -> CodingTree:
    kinds = {0: Kind.SIMPLE}
    kinds.update({i: Kind.BOUNDARY for i in range(1, valency + 1)})
    return CodingTree.build(kinds, [(0, i) for i in range(1, valency + 1)], 0)


def ray_of_tree(f: ForestOfCodingTrees, t: TreeLike, floors: int | None = None) -> Ray | None:
    """The ray ``n -> [B(t, 2n+1)]`` of a universal forest, if present."""
    top = len(f.forest.floors) - 1 if floors is None else floors
    by_code = [
        {canonical_form(f.tree_at[v]): v for v in fl} for fl in f.forest.floors[: top + 1]
    ]
    path = []
    for n, codes in enumerate(by_code):
        v = codes.get(canonical_form(truncate(t, n)))
        if v is None:
            return None
        if path and (path[-1], v) not in f.inclusion_at:
            return None
        path.append(v)
    return Ray(path[0], tuple(path))


# ---------------------------------------------------------------------------
# limits and census


def limit_tree(f: ForestOfCodingTrees, r: Ray, depth: int | None = None) -> TreeLike:
    """Increasing union of the trees along ``r`` (followed up to floor ``depth``).

    Exact when the chain is recognised as the ball filtration of a stored
    tree, or when it has stabilised on a finite tree; otherwise a
    :class:`DepthLimitedTree` whose radius is the largest one on which the
    last two trees agree.
    """
    floor = f.forest.floor_of()
    verts = r.vertices
    if depth is not None:
        verts = tuple(v for v in verts if floor[v] <= depth)
    trees = [f.tree_at[v] for v in verts]
    for a, b in zip(verts, verts[1:]):
        inc = f.inclusion_at.get((a, b))
        if inc is None or not is_good_inclusion(inc.source, inc.target, inc.mapping):
            raise ValueError(f"ray edge {(a, b)} does not carry a good inclusion")

    src = f.sources.get(r.root)
    if src is not None and all(
        canonical_form(t) == canonical_form(_ball_of(src, f.radius_at.get(v, 2 * k + 1)))
        for k, (v, t) in enumerate(zip(verts, trees))
    ):
        return src
    last = trees[-1]
    if len(trees) >= 2 and len(trees[-2]) == len(last) and last.depth < f.radius_at.get(verts[-1], last.depth + 1):
        return last  # stabilised finite tree
    if len(trees) == 1:
        return DepthLimitedTree(last, f.radius_at.get(verts[-1], last.depth), floor[verts[-1]])
    prev = trees[-2]
    agree = 0
    for rad in range(0, last.depth + 1):
        if canonical_form(ball(prev, rad)) != canonical_form(ball(last, rad)):
            break
        agree = rad
    known = f.radius_at.get(verts[-1])
    radius = known if known is not None else agree
    return DepthLimitedTree(last, radius, floor[verts[-1]])


def _ball_of(t: TreeLike, radius: int) -> CodingTree:
    if isinstance(t, RationalTree):
        return t.unfold(radius)
    if isinstance(t, DepthLimitedTree):
        return ball(t.ball, radius)
    return ball(t, radius)


@dataclass(frozen=True)
class LeafCensus:
    marked: tuple[tuple[str, ClassifyingTriple], ...]
    generic: str = "disk"
    distinct: bool = True
    unresolved: tuple[str, ...] = ()
    depth: int = 0
    witnesses: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        ids = [e for e, _ in self.marked]
        if len(set(ids)) != len(ids):
            raise ValueError("end identifiers repeat in census")

    def triples(self) -> list[ClassifyingTriple]:
        return [t for _, t in self.marked]

    def lines(self) -> list[str]:
        out = [f"{e}: {t}" for e, t in self.marked]
        out += [f"{e}: unresolved end cluster at depth {self.depth}" for e in self.unresolved]
        out += [f"witness {k}: {v}" for k, v in self.witnesses]
        out.append(f"generic leaf: {self.generic}")
        out.append(f"distinct ends give distinct leaves: {'yes' if self.distinct else 'no'}")
        return out


def leaf_census(f: ForestOfCodingTrees, depth: int | None = None) -> LeafCensus:
    """Classifying triple of the leaf attached to each end, plus the generic disk.

    Ends are followed up to floor ``depth``; a ray whose last vertex still
    branches in later stored floors is an unresolved cluster of ends.
    """
    top = len(f.forest.floors) - 1 if depth is None else min(depth, len(f.forest.floors) - 1)
    marked = []
    unresolved = []
    for r in rays(f.forest, top):
        if descendants_on_last_floor(f.forest, r.last) > 1:
            unresolved.append(r.end_id)
            continue
        lim = limit_tree(f, r, top)
        marked.append((r.end_id, classify_limit(lim, max(top, 1))))
    return LeafCensus(tuple(marked), "disk", True, tuple(unresolved), top)
