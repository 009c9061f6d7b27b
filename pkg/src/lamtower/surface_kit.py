"""Coding trees for orientable surfaces.

A coding tree is a rooted tree whose vertices are either *simple* (a basic
surface piece) or *boundary* (a circle along which pieces are glued).  A
simple vertex of valency one is a one-holed torus, of valency two a
two-holed torus and of valency three a pair of pants.

Two presentations are supported:

* :class:`CodingTree`, an explicit finite tree;
* :class:`RationalTree`, a finite automaton of states whose unfolding from a
  start state is a (possibly infinite) coding tree.

The end spaces of unfolded rational trees are described with a small
descriptor algebra (finite sets of points, Cantor blocks and finite disjoint
unions of these).  Pairs ``(ends, ends accumulated by genus)`` outside that
fragment are reported as depth-limited approximations.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, Union

INFINITE = math.inf


class Kind(str, enum.Enum):
    SIMPLE = "simple"
    BOUNDARY = "boundary"


# --------------------------------------------------------------------------
# validation reports (shared by the other modules)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: tuple = ()

    def __str__(self) -> str:
        loc = f" at {list(self.where)}" if self.where else ""
        return f"[{self.code}] {self.message}{loc}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    checks: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def lines(self) -> list[str]:
        out = [f"check {c}" for c in self.checks]
        out += [str(v) for v in self.violations]
        out.append("valid" if self.ok else f"invalid ({len(self.violations)} violations)")
        return out


# --------------------------------------------------------------------------
# finite trees


@dataclass(frozen=True)
class CodingTree:
    """Explicit finite coding tree.

    ``vertex_kinds`` is a sorted tuple of ``(vertex id, Kind)`` pairs and
    ``edges`` a sorted tuple of normalised ``(u, v)`` pairs with ``u < v``.
    Use :meth:`build` to construct from loose data.
    """

    vertex_kinds: tuple[tuple[int, Kind], ...]
    edges: tuple[tuple[int, int], ...]
    root: int

    @classmethod
    def build(
        cls,
        kinds: Mapping[int, Kind | str],
        edges: Iterable[tuple[int, int]],
        root: int,
    ) -> "CodingTree":
        vk = tuple(sorted((int(v), Kind(k)) for v, k in kinds.items()))
        es = tuple(sorted({(min(a, b), max(a, b)) for a, b in edges}))
        return cls(vk, es, int(root))

    @cached_property
    def kind(self) -> dict[int, Kind]:
        return dict(self.vertex_kinds)

    @property
    def vertices(self) -> list[int]:
        return [v for v, _ in self.vertex_kinds]

    @cached_property
    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v, _ in self.vertex_kinds}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        for v in adj:
            adj[v].sort()
        return adj

    def valency(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def depth_of(self) -> dict[int, int]:
        """Distance from the root (only reachable vertices)."""
        dist = {self.root: 0}
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in self.adjacency.get(v, ()):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    @cached_property
    def children(self) -> dict[int, list[int]]:
        d = self.depth_of
        return {
            v: [w for w in self.adjacency[v] if d.get(w, -1) == d[v] + 1]
            for v in d
        }

    @property
    def depth(self) -> int:
        return max(self.depth_of.values())

    def simple_vertices(self) -> list[int]:
        return [v for v, k in self.vertex_kinds if k is Kind.SIMPLE]

    def relabel(self, mapping: Mapping[int, int]) -> "CodingTree":
        return CodingTree.build(
            {mapping[v]: k for v, k in self.vertex_kinds},
            [(mapping[a], mapping[b]) for a, b in self.edges],
            mapping[self.root],
        )

    def __len__(self) -> int:
        return len(self.vertex_kinds)


def tree_from_nested(nested: Sequence) -> CodingTree:
    """Build a tree from a nested list.

    A simple vertex is written as the list of its boundary children; each
    boundary child is ``None`` (a leaf) or the nested list of the simple
    vertex glued beyond it.  ``[None, None, None]`` is a pair of pants.
    """
    kinds: dict[int, Kind] = {}
    edges: list[tuple[int, int]] = []
    counter = itertools.count()

    def simple(node: Sequence) -> int:
        s = next(counter)
        kinds[s] = Kind.SIMPLE
        for child in node:
            b = next(counter)
            kinds[b] = Kind.BOUNDARY
            edges.append((s, b))
            if child is not None:
                edges.append((b, simple(child)))
        return s

    root = simple(nested)
    return CodingTree.build(kinds, edges, root)


# --------------------------------------------------------------------------
# rational (eventually periodic) trees


@dataclass(frozen=True)
class RationalTree:
    """A coding tree given by a finite base graph and an unfolding map.

    ``states`` holds ``(state id, kind, children)``; the tree is the
    unfolding of the directed base graph from ``start``.  A state's
    children are the states of its child vertices, in order.
    """

    states: tuple[tuple[int, Kind, tuple[int, ...]], ...]
    start: int

    @classmethod
    def build(
        cls,
        states: Mapping[int, tuple[Kind | str, Sequence[int]]],
        start: int,
    ) -> "RationalTree":
        st = tuple(
            sorted((int(s), Kind(k), tuple(int(c) for c in ch)) for s, (k, ch) in states.items())
        )
        return cls(st, int(start))

    @cached_property
    def kind(self) -> dict[int, Kind]:
        return {s: k for s, k, _ in self.states}

    @cached_property
    def succ(self) -> dict[int, tuple[int, ...]]:
        return {s: ch for s, _, ch in self.states}

    @cached_property
    def reachable(self) -> list[int]:
        seen = {self.start}
        order = [self.start]
        queue = deque([self.start])
        while queue:
            s = queue.popleft()
            for c in self.succ.get(s, ()):
                if c not in seen:
                    seen.add(c)
                    order.append(c)
                    queue.append(c)
        return order

    def unfold(self, radius: int) -> CodingTree:
        """Explicit ball of the given radius around the root.

        Vertex ids are assigned breadth first, so the ball of radius ``r``
        is the sub-tree of the ball of radius ``r + 2`` on the same ids.
        """
        kinds = {0: self.kind[self.start]}
        edges = []
        frontier = [(0, self.start)]
        counter = itertools.count(1)
        for _ in range(radius):
            nxt = []
            for v, s in frontier:
                for c in self.succ[s]:
                    w = next(counter)
                    kinds[w] = self.kind[c]
                    edges.append((v, w))
                    nxt.append((w, c))
            frontier = nxt
        return CodingTree.build(kinds, edges, 0)

    def states_on_cycles(self) -> set[int]:
        return {s for comp in _sccs(self) for s in comp if _is_cyclic(self, comp)}


@dataclass(frozen=True)
class DepthLimitedTree:
    """Finite approximation of an unknown infinite tree.

    ``ball`` is known to agree with the true tree up to radius ``radius``;
    ``last_floor`` records the forest floor it was read from.
    """

    ball: CodingTree
    radius: int
    last_floor: int | None = None


TreeLike = Union[CodingTree, RationalTree, DepthLimitedTree]


def as_rational(t: CodingTree) -> RationalTree:
    """View a finite tree as a rational one (one state per vertex)."""
    return RationalTree.build(
        {v: (t.kind[v], t.children[v]) for v in t.depth_of}, t.root
    )


# --------------------------------------------------------------------------
# validation


def validate_coding_tree(t: TreeLike) -> ValidationReport:
    if isinstance(t, RationalTree):
        return _validate_rational(t)
    if isinstance(t, DepthLimitedTree):
        t = t.ball
    return _validate_finite(t)


def _validate_finite(t: CodingTree) -> ValidationReport:
    out: list[Violation] = []
    kind = t.kind
    if t.root not in kind:
        return ValidationReport((Violation("structure", "root is not a vertex", (t.root,)),))
    for a, b in t.edges:
        if a not in kind or b not in kind:
            out.append(Violation("structure", "edge uses unknown vertex", (a, b)))
        elif a == b:
            out.append(Violation("structure", "self-loop", (a,)))
    if out:
        return ValidationReport(tuple(out))
    if len(t.edges) != len(kind) - 1 or len(t.depth_of) != len(kind):
        missing = sorted(set(kind) - set(t.depth_of))
        if missing:
            out.append(Violation("structure", "graph is disconnected", tuple(missing)))
        if len(t.edges) >= len(kind):
            out.append(Violation("structure", "graph contains a cycle"))
        return ValidationReport(tuple(out))
    if kind[t.root] is not Kind.SIMPLE:
        out.append(Violation("root-kind", "root must be a simple vertex", (t.root,)))
    for a, b in t.edges:
        if kind[a] is kind[b]:
            out.append(Violation("same-kind-edge", "edge joins two vertices of the same type", (a, b)))
    for v, k in t.vertex_kinds:
        d = t.valency(v)
        if k is Kind.BOUNDARY and d not in (1, 2):
            out.append(Violation("boundary-valency", f"boundary vertex has valency {d}", (v,)))
        if k is Kind.SIMPLE:
            if d not in (1, 2, 3):
                out.append(Violation("simple-valency", f"simple vertex has valency {d}", (v,)))
            elif d == 1 and v != t.root:
                out.append(Violation("simple-leaf", "valency-one simple vertex away from the root", (v,)))
    return ValidationReport(tuple(out))


def _validate_rational(t: RationalTree) -> ValidationReport:
    out: list[Violation] = []
    if t.start not in t.kind:
        return ValidationReport((Violation("structure", "start state missing", (t.start,)),))
    for s in t.reachable:
        for c in t.succ[s]:
            if c not in t.kind:
                out.append(Violation("structure", "child state missing", (s, c)))
    if out:
        return ValidationReport(tuple(out))
    if t.kind[t.start] is not Kind.SIMPLE:
        out.append(Violation("root-kind", "root must be a simple vertex", (t.start,)))
    if not 1 <= len(t.succ[t.start]) <= 3:
        out.append(Violation("simple-valency", "root valency must be 1, 2 or 3", (t.start,)))
    non_root = {c for s in t.reachable for c in t.succ[s]}
    for s in t.reachable:
        for c in t.succ[s]:
            if t.kind[c] is t.kind[s]:
                out.append(Violation("same-kind-edge", "edge joins two vertices of the same type", (s, c)))
        if s in non_root:
            d = len(t.succ[s]) + 1
            if t.kind[s] is Kind.BOUNDARY and d not in (1, 2):
                out.append(Violation("boundary-valency", f"boundary state has valency {d}", (s,)))
            if t.kind[s] is Kind.SIMPLE and d not in (2, 3):
                code = "simple-leaf" if d == 1 else "simple-valency"
                out.append(Violation(code, f"non-root simple state has valency {d}", (s,)))
    return ValidationReport(tuple(out))


# --------------------------------------------------------------------------
# surfaces


@dataclass(frozen=True)
class CompactSurfaceSignature:
    genus: int
    boundary_count: int
    euler_characteristic: int

    def __post_init__(self) -> None:
        if self.euler_characteristic != 2 - 2 * self.genus - self.boundary_count:
            raise ValueError(f"inconsistent signature {self}")

    def __str__(self) -> str:
        return f"genus {self.genus}, boundary {self.boundary_count}, χ={self.euler_characteristic}"


PIECE_EULER = {1: -1, 2: -2, 3: -1}


def surface_of(t: TreeLike) -> CompactSurfaceSignature:
    if not isinstance(t, CodingTree):
        raise ValueError("finite tree required")
    genus = boundary = chi = 0
    for v, k in t.vertex_kinds:
        d = t.valency(v)
        if k is Kind.SIMPLE:
            chi += PIECE_EULER[d]
            genus += d in (1, 2)
        elif d == 1:
            boundary += 1
    return CompactSurfaceSignature(genus, boundary, chi)


# --------------------------------------------------------------------------
# truncation, canonical forms, inclusions


def truncate(t: TreeLike, n: int) -> CodingTree:
    """Ball of radius ``2n + 1`` about the root."""
    radius = 2 * n + 1
    if isinstance(t, RationalTree):
        return t.unfold(radius)
    if isinstance(t, DepthLimitedTree):
        if radius > t.radius:
            raise UndecidableAtDepth(t.radius, radius)
        t = t.ball
    return ball(t, radius)


def ball(t: CodingTree, radius: int) -> CodingTree:
    keep = {v for v, d in t.depth_of.items() if d <= radius}
    if len(keep) == len(t.vertex_kinds):
        return t
    return CodingTree.build(
        {v: t.kind[v] for v in keep},
        [(a, b) for a, b in t.edges if a in keep and b in keep],
        t.root,
    )


CanonicalCode = str


def canonical_form(t: CodingTree) -> CanonicalCode:
    """AHU-style code: kind letter followed by the sorted child codes."""
    codes: dict[int, str] = {}
    d = t.depth_of
    for v in sorted(d, key=d.__getitem__, reverse=True):
        inner = "".join(sorted(codes[c] for c in t.children[v]))
        codes[v] = ("S" if t.kind[v] is Kind.SIMPLE else "B") + "(" + inner + ")"
    return codes[t.root]


def canonical_relabel(t: CodingTree) -> CodingTree:
    """Isomorphic copy whose ids follow a canonical breadth-first order."""
    codes: dict[int, str] = {}
    d = t.depth_of
    for v in sorted(d, key=d.__getitem__, reverse=True):
        codes[v] = ("S" if t.kind[v] is Kind.SIMPLE else "B") + "(" + "".join(
            sorted(codes[c] for c in t.children[v])
        ) + ")"
    order = [t.root]
    i = 0
    while i < len(order):
        order.extend(sorted(t.children[order[i]], key=codes.__getitem__))
        i += 1
    return t.relabel({v: j for j, v in enumerate(order)})


@dataclass(frozen=True)
class GoodTreeInclusion:
    source: CodingTree
    target: CodingTree
    vertex_map: tuple[tuple[int, int], ...]

    @cached_property
    def mapping(self) -> dict[int, int]:
        return dict(self.vertex_map)


class UndecidableAtDepth(Exception):
    def __init__(self, available: int, needed: int) -> None:
        super().__init__(f"undecidable at depth {available} (needs radius {needed})")
        self.available = available
        self.needed = needed


def is_good_inclusion(src: CodingTree, dst: CodingTree, mapping: Mapping[int, int]) -> bool:
    """Check every defining property of a good inclusion directly."""
    if set(mapping) != set(src.kind):
        return False
    image = list(mapping.values())
    if len(set(image)) != len(image) or not set(image) <= set(dst.kind):
        return False
    if mapping[src.root] != dst.root:
        return False
    if any(src.kind[v] is not dst.kind[w] for v, w in mapping.items()):
        return False
    dst_edges = set(dst.edges)
    for a, b in src.edges:
        x, y = mapping[a], mapping[b]
        if (min(x, y), max(x, y)) not in dst_edges:
            return False
    img = set(image)
    # the image must be an induced copy: no extra edges between image vertices
    if sum(1 for a, b in dst.edges if a in img and b in img) != len(src.edges):
        return False
    for w in img:
        if dst.kind[w] is Kind.SIMPLE and any(u not in img for u in dst.adjacency[w]):
            return False
    return True


def find_good_inclusion(src: CodingTree, dst: TreeLike) -> GoodTreeInclusion | None:
    """Lexicographically least good inclusion, or ``None``.

    Candidate images of the children of each vertex are tried in increasing
    target id order, so the witness is least in source pre-order.  A
    rational target is unfolded just deep enough to decide; a depth-limited
    target that is too shallow raises :class:`UndecidableAtDepth`.
    """
    need = src.depth + 1
    if isinstance(dst, RationalTree):
        dst = dst.unfold(need)
    elif isinstance(dst, DepthLimitedTree):
        if dst.radius < need and dst.ball.depth >= dst.radius:
            raise UndecidableAtDepth(dst.radius, need)
        dst = dst.ball
    memo: dict[tuple[int, int], dict[int, int] | None] = {}

    def match(v: int, w: int) -> dict[int, int] | None:
        key = (v, w)
        if key in memo:
            return memo[key]
        res = None
        if src.kind[v] is dst.kind[w]:
            sc, dc = src.children[v], dst.children[w]
            if src.kind[v] is Kind.SIMPLE:
                ok = len(src.adjacency[v]) == len(dst.adjacency[w])
            else:
                ok = len(sc) <= len(dc)
            if ok:
                for perm in itertools.permutations(dc, len(sc)):
                    acc = {v: w}
                    for a, b in zip(sc, perm):
                        sub = match(a, b)
                        if sub is None:
                            break
                        acc.update(sub)
                    else:
                        res = acc
                        break
        memo[key] = res
        return res

    m = match(src.root, dst.root)
    if m is None:
        return None
    return GoodTreeInclusion(src, dst, tuple(sorted(m.items())))


def identity_inclusion(src: CodingTree, dst: CodingTree) -> GoodTreeInclusion:
    return GoodTreeInclusion(src, dst, tuple((v, v) for v in src.vertices))


# --------------------------------------------------------------------------
# end spaces and classifying triples


@dataclass(frozen=True)
class FinitePoints:
    labels: tuple[str, ...]

    def __str__(self) -> str:
        return "{" + ", ".join(self.labels) + "}"


@dataclass(frozen=True)
class CantorBlock:
    label: str = "C"

    def __str__(self) -> str:
        return f"Cantor[{self.label}]"


@dataclass(frozen=True)
class Composite:
    parts: tuple["EndSpaceDescriptor", ...]

    def __str__(self) -> str:
        return " ⊔ ".join(str(p) for p in self.parts) or "{}"


@dataclass(frozen=True)
class DepthLimited:
    """Approximation read off a finite ball; never exact.

    ``approx`` counts ``(punctures, frontier vertices, frontier vertices
    whose branch still carries genus)`` in the ball of radius ``depth``.
    """

    depth: int
    approx: tuple[int, int, int]
    reason: str = ""

    def __str__(self) -> str:
        return f"depth-{self.depth}{list(self.approx)}"


EndSpaceDescriptor = Union[FinitePoints, CantorBlock, Composite, DepthLimited]


def _atoms(d: EndSpaceDescriptor) -> Iterator[str]:
    if isinstance(d, FinitePoints):
        for lab in d.labels:
            yield "p:" + lab
    elif isinstance(d, CantorBlock):
        yield "c:" + d.label
    elif isinstance(d, Composite):
        for p in d.parts:
            yield from _atoms(p)


def is_empty(d: EndSpaceDescriptor) -> bool:
    if isinstance(d, DepthLimited):
        return d.approx[2] == 0
    return next(_atoms(d), None) is None


def end_count(d: EndSpaceDescriptor) -> float:
    """Number of ends (``inf`` as soon as a Cantor block is present)."""
    if isinstance(d, DepthLimited):
        return INFINITE if d.approx[1] else d.approx[0]
    n = 0
    for a in _atoms(d):
        if a.startswith("c:"):
            return INFINITE
        n += 1
    return n


def _make_descriptor(points: Sequence[str], blocks: Sequence[str]) -> EndSpaceDescriptor:
    parts: list[EndSpaceDescriptor] = []
    if points:
        parts.append(FinitePoints(tuple(points)))
    parts.extend(CantorBlock(b) for b in blocks)
    if len(parts) == 1:
        return parts[0]
    if not parts:
        return FinitePoints(())
    return Composite(tuple(parts))


@dataclass(frozen=True)
class ClassifyingTriple:
    genus: float  # int, or INFINITE
    ends: EndSpaceDescriptor
    ends_accumulated: EndSpaceDescriptor

    @property
    def exact(self) -> bool:
        return not isinstance(self.ends, DepthLimited)

    def invariant_violations(self) -> list[str]:
        out = []
        if self.exact:
            acc = set(_atoms(self.ends_accumulated))
            if not acc <= set(_atoms(self.ends)):
                out.append("ends_accumulated is not contained in ends")
            if (self.genus == INFINITE) != bool(acc):
                out.append("g=inf iff accumulated ends nonempty is violated")
        if self.genus != INFINITE and (self.genus < 0 or self.genus != int(self.genus)):
            out.append("genus must be a nonnegative integer or infinite")
        return out

    def summary(self) -> tuple:
        """Homeomorphism invariant on the exact fragment.

        ``(genus, plain points, accumulated points, plain Cantor?, accumulated Cantor?)``
        """
        acc = set(_atoms(self.ends_accumulated))
        pts = [a for a in _atoms(self.ends) if a.startswith("p:")]
        cbs = [a for a in _atoms(self.ends) if a.startswith("c:")]
        return (
            self.genus,
            sum(a not in acc for a in pts),
            sum(a in acc for a in pts),
            any(a not in acc for a in cbs),
            any(a in acc for a in cbs),
        )

    def __str__(self) -> str:
        g = "inf" if self.genus == INFINITE else str(int(self.genus))
        return f"(genus {g}, ends {self.ends}, accumulated {self.ends_accumulated})"


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown beyond depth"


@dataclass(frozen=True)
class Equivalence:
    verdict: Verdict
    depth: int | None = None

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES


def triples_equivalent(a: ClassifyingTriple, b: ClassifyingTriple) -> Equivalence:
    for t in (a, b):
        bad = t.invariant_violations()
        if bad:
            raise ValueError("invalid classifying triple: " + "; ".join(bad))
    if a.exact and b.exact:
        return Equivalence(Verdict.YES if a.summary() == b.summary() else Verdict.NO)
    depths = [t.ends.depth for t in (a, b) if isinstance(t.ends, DepthLimited)]
    return Equivalence(Verdict.UNKNOWN, min(depths))


# classification of rational trees ------------------------------------------


def _sccs(t: RationalTree) -> list[list[int]]:
    """Tarjan's algorithm on the reachable part (iterative)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[list[int]] = []
    counter = itertools.count()
    for root in t.reachable:
        if root in index:
            continue
        work = [(root, iter(t.succ[root]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(t.succ[w])))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    out.append(sorted(comp))
    return out


def _is_cyclic(t: RationalTree, comp: Sequence[int]) -> bool:
    return len(comp) > 1 or comp[0] in t.succ[comp[0]]


def _genus_states(t: RationalTree) -> set[int]:
    """States whose every occurrence is a genus piece.

    A non-root simple state has valency ``children + 1``, so it is a genus
    piece exactly when it has one child; the root counts if its own
    valency is 1 or 2.
    """
    out = {s for s in t.reachable if t.kind[s] is Kind.SIMPLE and len(t.succ[s]) == 1}
    return out


class _OutsideFragment(Exception):
    pass


def classify_limit(t: TreeLike, depth: int = 8) -> ClassifyingTriple:
    """Classifying triple of the interior of the surface coded by ``t``.

    Boundary leaves of the tree are boundary circles; in the interior they
    become isolated planar ends.  Exact for finite trees and for rational
    trees whose end pair falls in the descriptor fragment; otherwise a
    depth-limited triple computed from the ball of radius ``2 depth + 1``.
    """
    if isinstance(t, CodingTree):
        sig = surface_of(t)
        leaves = [str(v) for v, k in t.vertex_kinds if k is Kind.BOUNDARY and t.valency(v) == 1]
        return ClassifyingTriple(sig.genus, FinitePoints(tuple(leaves)), FinitePoints(()))
    if isinstance(t, DepthLimitedTree):
        return _depth_limited_triple(t.ball, min(t.radius, 2 * depth + 1), "not rational")
    try:
        return _classify_rational(t)
    except _OutsideFragment as exc:
        return _depth_limited_triple(t.unfold(2 * depth + 1), 2 * depth + 1, str(exc))


def _classify_rational(t: RationalTree) -> ClassifyingTriple:
    comps = _sccs(t)  # reverse topological order: sinks first
    comp_of = {s: i for i, c in enumerate(comps) for s in c}
    cyclic = [_is_cyclic(t, c) for c in comps]
    gstates = _genus_states(t)
    root_genus = len(t.succ[t.start]) in (1, 2)

    # does the subtree below (and including) a state contain genus?
    reach_genus: dict[int, bool] = {}
    # does it contain infinitely many genus pieces?
    inf_genus: dict[int, bool] = {}
    for i, comp in enumerate(comps):
        exits = {c for s in comp for c in t.succ[s] if comp_of[c] != i}
        here = any(s in gstates for s in comp)
        rg = here or any(reach_genus[comp_of[c]] for c in exits)
        ig = any(inf_genus[comp_of[c]] for c in exits) or (cyclic[i] and rg)
        reach_genus[i] = rg
        inf_genus[i] = ig

    labels = itertools.count()
    # per-component end structure: (points, acc points, cantor, acc cantor)
    # only stored for components where it is uniform across states
    struct: dict[int, tuple[int, int, bool, bool]] = {}

    def ends_of_state(s: int) -> tuple[int, int, bool, bool]:
        i = comp_of[s]
        if cyclic[i]:
            return struct[i]
        if t.kind[s] is Kind.BOUNDARY and not t.succ[s] and s != t.start:
            return (1, 0, False, False)
        acc = (0, 0, False, False)
        for c in t.succ[s]:
            acc = _add(acc, ends_of_state(c))
        return acc

    for i, comp in enumerate(comps):
        if not cyclic[i]:
            continue
        exits = [c for s in comp for c in t.succ[s] if comp_of[c] != i]
        status = reach_genus[i]
        branching = sum(1 for s in comp for c in t.succ[s] if comp_of[c] == i) > len(comp)
        exit_structs = [ends_of_state(c) for c in exits]
        if not exits:
            struct[i] = (0, 0, not status, status) if branching else (int(not status), int(status), False, False)
            continue
        for p, ap, cb, acb in exit_structs:
            if p or ap:
                raise _OutsideFragment("isolated ends accumulate onto a periodic branch")
            if (acb and not status) or (cb and status):
                raise _OutsideFragment("accumulated and plain ends mix in a Cantor block")
        struct[i] = (0, 0, not status, status)

    root_comp = comp_of[t.start]
    if cyclic[root_comp]:
        total = struct[root_comp]
    else:
        total = (0, 0, False, False)
        for c in t.succ[t.start]:
            total = _add(total, ends_of_state(c))

    genus: float = (
        INFINITE
        if inf_genus[root_comp]
        else _finite_genus(t, gstates, root_genus, lambda s: reach_genus[comp_of[s]])
    )
    plain, accp, cb, acb = total
    pts = [f"e{next(labels)}" for _ in range(plain)]
    apts = [f"e{next(labels)}" for _ in range(accp)]
    blocks = (["C"] if cb else [])
    ablocks = (["C*"] if acb else [])
    ends = _make_descriptor(pts + apts, blocks + ablocks)
    acc_d = _make_descriptor(apts, ablocks)
    triple = ClassifyingTriple(genus, ends, acc_d)
    bad = triple.invariant_violations()
    if bad:  # pragma: no cover - guarded by the fragment rules
        raise _OutsideFragment("; ".join(bad))
    return triple


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] or b[2], a[3] or b[3])


def _finite_genus(t: RationalTree, gstates: set[int], root_genus: bool, reaches) -> int:
    """Count genus occurrences when there are finitely many.

    States that reach no genus piece contribute nothing, which also keeps
    the recursion away from cycles (a cycle reaching genus has infinite genus).
    """
    memo: dict[int, int] = {}

    def count(s: int) -> int:
        if not reaches(s):
            return 0
        if s not in memo:
            memo[s] = (s in gstates) + sum(count(c) for c in t.succ[s])
        return memo[s]

    return int(root_genus) + sum(count(c) for c in t.succ[t.start])


def _depth_limited_triple(b: CodingTree, radius: int, reason: str) -> ClassifyingTriple:
    b = ball(b, radius)
    d = b.depth_of
    punct = sum(
        1 for v, k in b.vertex_kinds if k is Kind.BOUNDARY and b.valency(v) == 1 and d[v] < radius
    )
    frontier = [v for v in b.vertices if d[v] == radius and b.kind[v] is Kind.BOUNDARY and b.valency(v) == 1]
    # a frontier branch "carries genus" if its parent piece is a genus piece
    with_genus = 0
    for v in frontier:
        parent = next(u for u in b.adjacency[v] if d[u] == d[v] - 1)
        with_genus += b.valency(parent) in (1, 2)
    genus = surface_of(b).genus
    desc = DepthLimited(radius, (punct, len(frontier), with_genus), reason)
    acc = DepthLimited(radius, (0, with_genus, with_genus), reason)
    return ClassifyingTriple(genus, desc, acc)
