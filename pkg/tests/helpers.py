"""Fixtures, random generators and independent oracles shared by the tests."""

from __future__ import annotations

import itertools
import random
from collections import deque

import networkx as nx
from hypothesis import strategies as st

from lamtower.surface_kit import CodingTree, Kind, RationalTree, tree_from_nested

S, B = Kind.SIMPLE, Kind.BOUNDARY

# an infinite chain of genus pieces with one end
LOCH_NESS = RationalTree.build({0: ("simple", [1]), 1: ("boundary", [2]), 2: ("simple", [1])}, 0)
# every vertex branches: a Cantor set of planar ends
BINARY_PANTS = RationalTree.build({0: ("simple", [1, 1, 1]), 1: ("boundary", [2]), 2: ("simple", [1, 1])}, 0)
# one boundary of the root left free, the other two branch forever
BINARY_PANTS_FREE = RationalTree.build(
    {0: ("simple", [1, 2, 2]), 1: ("boundary", []), 2: ("boundary", [3]), 3: ("simple", [2, 2])}, 0
)
# Loch-Ness with a genus piece on every branch of a binary tree
CANTOR_GENUS = RationalTree.build(
    {0: ("simple", [1, 1, 1]), 1: ("boundary", [2]), 2: ("simple", [3, 3]),
     3: ("boundary", [4]), 4: ("simple", [1]), },
    0,
)
PANTS = tree_from_nested([None, None, None])
TORUS_ONE_HOLE = tree_from_nested([None])
DISK_LIKE_FINITE = tree_from_nested([[None], [None, None]])


# --------------------------------------------------------------------------
# generators


def random_finite_tree(rng: random.Random, max_pieces: int = 25) -> CodingTree:
    kinds = {0: S}
    edges = []
    nxt = itertools.count(1)
    leaves = deque()
    for _ in range(rng.randint(1, 3)):
        b = next(nxt)
        kinds[b] = B
        edges.append((0, b))
        leaves.append(b)
    pieces = 1
    while leaves and pieces < max_pieces:
        b = leaves.popleft()
        if rng.random() < 0.45:
            continue
        s = next(nxt)
        kinds[s] = S
        edges.append((b, s))
        pieces += 1
        for _ in range(rng.randint(1, 2)):
            c = next(nxt)
            kinds[c] = B
            edges.append((s, c))
            leaves.append(c)
    # shuffle ids so nothing depends on the construction order
    ids = list(kinds)
    perm = ids[:]
    rng.shuffle(perm)
    m = dict(zip(ids, perm))
    return CodingTree.build({m[v]: k for v, k in kinds.items()}, [(m[a], m[b]) for a, b in edges], m[0])


def random_rational_tree(rng: random.Random, max_simple: int = 4) -> RationalTree:
    """Random valid automaton: a root state plus non-root simple and boundary states."""
    k = rng.randint(1, max_simple)
    simple = list(range(1, k + 1))
    states: dict[int, tuple[str, list[int]]] = {}
    nxt = itertools.count(100)

    def boundary_to(target: int | None) -> int:
        b = next(nxt)
        states[b] = ("boundary", [] if target is None else [target])
        return b

    def pick() -> int | None:
        return None if rng.random() < 0.3 else rng.choice(simple)

    states[0] = ("simple", [boundary_to(pick()) for _ in range(rng.randint(1, 3))])
    for s in simple:
        states[s] = ("simple", [boundary_to(pick()) for _ in range(rng.randint(1, 2))])
    return RationalTree.build(states, 0)


@st.composite
def finite_trees(draw, max_pieces: int = 25):
    return random_finite_tree(random.Random(draw(st.integers(0, 2**32 - 1))), max_pieces)


@st.composite
def rational_trees(draw, max_simple: int = 4):
    return random_rational_tree(random.Random(draw(st.integers(0, 2**32 - 1))), max_simple)


def nested_forms(max_simple: int) -> list:
    """Every ordered nested description with at most ``max_simple`` simple vertices."""

    def forms(budget: int, child_counts) -> list:
        if budget < 1:
            return []
        return [seq for k in child_counts for seq in slots(k, budget - 1)]

    def slots(k: int, budget: int) -> list:
        if k == 0:
            return [[]]
        out = []
        for first in [None] + forms(budget, (1, 2)):
            used = 0 if first is None else count_simple(first)
            for rest in slots(k - 1, budget - used):
                out.append([first] + rest)
        return out

    return forms(max_simple, (1, 2, 3))


def count_simple(form) -> int:
    return 1 + sum(count_simple(c) for c in form if c is not None)


# --------------------------------------------------------------------------
# oracles


def to_networkx(t: CodingTree) -> nx.Graph:
    g = nx.Graph()
    for v, k in t.vertex_kinds:
        g.add_node(v, label=(k.value, v == t.root))
    g.add_edges_from(t.edges)
    return g


def isomorphic_oracle(a: CodingTree, b: CodingTree) -> bool:
    return nx.is_isomorphic(to_networkx(a), to_networkx(b), node_match=lambda x, y: x["label"] == y["label"])


def additive_euler(t: CodingTree) -> int:
    """Sum over pieces of 2 - 2g - b; gluing along circles adds nothing."""
    chi = 0
    for v, k in t.vertex_kinds:
        if k is S:
            d = len(t.adjacency[v])
            g = 1 if d in (1, 2) else 0
            chi += 2 - 2 * g - d
    return chi


def cycle_lengths_bruteforce(perm_images: tuple[int, ...]) -> list[int]:
    """Cycle lengths of a permutation given as 1-based images, by walking."""
    seen = set()
    out = []
    for start in range(1, len(perm_images) + 1):
        if start in seen:
            continue
        n, x = 0, start
        while x not in seen:
            seen.add(x)
            x = perm_images[x - 1]
            n += 1
        out.append(n)
    return sorted(out)
