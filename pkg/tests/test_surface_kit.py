import random

import pytest
from hypothesis import given, strategies as st

from helpers import (
    BINARY_PANTS,
    BINARY_PANTS_FREE,
    CANTOR_GENUS,
    LOCH_NESS,
    PANTS,
    TORUS_ONE_HOLE,
    additive_euler,
    finite_trees,
    isomorphic_oracle,
    rational_trees,
)
from lamtower.surface_kit import (
    INFINITE,
    CantorBlock,
    ClassifyingTriple,
    CodingTree,
    Composite,
    DepthLimited,
    DepthLimitedTree,
    FinitePoints,
    Kind,
    RationalTree,
    UndecidableAtDepth,
    Verdict,
    as_rational,
    ball,
    canonical_form,
    canonical_relabel,
    classify_limit,
    end_count,
    find_good_inclusion,
    is_good_inclusion,
    surface_of,
    tree_from_nested,
    triples_equivalent,
    truncate,
    validate_coding_tree,
)


def test_pants_signature():
    assert str(surface_of(PANTS)) == "genus 0, boundary 3, χ=-1"


def test_torus_with_one_hole():
    sig = surface_of(TORUS_ONE_HOLE)
    assert (sig.genus, sig.boundary_count, sig.euler_characteristic) == (1, 1, -1)


def test_two_pants_glued():
    sig = surface_of(tree_from_nested([[None, None], None, None]))
    assert (sig.genus, sig.boundary_count, sig.euler_characteristic) == (0, 4, -2)


def test_surface_of_rejects_infinite_tree():
    with pytest.raises(ValueError, match="finite tree required"):
        surface_of(LOCH_NESS)


@pytest.mark.parametrize(
    "kinds, edges, code",
    [
        ({0: "boundary", 1: "simple"}, [(0, 1)], "root-kind"),
        ({0: "simple", 1: "simple"}, [(0, 1)], "same-kind-edge"),
        ({0: "simple", 1: "boundary", 2: "simple"}, [(0, 1), (1, 2)], "simple-leaf"),
        ({0: "simple", 1: "boundary", 2: "boundary", 3: "boundary", 4: "boundary"},
         [(0, 1), (0, 2), (0, 3), (0, 4)], "simple-valency"),
        ({0: "simple", 1: "boundary", 2: "simple", 3: "simple", 4: "simple", 5: "boundary", 6: "boundary", 7: "boundary"},
         [(0, 1), (1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (4, 7)], "boundary-valency"),
        ({0: "simple", 1: "boundary", 2: "boundary"}, [(0, 1)], "structure"),
    ],
)
def test_validation_codes(kinds, edges, code):
    rep = validate_coding_tree(CodingTree.build(kinds, edges, 0))
    assert not rep.ok and code in rep.codes()


def test_rational_validation():
    bad = RationalTree.build({0: ("simple", [1]), 1: ("boundary", [2]), 2: ("simple", [])}, 0)
    assert "simple-leaf" in validate_coding_tree(bad).codes()
    for t in (LOCH_NESS, BINARY_PANTS, BINARY_PANTS_FREE, CANTOR_GENUS):
        assert validate_coding_tree(t).ok


def test_truncate_radius_and_prefix():
    b1 = truncate(BINARY_PANTS_FREE, 1)
    kinds = [k for _, k in b1.vertex_kinds]
    assert kinds.count(Kind.SIMPLE) == 3 and kinds.count(Kind.BOUNDARY) == 7
    assert b1.depth == 3
    assert ball(truncate(LOCH_NESS, 4), 5) == truncate(LOCH_NESS, 2)


def test_truncate_depth_limited():
    d = DepthLimitedTree(truncate(LOCH_NESS, 2), 5)
    assert truncate(d, 2) == truncate(LOCH_NESS, 2)
    with pytest.raises(UndecidableAtDepth):
        truncate(d, 3)


def test_canonical_form_text():
    assert canonical_form(PANTS) == "S(B()B()B())"


def test_good_inclusion_examples():
    small = truncate(LOCH_NESS, 1)
    big = truncate(LOCH_NESS, 3)
    inc = find_good_inclusion(small, big)
    assert inc is not None and is_good_inclusion(small, big, inc.mapping)
    # a pants piece cannot be sent onto a genus piece
    assert find_good_inclusion(PANTS, TORUS_ONE_HOLE) is None
    # nor may a simple vertex lose neighbours
    assert find_good_inclusion(tree_from_nested([[None, None]]), tree_from_nested([[None]])) is None
    assert find_good_inclusion(small, LOCH_NESS) is not None


def test_good_inclusion_checker_rejects_non_induced():
    src = tree_from_nested([None, None])
    dst = tree_from_nested([None, None, None])
    assert not is_good_inclusion(src, dst, {v: v for v in src.vertices})


def test_find_inclusion_shallow_depth_limited():
    d = DepthLimitedTree(truncate(LOCH_NESS, 0), 1)
    with pytest.raises(UndecidableAtDepth):
        find_good_inclusion(truncate(LOCH_NESS, 2), d)


# classification


def test_classify_loch_ness():
    t = classify_limit(LOCH_NESS)
    assert t.genus == INFINITE and t.exact
    assert end_count(t.ends) == 1 and end_count(t.ends_accumulated) == 1


def test_classify_binary_pants():
    t = classify_limit(BINARY_PANTS)
    assert t.genus == 0 and isinstance(t.ends, CantorBlock)
    assert end_count(t.ends_accumulated) == 0


def test_classify_free_root_boundary():
    t = classify_limit(BINARY_PANTS_FREE)
    assert isinstance(t.ends, Composite)
    assert t.summary() == (0, 1, 0, True, False)


def test_classify_cantor_with_genus():
    t = classify_limit(CANTOR_GENUS)
    assert t.genus == INFINITE
    assert t.summary()[3:] == (False, True)


def test_classify_finite_interior():
    t = classify_limit(PANTS)
    assert t.genus == 0 and end_count(t.ends) == 3 and end_count(t.ends_accumulated) == 0


@given(finite_trees())
def test_finite_interior_matches_compact_surface(t):
    # interior of a compact surface: same genus, one planar end per boundary circle
    tri, sig = classify_limit(t), surface_of(t)
    assert tri.genus == sig.genus
    assert end_count(tri.ends) == sig.boundary_count and end_count(tri.ends_accumulated) == 0


def test_finite_genus_in_rational_tree():
    # two genus pieces then a pants that branches forever
    t = RationalTree.build(
        {0: ("simple", [1]), 1: ("boundary", [2]), 2: ("simple", [3]), 3: ("boundary", [4]),
         4: ("simple", [5, 5]), 5: ("boundary", [6]), 6: ("simple", [5, 5])},
        0,
    )
    assert validate_coding_tree(t).ok
    tri = classify_limit(t)
    assert tri.genus == 2 and isinstance(tri.ends, CantorBlock)


def test_depth_limited_classification():
    d = DepthLimitedTree(truncate(LOCH_NESS, 3), 7, 3)
    tri = classify_limit(d)
    assert not tri.exact and isinstance(tri.ends, DepthLimited)


def test_triple_equivalence():
    a = classify_limit(LOCH_NESS)
    b = classify_limit(RationalTree.build({0: ("simple", [1]), 1: ("boundary", [2]), 2: ("simple", [3]),
                                           3: ("boundary", [2])}, 0))
    assert triples_equivalent(a, b).verdict is Verdict.YES
    assert triples_equivalent(a, classify_limit(BINARY_PANTS)).verdict is Verdict.NO
    d = classify_limit(DepthLimitedTree(truncate(BINARY_PANTS, 2), 5, 2))
    assert triples_equivalent(d, classify_limit(BINARY_PANTS)).verdict in (Verdict.UNKNOWN, Verdict.YES)


def test_invalid_triple_rejected():
    bad = ClassifyingTriple(INFINITE, FinitePoints(("e0",)), FinitePoints(()))
    assert bad.invariant_violations()
    with pytest.raises(ValueError):
        triples_equivalent(bad, bad)


# properties


@given(finite_trees())
def test_euler_is_additive_and_consistent(t):
    sig = surface_of(t)
    assert sig.euler_characteristic == additive_euler(t)
    assert sig.euler_characteristic == 2 - 2 * sig.genus - sig.boundary_count


@given(finite_trees(), st.integers(0, 2**32 - 1))
def test_canonical_form_invariant_under_relabelling(t, seed):
    ids = t.vertices
    perm = ids[:]
    random.Random(seed).shuffle(perm)
    u = t.relabel(dict(zip(ids, perm)))
    assert canonical_form(u) == canonical_form(t)
    assert canonical_relabel(u) == canonical_relabel(t)
    assert isomorphic_oracle(canonical_relabel(t), t)


@given(finite_trees(max_pieces=8), finite_trees(max_pieces=8))
def test_canonical_form_matches_isomorphism(a, b):
    assert (canonical_form(a) == canonical_form(b)) == isomorphic_oracle(a, b)


@given(rational_trees(), st.integers(0, 4))
def test_truncation_chain_is_good(t, n):
    a, b = truncate(t, n), truncate(t, n + 1)
    assert is_good_inclusion(a, b, {v: v for v in a.vertices})
    assert validate_coding_tree(a).ok


@given(rational_trees())
def test_finite_view_roundtrip(t):
    u = truncate(t, 2)
    assert canonical_form(as_rational(u).unfold(u.depth)) == canonical_form(u)


@given(rational_trees())
def test_classification_is_valid(t):
    tri = classify_limit(t)
    assert not tri.invariant_violations()
    assert triples_equivalent(tri, tri).verdict is not Verdict.NO
