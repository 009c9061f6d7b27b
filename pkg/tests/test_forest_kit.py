import pytest
from hypothesis import given, settings, strategies as st

from helpers import BINARY_PANTS, BINARY_PANTS_FREE, LOCH_NESS, PANTS, rational_trees
from lamtower import forest_kit as fk
from lamtower import surface_kit as sk


def test_validate_forest_axioms():
    good = fk.Forest(((0,), (1, 2)), ((0, 1),))
    rep = fk.validate_forest(good)
    # vertex 2 has no incoming edge: it is a root on floor 1, which is allowed
    assert rep.ok
    bad = fk.Forest(((0,), (1,)), ((0, 1), (0, 1)))
    assert not fk.validate_forest(bad).ok
    stuck = fk.Forest(((0, 3), (1,), (2,)), ((0, 1), (1, 2)))
    # vertex 3 is below the frontier and has no outgoing edge
    assert not fk.validate_forest(stuck).ok
    # without the exemption the frontier floor itself is flagged
    assert not fk.validate_forest(fk.Forest(((0,), (1,)), ((0, 1),)), frontier_exempt=False).ok


def test_countable_single_tree_is_a_ray():
    f = fk.countable_forest([LOCH_NESS], 4)
    assert [len(fl) for fl in f.forest.floors] == [1, 1, 1, 1]
    rs = fk.rays(f.forest)
    assert len(rs) == 1 and len(rs[0].vertices) == 4
    assert fk.limit_tree(f, rs[0]) == LOCH_NESS


def test_countable_roots_on_floors():
    f = fk.countable_forest([LOCH_NESS, BINARY_PANTS, PANTS])
    floor = f.forest.floor_of()
    assert sorted(floor[r] for r in f.forest.roots()) == [0, 1, 2]
    assert len(fk.rays(f.forest)) == 3
    assert fk.validate_forest_of_trees(f).ok


def test_countable_radii():
    f = fk.countable_forest([LOCH_NESS, LOCH_NESS], 4)
    floor = f.forest.floor_of()
    for r in fk.rays(f.forest):
        i = floor[r.root]
        for v in r.vertices:
            assert f.radius_at[v] == 2 * (floor[v] - i) + 1


def test_countable_generator_and_errors():
    def gen():
        while True:
            yield LOCH_NESS

    f = fk.countable_forest(gen(), 3)
    assert len(f.forest.roots()) == 3
    with pytest.raises(ValueError):
        fk.countable_forest([])
    with pytest.raises(ValueError):
        fk.countable_forest(gen())


def test_universal_floor_sizes():
    f = fk.universal_forest(1)
    assert [len(fl) for fl in f.forest.floors] == [3, 19]
    assert fk.validate_forest_of_trees(f).ok
    # each floor-1 vertex has exactly one incoming ball-growth edge
    inn = f.forest.in_edges()
    assert all(len(inn[v]) == 1 for v in f.forest.floors[1])


def test_universal_budget_flag():
    f = fk.universal_forest(2, budget=10)
    assert f.partial and "budget" in f.note


def test_universal_floor_two_under_budget():
    f = fk.universal_forest(2, budget=10_000)
    assert not f.partial
    assert len(f.forest.floors[2]) == 285
    assert fk.validate_forest_of_trees(f).ok


def test_budget_env(monkeypatch):
    monkeypatch.setenv(fk.BUDGET_ENV, "7")
    assert fk.enumeration_budget() == 7
    assert fk.universal_forest(1).partial


@pytest.mark.parametrize("tree", [LOCH_NESS, BINARY_PANTS, BINARY_PANTS_FREE, PANTS])
def test_every_tree_has_a_universal_ray(tree):
    f = fk.universal_forest(1)
    r = fk.ray_of_tree(f, tree)
    assert r is not None and len(r.vertices) == 2
    lim = fk.limit_tree(f, r)
    assert sk.canonical_form(sk.truncate(lim, 1)) == sk.canonical_form(sk.truncate(tree, 1))


def test_limit_of_padded_finite_tree_stabilises():
    f = fk.countable_forest([PANTS], 4)
    r = fk.rays(f.forest)[0]
    assert sk.canonical_form(fk.limit_tree(f, r)) == sk.canonical_form(PANTS)


def test_limit_tree_depth_limited_when_unrecognised():
    f = fk.universal_forest(1)
    r = fk.ray_of_tree(f, LOCH_NESS)
    lim = fk.limit_tree(f, r)
    assert isinstance(lim, sk.DepthLimitedTree) and lim.last_floor == 1


def test_census_examples():
    c = fk.leaf_census(fk.countable_forest([LOCH_NESS], 6))
    assert c.generic == "disk" and len(c.marked) == 1
    c = fk.leaf_census(fk.countable_forest([LOCH_NESS, LOCH_NESS], 5))
    (e1, t1), (e2, t2) = c.marked
    assert e1 != e2 and sk.triples_equivalent(t1, t2).verdict is sk.Verdict.YES
    c = fk.leaf_census(fk.countable_forest([PANTS], 3))
    assert sk.triples_equivalent(c.marked[0][1], sk.classify_limit(PANTS)).verdict is sk.Verdict.YES


def test_census_reports_unresolved_clusters():
    f = fk.universal_forest(1)
    c = fk.leaf_census(f, 0)
    assert c.unresolved and not c.marked


@settings(max_examples=25)
@given(st.lists(rational_trees(max_simple=3), min_size=1, max_size=6))
def test_countable_invariants(trees):
    f = fk.countable_forest(trees)
    assert fk.validate_forest(f.forest).ok
    assert len(fk.rays(f.forest)) == len(trees)
    c = fk.leaf_census(f)
    assert len({e for e, _ in c.marked}) == len(c.marked) == len(trees)
    floor = f.forest.floor_of()
    for e, tri in c.marked:
        root = int(e[1:].split("~")[0])
        expect = sk.classify_limit(trees[floor[root]])
        verdict = sk.triples_equivalent(tri, expect).verdict
        # outside the classified fragment both sides are approximations
        assert verdict is (sk.Verdict.YES if expect.exact else verdict)
        assert verdict is not sk.Verdict.NO


@settings(max_examples=20)
@given(rational_trees(max_simple=3), st.integers(1, 3))
def test_limit_trees_agree_across_depths(t, d):
    f = fk.countable_forest([t], d + 2)
    r = fk.rays(f.forest)[0]
    a, b = fk.limit_tree(f, r, d), fk.limit_tree(f, r, d + 1)
    assert sk.canonical_form(sk.truncate(a, d)) == sk.canonical_form(sk.truncate(b, d))
