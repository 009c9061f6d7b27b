from dataclasses import replace

import pytest

from helpers import BINARY_PANTS, LOCH_NESS, PANTS
from lamtower import forest_kit as fk
from lamtower import tower_builder as tb


@pytest.fixture(scope="module")
def loch_plan():
    return tb.build_tower_plan(fk.countable_forest([LOCH_NESS], 6), 6)


def test_plan_sequences(loch_plan):
    sig = [lvl.sigma for lvl in loch_plan.levels]
    ks = [lvl.K for lvl in loch_plan.levels]
    assert all(s >= n for n, s in enumerate(sig)) and all(k >= n for n, k in enumerate(ks))
    assert sig == sorted(sig) and ks == sorted(ks)
    assert tb.verify_admissible(loch_plan).ok


def test_mutations(loch_plan):
    assert "collar" in tb.verify_admissible(tb.delete_step(loch_plan, 2, tb.SECOND_PASS)).codes()
    assert "lift" in tb.verify_admissible(tb.corrupt_lift_map(loch_plan, 3)).codes()
    assert "roots" in tb.verify_admissible(tb.delete_step(loch_plan, 0, tb.ATTACH_TUBE)).codes()
    assert "carve" in tb.verify_admissible(tb.delete_step(loch_plan, 1, tb.CARVE)).codes()


def test_star_images_mutation(loch_plan):
    levels = list(loch_plan.levels)
    levels[2] = replace(levels[2], star_images={})
    assert "star" in tb.verify_admissible(replace(loch_plan, levels=tuple(levels))).codes()


def test_census_and_growth(loch_plan):
    c = tb.census_of_tower(loch_plan)
    assert len(c.marked) == 1 and c.generic == "disk"
    wit = tb.growth_witness(loch_plan)
    values = [v for _, v in wit if v is not None]
    assert values == sorted(values) and values[-1] > values[0]


def test_census_refuses_bad_plan(loch_plan):
    with pytest.raises(ValueError):
        tb.census_of_tower(tb.corrupt_lift_map(loch_plan, 1))


def test_replayed_tubes_are_connected_degree_one(loch_plan):
    for level, target, shape, comps in tb.replay_tubes(loch_plan):
        assert shape == (1, 1) and comps == 1


def test_room_is_large_enough():
    f = fk.countable_forest([BINARY_PANTS, PANTS, LOCH_NESS])
    plan = tb.build_tower_plan(f, 3)
    assert tb.verify_admissible(plan).ok
    for lvl, steps in zip(plan.levels, plan.steps):
        room = next(s for s in steps if s.target == "room")
        assert room.certificate.genus_lower >= lvl.genus_reserve


def test_empty_forest_plan():
    plan = tb.build_tower_plan(tb.empty_forest(3), 3)
    assert tb.verify_admissible(plan).ok
    assert tb.census_of_tower(plan).marked == ()


def test_plan_errors():
    with pytest.raises(ValueError):
        tb.build_tower_plan(fk.countable_forest([LOCH_NESS], 2), 5)
    with pytest.raises(ValueError):
        tb.build_tower_plan(fk.countable_forest([LOCH_NESS], 2), 0)


def test_second_pass_bounds_monotone():
    prev = None
    for K in range(1, 8):
        sigma, collar, length = tb.second_pass_bounds(K)
        assert sigma.value >= K and collar.value >= K and length.value > K
        if prev:
            assert sigma.value > prev
        prev = sigma.value


def test_tube_collars_after_attachment_exceed_level(loch_plan):
    for lvl, steps in zip(loch_plan.levels, loch_plan.steps):
        for st in steps:
            if st.kind == tb.ATTACH_TUBE:
                assert st.certificate.attached_collar_width == st.parameter / 4 > lvl.floor


def test_weak_tube_is_caught(loch_plan):
    steps = list(loch_plan.steps)
    weak = [replace(s, parameter=2.0, certificate=tb.TubeCertificate.for_K(2.0)) if s.target == "room" else s
            for s in steps[3]]
    steps[3] = tuple(weak)
    assert "tube" in tb.verify_admissible(replace(loch_plan, steps=tuple(steps))).codes()
