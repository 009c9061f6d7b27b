"""Build a tower plan over a countable forest and print its audit trail.

    python3 scripts/tower_report.py --levels 6
"""

import argparse

from lamtower import forest_kit as fk
from lamtower import surface_kit as sk
from lamtower import tower_builder as tb

LOCH_NESS = sk.RationalTree.build({0: ("simple", [1]), 1: ("boundary", [2]), 2: ("simple", [1])}, 0)
CANTOR = sk.RationalTree.build({0: ("simple", [1, 1, 1]), 1: ("boundary", [2]), 2: ("simple", [1, 1])}, 0)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, default=6)
    ap.add_argument("--trees", choices=("loch-ness", "mixed", "none"), default="loch-ness")
    args = ap.parse_args()
    if args.trees == "none":
        f = tb.empty_forest(args.levels)
    else:
        trees = [LOCH_NESS] if args.trees == "loch-ness" else [LOCH_NESS, CANTOR, sk.tree_from_nested([None, None, None])]
        f = fk.countable_forest(trees, args.levels)
    plan = tb.build_tower_plan(f, args.levels)
    print("\n".join(plan.audit()))
    rep = tb.verify_admissible(plan)
    print("\n".join(rep.lines()))
    print("\n".join(tb.census_of_tower(plan).lines()))
    caught = 0
    total = 0
    for n in range(args.levels):
        total += 1
        caught += not tb.verify_admissible(tb.delete_step(plan, n, tb.SECOND_PASS)).ok
        if plan.levels[n].lift_maps:
            total += 1
            caught += not tb.verify_admissible(tb.corrupt_lift_map(plan, n)).ok
    print(f"mutations caught: {caught}/{total}")


if __name__ == "__main__":
    main()
