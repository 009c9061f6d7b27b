import io
import json
from pathlib import Path

import pytest

from cli_cases import GOLDEN
from lamtower import formats as fm
from lamtower.cli import run

DATA = Path(__file__).parent / "data"
GOLD = Path(__file__).parent / "golden"


def invoke(args, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    argv = [str(DATA / a) if a.endswith(".json") else a for a in args]
    code = run(argv, io.StringIO(stdin_text), out, err)
    return code, out.getvalue(), err.getvalue()


def run_case(name, cache={}):
    if name in cache:
        return cache[name]
    args = list(GOLDEN[name])
    stdin = ""
    for i, a in enumerate(args):
        if a.startswith("@"):
            stdin = run_case(a[1:])[1]
            args[i] = "-"
    res = invoke(args, stdin)
    cache[name] = res
    return res


def test_spec_examples():
    assert invoke(["tree", "info", "pants.json"])[1] == "genus 0, boundary 3, χ=-1\n"
    assert invoke(["cover", "case", "--case", "4", "--n", "4"])[1] == "alpha: {1,4}; beta: no (1:1) lift\n"
    code, census, _ = run_case("forest_census")
    assert code == 0
    lines = census.splitlines()
    assert sum(1 for l in lines if l.startswith("e")) == 2
    assert "generic leaf: disk" in lines


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden(name):
    code, out, err = run_case(name)
    assert code == 0, err
    assert out == (GOLD / f"{name}.txt").read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["forest_countable", "tower_build", "cover_case3_json"])
def test_json_outputs_validate(name):
    doc = json.loads(run_case(name)[1])
    if "format" in doc:
        fm.check(doc)


def test_deterministic_bytes():
    for name in ("tower_build", "cover_driver", "forest_universal"):
        args = [a for a in GOLDEN[name]]
        stdin = run_case(args[2][1:])[1] if args[2].startswith("@") else ""
        args = ["-" if a.startswith("@") else a for a in args]
        assert invoke(args, stdin) == invoke(args, stdin)


def test_seed_flag_changes_nothing_visible():
    a = invoke(["cover", "case", "--case", "3", "--n", "6"])
    b = invoke(["cover", "case", "--case", "3", "--n", "6", "--seed", "7"])
    assert a[0] == b[0] == 0 and a[1] == b[1]


def test_out_flag(tmp_path):
    target = tmp_path / "t.json"
    code, out, _ = invoke(["tree", "truncate", "loch_ness.json", "--n", "2", "--format", "json", "--out", str(target)])
    assert code == 0 and out == ""
    assert fm.tree_from_json(json.loads(target.read_text()))


def test_exit_codes():
    assert invoke(["tree", "validate", "invalid_tree.json"])[0] == 1
    code, _, err = invoke(["tree", "validate", "malformed.json"])
    assert code == 2 and "$.vertices[0]" in err
    code, _, err = invoke(["tree", "info", "not_json.json"])
    assert code == 2 and "malformed" in err
    assert invoke(["tree", "bogus"])[0] == 2
    assert invoke(["cover", "case", "--case", "4", "--n", "2"])[0] == 2
    assert invoke(["cover", "case"])[0] == 2
    assert invoke(["cert", "eval", "inj-radius", "--sys", "1", "--k0", "4", "--sigma", "10"])[0] == 1
    assert invoke(["cert", "eval", "tube-genus"])[0] == 2
    assert invoke(["tree", "info", "missing.json"])[0] == 2


@pytest.mark.parametrize(
    "args",
    [
        ["forest", "universal"],
        ["tree", "truncate", "loch_ness.json"],
        ["tree", "canon", "loch_ness.json"],
        ["tree", "truncate", "pants.json", "--n", "-1"],
    ],
)
def test_missing_level_is_a_usage_error(args):
    code, out, err = invoke(args)
    assert code == 2 and out == "" and "needs --n" in err


def test_tower_census_rejects_corrupted_plan():
    doc = json.loads(run_case("tower_build")[1])
    lm = doc["levels"][2]["lift_maps"][0]["map"]
    # swap the images of the last two source vertices
    lm[-1][1], lm[-2][1] = lm[-2][1], lm[-1][1]
    code, out, _ = invoke(["tower", "verify", "-"], json.dumps(doc))
    assert code == 1 and "lift" in out
    assert invoke(["tower", "census", "-"], json.dumps(doc))[0] == 1
