"""Rewrite tests/golden/*.txt from the current CLI output.

Only run this after checking that a change in output is intended.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from cli_cases import GOLDEN  # noqa: E402
from test_cli import run_case  # noqa: E402


def main() -> None:
    gold = ROOT / "tests" / "golden"
    gold.mkdir(exist_ok=True)
    for name in sorted(GOLDEN):
        code, out, err = run_case(name)
        if code != 0:
            raise SystemExit(f"{name}: exit {code}: {err}")
        (gold / f"{name}.txt").write_text(out, encoding="utf-8")
        print(f"wrote {name}.txt ({len(out)} bytes)")


if __name__ == "__main__":
    main()
