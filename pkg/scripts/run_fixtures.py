"""Run every command listed in each fixture and print a one-line summary per run.

    python scripts/run_fixtures.py [--fixtures tests/fixtures] [--out reports/]
"""

import argparse
import json
import time
from pathlib import Path

from dmlsplit.cli import load_spec, run_command


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--fixtures", type=Path, default=Path(__file__).resolve().parents[1] / "tests" / "fixtures")
    ap.add_argument("--out", type=Path, default=None, help="write each report here as well")
    args = ap.parse_args()
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)

    for path in sorted(args.fixtures.glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        try:
            spec = load_spec(data)
        except Exception as exc:  # parse errors are part of the corpus
            print(f"{path.stem:24s} {'(load)':20s} error: {exc}")
            continue
        for command in data.get("commands", []):
            t0 = time.perf_counter()
            text, warnings, code = run_command(command, spec)
            dt = time.perf_counter() - t0
            print(f"{path.stem:24s} {command:20s} exit={code} {dt:6.2f}s warnings={len(warnings)}")
            if args.out:
                (args.out / f"{path.stem}.{command}.json").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    main()
