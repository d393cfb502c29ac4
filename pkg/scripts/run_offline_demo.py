#!/usr/bin/env python3
"""Run the bundled scripted discovery experiment and render its reports.

No network, no API key: the session replays the checked-in fixture, so
this doubles as a smoke test that a fresh checkout works end to end.
"""

import argparse
import sys
from pathlib import Path

from openintent.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = out_dir / "discovery.json"
    code = main([
        "discover",
        "--corpus", str(FIXTURES / "synthetic_corpus.jsonl"),
        "--split", str(FIXTURES / "discovery_split.json"),
        "--scripted", str(FIXTURES / "discovery_scripted.json"),
        "--runs", "3", "--seed", "0",
        "--out", str(report),
        "--markdown", str(out_dir / "discovery.md"),
        "--csv", str(out_dir / "discovery.csv"),
    ])
    if code != 0:
        return code
    return main(["report", "--in", str(report), "--format", "markdown",
                 "--out", str(out_dir / "rerendered.md")])


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=Path, default=Path("demo_out"))
    sys.exit(run(parser.parse_args().out_dir))
