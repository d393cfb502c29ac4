#!/usr/bin/env python3
"""Write a deterministic synthetic labeled corpus as JSONL.

Every class gets the same number of test and train utterances; texts are
plain enumerated sentences so the file is reproducible byte for byte
without any randomness.
"""

import argparse
import json
from pathlib import Path


def corpus_records(classes: int, test_per_class: int, train_per_class: int) -> list[dict]:
    records = []
    for c in range(classes):
        label = f"intent_{c:02d}"
        topic = label.replace("_", " ")
        for i in range(test_per_class):
            records.append(
                {
                    "text": f"test question {i:02d} about {topic}",
                    "label": label,
                    "partition": "test",
                }
            )
        for i in range(train_per_class):
            records.append(
                {
                    "text": f"train question {i:02d} about {topic}",
                    "label": label,
                    "partition": "train",
                }
            )
    return records


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--classes", type=int, default=30)
    parser.add_argument("--test-per-class", type=int, default=12)
    parser.add_argument("--train-per-class", type=int, default=6)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()
    records = corpus_records(args.classes, args.test_per_class, args.train_per_class)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"wrote {out}: {args.classes} classes, {len(records)} utterances")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
