#!/usr/bin/env python3
"""Build the bundled offline discovery fixture: corpus, split, responses.

The scripted responses are constructed from the gold structure so every
run scores clustering accuracy exactly 20/25 = 0.8: each class keeps
four of its five samples and donates one to the next class, which makes
the diagonal the unique optimal cluster-to-class matching.

Run from the repository root; rewrites the artifacts under
tests/fixtures/ that the end-to-end determinism checks replay.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))
from make_synthetic_corpus import corpus_records  # noqa: E402

from openintent.corpus import SplitConfig, load_corpus, make_split, write_split
from openintent.gateway import ProviderConfig, prompt_hash
from openintent.prompts import DiscoveryMethod, PromptLibrary, PromptVariant

RUNS = 3
SEED = 0


def shifted_response(index_map: dict[int, int], gold_by_id: dict[int, str]) -> str:
    """Category lines realizing the 4-kept / 1-donated structure."""
    positions_by_class: dict[str, list[int]] = {}
    class_order: list[str] = []
    for position in sorted(index_map):
        label = gold_by_id[index_map[position]]
        if label not in positions_by_class:
            positions_by_class[label] = []
            class_order.append(label)
        positions_by_class[label].append(position)

    clusters: dict[str, list[int]] = {label: [] for label in class_order}
    for idx, label in enumerate(class_order):
        own = positions_by_class[label]
        keep, donate = own[:-1], own[-1]
        clusters[label].extend(keep)
        clusters[class_order[(idx + 1) % len(class_order)]].append(donate)

    lines = []
    for number, label in enumerate(class_order, start=1):
        members = ", ".join(str(p) for p in sorted(clusters[label]))
        lines.append(f"Category {number}: {members}")
    return "\n".join(lines)


def build(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)

    corpus_path = out_dir / "synthetic_corpus.jsonl"
    with corpus_path.open("w", encoding="utf-8") as handle:
        for record in corpus_records(classes=8, test_per_class=12, train_per_class=6):
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")

    corpus = load_corpus(corpus_path)
    config = SplitConfig(n_ind=3, m_ood=5, discovery_per_class=5, gid_per_class=10,
                         demos_per_class=3)
    split = make_split(corpus, config, seed=SEED)
    split_path = out_dir / "discovery_split.json"
    write_split(split, split_path)

    provider = ProviderConfig()
    library = PromptLibrary()
    gold_by_id = {u.id: u.label for u in split.discovery_pool}
    fixture: dict[str, str] = {}
    for run_index in range(1, RUNS + 1):
        prompt = library.render_discovery(
            split,
            DiscoveryMethod.DC,
            PromptVariant.ORIGINAL,
            k=len(split.ood_labels),
            seed=SEED + run_index,
        )
        key = prompt_hash(provider.model_name, prompt.text, provider.temperature)
        fixture[key] = shifted_response(prompt.index_map, gold_by_id)

    fixture_path = out_dir / "discovery_scripted.json"
    fixture_path.write_text(
        json.dumps(fixture, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {corpus_path}")
    print(f"wrote {split_path}")
    print(f"wrote {fixture_path} ({len(fixture)} scripted responses)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir",
        default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"),
    )
    args = parser.parse_args()
    build(Path(args.out_dir))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
