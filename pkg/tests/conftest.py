"""Shared helpers: synthetic corpora and scripted-fixture construction."""

import json
from pathlib import Path

import pytest

from openintent.corpus import SplitConfig
from openintent.gateway import ProviderConfig, prompt_hash
from openintent.prompts import PromptLibrary, build_joint_labels

FIXTURES = Path(__file__).parent / "fixtures"
LIBRARY = PromptLibrary()


def small_split_config(**overrides):
    base = dict(n_ind=2, m_ood=2, discovery_per_class=3, gid_per_class=2,
                demos_per_class=1)
    base.update(overrides)
    return SplitConfig(**base)


def corpus_lines(classes: int, test_per_class: int, train_per_class: int) -> list[str]:
    lines = []
    for c in range(classes):
        label = f"intent_{c:02d}"
        topic = label.replace("_", " ")
        for i in range(test_per_class):
            lines.append(json.dumps(
                {"text": f"test question {i:02d} about {topic}",
                 "label": label, "partition": "test"}))
        for i in range(train_per_class):
            lines.append(json.dumps(
                {"text": f"train question {i:02d} about {topic}",
                 "label": label, "partition": "train"}))
    return lines


def write_corpus(path: Path, classes: int = 8, test_per_class: int = 12,
                 train_per_class: int = 6) -> Path:
    path.write_text(
        "\n".join(corpus_lines(classes, test_per_class, train_per_class)) + "\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def corpus_file(tmp_path):
    return write_corpus(tmp_path / "corpus.jsonl")


@pytest.fixture
def provider():
    return ProviderConfig()


def hash_for(provider: ProviderConfig, text: str) -> str:
    return prompt_hash(provider.model_name, text, provider.temperature)


def grouped_response(index_map: dict[int, int], gold_by_id: dict[int, str]) -> str:
    """A perfect clustering response: one category per gold class, in
    order of first appearance."""
    order: list[str] = []
    members: dict[str, list[int]] = {}
    for position in sorted(index_map):
        label = gold_by_id[index_map[position]]
        if label not in members:
            members[label] = []
            order.append(label)
        members[label].append(position)
    return "\n".join(
        f"Category {i}: " + ", ".join(str(p) for p in members[label])
        for i, label in enumerate(order, start=1)
    )


def scripted_discovery(config, split, respond):
    """hash -> response for every discovery prompt the config will render."""
    fixture = {}
    gold_by_id = {u.id: u.label for u in split.discovery_pool}
    for run_index in range(1, config.runs + 1):
        run_seed = config.seed + run_index
        k = len(split.ood_labels) if config.include_cluster_count else None
        prompt = LIBRARY.render_discovery(
            split, config.method, config.variant, k=k, seed=run_seed
        )
        fixture[hash_for(config.provider, prompt.text)] = respond(prompt.index_map, gold_by_id)
    return fixture


def first_appearance_order(prompt, gold_by_id):
    order = []
    for position in sorted(prompt.index_map):
        label = gold_by_id[prompt.index_map[position]]
        if label not in order:
            order.append(label)
    return order


def scripted_gid(config, split, rename=None, answer_for=None, demos=None):
    """Script stage 1 (pseudo source only) and every stage-2 answer.

    ``rename`` maps each OOD label to the pseudo-intent text the scripted
    stage-1 summary will use. ``answer_for(joint_texts, query)`` returns
    the stage-2 response; the default answers correctly.
    """
    fixture = {}
    gold_by_id = {u.id: u.label for u in split.discovery_pool}

    def default_answer(joint_texts, query):
        target = query.label
        if rename is not None and target in rename:
            target = rename[target]
        return str(joint_texts.index(target) + 1)

    answer_for = answer_for or default_answer
    for run_index in range(1, config.runs + 1):
        run_seed = config.seed + run_index
        if config.intent_set_source == "pseudo":
            k = len(split.ood_labels)
            prompt = LIBRARY.render_gid_stage1(
                split, config.method, config.variant, k=k, seed=run_seed
            )
            order = first_appearance_order(prompt, gold_by_id)
            lines = []
            members = {label: [] for label in order}
            for position in sorted(prompt.index_map):
                members[gold_by_id[prompt.index_map[position]]].append(position)
            for i, label in enumerate(order, start=1):
                lines.append(
                    f"Category {i}: " + ", ".join(str(p) for p in members[label])
                )
            lines.append("")
            for i, label in enumerate(order, start=1):
                lines.append(f"Category {i}: {rename[label]}")
            fixture[hash_for(config.provider, prompt.text)] = "\n".join(lines)
            pseudo_texts = [rename[label] for label in order]
            joint = build_joint_labels(split.ind_labels, pseudo_texts)
        else:
            joint = build_joint_labels(split.ind_labels, split.ood_labels)
        joint_texts = [entry.text for entry in joint]
        for query in split.gid_test_pool:
            prompt2 = LIBRARY.render_gid_stage2(
                joint, query, demos=demos, variant=config.variant
            )
            fixture[hash_for(config.provider, prompt2.text)] = answer_for(
                joint_texts, query
            )
    return fixture
