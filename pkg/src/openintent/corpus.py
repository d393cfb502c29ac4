"""Intent corpus loading and seeded IND/OOD experiment splits.

A corpus is a flat list of labeled utterances with train/validation/test
partition tags. A split fixes the IND and OOD label sets for one ratio
setting and samples three pools from the corpus: per-class OOD discovery
queries from the test partition, per-class joint test queries from the
test partition, and per-class IND demonstrations from the train
partition. Sampling is uniform without replacement, per class, from
labeled SplitMix64 streams, so a (corpus, config, seed) triple always
yields the identical split on any platform.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from .errors import ConfigError, CorpusFormatError
from .rng import SplitMix64

PARTITIONS = ("train", "validation", "test")
SPLIT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Utterance:
    id: int
    text: str
    label: str


@dataclass
class Corpus:
    name: str
    utterances: list[Utterance]
    label_set: list[str]
    partition_of: dict[int, str]  # utterance id -> train|validation|test

    def pool(self, label: str, partition: str) -> list[Utterance]:
        return [
            u
            for u in self.utterances
            if u.label == label and self.partition_of[u.id] == partition
        ]

    def in_partition(self, partition: str) -> list[Utterance]:
        return [u for u in self.utterances if self.partition_of[u.id] == partition]


def _record_from_jsonl(line: str, lineno: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError(f"line {lineno}: expected an object")
    return record


def _record_from_tsv(line: str, lineno: int) -> dict:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise CorpusFormatError(
            f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
        )
    return {"text": parts[0], "label": parts[1], "partition": parts[2]}


def load_corpus(path: Union[str, Path], format: str = "jsonl", name: Optional[str] = None) -> Corpus:
    """Load a corpus file; ids are assigned in file order starting at 1.

    Records need text, label, and partition; an optional explicit integer
    id overrides the file-order id and must stay unique. The label set
    keeps first-appearance order.
    """
    path = Path(path)
    if format not in ("jsonl", "tsv"):
        raise ConfigError(f"unsupported corpus format {format!r}")
    utterances: list[Utterance] = []
    label_set: list[str] = []
    partition_of: dict[int, str] = {}
    seen_ids: set[int] = set()
    with open(path, encoding="utf-8") as handle:
        lineno = 0
        next_id = 1
        for raw_line in handle:
            lineno += 1
            if not raw_line.strip():
                continue
            record = (
                _record_from_jsonl(raw_line, lineno)
                if format == "jsonl"
                else _record_from_tsv(raw_line, lineno)
            )
            for key in ("text", "label", "partition"):
                if key not in record:
                    raise CorpusFormatError(f"line {lineno}: record missing {key!r}")
            text = str(record["text"]).strip()
            if not text:
                raise CorpusFormatError(f"line {lineno}: empty text")
            partition = record["partition"]
            if partition not in PARTITIONS:
                raise CorpusFormatError(
                    f"line {lineno}: partition must be one of {PARTITIONS}, got {partition!r}"
                )
            if "id" in record:
                try:
                    uid = int(record["id"])
                except (TypeError, ValueError):
                    raise CorpusFormatError(f"line {lineno}: id must be an integer")
            else:
                uid = next_id
            if uid < 1:
                raise CorpusFormatError(f"line {lineno}: id must be positive, got {uid}")
            if uid in seen_ids:
                raise CorpusFormatError(f"line {lineno}: duplicate id {uid}")
            seen_ids.add(uid)
            next_id = max(next_id, uid) + 1
            label = str(record["label"])
            if label not in label_set:
                label_set.append(label)
            utterances.append(Utterance(id=uid, text=text, label=label))
            partition_of[uid] = partition
    if not utterances:
        raise CorpusFormatError(f"{path}: corpus file is empty")
    return Corpus(
        name=name or path.stem,
        utterances=utterances,
        label_set=label_set,
        partition_of=partition_of,
    )


@dataclass(frozen=True)
class SplitConfig:
    n_ind: int
    m_ood: int
    discovery_per_class: int = 5
    gid_per_class: int = 10
    demos_per_class: int = 3
    fixed_ind_labels: Optional[tuple[str, ...]] = None
    fixed_ood_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        for name in ("n_ind", "m_ood", "discovery_per_class", "gid_per_class", "demos_per_class"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        fixed = (self.fixed_ind_labels, self.fixed_ood_labels)
        if (fixed[0] is None) != (fixed[1] is None):
            raise ConfigError("fixed label lists must be given for both IND and OOD or neither")


def ratio_tag(n_ind: int, m_ood: int) -> str:
    g = math.gcd(n_ind, m_ood)
    reduced = (n_ind // g, m_ood // g)
    return {(3, 1): "3:1", (3, 2): "3:2", (1, 1): "1:1"}.get(reduced, "custom")


@dataclass(frozen=True)
class ExperimentSplit:
    ind_labels: tuple[str, ...]
    ood_labels: tuple[str, ...]
    discovery_pool: tuple[Utterance, ...]
    gid_test_pool: tuple[Utterance, ...]
    demo_pool: dict[str, tuple[Utterance, ...]] = field(compare=True)
    seed: int = 0
    ratio_tag: str = "custom"
    config: Optional[SplitConfig] = None


def _sample_pool(
    corpus: Corpus, label: str, partition: str, count: int, stream: SplitMix64
) -> list[Utterance]:
    pool = corpus.pool(label, partition)
    if len(pool) < count:
        raise ConfigError(
            f"class {label!r} has only {len(pool)} {partition} samples, {count} required"
        )
    return stream.sample(pool, count)


def make_split(corpus: Corpus, config: SplitConfig, seed: int) -> ExperimentSplit:
    """Draw a deterministic IND/OOD split for one ratio setting.

    Labels are either the configured fixed lists used verbatim, or a
    seeded shuffle of the corpus label set with the first n_ind labels
    taken as IND and the next m_ood as OOD. Per-class sample counts must
    be satisfiable exactly or the draw fails.
    """
    base = SplitMix64(seed)
    if config.fixed_ind_labels is not None:
        ind = list(config.fixed_ind_labels)
        ood = list(config.fixed_ood_labels or ())
        if len(ind) != config.n_ind or len(ood) != config.m_ood:
            raise ConfigError(
                f"fixed label lists have sizes {len(ind)}/{len(ood)}, "
                f"config expects {config.n_ind}/{config.m_ood}"
            )
        overlap = set(ind) & set(ood)
        if overlap:
            raise ConfigError(f"fixed IND and OOD label lists overlap: {sorted(overlap)}")
        unknown = [lab for lab in ind + ood if lab not in corpus.label_set]
        if unknown:
            raise ConfigError(f"fixed labels absent from corpus: {unknown}")
    else:
        if len(corpus.label_set) < config.n_ind + config.m_ood:
            raise ConfigError(
                f"corpus has {len(corpus.label_set)} labels, "
                f"{config.n_ind + config.m_ood} required"
            )
        labels = list(corpus.label_set)
        base.fork("label-order").shuffle(labels)
        ind = labels[: config.n_ind]
        ood = labels[config.n_ind : config.n_ind + config.m_ood]

    discovery: list[Utterance] = []
    for label in ood:
        discovery.extend(
            _sample_pool(
                corpus, label, "test", config.discovery_per_class, base.fork(f"discovery:{label}")
            )
        )
    gid_test: list[Utterance] = []
    for label in ind + ood:
        gid_test.extend(
            _sample_pool(corpus, label, "test", config.gid_per_class, base.fork(f"gid:{label}"))
        )
    demos: dict[str, tuple[Utterance, ...]] = {}
    for label in ind:
        demos[label] = tuple(
            _sample_pool(corpus, label, "train", config.demos_per_class, base.fork(f"demo:{label}"))
        )
    return ExperimentSplit(
        ind_labels=tuple(ind),
        ood_labels=tuple(ood),
        discovery_pool=tuple(discovery),
        gid_test_pool=tuple(gid_test),
        demo_pool=demos,
        seed=seed,
        ratio_tag=ratio_tag(config.n_ind, config.m_ood),
        config=config,
    )


def _utterance_dicts(utterances: Sequence[Utterance]) -> list[dict]:
    return [{"id": u.id, "text": u.text, "label": u.label} for u in utterances]


def _split_payload(split: ExperimentSplit) -> dict:
    config = asdict(split.config) if split.config else None
    if config:
        for key in ("fixed_ind_labels", "fixed_ood_labels"):
            if config[key] is not None:
                config[key] = list(config[key])
    return {
        "schema_version": SPLIT_SCHEMA_VERSION,
        "kind": "experiment-split",
        "seed": split.seed,
        "ratio_tag": split.ratio_tag,
        "config": config,
        "ind_labels": list(split.ind_labels),
        "ood_labels": list(split.ood_labels),
        "discovery_pool": _utterance_dicts(split.discovery_pool),
        "gid_test_pool": _utterance_dicts(split.gid_test_pool),
        "demo_pool": {label: _utterance_dicts(pool) for label, pool in split.demo_pool.items()},
    }


def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_split(split: ExperimentSplit, path: Union[str, Path]) -> None:
    """Serialize a split as one self-contained, checksummed JSON document."""
    payload = _split_payload(split)
    document = dict(payload, checksum=_payload_checksum(payload))
    Path(path).write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", "utf-8")


def read_split(path: Union[str, Path]) -> ExperimentSplit:
    try:
        document = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc.msg})") from exc
    if document.get("schema_version") != SPLIT_SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: schema version {document.get('schema_version')!r} "
            f"does not match expected {SPLIT_SCHEMA_VERSION}"
        )
    stored_checksum = document.pop("checksum", None)
    if stored_checksum != _payload_checksum(document):
        raise ConfigError(f"{path}: checksum mismatch, file corrupted or edited")

    def utterances(records: list[dict]) -> tuple[Utterance, ...]:
        return tuple(Utterance(id=r["id"], text=r["text"], label=r["label"]) for r in records)

    config = None
    if document.get("config"):
        raw = dict(document["config"])
        for key in ("fixed_ind_labels", "fixed_ood_labels"):
            if raw.get(key) is not None:
                raw[key] = tuple(raw[key])
        config = SplitConfig(**raw)
    return ExperimentSplit(
        ind_labels=tuple(document["ind_labels"]),
        ood_labels=tuple(document["ood_labels"]),
        discovery_pool=utterances(document["discovery_pool"]),
        gid_test_pool=utterances(document["gid_test_pool"]),
        demo_pool={
            label: utterances(pool) for label, pool in document["demo_pool"].items()
        },
        seed=document["seed"],
        ratio_tag=document["ratio_tag"],
        config=config,
    )


def load_fixed_label_lists(path: Union[str, Path]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Read a fixed-label fixture: JSON {"ind": [...], "ood": [...]}."""
    document = json.loads(Path(path).read_text("utf-8"))
    try:
        return tuple(document["ind"]), tuple(document["ood"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: expected object with 'ind' and 'ood' lists") from exc
