"""Experiment orchestration: discovery runs, two-stage runs, and studies.

Composes splits, prompts, the gateway, parsing, recall repair, and
scoring into complete seeded experiments. Runs execute sequentially and
run r uses seed ``config.seed + r`` everywhere, so a replay store or
scripted fixture reproduces a whole experiment byte for byte.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

from .corpus import (
    Corpus,
    ExperimentSplit,
    SplitConfig,
    Utterance,
    load_corpus,
    load_fixed_label_lists,
    make_split,
    read_split,
)
from .embed_cluster import EmbeddingSet, estimate_k, load_embeddings
from .errors import ConfigError, UnparseableResponseError
from .gateway import Exchange, LiveSession, ProviderConfig, Session
from .metrics import (
    SINK_LABEL,
    align_pseudo,
    clustering_scores,
    group_scores,
    k_error,
)
from .parsing import (
    parse_classification,
    parse_cluster_assignment,
    parse_intent_descriptions,
)
from .prompts import (
    DiscoveryMethod,
    JointIntent,
    PromptLibrary,
    PromptVariant,
    build_joint_labels,
)
from .recall import RecallReport, audit, repair, repair_answers, to_label_list
from .rng import SplitMix64

DEMO_STRATEGIES = ("none", "ind", "ood")
INTENT_SET_SOURCES = ("pseudo", "ground_truth", "ground_truth_with_descriptions")


@dataclass(frozen=True)
class StudySpec:
    """Which study axes to fan out over; empty axes are skipped."""

    sample_sweep: tuple[int, ...] = ()
    demo_strategies: tuple[str, ...] = ()
    intent_set_ablation: bool = False
    prompt_variants: tuple[PromptVariant, ...] = ()
    estimate_k: bool = False
    baseline_k_prime: tuple[int, ...] = ()
    size_threshold_ratio: float = 0.9
    embeddings_path: Optional[Path] = None

    def __post_init__(self):
        for strategy in self.demo_strategies:
            if strategy not in DEMO_STRATEGIES:
                raise ConfigError(f"unknown demo strategy {strategy!r}")
        if any(v < 1 for v in self.sample_sweep):
            raise ConfigError("sample_sweep values must be >= 1")
        if any(v < 1 for v in self.baseline_k_prime):
            raise ConfigError("baseline_k_prime values must be >= 1")
        if self.baseline_k_prime and self.embeddings_path is None:
            raise ConfigError("baseline_k_prime requires an embeddings file")

    def active_axes(self) -> list[str]:
        axes = []
        if self.sample_sweep:
            axes.append("sample_sweep")
        if self.demo_strategies:
            axes.append("demo_strategies")
        if self.intent_set_ablation:
            axes.append("intent_set_ablation")
        if self.prompt_variants:
            axes.append("prompt_variants")
        if self.estimate_k:
            axes.append("estimate_k")
        return axes


@dataclass(frozen=True)
class ExperimentConfig:
    corpus_path: Optional[Path] = None
    corpus_format: str = "jsonl"
    split_path: Optional[Path] = None
    split: Optional[SplitConfig] = None
    method: DiscoveryMethod = DiscoveryMethod.DC
    variant: PromptVariant = PromptVariant.ORIGINAL
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    runs: int = 3
    seed: int = 0
    include_cluster_count: bool = True
    demo_strategy: str = "none"
    intent_set_source: str = "pseudo"
    descriptions_path: Optional[Path] = None
    max_prompt_chars: Optional[int] = None
    study: Optional[StudySpec] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.demo_strategy not in DEMO_STRATEGIES:
            raise ConfigError(
                f"demo_strategy must be one of {DEMO_STRATEGIES}, got {self.demo_strategy!r}"
            )
        if self.intent_set_source not in INTENT_SET_SOURCES:
            raise ConfigError(
                f"intent_set_source must be one of {INTENT_SET_SOURCES}, "
                f"got {self.intent_set_source!r}"
            )
        with_descriptions = self.intent_set_source == "ground_truth_with_descriptions"
        if with_descriptions and self.descriptions_path is None:
            raise ConfigError("ground_truth_with_descriptions requires a descriptions file")
        if not with_descriptions and self.descriptions_path is not None:
            raise ConfigError(
                "a descriptions file is only used with "
                "intent_set_source=ground_truth_with_descriptions"
            )
        # OOD demos presuppose known OOD intents, so the intent set must
        # be ground truth; a pseudo set would contaminate the comparison.
        if self.demo_strategy == "ood" and self.intent_set_source == "pseudo":
            raise ConfigError(
                "demo_strategy=ood requires a ground-truth intent set "
                "(intent_set_source=ground_truth or ground_truth_with_descriptions)"
            )
        if self.split_path is None and self.split is None:
            raise ConfigError("provide a split file or a split config")


def resolve_corpus(config: ExperimentConfig) -> Corpus:
    if config.corpus_path is None:
        raise ConfigError("this operation needs a corpus file")
    return load_corpus(config.corpus_path, format=config.corpus_format)


def resolve_split(config: ExperimentConfig, corpus: Optional[Corpus] = None) -> ExperimentSplit:
    if config.split_path is not None:
        return read_split(config.split_path)
    assert config.split is not None  # enforced by __post_init__
    corpus = corpus or resolve_corpus(config)
    return make_split(corpus, config.split, config.seed)


@dataclass(frozen=True)
class RunResult:
    run_index: int
    run_seed: int
    metrics: dict[str, float]
    recall: dict[str, RecallReport] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        payload = {
            "run_index": self.run_index,
            "run_seed": self.run_seed,
            "metrics": dict(self.metrics),
            "recall": {name: report.to_dict() for name, report in self.recall.items()},
        }
        if self.extras:
            payload["extras"] = self.extras
        return payload


def mean_of(values: Sequence[float]) -> float:
    return sum(values) / len(values)


@dataclass(frozen=True)
class EvalReport:
    kind: str  # "discovery" | "gid" | "estimate_k"
    label: str
    config_echo: dict
    run_results: tuple[RunResult, ...]

    def __post_init__(self):
        if not self.run_results:
            raise ValueError("a report needs at least one run")
        keys = {frozenset(r.metrics) for r in self.run_results}
        if len(keys) != 1:
            raise ValueError("runs disagree on their metric keys")

    def mean_metrics(self) -> dict[str, float]:
        keys = sorted(self.run_results[0].metrics)
        return {
            key: mean_of([r.metrics[key] for r in self.run_results]) for key in keys
        }

    def recall_summary(self) -> dict[str, dict[str, float]]:
        """Per stage: mean-of-run rates plus rates pooled over all runs."""
        stages: dict[str, list[RecallReport]] = {}
        for result in self.run_results:
            for name, report in result.recall.items():
                stages.setdefault(name, []).append(report)
        summary = {}
        for name, reports in sorted(stages.items()):
            total = sum(r.n_total for r in reports)
            summary[name] = {
                "mean_missing_rate": mean_of([r.missing_rate for r in reports]),
                "mean_repeated_rate": mean_of([r.repeated_rate for r in reports]),
                "pooled_missing_rate": sum(len(r.missing_ids) for r in reports) / total,
                "pooled_repeated_rate": sum(len(r.repeated_ids) for r in reports) / total,
            }
        return summary

    def provenance_summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for result in self.run_results:
            for provenance, n in result.extras.get("provenance", {}).items():
                counts[provenance] = counts.get(provenance, 0) + n
        return dict(sorted(counts.items()))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "label": self.label,
            "config": self.config_echo,
            "runs": [r.to_dict() for r in self.run_results],
            "mean": self.mean_metrics(),
            "recall_summary": self.recall_summary(),
            "provenance": self.provenance_summary(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EvalReport":
        runs = []
        for entry in payload["runs"]:
            recall = {
                name: RecallReport(
                    n_total=d["n_total"],
                    missing_ids=tuple(d["missing_ids"]),
                    repeated_ids=tuple(d["repeated_ids"]),
                )
                for name, d in entry.get("recall", {}).items()
            }
            runs.append(
                RunResult(
                    run_index=entry["run_index"],
                    run_seed=entry["run_seed"],
                    metrics=dict(entry["metrics"]),
                    recall=recall,
                    extras=entry.get("extras", {}),
                )
            )
        report = cls(
            kind=payload["kind"],
            label=payload.get("label", ""),
            config_echo=payload.get("config", {}),
            run_results=tuple(runs),
        )
        stored = payload.get("mean")
        if stored is not None and stored != report.mean_metrics():
            raise ConfigError("report file is inconsistent: stored means do not match runs")
        return report


def config_echo(config: ExperimentConfig, **overrides) -> dict:
    provider = config.provider
    echo = {
        "corpus_path": str(config.corpus_path) if config.corpus_path else None,
        "corpus_format": config.corpus_format,
        "split_path": str(config.split_path) if config.split_path else None,
        "split": None,
        "method": config.method.value,
        "variant": config.variant.value,
        "provider": {
            "base_url": provider.base_url,
            "model_name": provider.model_name,
            "api_key_env": provider.api_key_env,
            "temperature": provider.temperature,
            "max_retries": provider.max_retries,
            "timeout": provider.timeout,
        },
        "runs": config.runs,
        "seed": config.seed,
        "include_cluster_count": config.include_cluster_count,
        "demo_strategy": config.demo_strategy,
        "intent_set_source": config.intent_set_source,
        "descriptions_path": str(config.descriptions_path)
        if config.descriptions_path
        else None,
    }
    if config.split is not None:
        echo["split"] = {
            "n_ind": config.split.n_ind,
            "m_ood": config.split.m_ood,
            "discovery_per_class": config.split.discovery_per_class,
            "gid_per_class": config.split.gid_per_class,
            "demos_per_class": config.split.demos_per_class,
        }
    echo.update(overrides)
    return echo


def _provenance_counts(exchanges: Sequence[Exchange]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for exchange in exchanges:
        counts[exchange.provenance] = counts.get(exchange.provenance, 0) + 1
    return dict(sorted(counts.items()))


def _annotate(exc: Exception, context: str) -> Exception:
    annotated = type(exc)(f"{context}: {exc}")
    annotated.__cause__ = exc
    return annotated


def run_discovery(
    config: ExperimentConfig,
    session: Session,
    split: Optional[ExperimentSplit] = None,
    library: Optional[PromptLibrary] = None,
    label: str = "",
) -> EvalReport:
    """Clustering experiment over the discovery pool, averaged over runs."""
    split = split or resolve_split(config)
    library = library or PromptLibrary(max_prompt_chars=config.max_prompt_chars)
    gold_by_id = {u.id: u.label for u in split.discovery_pool}
    results = []
    for run_index in range(1, config.runs + 1):
        run_seed = config.seed + run_index
        k = len(split.ood_labels) if config.include_cluster_count else None
        prompt = library.render_discovery(
            split, config.method, config.variant, k=k, seed=run_seed
        )
        exchange = session.complete(config.provider, prompt.text)
        n = len(prompt.index_map)
        try:
            assignment = parse_cluster_assignment(exchange.response_text, n)
        except UnparseableResponseError as exc:
            raise _annotate(exc, f"run {run_index}")
        recall_report = audit(assignment, n)
        repair_k = k if k is not None else max(assignment.clusters, default=1)
        repaired = repair(assignment, n, repair_k, run_seed)
        predicted = to_label_list(repaired, n)
        gold = [gold_by_id[prompt.index_map[pos]] for pos in range(1, n + 1)]
        scores = clustering_scores(gold, predicted)
        results.append(
            RunResult(
                run_index=run_index,
                run_seed=run_seed,
                metrics={"acc": scores.acc, "nmi": scores.nmi, "ari": scores.ari},
                recall={"clustering": recall_report},
                extras={
                    "k_declared": k,
                    "k_parsed": len(assignment.clusters),
                    "provenance": _provenance_counts([exchange]),
                },
            )
        )
    return EvalReport(
        kind="discovery",
        label=label,
        config_echo=config_echo(config),
        run_results=tuple(results),
    )


def load_descriptions(path: Union[str, Path]) -> dict[str, str]:
    """JSON object mapping intent name to description text."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"descriptions file not found: {path}")
    try:
        payload = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"descriptions file is not valid JSON: {path}: {exc}")
    if not isinstance(payload, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in payload.items()
    ):
        raise ConfigError(f"descriptions file must map intent names to strings: {path}")
    return payload


def draw_ood_demos(
    corpus: Corpus, split: ExperimentSplit, per_class: int, seed: int
) -> list[Utterance]:
    """Labeled OOD demonstrations from the train partition, per-class."""
    base = SplitMix64(seed)
    demos: list[Utterance] = []
    for label in split.ood_labels:
        pool = corpus.pool(label, "train")
        if len(pool) < per_class:
            raise ConfigError(
                f"class {label!r} has only {len(pool)} train samples, {per_class} required"
            )
        demos.extend(base.fork(f"ood-demo:{label}").sample(pool, per_class))
    return demos


def _stage2_demos(
    config: ExperimentConfig,
    split: ExperimentSplit,
    corpus: Optional[Corpus],
) -> Optional[list[Utterance]]:
    if config.demo_strategy == "none":
        return None
    if config.demo_strategy == "ind":
        demos = [u for label in split.ind_labels for u in split.demo_pool.get(label, ())]
        if not demos:
            raise ConfigError("demo_strategy=ind but the split carries no demo pool")
        return demos
    corpus = corpus or resolve_corpus(config)
    per_class = split.config.demos_per_class if split.config else 3
    return draw_ood_demos(corpus, split, per_class, split.seed)


def _complete_many(
    config: ExperimentConfig, session: Session, prompts: Sequence[str]
) -> list[Exchange]:
    """Stage-2 fan-out. Live sessions may run concurrently; replay and
    scripted sessions stay sequential so fixture queues drain in order."""
    workers = config.provider.max_concurrent
    if isinstance(session, LiveSession) and workers > 1 and len(prompts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda text: session.complete(config.provider, text), prompts))
    return [session.complete(config.provider, text) for text in prompts]


def _build_joint_set(
    config: ExperimentConfig,
    split: ExperimentSplit,
    session: Session,
    library: PromptLibrary,
    run_index: int,
    run_seed: int,
) -> tuple[list[JointIntent], Optional[set[str]], dict[str, RecallReport], list[Exchange], dict]:
    """Stage 1 when pseudo intents are in play; otherwise the gold set."""
    if config.intent_set_source == "pseudo":
        k = len(split.ood_labels) if config.include_cluster_count else None
        prompt = library.render_gid_stage1(
            split, config.method, config.variant, k=k, seed=run_seed
        )
        exchange = session.complete(config.provider, prompt.text)
        n = len(prompt.index_map)
        try:
            assignment = parse_cluster_assignment(exchange.response_text, n)
        except UnparseableResponseError as exc:
            snippet = exchange.response_text[:200].replace("\n", " ")
            raise _annotate(exc, f"run {run_index} stage 1 (response began: {snippet!r})")
        k_pseudo = k if k is not None else max(assignment.clusters, default=1)
        descriptions = parse_intent_descriptions(exchange.response_text, k_pseudo)
        pseudo_texts = [descriptions[i] for i in range(1, k_pseudo + 1)]
        joint = build_joint_labels(split.ind_labels, pseudo_texts)
        pseudo_set = {entry.text for entry in joint[len(split.ind_labels) :]}
        recall = {"stage1_clustering": audit(assignment, n)}
        extras = {"k_declared": k, "k_parsed": len(assignment.clusters)}
        return joint, pseudo_set, recall, [exchange], extras
    descriptions_map = None
    if config.intent_set_source == "ground_truth_with_descriptions":
        descriptions_map = load_descriptions(config.descriptions_path)
        missing = [lab for lab in split.ood_labels if lab not in descriptions_map]
        if missing:
            raise ConfigError(f"descriptions file lacks entries for: {missing}")
    joint = build_joint_labels(split.ind_labels, split.ood_labels, descriptions_map)
    return joint, None, {}, [], {}


def run_gid(
    config: ExperimentConfig,
    session: Session,
    split: Optional[ExperimentSplit] = None,
    library: Optional[PromptLibrary] = None,
    corpus: Optional[Corpus] = None,
    label: str = "",
) -> EvalReport:
    """Two-stage run: build the joint intent set, classify every test query."""
    if corpus is None and config.split_path is None and config.corpus_path is not None:
        corpus = resolve_corpus(config)
    split = split or resolve_split(config, corpus)
    library = library or PromptLibrary(max_prompt_chars=config.max_prompt_chars)
    demos = _stage2_demos(config, split, corpus)
    results = []
    for run_index in range(1, config.runs + 1):
        run_seed = config.seed + run_index
        joint, pseudo_set, recall, exchanges, extras = _build_joint_set(
            config, split, session, library, run_index, run_seed
        )
        joint_texts = [entry.text for entry in joint]
        prompts = [
            library.render_gid_stage2(joint, query, demos=demos, variant=config.variant).text
            for query in split.gid_test_pool
        ]
        stage2 = _complete_many(config, session, prompts)
        exchanges = exchanges + stage2
        answers = [
            parse_classification(exchange.response_text, joint_texts)
            for exchange in stage2
        ]
        recall = dict(recall)
        recall["stage2_classification"] = audit(answers, len(answers))
        chosen = repair_answers(answers, len(joint), run_seed)
        predicted = [joint_texts[i - 1] for i in chosen]
        gold = [u.label for u in split.gid_test_pool]
        alignment = None
        if pseudo_set is not None:
            pairs = [
                (g, p)
                for g, p in zip(gold, predicted)
                if g in split.ood_labels and p in pseudo_set
            ]
            if pairs:
                alignment = align_pseudo([g for g, _ in pairs], [p for _, p in pairs])
            else:
                alignment = {}
            for pseudo in pseudo_set:
                alignment.setdefault(pseudo, SINK_LABEL)
        scores = group_scores(
            gold, predicted, split.ind_labels, split.ood_labels, alignment
        )
        extras = dict(extras)
        extras["provenance"] = _provenance_counts(exchanges)
        if alignment is not None:
            extras["pseudo_alignment"] = dict(sorted(alignment.items()))
        results.append(
            RunResult(
                run_index=run_index,
                run_seed=run_seed,
                metrics={
                    "ind_f1": scores.ind.macro_f1,
                    "ind_acc": scores.ind.accuracy,
                    "ood_f1": scores.ood.macro_f1,
                    "ood_acc": scores.ood.accuracy,
                    "all_f1": scores.overall.macro_f1,
                    "all_acc": scores.overall.accuracy,
                },
                recall=recall,
                extras=extras,
            )
        )
    return EvalReport(
        kind="gid",
        label=label,
        config_echo=config_echo(config),
        run_results=tuple(results),
    )


def run_estimate_k(
    config: ExperimentConfig,
    session: Session,
    split: Optional[ExperimentSplit] = None,
    library: Optional[PromptLibrary] = None,
    embeddings: Optional[EmbeddingSet] = None,
    baseline_k_prime: Sequence[int] = (),
    size_threshold_ratio: float = 0.9,
    label: str = "",
) -> EvalReport:
    """Cluster-count estimation: count-free prompts, K = parsed categories.

    When embeddings are supplied, each K' in baseline_k_prime adds the
    drop-small-clusters estimate alongside the prompted one.
    """
    split = split or resolve_split(config)
    library = library or PromptLibrary(max_prompt_chars=config.max_prompt_chars)
    k_true = len(split.ood_labels)
    results = []
    for run_index in range(1, config.runs + 1):
        run_seed = config.seed + run_index
        prompt = library.render_discovery(
            split, config.method, config.variant, k=None, seed=run_seed
        )
        exchange = session.complete(config.provider, prompt.text)
        try:
            assignment = parse_cluster_assignment(
                exchange.response_text, len(prompt.index_map)
            )
        except UnparseableResponseError as exc:
            raise _annotate(exc, f"run {run_index}")
        k_pred = len(assignment.clusters)
        extras = {
            "k_true": k_true,
            "provenance": _provenance_counts([exchange]),
        }
        if embeddings is not None and baseline_k_prime:
            baseline = []
            for k_prime in baseline_k_prime:
                estimate = estimate_k(
                    embeddings,
                    k_prime=k_prime,
                    size_threshold_ratio=size_threshold_ratio,
                    seed=run_seed,
                )
                baseline.append(
                    {
                        "k_prime": estimate.k_prime,
                        "k_pred": estimate.k_predicted,
                        "k_error": k_error(max(estimate.k_predicted, 1), k_true),
                        "cluster_sizes": list(estimate.cluster_sizes),
                    }
                )
            extras["baseline"] = baseline
        results.append(
            RunResult(
                run_index=run_index,
                run_seed=run_seed,
                metrics={
                    "k_pred": float(k_pred),
                    "k_error": float(k_error(max(k_pred, 1), k_true)),
                },
                recall={"clustering": audit(assignment, len(prompt.index_map))},
                extras=extras,
            )
        )
    return EvalReport(
        kind="estimate_k",
        label=label,
        config_echo=config_echo(config, include_cluster_count=False),
        run_results=tuple(results),
    )


def run_study(
    config: ExperimentConfig,
    session_factory,
    study: Optional[StudySpec] = None,
) -> list[EvalReport]:
    """Fan out one axis at a time; each study point is a full experiment.

    ``session_factory`` is called once per study point so scripted
    fixtures start from a fresh queue for every arm.
    """
    study = study or config.study
    if study is None or not study.active_axes():
        raise ConfigError("no study axes requested")
    reports: list[EvalReport] = []

    if study.sample_sweep:
        if config.split is None or config.corpus_path is None:
            raise ConfigError("sample_sweep needs a corpus and a split config to redraw pools")
        corpus = resolve_corpus(config)
        for per_class in study.sample_sweep:
            arm = replace(
                config, split=replace(config.split, discovery_per_class=per_class)
            )
            split = make_split(corpus, arm.split, arm.seed)
            reports.append(
                run_discovery(
                    arm,
                    session_factory(),
                    split=split,
                    label=f"samples_per_class={per_class}",
                )
            )

    if study.demo_strategies:
        for strategy in study.demo_strategies:
            source = config.intent_set_source
            if strategy == "ood" and source == "pseudo":
                source = "ground_truth"
            arm = replace(config, demo_strategy=strategy, intent_set_source=source)
            reports.append(
                run_gid(arm, session_factory(), label=f"demo_strategy={strategy}")
            )

    if study.intent_set_ablation:
        sources = ["pseudo", "ground_truth"]
        if config.descriptions_path is not None:
            sources.append("ground_truth_with_descriptions")
        for source in sources:
            descriptions = (
                config.descriptions_path
                if source == "ground_truth_with_descriptions"
                else None
            )
            arm = replace(
                config, intent_set_source=source, descriptions_path=descriptions
            )
            reports.append(
                run_gid(arm, session_factory(), label=f"intent_set={source}")
            )

    if study.prompt_variants:
        # the wording variants rephrase the clustering instruction, so
        # they are compared on the discovery task
        for variant in study.prompt_variants:
            arm = replace(config, variant=variant)
            reports.append(
                run_discovery(arm, session_factory(), label=f"variant={variant.value}")
            )

    if study.estimate_k:
        embeddings = (
            load_embeddings(study.embeddings_path)
            if study.embeddings_path is not None
            else None
        )
        reports.append(
            run_estimate_k(
                config,
                session_factory(),
                embeddings=embeddings,
                baseline_k_prime=study.baseline_k_prime,
                size_threshold_ratio=study.size_threshold_ratio,
                label="estimate_k",
            )
        )

    return reports


def _require(mapping: dict, allowed: set[str], context: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {context} keys: {sorted(unknown)}")


def config_from_dict(payload: dict, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """Build a config from a parsed structured file; paths resolve
    relative to the file's directory."""
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a JSON object")
    _require(
        payload,
        {
            "corpus",
            "corpus_format",
            "split_file",
            "split",
            "method",
            "variant",
            "provider",
            "runs",
            "seed",
            "include_cluster_count",
            "demo_strategy",
            "intent_set_source",
            "descriptions",
            "max_prompt_chars",
            "study",
        },
        "config",
    )

    def path_of(value: Optional[str]) -> Optional[Path]:
        if value is None:
            return None
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        return path

    split = None
    if "split" in payload:
        entry = dict(payload["split"])
        _require(
            entry,
            {
                "n_ind",
                "m_ood",
                "discovery_per_class",
                "gid_per_class",
                "demos_per_class",
                "fixed_labels",
            },
            "split",
        )
        fixed_ind = fixed_ood = None
        if "fixed_labels" in entry:
            fixed = entry.pop("fixed_labels")
            if isinstance(fixed, str):
                fixed_ind, fixed_ood = load_fixed_label_lists(path_of(fixed))
            elif isinstance(fixed, dict):
                fixed_ind = tuple(fixed.get("ind", ()))
                fixed_ood = tuple(fixed.get("ood", ()))
            else:
                raise ConfigError("split.fixed_labels must be a path or an object")
        split = SplitConfig(
            **entry, fixed_ind_labels=fixed_ind, fixed_ood_labels=fixed_ood
        )

    provider = ProviderConfig()
    if "provider" in payload:
        entry = dict(payload["provider"])
        _require(
            entry,
            {
                "base_url",
                "model_name",
                "api_key_env",
                "temperature",
                "max_retries",
                "timeout",
                "backoff_base",
                "max_concurrent",
            },
            "provider",
        )
        provider = ProviderConfig(**entry)

    study = None
    if "study" in payload:
        entry = dict(payload["study"])
        _require(
            entry,
            {
                "sample_sweep",
                "demo_strategies",
                "intent_set_ablation",
                "prompt_variants",
                "estimate_k",
                "baseline_k_prime",
                "size_threshold_ratio",
                "embeddings",
            },
            "study",
        )
        study = StudySpec(
            sample_sweep=tuple(entry.get("sample_sweep", ())),
            demo_strategies=tuple(entry.get("demo_strategies", ())),
            intent_set_ablation=bool(entry.get("intent_set_ablation", False)),
            prompt_variants=tuple(
                PromptVariant(v) for v in entry.get("prompt_variants", ())
            ),
            estimate_k=bool(entry.get("estimate_k", False)),
            baseline_k_prime=tuple(entry.get("baseline_k_prime", ())),
            size_threshold_ratio=float(entry.get("size_threshold_ratio", 0.9)),
            embeddings_path=path_of(entry.get("embeddings")),
        )

    try:
        method = DiscoveryMethod(payload.get("method", "dc"))
        variant = PromptVariant(payload.get("variant", "original"))
    except ValueError as exc:
        raise ConfigError(str(exc))

    return ExperimentConfig(
        corpus_path=path_of(payload.get("corpus")),
        corpus_format=payload.get("corpus_format", "jsonl"),
        split_path=path_of(payload.get("split_file")),
        split=split,
        method=method,
        variant=variant,
        provider=provider,
        runs=int(payload.get("runs", 3)),
        seed=int(payload.get("seed", 0)),
        include_cluster_count=bool(payload.get("include_cluster_count", True)),
        demo_strategy=payload.get("demo_strategy", "none"),
        intent_set_source=payload.get("intent_set_source", "pseudo"),
        descriptions_path=path_of(payload.get("descriptions")),
        max_prompt_chars=payload.get("max_prompt_chars"),
        study=study,
    )
