"""Offline-reproducible harness for LLM intent discovery experiments.

Pipeline: draw an IND/OOD split from a labeled corpus, render clustering
or two-stage classification prompts, complete them through a live,
replayed, or scripted chat-completions gateway, parse the semi-structured
answers, audit and repair recall, and score with Hungarian-aligned
clustering metrics or grouped classification metrics. A k-means baseline
covers embedding-space clustering and cluster-count estimation.
"""

from .corpus import (
    Corpus,
    ExperimentSplit,
    SplitConfig,
    Utterance,
    load_corpus,
    make_split,
    read_split,
    write_split,
)
from .embed_cluster import EmbeddingSet, estimate_k, kmeans, load_embeddings, make_blobs
from .errors import (
    ConfigError,
    CorpusFormatError,
    FixtureExhaustedError,
    HarnessError,
    ProviderError,
    ReplayMissError,
    UnparseableResponseError,
)
from .gateway import (
    Exchange,
    ExchangeStore,
    LiveSession,
    ProviderConfig,
    ReplaySession,
    ScriptedSession,
    complete,
    prompt_hash,
)
from .metrics import (
    ClusteringScores,
    Contingency,
    GroupScores,
    align_pseudo,
    clustering_scores,
    group_scores,
    hungarian,
    k_error,
)
from .parsing import (
    ClassificationAnswer,
    ClusterAssignment,
    parse_classification,
    parse_cluster_assignment,
    parse_intent_descriptions,
)
from .prompts import (
    DiscoveryMethod,
    JointIntent,
    PromptLibrary,
    PromptVariant,
    RenderedPrompt,
    build_joint_labels,
    default_library,
)
from .recall import RecallReport, audit, repair, repair_answers, to_label_list
from .reporting import emit_report, read_report_file
from .rng import SplitMix64
from .runner import (
    EvalReport,
    ExperimentConfig,
    RunResult,
    StudySpec,
    run_discovery,
    run_estimate_k,
    run_gid,
    run_study,
)

__version__ = "0.1.0"

__all__ = [
    "ClassificationAnswer",
    "ClusterAssignment",
    "ClusteringScores",
    "ConfigError",
    "Contingency",
    "Corpus",
    "CorpusFormatError",
    "DiscoveryMethod",
    "EmbeddingSet",
    "EvalReport",
    "Exchange",
    "ExchangeStore",
    "ExperimentConfig",
    "ExperimentSplit",
    "FixtureExhaustedError",
    "GroupScores",
    "HarnessError",
    "JointIntent",
    "LiveSession",
    "PromptLibrary",
    "PromptVariant",
    "ProviderConfig",
    "ProviderError",
    "RecallReport",
    "RenderedPrompt",
    "ReplayMissError",
    "ReplaySession",
    "RunResult",
    "ScriptedSession",
    "SplitConfig",
    "SplitMix64",
    "StudySpec",
    "UnparseableResponseError",
    "Utterance",
    "align_pseudo",
    "audit",
    "build_joint_labels",
    "clustering_scores",
    "complete",
    "default_library",
    "emit_report",
    "estimate_k",
    "group_scores",
    "hungarian",
    "k_error",
    "kmeans",
    "load_corpus",
    "load_embeddings",
    "make_blobs",
    "make_split",
    "parse_classification",
    "parse_cluster_assignment",
    "parse_intent_descriptions",
    "prompt_hash",
    "read_report_file",
    "read_split",
    "repair",
    "repair_answers",
    "run_discovery",
    "run_estimate_k",
    "run_gid",
    "run_study",
    "to_label_list",
    "write_split",
]
