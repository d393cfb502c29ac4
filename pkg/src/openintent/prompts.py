"""Prompt rendering for discovery and two-stage joint classification.

Templates live as plain text files with ``{{name}}`` placeholders so the
wording-variant study can swap prompts without code changes; the bundled
defaults carry the canonical experiment texts. Rendering is a pure
function of its arguments: the clustering pool is shuffled by the run
seed and the position->utterance mapping is recorded so responses can be
scored, the cluster-count phrase is elided for count-estimation runs, and
demonstrations and intent sets are formatted exactly one way.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .corpus import ExperimentSplit, Utterance
from .errors import ConfigError
from .rng import SplitMix64


class DiscoveryMethod(str, Enum):
    DC = "dc"
    ZSD = "zsd"
    FSD = "fsd"


class PromptVariant(str, Enum):
    ORIGINAL = "original"
    PARAPHRASE = "paraphrase"
    VERBOSITY = "verbosity"
    SIMPLIFICATION = "simplification"


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    index_map: dict[int, int]  # prompt position (1-based) -> utterance id
    method: Optional[DiscoveryMethod]
    variant: PromptVariant
    includes_cluster_count: bool
    declared_k: Optional[int]

    def __post_init__(self):
        if self.includes_cluster_count != (self.declared_k is not None):
            raise ValueError("declared_k must be present exactly when the count is included")
        positions = sorted(self.index_map)
        if positions != list(range(1, len(positions) + 1)):
            raise ValueError("index_map positions must be contiguous from 1")


@dataclass(frozen=True)
class JointIntent:
    """One entry of the stage-2 intent set."""

    index: int
    text: str
    description: Optional[str] = None


def build_joint_labels(
    ind_labels: Sequence[str],
    ood_intents: Sequence[str],
    descriptions: Optional[dict[str, str]] = None,
) -> list[JointIntent]:
    """IND labels followed by OOD (or pseudo) intents, indexed from 1.

    Duplicate intent texts get " (2)", " (3)" suffixes so every entry of
    the classification set stays individually selectable.
    """
    texts: list[str] = []
    seen: dict[str, int] = {}
    for text in list(ind_labels) + list(ood_intents):
        count = seen.get(text, 0) + 1
        seen[text] = count
        texts.append(text if count == 1 else f"{text} ({count})")
    descriptions = descriptions or {}
    return [
        JointIntent(index=i, text=text, description=descriptions.get(text))
        for i, text in enumerate(texts, start=1)
    ]


_PLACEHOLDER = re.compile(r"\{\{(\w+)\}\}")

_EXPECTED_PLACEHOLDERS = {
    "discovery_dc": {"count_phrase", "samples"},
    "discovery_zsd": {"count_phrase", "samples", "ind_labels"},
    "discovery_fsd": {"count_phrase", "samples", "demos"},
    "gid_stage1_dc": {"count_phrase", "summary_range", "samples"},
    "gid_stage1_zsd": {"count_phrase", "summary_range", "samples", "ind_labels"},
    "gid_stage1_fsd": {"count_phrase", "summary_range", "samples", "demos"},
    "gid_stage2_default": {"intent_set", "query"},
    "gid_stage2_fsd": {"intent_set", "demos", "query"},
}


def _template_names() -> list[str]:
    names = []
    for base in ("discovery", "gid_stage1"):
        for variant in PromptVariant:
            names.append(f"{base}_dc_{variant.value}")
        names.append(f"{base}_zsd_original")
        names.append(f"{base}_fsd_original")
    names.extend(["gid_stage2_default", "gid_stage2_fsd"])
    return names


def _expected_for(name: str) -> set[str]:
    for prefix, expected in _EXPECTED_PLACEHOLDERS.items():
        if name == prefix or name.startswith(prefix + "_"):
            return expected
    raise ConfigError(f"unknown template name {name!r}")


class PromptLibrary:
    """Loads and validates the template set once, then renders from it."""

    def __init__(self, template_dir: Optional[Path] = None, max_prompt_chars: Optional[int] = None):
        self.max_prompt_chars = max_prompt_chars
        self._templates: dict[str, str] = {}
        for name in _template_names():
            text = self._read(template_dir, name)
            found = set(_PLACEHOLDER.findall(text))
            expected = _expected_for(name)
            if found != expected:
                missing = expected - found
                extra = found - expected
                detail = []
                if missing:
                    detail.append(f"missing {sorted(missing)}")
                if extra:
                    detail.append(f"unexpected {sorted(extra)}")
                raise ConfigError(f"template {name}: " + ", ".join(detail))
            self._templates[name] = text

    @staticmethod
    def _read(template_dir: Optional[Path], name: str) -> str:
        filename = f"{name}.txt"
        if template_dir is not None:
            path = Path(template_dir) / filename
            if not path.is_file():
                raise ConfigError(f"template file not found: {path}")
            raw = path.read_text("utf-8")
        else:
            ref = resources.files("openintent").joinpath(f"templates/{filename}")
            if not ref.is_file():
                raise ConfigError(f"bundled template missing: {filename}")
            raw = ref.read_text("utf-8")
        return raw[:-1] if raw.endswith("\n") else raw

    def _fill(self, name: str, values: dict[str, str]) -> str:
        text = self._templates[name]
        for key, value in values.items():
            text = text.replace("{{" + key + "}}", value)
        leftover = _PLACEHOLDER.findall(text)
        if leftover:
            raise ConfigError(f"template {name}: unfilled placeholders {leftover}")
        if self.max_prompt_chars is not None and len(text) > self.max_prompt_chars:
            raise ConfigError(
                f"rendered prompt is {len(text)} chars, over the {self.max_prompt_chars} cap"
            )
        return text

    def _clustering_values(
        self,
        split: ExperimentSplit,
        method: DiscoveryMethod,
        k: Optional[int],
        seed: int,
    ) -> tuple[dict[str, str], dict[int, int]]:
        if k is not None and k <= 0:
            raise ConfigError(f"cluster count must be positive, got {k}")
        pool = list(split.discovery_pool)
        if not pool:
            raise ConfigError("split has an empty discovery pool")
        SplitMix64(seed).fork("prompt-order").shuffle(pool)
        index_map = {position: u.id for position, u in enumerate(pool, start=1)}
        values = {
            "count_phrase": f"{k} " if k is not None else "",
            "summary_range": f" from Category 1 to Category {k}" if k is not None else "",
            "samples": "\n".join(f"{i}. {u.text}" for i, u in enumerate(pool, start=1)),
        }
        if method is not DiscoveryMethod.DC:
            if not split.ind_labels:
                raise ConfigError(f"{method.value} requires IND labels in the split")
            values["ind_labels"] = "; ".join(split.ind_labels)
        if method is DiscoveryMethod.FSD:
            demos = format_demos(split, style="stage1")
            if not demos:
                raise ConfigError("fsd requires a non-empty demo pool")
            values["demos"] = demos
        return values, index_map

    def _template_key(self, base: str, method: DiscoveryMethod, variant: PromptVariant) -> str:
        name = f"{base}_{method.value}_{variant.value}"
        if name not in self._templates:
            raise ConfigError(
                f"no {variant.value} template for method {method.value}; "
                "wording variants exist for the dc method only"
            )
        return name

    def render_discovery(
        self,
        split: ExperimentSplit,
        method: DiscoveryMethod,
        variant: PromptVariant = PromptVariant.ORIGINAL,
        k: Optional[int] = None,
        seed: int = 0,
    ) -> RenderedPrompt:
        """Clustering prompt over the split's discovery pool."""
        values, index_map = self._clustering_values(split, method, k, seed)
        name = self._template_key("discovery", method, variant)
        return RenderedPrompt(
            text=self._fill(name, values),
            index_map=index_map,
            method=method,
            variant=variant,
            includes_cluster_count=k is not None,
            declared_k=k,
        )

    def render_gid_stage1(
        self,
        split: ExperimentSplit,
        method: DiscoveryMethod,
        variant: PromptVariant = PromptVariant.ORIGINAL,
        k: Optional[int] = None,
        seed: int = 0,
    ) -> RenderedPrompt:
        """Clustering prompt plus the per-cluster intent summary instruction."""
        values, index_map = self._clustering_values(split, method, k, seed)
        name = self._template_key("gid_stage1", method, variant)
        return RenderedPrompt(
            text=self._fill(name, values),
            index_map=index_map,
            method=method,
            variant=variant,
            includes_cluster_count=k is not None,
            declared_k=k,
        )

    def render_gid_stage2(
        self,
        joint_labels: Sequence[JointIntent],
        query: Utterance,
        demos: Optional[Sequence[Utterance]] = None,
        demo_labels: Optional[dict[int, str]] = None,
        variant: PromptVariant = PromptVariant.ORIGINAL,
    ) -> RenderedPrompt:
        """Joint-classification prompt for a single test query.

        The wording-variant axis applies to the clustering instruction
        only, so every variant renders stage 2 from the same template;
        providing demos switches to the demonstration-bearing form.
        """
        if not joint_labels:
            raise ConfigError("stage-2 prompt requires a non-empty intent set")
        indices = [entry.index for entry in joint_labels]
        if indices != list(range(1, len(indices) + 1)):
            raise ConfigError("joint label indices must be contiguous from 1")
        texts = [entry.text for entry in joint_labels]
        if len(set(texts)) != len(texts):
            duplicates = sorted({t for t in texts if texts.count(t) > 1})
            raise ConfigError(
                f"duplicate intent texts in the joint set: {duplicates}; "
                "disambiguate with build_joint_labels"
            )
        values = {"intent_set": format_intent_set(joint_labels), "query": query.text}
        if demos:
            values["demos"] = "; ".join(
                f"sentence: {u.text}\tintention:{(demo_labels or {}).get(u.id, u.label)}"
                for u in demos
            )
            name = "gid_stage2_fsd"
        else:
            name = "gid_stage2_default"
        return RenderedPrompt(
            text=self._fill(name, values),
            index_map={1: query.id},
            method=None,
            variant=variant,
            includes_cluster_count=False,
            declared_k=None,
        )


def format_intent_set(joint_labels: Sequence[JointIntent]) -> str:
    """"1. pin_blocked; 2. ..." with optional description lines appended.

    Without descriptions the entries stay on one line; with any
    description present every entry moves to its own line carrying
    "<text>: <description>".
    """
    if any(entry.description for entry in joint_labels):
        lines = []
        for entry in joint_labels:
            suffix = f": {entry.description}" if entry.description else ""
            lines.append(f"{entry.index}. {entry.text}{suffix}")
        return "\n".join(lines)
    return "; ".join(f"{entry.index}. {entry.text}" for entry in joint_labels)


def format_demos(split: ExperimentSplit, style: str = "stage1") -> str:
    """Flatten the demo pool in IND-label order into the prompt format."""
    items = []
    for label in split.ind_labels:
        for utterance in split.demo_pool.get(label, ()):
            if style == "stage1":
                items.append(f"{utterance.text}\tintention:{label}")
            else:
                items.append(f"sentence: {utterance.text}\tintention:{label}")
    return "; ".join(items)


def default_library(max_prompt_chars: Optional[int] = None) -> PromptLibrary:
    return PromptLibrary(template_dir=None, max_prompt_chars=max_prompt_chars)
