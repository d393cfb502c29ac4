"""Parsers for free-text model responses.

Three response shapes come back from the experiment prompts: cluster
assignments ("Category 3: 1, 4, 7"), per-cluster intent descriptions
("Category 3: Identity verification related questions" or "3. ..."), and
single-query classification answers ("8. top_up_failed ..."). Parsing is
deliberately lossy-tolerant: anomalies such as positions assigned twice,
positions never assigned, or answers naming several intents are surfaced
in the parsed structure and left for the recall audit to count and repair.
Nothing is silently fixed here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional, Sequence

from .errors import UnparseableResponseError

_CATEGORY_LINE = re.compile(r"^\s*category\s*(\d+)\s*[::\-–]\s*(.*)$", re.IGNORECASE)
_NUMBERED_LINE = re.compile(r"^\s*(\d+)\s*[.)::]\s+(.*\S)\s*$")
_INT_TOKEN = re.compile(r"^\d+$")
_SET_REF = re.compile(r"\bset\s*\d+", re.IGNORECASE)
_INT_REF = re.compile(r"\b\d+\b")

# Characters that carry markdown emphasis, stripped before matching.
# Single underscores survive because intent names use them.
_MARKDOWN = re.compile(r"[*`#]+|__")


def _strip_markdown(text: str) -> str:
    return _MARKDOWN.sub("", text)


@dataclass
class ClusterAssignment:
    """Parsed cluster -> prompt-position assignment, anomalies included.

    ``clusters`` preserves response order of both the category indices and
    the position lists; positions may repeat across clusters or be absent
    entirely. ``foreign`` records positions outside the expected range in
    encounter order; they never enter ``clusters``.
    """

    clusters: dict[int, list[int]]
    descriptions: Optional[dict[int, str]] = None
    raw: str = ""
    foreign: list[int] = field(default_factory=list)

    def assigned_positions(self) -> set[int]:
        return {p for members in self.clusters.values() for p in members}


def _int_list(payload: str) -> Optional[list[int]]:
    """Parse payload as a pure integer list, else None.

    Separators are commas, whitespace, semicolons, and the word "and";
    bare punctuation tokens are ignored. Any token containing a letter
    disqualifies the payload (it is description text, not an index list).
    """
    cleaned = re.sub(r"\band\b", ",", payload, flags=re.IGNORECASE)
    values: list[int] = []
    for token in re.split(r"[,\s;]+", cleaned):
        token = token.strip().rstrip(".")
        if not token:
            continue
        if _INT_TOKEN.match(token):
            values.append(int(token))
        elif re.search(r"[A-Za-z]", token):
            return None
        # pure punctuation (ellipses, dashes): skip
    return values if values else None


def parse_cluster_assignment(response: str, n_expected: int) -> ClusterAssignment:
    """Extract ``Category <i>: <positions>`` lines from a clustering response.

    Only lines whose payload is a pure integer list count; category lines
    holding prose (intent summaries) and all other lines are ignored but
    preserved in ``raw``. Positions outside 1..n_expected are dropped into
    ``foreign``. Raises UnparseableResponseError when no assignment line
    is recognizable at all.
    """
    clusters: dict[int, list[int]] = {}
    foreign: list[int] = []
    for line in response.splitlines():
        match = _CATEGORY_LINE.match(_strip_markdown(line))
        if not match:
            continue
        values = _int_list(match.group(2))
        if values is None:
            continue
        cluster_idx = int(match.group(1))
        members = clusters.setdefault(cluster_idx, [])
        for value in values:
            if 1 <= value <= n_expected:
                members.append(value)
            else:
                foreign.append(value)
    if not clusters:
        raise UnparseableResponseError(
            f"no recognizable 'Category <i>: <positions>' line in response "
            f"({len(response)} chars)"
        )
    return ClusterAssignment(clusters=clusters, raw=response, foreign=foreign)


def format_cluster_assignment(assignment: ClusterAssignment) -> str:
    """Render an assignment back into the canonical response format."""
    lines = [
        f"Category {idx}: {','.join(str(p) for p in members)}"
        for idx, members in assignment.clusters.items()
    ]
    return "\n".join(lines)


def parse_intent_descriptions(response: str, k: int) -> dict[int, str]:
    """Collect per-cluster intent descriptions for clusters 1..k.

    Accepts "Category <i>: <text>" and "<i>. <text>" lines whose payload
    is prose rather than an index list. Clusters that never receive a
    description get the placeholder "unlabeled cluster <i>"; callers can
    count placeholders to report the coverage shortfall.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    captured: dict[int, str] = {}
    for line in response.splitlines():
        stripped = _strip_markdown(line)
        match = _CATEGORY_LINE.match(stripped) or _NUMBERED_LINE.match(stripped)
        if not match:
            continue
        idx = int(match.group(1))
        text = match.group(2).strip()
        if not text or _int_list(text) is not None:
            continue  # an assignment line, not a description
        if 1 <= idx <= k and idx not in captured:
            captured[idx] = text
    return {i: captured.get(i, f"unlabeled cluster {i}") for i in range(1, k + 1)}


def description_shortfall(descriptions: dict[int, str]) -> int:
    """Number of clusters that only carry the missing-description placeholder."""
    return sum(1 for i, text in descriptions.items() if text == f"unlabeled cluster {i}")


@dataclass
class ClassificationAnswer:
    """One parsed stage-2 answer: intent indices in order of appearance."""

    chosen: list[int]
    refusal: bool
    raw: str

    def __post_init__(self):
        if self.refusal and self.chosen:
            raise ValueError("a refusal answer cannot carry chosen intents")


def _default_refusal_phrases() -> list[str]:
    text = resources.files("openintent").joinpath("fixtures/refusal_phrases.txt").read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


_REFUSAL_CACHE: Optional[list[str]] = None


def load_refusal_phrases(path: Optional[str] = None) -> list[str]:
    """Refusal phrases, one per line; default list ships with the package."""
    global _REFUSAL_CACHE
    if path is not None:
        with open(path, encoding="utf-8") as handle:
            return [line.strip() for line in handle if line.strip()]
    if _REFUSAL_CACHE is None:
        _REFUSAL_CACHE = _default_refusal_phrases()
    return _REFUSAL_CACHE


def parse_classification(
    response: str,
    joint_labels: Sequence[str],
    refusal_phrases: Optional[Sequence[str]] = None,
) -> ClassificationAnswer:
    """Extract the chosen intent indices from a stage-2 answer.

    Extraction order: (1) every distinct in-range integer reference, in
    order of appearance ("8. top_up_failed ... could also fit under 3"
    yields [8, 3]); (2) failing that, intent texts matched case-insensitively
    on word boundaries; (3) failing that, a refusal-phrase hit marks the
    answer as a refusal. "Set 1"/"Set 2" mentions are prompt vocabulary,
    not category references, and never yield an index.
    """
    if refusal_phrases is None:
        refusal_phrases = load_refusal_phrases()
    text = _SET_REF.sub(" ", _strip_markdown(response))

    chosen: list[int] = []
    for match in _INT_REF.finditer(text):
        value = int(match.group(0))
        if 1 <= value <= len(joint_labels) and value not in chosen:
            chosen.append(value)
    if chosen:
        return ClassificationAnswer(chosen=chosen, refusal=False, raw=response)

    lowered = text.lower()
    hits: list[tuple[int, int]] = []  # (position in text, 1-based index)
    for idx, label in enumerate(joint_labels, start=1):
        pattern = re.compile(r"(?<!\w)" + re.escape(label.lower()) + r"(?!\w)")
        match = pattern.search(lowered)
        if match:
            hits.append((match.start(), idx))
    if hits:
        return ClassificationAnswer(
            chosen=[idx for _, idx in sorted(hits)], refusal=False, raw=response
        )

    for phrase in refusal_phrases:
        if phrase.lower() in lowered:
            return ClassificationAnswer(chosen=[], refusal=True, raw=response)
    return ClassificationAnswer(chosen=[], refusal=False, raw=response)
