"""Missing/repeated recall measurement and the pre-scoring repair policy.

Generative responses routinely leave some prompt positions unassigned
(missing recall) or assign a position to several clusters or intents
(repeated recall). The audit quantifies both without touching the data;
the repair makes the assignment total so the clustering and
classification metrics are defined: repeated positions keep their
first-listed assignment, missing positions draw a uniform seeded
assignment. A classification refusal counts as missing recall.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Union

from .parsing import ClassificationAnswer, ClusterAssignment
from .rng import SplitMix64


@dataclass(frozen=True)
class RecallReport:
    n_total: int
    missing_ids: tuple[int, ...]
    repeated_ids: tuple[int, ...]

    @property
    def missing_rate(self) -> float:
        return len(self.missing_ids) / self.n_total

    @property
    def repeated_rate(self) -> float:
        return len(self.repeated_ids) / self.n_total

    def to_dict(self) -> dict:
        return {
            "n_total": self.n_total,
            "missing_ids": list(self.missing_ids),
            "repeated_ids": list(self.repeated_ids),
            "missing_rate": self.missing_rate,
            "repeated_rate": self.repeated_rate,
        }


Auditable = Union[ClusterAssignment, Sequence[ClassificationAnswer]]


def audit(subject: Auditable, n_total: int) -> RecallReport:
    """Count missing and repeated recall over positions 1..n_total.

    For a ClusterAssignment, a position is missing when no cluster lists
    it and repeated when its total multiplicity across all cluster lists
    is at least two. For a list of classification answers (one per query,
    in query order), query i+1 is missing when its answer chose nothing
    (refusals included) and repeated when it chose two or more intents.
    """
    if n_total < 1:
        raise ValueError(f"n_total must be >= 1, got {n_total}")
    if isinstance(subject, ClusterAssignment):
        multiplicity = {p: 0 for p in range(1, n_total + 1)}
        for members in subject.clusters.values():
            for position in members:
                if position in multiplicity:
                    multiplicity[position] += 1
        missing = [p for p, count in multiplicity.items() if count == 0]
        repeated = [p for p, count in multiplicity.items() if count >= 2]
    else:
        answers = list(subject)
        if len(answers) != n_total:
            raise ValueError(f"expected {n_total} answers, got {len(answers)}")
        missing = [i for i, a in enumerate(answers, start=1) if not a.chosen]
        repeated = [i for i, a in enumerate(answers, start=1) if len(a.chosen) >= 2]
    return RecallReport(
        n_total=n_total,
        missing_ids=tuple(sorted(missing)),
        repeated_ids=tuple(sorted(repeated)),
    )


def repair(assignment: ClusterAssignment, n_total: int, k: int, seed: int) -> ClusterAssignment:
    """Make the assignment a total function over positions 1..n_total.

    Repeated positions retain the first cluster that lists them, in
    document order; positions in no cluster are assigned uniformly over
    1..k from the seeded stream, in ascending position order so the result
    depends only on (assignment, n_total, k, seed). Already-total
    assignments come back unchanged apart from a defensive copy.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    stream = SplitMix64(seed).fork("recall-repair")
    first_cluster: dict[int, int] = {}
    for idx, members in assignment.clusters.items():
        for position in members:
            first_cluster.setdefault(position, idx)
    for position in range(1, n_total + 1):
        if position not in first_cluster:
            first_cluster[position] = 1 + stream.randrange(k)
    clusters: dict[int, list[int]] = {idx: [] for idx in assignment.clusters}
    for position in range(1, n_total + 1):
        clusters.setdefault(first_cluster[position], []).append(position)
    clusters = {idx: members for idx, members in clusters.items() if members}
    return replace(assignment, clusters=clusters)


def repair_answers(
    answers: Sequence[ClassificationAnswer], n_intents: int, seed: int
) -> list[int]:
    """Per-query repaired intent choice: first chosen, or a seeded draw."""
    if n_intents < 1:
        raise ValueError(f"n_intents must be >= 1, got {n_intents}")
    stream = SplitMix64(seed).fork("recall-repair")
    repaired = []
    for answer in answers:
        if answer.chosen:
            repaired.append(answer.chosen[0])
        else:
            repaired.append(1 + stream.randrange(n_intents))
    return repaired


def to_label_list(assignment: ClusterAssignment, n_total: int) -> list[int]:
    """Cluster index per position for a total assignment, in position order."""
    by_position: dict[int, int] = {}
    for idx, members in assignment.clusters.items():
        for position in members:
            if position in by_position:
                raise ValueError(f"position {position} assigned more than once")
            by_position[position] = idx
    if len(by_position) != n_total or set(by_position) != set(range(1, n_total + 1)):
        raise ValueError("assignment is not total over 1..n_total")
    return [by_position[p] for p in range(1, n_total + 1)]
