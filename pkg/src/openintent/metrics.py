"""Scoring math: optimal assignment, clustering agreement, grouped classification.

Clustering accuracy maps predicted clusters onto gold classes with an
optimal assignment before counting matches, so it is invariant under any
relabeling of the predicted side. NMI normalizes mutual information by the
arithmetic mean of the two partition entropies (natural log; the base
cancels in the ratio). ARI follows the standard permutation-model
adjustment of the Rand index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Optional, Sequence

# Reserved classification target for pseudo intents that match no gold
# label; never a member of any label set, so it always scores as wrong.
SINK_LABEL = "<unmatched>"


def hungarian(cost: Sequence[Sequence[float]]) -> list[int]:
    """Minimum-cost perfect assignment on a square matrix.

    Returns ``perm`` with ``perm[row] = column``. Shortest-augmenting-path
    formulation with dual potentials, O(n^3). Ties may resolve to any
    optimal assignment.
    """
    n = len(cost)
    if n == 0:
        raise ValueError("hungarian requires a non-empty matrix")
    for row in cost:
        if len(row) != n:
            raise ValueError("hungarian requires a square matrix")
        for value in row:
            if not math.isfinite(value):
                raise ValueError("hungarian requires finite entries")

    INF = float("inf")
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match = [0] * (n + 1)  # match[col] = row currently assigned (1-based)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        path = [0] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    path[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = path[j0]
            match[j0] = match[j1]
            j0 = j1

    perm = [0] * n
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    return perm


def assignment_cost(cost: Sequence[Sequence[float]], perm: Sequence[int]) -> float:
    return sum(cost[i][perm[i]] for i in range(len(perm)))


@dataclass
class Contingency:
    """Co-occurrence counts between two labelings of the same samples."""

    counts: list[list[int]]
    row_labels: list[Hashable]
    col_labels: list[Hashable]

    @classmethod
    def from_pairs(cls, rows: Sequence[Hashable], cols: Sequence[Hashable]) -> "Contingency":
        if len(rows) != len(cols):
            raise ValueError(f"length mismatch: {len(rows)} vs {len(cols)}")
        if not rows:
            raise ValueError("cannot build a contingency over zero samples")
        row_labels: list[Hashable] = []
        col_labels: list[Hashable] = []
        row_index: dict[Hashable, int] = {}
        col_index: dict[Hashable, int] = {}
        for r in rows:
            if r not in row_index:
                row_index[r] = len(row_labels)
                row_labels.append(r)
        for c in cols:
            if c not in col_index:
                col_index[c] = len(col_labels)
                col_labels.append(c)
        counts = [[0] * len(col_labels) for _ in row_labels]
        for r, c in zip(rows, cols):
            counts[row_index[r]][col_index[c]] += 1
        return cls(counts=counts, row_labels=row_labels, col_labels=col_labels)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def padded_square(self) -> list[list[int]]:
        """Counts zero-padded to a square matrix."""
        size = max(len(self.row_labels), len(self.col_labels))
        out = [[0] * size for _ in range(size)]
        for i, row in enumerate(self.counts):
            for j, value in enumerate(row):
                out[i][j] = value
        return out


@dataclass(frozen=True)
class ClusteringScores:
    acc: float
    nmi: float
    ari: float


def max_overlap_assignment(table: Contingency) -> tuple[list[int], int]:
    """Optimal row->column matching maximizing total overlap.

    Returns (perm over the padded square, matched count). Padded rows and
    columns contribute zero overlap.
    """
    square = table.padded_square()
    negated = [[-value for value in row] for row in square]
    perm = hungarian(negated)
    matched = sum(square[i][perm[i]] for i in range(len(perm)))
    return perm, matched


def clustering_accuracy(true_labels: Sequence[Hashable], predicted: Sequence[Hashable]) -> float:
    table = Contingency.from_pairs(true_labels, predicted)
    _, matched = max_overlap_assignment(table)
    return matched / table.total


def _entropy(sizes: Sequence[int], n: int) -> float:
    h = 0.0
    for s in sizes:
        if s > 0:
            p = s / n
            h -= p * math.log(p)
    return h


def normalized_mutual_info(true_labels: Sequence[Hashable], predicted: Sequence[Hashable]) -> float:
    table = Contingency.from_pairs(true_labels, predicted)
    n = table.total
    row_sums = [sum(row) for row in table.counts]
    col_sums = [sum(col) for col in zip(*table.counts)]
    mi = 0.0
    for i, row in enumerate(table.counts):
        for j, nij in enumerate(row):
            if nij > 0:
                mi += (nij / n) * math.log(n * nij / (row_sums[i] * col_sums[j]))
    denom = (_entropy(row_sums, n) + _entropy(col_sums, n)) / 2.0
    if denom == 0.0:
        # Both partitions are singletons: identical trivial clusterings.
        return 1.0
    # clamp: mi can drift a few ulp past denom on identical partitions
    return min(1.0, max(0.0, mi / denom))


def adjusted_rand_index(true_labels: Sequence[Hashable], predicted: Sequence[Hashable]) -> float:
    table = Contingency.from_pairs(true_labels, predicted)
    n = table.total
    row_sums = [sum(row) for row in table.counts]
    col_sums = [sum(col) for col in zip(*table.counts)]

    def comb2(x: int) -> int:
        return x * (x - 1) // 2

    index = sum(comb2(nij) for row in table.counts for nij in row)
    sum_a = sum(comb2(a) for a in row_sums)
    sum_b = sum(comb2(b) for b in col_sums)
    expected = sum_a * sum_b / comb2(n) if n >= 2 else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        # Degenerate partitions (both trivial); agreement is perfect.
        return 1.0
    return (index - expected) / (max_index - expected)


def clustering_scores(true_labels: Sequence[Hashable], predicted: Sequence[Hashable]) -> ClusteringScores:
    """ACC / NMI / ARI of a total predicted clustering against gold labels."""
    if len(true_labels) != len(predicted):
        raise ValueError(f"length mismatch: {len(true_labels)} vs {len(predicted)}")
    return ClusteringScores(
        acc=clustering_accuracy(true_labels, predicted),
        nmi=normalized_mutual_info(true_labels, predicted),
        ari=adjusted_rand_index(true_labels, predicted),
    )


@dataclass(frozen=True)
class GroupCell:
    macro_f1: float
    accuracy: float


@dataclass(frozen=True)
class GroupScores:
    """Joint-classification scores split by gold-label group."""

    ind: GroupCell
    ood: GroupCell
    overall: GroupCell


def _macro_f1(gold: Sequence[str], predicted: Sequence[str], label_set: Sequence[str]) -> float:
    scores = []
    for label in label_set:
        tp = sum(1 for g, p in zip(gold, predicted) if g == label and p == label)
        fp = sum(1 for g, p in zip(gold, predicted) if g != label and p == label)
        fn = sum(1 for g, p in zip(gold, predicted) if g == label and p != label)
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return sum(scores) / len(scores) if scores else 0.0


def _group_cell(
    gold: Sequence[str],
    predicted: Sequence[str],
    member_labels: Sequence[str],
) -> GroupCell:
    in_group = [i for i, g in enumerate(gold) if g in member_labels]
    if in_group:
        correct = sum(1 for i in in_group if predicted[i] == gold[i])
        accuracy = correct / len(in_group)
    else:
        accuracy = 0.0
    return GroupCell(macro_f1=_macro_f1(gold, predicted, member_labels), accuracy=accuracy)


def group_scores(
    gold: Sequence[str],
    predicted: Sequence[str],
    ind_labels: Sequence[str],
    ood_labels: Sequence[str],
    pseudo_alignment: Optional[Mapping[str, str]] = None,
) -> GroupScores:
    """Per-group macro-F1 and accuracy over the joint IND+OOD label set.

    ``pseudo_alignment`` maps pseudo-intent names onto gold OOD labels
    before scoring; an aligned pseudo intent counts exactly like its gold
    label, and predictions outside the joint set count as wrong everywhere
    without entering any macro-F1 label set.
    """
    if len(gold) != len(predicted):
        raise ValueError(f"length mismatch: {len(gold)} vs {len(predicted)}")
    if pseudo_alignment:
        predicted = [pseudo_alignment.get(p, p) for p in predicted]
    joint = list(ind_labels) + list(ood_labels)
    return GroupScores(
        ind=_group_cell(gold, predicted, list(ind_labels)),
        ood=_group_cell(gold, predicted, list(ood_labels)),
        overall=_group_cell(gold, predicted, joint),
    )


def align_pseudo(
    ood_gold: Sequence[str],
    ood_pred_pseudo: Sequence[str],
) -> dict[str, str]:
    """Match pseudo-intent names onto gold OOD labels by maximum overlap.

    Input lists are parallel over OOD test samples that received a
    pseudo-intent prediction. Pseudo intents left without a gold partner
    (more pseudo intents than gold labels, or matched only to padding) map
    to SINK_LABEL and therefore never score as correct.
    """
    if len(ood_gold) != len(ood_pred_pseudo):
        raise ValueError(f"length mismatch: {len(ood_gold)} vs {len(ood_pred_pseudo)}")
    if not ood_gold:
        raise ValueError("align_pseudo requires at least one sample")
    table = Contingency.from_pairs(ood_pred_pseudo, ood_gold)
    perm, _ = max_overlap_assignment(table)
    mapping: dict[str, str] = {}
    for i, pseudo in enumerate(table.row_labels):
        j = perm[i]
        mapping[str(pseudo)] = str(table.col_labels[j]) if j < len(table.col_labels) else SINK_LABEL
    return mapping


def k_error(k_pred: int, k_true: int) -> int:
    """Absolute error of a cluster-count estimate."""
    if k_pred < 1 or k_true < 1:
        raise ValueError("cluster counts must be >= 1")
    return abs(k_pred - k_true)
