"""Scoring math against brute-force oracles and hand-computed goldens."""

import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from openintent.metrics import (
    SINK_LABEL,
    Contingency,
    adjusted_rand_index,
    align_pseudo,
    assignment_cost,
    clustering_accuracy,
    clustering_scores,
    group_scores,
    hungarian,
    k_error,
    max_overlap_assignment,
    normalized_mutual_info,
)


def brute_force_min_cost(matrix):
    n = len(matrix)
    return min(
        sum(matrix[i][perm[i]] for i in range(n))
        for perm in itertools.permutations(range(n))
    )


def brute_force_acc(true_labels, predicted):
    """Best accuracy over injective cluster-to-class mappings."""
    classes = sorted(set(true_labels))
    clusters = sorted(set(predicted))
    n = len(true_labels)
    size = max(len(classes), len(clusters))
    padded = classes + [f"<pad{i}>" for i in range(size - len(classes))]
    best = 0
    for image in itertools.permutations(padded, len(clusters)):
        mapping = dict(zip(clusters, image))
        best = max(
            best, sum(1 for t, p in zip(true_labels, predicted) if mapping[p] == t)
        )
    return best / n


class TestHungarian:
    def test_diagonal_optimum(self):
        assert hungarian([[0, 9], [9, 0]]) == [0, 1]

    def test_three_by_three_example(self):
        matrix = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
        perm = hungarian(matrix)
        assert assignment_cost(matrix, perm) == 5
        assert perm == [1, 0, 2]

    def test_constant_matrix_any_permutation(self):
        matrix = [[7.0] * 4 for _ in range(4)]
        perm = hungarian(matrix)
        assert sorted(perm) == [0, 1, 2, 3]
        assert assignment_cost(matrix, perm) == 28.0

    def test_matches_brute_force_on_random_matrices(self):
        rng = random.Random(2024)
        for _ in range(100):
            n = rng.randint(1, 7)
            matrix = [[rng.uniform(-10, 10) for _ in range(n)] for _ in range(n)]
            perm = hungarian(matrix)
            assert assignment_cost(matrix, perm) == pytest.approx(
                brute_force_min_cost(matrix), abs=1e-9
            )

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            hungarian([])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            hungarian([[1, 2], [3]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            hungarian([[1.0, math.inf], [0.0, 1.0]])


class TestClusteringGoldens:
    def test_pure_relabeling_scores_one(self):
        scores = clustering_scores([0, 0, 1, 1], [1, 1, 0, 0])
        assert scores.acc == 1.0
        assert scores.nmi == pytest.approx(1.0, abs=1e-9)
        assert scores.ari == pytest.approx(1.0, abs=1e-9)

    def test_independent_partition_zero_nmi_negative_ari(self):
        assert normalized_mutual_info([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(
            0.0, abs=1e-9
        )
        assert adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(
            -0.5, abs=1e-9
        )

    def test_four_of_five_accuracy(self):
        assert clustering_accuracy([0, 0, 1, 1, 2], [1, 1, 0, 2, 2]) == pytest.approx(
            0.8
        )

    def test_identity_is_perfect(self):
        scores = clustering_scores(["a", "b", "a"], ["a", "b", "a"])
        assert (scores.acc, scores.nmi, scores.ari) == (1.0, 1.0, 1.0)

    def test_both_singleton_partitions(self):
        scores = clustering_scores([5, 5, 5], [1, 1, 1])
        assert scores.acc == 1.0
        assert scores.nmi == 1.0  # 0/0 convention: identical trivial partitions
        assert scores.ari == 1.0

    def test_single_cluster_prediction_zero_nmi(self):
        assert normalized_mutual_info([0, 0, 1, 1], [3, 3, 3, 3]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            clustering_scores([1, 2], [1])


class TestAccOracle:
    def test_matches_brute_force(self):
        rng = random.Random(77)
        for _ in range(200):
            n = rng.randint(1, 8)
            n_classes = rng.randint(1, n)
            n_clusters = rng.randint(1, 4)
            truth = [rng.randrange(n_classes) for _ in range(n)]
            predicted = [rng.randrange(n_clusters) for _ in range(n)]
            assert clustering_accuracy(truth, predicted) == pytest.approx(
                brute_force_acc(truth, predicted), abs=1e-12
            )


@st.composite
def labelings(draw):
    n = draw(st.integers(min_value=1, max_value=25))
    truth = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    predicted = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return truth, predicted


@given(labelings())
@settings(max_examples=60, deadline=None)
def test_acc_invariant_under_cluster_relabeling(pair):
    truth, predicted = pair
    relabeled = [p + 100 for p in predicted]
    assert clustering_accuracy(truth, predicted) == pytest.approx(
        clustering_accuracy(truth, relabeled)
    )


@given(labelings())
@settings(max_examples=60, deadline=None)
def test_nmi_ari_invariant_under_relabeling_either_side(pair):
    truth, predicted = pair
    remap_t = [(-t - 1) for t in truth]
    remap_p = [p * 7 + 3 for p in predicted]
    assert normalized_mutual_info(truth, predicted) == pytest.approx(
        normalized_mutual_info(remap_t, remap_p), abs=1e-12
    )
    assert adjusted_rand_index(truth, predicted) == pytest.approx(
        adjusted_rand_index(remap_t, remap_p), abs=1e-12
    )


@given(st.lists(st.integers(0, 3), min_size=1, max_size=30))
@settings(max_examples=60, deadline=None)
def test_single_cluster_acc_is_majority_share(truth):
    predicted = [0] * len(truth)
    largest = max(truth.count(v) for v in set(truth))
    assert clustering_accuracy(truth, predicted) == pytest.approx(largest / len(truth))


@given(labelings())
@settings(max_examples=60, deadline=None)
def test_scores_stay_in_range(pair):
    truth, predicted = pair
    scores = clustering_scores(truth, predicted)
    assert 0.0 <= scores.acc <= 1.0
    assert 0.0 <= scores.nmi <= 1.0
    assert -0.5 - 1e-12 <= scores.ari <= 1.0 + 1e-12


class TestContingency:
    def test_from_pairs_counts(self):
        table = Contingency.from_pairs(["a", "a", "b"], [1, 2, 1])
        assert table.counts == [[1, 1], [1, 0]]
        assert table.total == 3

    def test_padded_square(self):
        table = Contingency.from_pairs(["a", "b", "c"], [1, 1, 1])
        padded = table.padded_square()
        assert len(padded) == 3
        assert all(len(row) == 3 for row in padded)

    def test_max_overlap_assignment(self):
        table = Contingency.from_pairs([0, 0, 1, 1, 2], [1, 1, 0, 2, 2])
        _, matched = max_overlap_assignment(table)
        assert matched == 4


class TestGroupScores:
    def test_all_correct(self):
        gold = ["a", "b", "x", "y"]
        scores = group_scores(gold, list(gold), ["a", "b"], ["x", "y"])
        for cell in (scores.ind, scores.ood, scores.overall):
            assert cell.accuracy == 1.0
            assert cell.macro_f1 == 1.0

    def test_one_class_fully_misclassified(self):
        ind = [f"i{k}" for k in range(5)]
        ood = [f"o{k}" for k in range(5)]
        gold = [label for label in ind + ood for _ in range(4)]
        predicted = list(gold)
        # send every i0 sample to i1
        predicted = [("i1" if g == "i0" else g) for g in gold]
        scores = group_scores(gold, predicted, ind, ood)
        assert scores.overall.accuracy == pytest.approx(0.9)
        # i0: f1 0; i1: precision 4/8, recall 1 -> 2/3; other 8 classes perfect
        expected_macro = (0.0 + 2 / 3 + 8 * 1.0) / 10
        assert scores.overall.macro_f1 == pytest.approx(expected_macro)

    def test_ind_perfect_ood_wrong_balanced(self):
        ind = ["i0", "i1"]
        ood = ["o0", "o1"]
        gold = ["i0", "i1", "o0", "o1"]
        predicted = ["i0", "i1", "o1", "o0"]
        scores = group_scores(gold, predicted, ind, ood)
        assert scores.ind.accuracy == 1.0
        assert scores.ood.accuracy == 0.0
        assert scores.overall.accuracy == 0.5

    def test_prediction_outside_joint_set_counts_wrong(self):
        scores = group_scores(["a"], ["zzz"], ["a"], [])
        assert scores.ind.accuracy == 0.0
        assert scores.overall.macro_f1 == 0.0

    def test_alignment_applied_before_scoring(self):
        gold = ["o0", "o1"]
        predicted = ["p0", "p1"]
        scores = group_scores(
            gold, predicted, [], ["o0", "o1"], {"p0": "o0", "p1": "o1"}
        )
        assert scores.ood.accuracy == 1.0

    @given(
        st.lists(
            st.tuples(st.sampled_from(["i0", "i1", "o0", "o1"]),
                      st.sampled_from(["i0", "i1", "o0", "o1"])),
            min_size=1,
            max_size=40,
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_overall_accuracy_is_sample_weighted(self, pairs):
        gold = [g for g, _ in pairs]
        predicted = [p for _, p in pairs]
        scores = group_scores(gold, predicted, ["i0", "i1"], ["o0", "o1"])
        n_ind = sum(1 for g in gold if g in ("i0", "i1"))
        n_ood = len(gold) - n_ind
        weighted = (scores.ind.accuracy * n_ind + scores.ood.accuracy * n_ood) / len(gold)
        assert scores.overall.accuracy == pytest.approx(weighted)


class TestAlignPseudo:
    def test_renaming_bijection_recovered(self):
        gold = ["red", "blue", "red", "blue", "green", "green"]
        renamed = {"red": "p_r", "blue": "p_b", "green": "p_g"}
        predicted = [renamed[g] for g in gold]
        mapping = align_pseudo(gold, predicted)
        assert mapping == {"p_r": "red", "p_b": "blue", "p_g": "green"}

    def test_extra_pseudo_goes_to_sink(self):
        gold = ["a", "a", "b", "b", "a"]
        predicted = ["p1", "p1", "p2", "p2", "p3"]
        mapping = align_pseudo(gold, predicted)
        assert mapping["p1"] == "a"
        assert mapping["p2"] == "b"
        assert mapping["p3"] == SINK_LABEL

    def test_matches_exhaustive_bijection(self):
        rng = random.Random(11)
        gold_labels = [f"g{k}" for k in range(5)]
        pseudo_labels = [f"p{k}" for k in range(5)]
        gold = [rng.choice(gold_labels) for _ in range(50)]
        predicted = [rng.choice(pseudo_labels) for _ in range(50)]
        mapping = align_pseudo(gold, predicted)
        achieved = sum(1 for g, p in zip(gold, predicted) if mapping[p] == g)
        best = max(
            sum(
                1
                for g, p in zip(gold, predicted)
                if dict(zip(pseudo_labels, image))[p] == g
            )
            for image in itertools.permutations(gold_labels)
        )
        assert achieved == best

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            align_pseudo([], [])


class TestKError:
    def test_worked_triples(self):
        assert k_error(5, 5) == 0
        assert k_error(14, 10) == 4
        assert k_error(23, 15) == 8

    def test_symmetric(self):
        assert k_error(3, 9) == k_error(9, 3) == 6

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            k_error(0, 5)
