import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cwfcm.evaluation import accuracy, contingency, evaluate, purity, rand_index


def rand_index_bruteforce(pred, true):
    agree = total = 0
    for i, j in itertools.combinations(range(len(pred)), 2):
        agree += (pred[i] == pred[j]) == (true[i] == true[j])
        total += 1
    return agree / total


def best_correct_bruteforce(pred, true):
    clusters, classes = sorted(set(pred)), sorted(set(true))
    # pad classes with dummies so every cluster-to-class injection is enumerated
    targets = classes + [None] * max(0, len(clusters) - len(classes))
    best = 0
    for perm in itertools.permutations(targets, len(clusters)):
        m = dict(zip(clusters, perm))
        best = max(best, sum(m[p] == t for p, t in zip(pred, true)))
    return best


labelings = st.integers(2, 30).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 3), min_size=n, max_size=n),
    st.lists(st.integers(0, 3), min_size=n, max_size=n)))


def test_rand_index_identical_partitions():
    assert rand_index([5, 5, 7, 7, 9], [0, 0, 1, 1, 2]) == 1.0


def test_rand_index_hand_case():
    # pairs (1,2): together/apart, (1,3): apart/apart, (2,3): apart/together
    assert rand_index([0, 0, 1], [0, 1, 1]) == pytest.approx(1 / 3)


def test_rand_index_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(2, 101))
        pred, true = rng.integers(0, 5, n), rng.integers(0, 4, n)
        assert rand_index(pred, true) == rand_index_bruteforce(pred, true)


def test_rand_index_errors():
    with pytest.raises(ValueError, match="length"):
        rand_index([0, 1], [0, 1, 1])
    with pytest.raises(ValueError):
        rand_index([0], [0])


def test_purity_cases():
    assert purity([0, 0, 1, 1], [3, 3, 4, 4]) == 1.0
    assert purity([0, 0, 0, 1, 1], ["A", "A", "B", "B", "B"]) == pytest.approx(0.8)
    assert purity([0] * 9, [0, 1, 2] * 3) == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        purity([0], [0, 1])


def test_accuracy_iris_four_errors(iris):
    pred = iris.labels.copy()
    pred[[0, 60, 70, 120]] = [1, 2, 0, 1]
    ar, er, mc, mapping = accuracy(pred, iris.labels)
    assert mc == 4
    assert er == pytest.approx(2.667, abs=5e-4)
    assert ar + er == pytest.approx(100.0, abs=1e-9)
    assert mapping == {0: 0, 1: 1, 2: 2}


def test_accuracy_invariant_to_cluster_permutation():
    true = np.repeat([0, 1, 2], 5)
    for perm in itertools.permutations([7, 8, 9]):
        pred = np.array(perm)[true]
        assert accuracy(pred, true)[1] == 0.0


def test_accuracy_matches_permutation_bruteforce():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 31))
        pred, true = rng.integers(0, 4, n), rng.integers(0, 4, n)
        ar, er, mc, _ = accuracy(pred, true)
        assert n - mc == best_correct_bruteforce(list(pred), list(true))


def test_accuracy_more_clusters_than_classes():
    ar, er, mc, mapping = accuracy([0, 0, 1, 1, 2, 2], [0, 0, 1, 1, 1, 1])
    assert mc == 2
    assert sorted(v for v in mapping.values() if v is not None) == [0, 1]
    assert list(mapping.values()).count(None) == 1


def test_contingency():
    table, clusters, classes = contingency([1, 1, 2], ["a", "b", "b"])
    np.testing.assert_array_equal(table, [[1, 1], [0, 1]])
    assert clusters.tolist() == [1, 2] and classes.tolist() == ["a", "b"]


@settings(max_examples=200, deadline=None)
@given(labelings)
def test_report_invariants(pt):
    pred, true = pt
    rep = evaluate(pred, true)
    n = len(pred)
    assert rep.accuracy_rate + rep.error_rate == pytest.approx(100.0, abs=1e-9)
    assert rep.misclassified == round(rep.error_rate * n / 100)
    assert rep.purity >= rep.accuracy_rate / 100 - 1e-12
    assert 0 <= rep.rand_index <= 1


@settings(max_examples=200, deadline=None)
@given(labelings, st.permutations(range(4)))
def test_metrics_invariant_to_cluster_relabeling(pt, perm):
    pred, true = pt
    relabeled = [perm[p] for p in pred]
    a, b = evaluate(pred, true), evaluate(relabeled, true)
    assert (a.rand_index, a.purity, a.error_rate) == (b.rand_index, b.purity, b.error_rate)


@settings(max_examples=300, deadline=None)
@given(labelings)
def test_correcting_a_point_never_hurts(pt):
    pred, true = map(np.array, pt)
    _, _, mc, mapping = accuracy(pred, true)
    inverse = {v: k for k, v in mapping.items() if v is not None}
    for i in range(len(pred)):
        if mapping[pred[i]] == true[i] or true[i] not in inverse:
            continue
        fixed = pred.copy()
        fixed[i] = inverse[true[i]]
        assert accuracy(fixed, true)[2] <= mc - 1
        # purity can only drop if the moved point was needed for its old
        # cluster's majority count
        source = true[pred == pred[i]]
        counts = np.bincount(source)
        if counts[true[i]] < counts.max() or (counts == counts.max()).sum() > 1:
            assert purity(fixed, true) >= purity(pred, true) - 1e-12


def test_purity_can_drop_when_a_point_is_corrected():
    pred = np.array([1, 1, 2, 0, 1, 0, 0, 0])
    true = np.array([1, 0, 0, 1, 1, 1, 2, 1])
    _, _, mc, mapping = accuracy(pred, true)
    assert mapping[2] == 2 and mapping[1] == 0
    fixed = pred.copy()
    fixed[2] = 1
    assert accuracy(fixed, true)[2] == mc - 1
    assert purity(fixed, true) == purity(pred, true) - 1 / 8
