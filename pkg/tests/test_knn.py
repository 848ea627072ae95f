"""k-NN: neighbor ranking, tie rules, degenerate k."""

import numpy as np
import pytest

from recidrisk.knn import knn_fit, knn_predict, neighbor_labels, vote


def test_exact_match_nearest_neighbor():
    X = np.array([[0.0, 0.0], [5.0, 5.0], [9.0, 0.0]])
    y = np.array([0, 1, 2])
    model = knn_fit((X, y), k=1)
    for row, label in zip(X, y):
        assert knn_predict(model, row) == label


def test_k_equal_n_gives_global_majority():
    X = np.array([[0.0], [1.0], [2.0], [3.0], [50.0]])
    y = np.array([1, 1, 1, 0, 2])
    model = knn_fit((X, y), k=5)
    for q in ([0.0], [100.0], [-7.0]):
        assert knn_predict(model, q) == 1


def test_vote_tie_goes_to_higher_risk():
    X = np.array([[0.0], [2.0]])
    y = np.array([0, 2])
    model = knn_fit((X, y), k=2)
    assert knn_predict(model, [1.0]) == 2
    assert knn_predict(model, [0.0]) == 2  # both neighbors always vote


def test_distance_tie_keeps_lower_training_index():
    # two identical rows with different labels: index order decides the k=1 vote
    X = np.array([[1.0, 1.0], [1.0, 1.0], [8.0, 8.0]])
    y = np.array([2, 0, 1])
    assert knn_predict(knn_fit((X, y), k=1), [1.0, 1.0]) == 2
    y_swapped = np.array([0, 2, 1])
    assert knn_predict(knn_fit((X, y_swapped), k=1), [1.0, 1.0]) == 0


def test_k_bounds_enforced():
    X, y = np.zeros((3, 2)), np.array([0, 1, 2])
    with pytest.raises(ValueError):
        knn_fit((X, y), k=4)
    with pytest.raises(ValueError):
        knn_fit((X, y), k=0)


def test_neighbor_table_serves_every_k():
    rng = np.random.default_rng(2)
    X = rng.random((40, 5))
    y = rng.integers(0, 3, 40)
    queries = rng.random((12, 5))
    ranked = neighbor_labels(X, y, queries, k_max=15)
    for k in (1, 3, 7, 15):
        direct = knn_fit((X, y), k=k).predict(queries)
        assert np.array_equal(vote(ranked, k), direct)


def test_brute_force_equivalence():
    rng = np.random.default_rng(3)
    for _ in range(15):
        n = int(rng.integers(5, 60))
        X = rng.random((n, 4))
        y = rng.integers(0, 3, n)
        k = int(rng.integers(1, n + 1))
        model = knn_fit((X, y), k=k)
        for q in rng.random((8, 4)):
            d = np.sqrt(((X - q) ** 2).sum(axis=1))
            ranked = sorted(range(n), key=lambda i: (d[i], i))[:k]
            counts = np.bincount(y[ranked], minlength=3)
            expected = max((0, 1, 2), key=lambda c: (counts[c], c))
            assert knn_predict(model, q) == expected
