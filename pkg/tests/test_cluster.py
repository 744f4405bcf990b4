import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from imcmoead.cluster import kmeans, tournament_select, tournament_winner
from imcmoead.core import Solution


def sol(f, cv=0.0):
    f = np.asarray(f, dtype=float)
    return Solution(x=f.copy(), f=f, g=np.zeros(1), h=np.zeros(0), cv=cv, feasible=cv == 0.0)


point_sets = arrays(
    np.float64, st.tuples(st.integers(3, 40), st.just(2)), elements=st.floats(-5, 5)
)


def test_two_separated_blobs():
    pts = np.array([[0, 0], [0, 0.1], [0.1, 0], [5, 5], [5, 5.1], [5.1, 5]])
    part = kmeans(pts, 2, np.random.default_rng(0))
    assert len(set(part.assignments[:3])) == 1 and len(set(part.assignments[3:])) == 1
    assert part.assignments[0] != part.assignments[3]


def test_k_equals_one():
    pts = np.random.default_rng(1).random((10, 2))
    part = kmeans(pts, 1, np.random.default_rng(0))
    np.testing.assert_allclose(part.centroids[0], pts.mean(axis=0))
    assert np.all(part.assignments == 0)


def test_k_equals_n_zero_sse():
    pts = np.random.default_rng(2).random((8, 2))
    part = kmeans(pts, 8, np.random.default_rng(0))
    assert sorted(part.assignments) == list(range(8))
    assert part.sse == 0.0


def test_k_larger_than_n_warns(caplog):
    part = kmeans(np.eye(3), 5, np.random.default_rng(0))
    assert part.K == 3
    assert "exceeds" in caplog.text


def test_invalid_inputs():
    with pytest.raises(ValueError):
        kmeans(np.zeros((0, 2)), 2, np.random.default_rng(0))
    with pytest.raises(ValueError):
        kmeans(np.zeros((4, 2)), 0, np.random.default_rng(0))


@settings(max_examples=60, deadline=None)
@given(point_sets, st.integers(1, 8), st.integers(0, 2**31))
def test_partition_invariants(pts, K, seed):
    part = kmeans(pts, K, np.random.default_rng(seed))
    K = part.K
    assert sorted(set(part.assignments.tolist())) == list(range(K))
    for k in range(K):
        np.testing.assert_allclose(part.centroids[k], pts[part.members(k)].mean(axis=0))
    h = part.sse_history
    assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(h, h[1:]))
    assert part.n_iter <= 50


@settings(max_examples=20, deadline=None)
@given(point_sets, st.integers(1, 6), st.integers(0, 2**31))
def test_deterministic_for_seed(pts, K, seed):
    a = kmeans(pts, K, np.random.default_rng(seed))
    b = kmeans(pts, K, np.random.default_rng(seed))
    np.testing.assert_array_equal(a.assignments, b.assignments)
    np.testing.assert_array_equal(a.centroids, b.centroids)


def test_tournament_feasible_beats_infeasible():
    a, b = sol([1, 1]), sol([0, 0], cv=0.5)
    rng = np.random.default_rng(0)
    assert tournament_winner(a, b, rng) is a
    assert tournament_winner(b, a, rng) is a


def test_tournament_lower_cv_wins():
    a, b = sol([9, 9], cv=0.1), sol([0, 0], cv=0.5)
    assert tournament_winner(b, a, np.random.default_rng(0)) is a


def test_tournament_dominance():
    a, b = sol([1, 1]), sol([2, 2])
    assert tournament_winner(b, a, np.random.default_rng(0)) is a


def test_tournament_coin_flip_is_fair():
    a, b = sol([1, 2]), sol([2, 1])
    rng = np.random.default_rng(0)
    wins = sum(tournament_winner(a, b, rng) is a for _ in range(4000))
    assert 1800 < wins < 2200


def test_tournament_select_returns_members_by_reference():
    pop = [sol([i, 10 - i], cv=0.1 * (i % 3)) for i in range(10)]
    out = tournament_select(pop, 25, np.random.default_rng(3))
    assert len(out) == 25
    assert all(any(w is p for p in pop) for w in out)
    # the worst-violation members can only win against each other
    worst = [p for p in pop if p.cv == 0.2]
    assert sum(w.cv == 0.2 for w in out) <= 25 * (len(worst) / len(pop)) ** 2 * 3 + 3


def test_tournament_select_empty():
    with pytest.raises(ValueError):
        tournament_select([], 3, np.random.default_rng(0))
