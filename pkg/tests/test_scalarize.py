import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imcmoead.scalarize import ScalarizationContext, best_weight_index, tchebycheff
from imcmoead.weights import WeightLattice, build_neighborhoods

vec = st.lists(st.floats(-50, 50), min_size=3, max_size=3).map(np.array)
simplex = (
    st.lists(st.floats(0, 1), min_size=3, max_size=3)
    .filter(lambda v: sum(v) > 1e-3)
    .map(lambda v: np.array(v) / sum(v))
)


def lattice(weights):
    W = np.array(weights, dtype=float)
    return WeightLattice(W, 1, 1, build_neighborhoods(W, 1))


@pytest.mark.parametrize(
    "f, lam, z, expected",
    [
        ((1, 3), (0.5, 0.5), (0, 0), 1.5),
        ((2, 2), (0.3, 0.7), (2, 2), 0.0),
        ((2, 5), (1, 0), (0, 0), 2.0),
    ],
)
def test_tchebycheff_examples(f, lam, z, expected):
    assert tchebycheff(np.array(f), np.array(lam), np.array(z)) == pytest.approx(expected)


def test_zero_weight_is_floored():
    # the second term is 1e-6 * 5e6 = 5, larger than the first term 2
    assert tchebycheff(np.array([2, 5e6]), np.array([1, 0]), np.zeros(2)) == pytest.approx(5.0)


@given(vec, simplex, vec, vec)
def test_translation_invariance(f, lam, z, c):
    assert tchebycheff(f + c, lam, z + c) == pytest.approx(tchebycheff(f, lam, z), abs=1e-9)


@given(vec, simplex, vec, st.integers(0, 2), st.floats(0, 10))
def test_monotone_in_each_gap(f, lam, z, j, bump):
    g = f.copy()
    g[j] = z[j] + np.sign(f[j] - z[j] or 1.0) * (abs(f[j] - z[j]) + bump)
    assert tchebycheff(g, lam, z) >= tchebycheff(f, lam, z)


@given(vec, simplex)
def test_zero_iff_at_reference(z, lam):
    assert tchebycheff(z, lam, z) == 0.0
    assert tchebycheff(z + 1e-3, lam, z) > 0.0


def test_best_weight_example():
    ctx = ScalarizationContext(lattice([(1, 0), (0.5, 0.5), (0, 1)]), np.zeros(2))
    assert best_weight_index(np.array([0.1, 0.9]), ctx) == 0


def test_best_weight_ties_to_lowest_index():
    ctx = ScalarizationContext(lattice([(1, 0), (0.5, 0.5), (0, 1)]), np.array([0.2, 0.3]))
    assert best_weight_index(np.array([0.2, 0.3]), ctx) == 0


def test_single_weight():
    ctx = ScalarizationContext(lattice([(0.5, 0.5)]), np.zeros(2))
    assert best_weight_index(np.array([3.0, 4.0]), ctx) == 0


@given(st.lists(simplex, min_size=1, max_size=12), vec, vec)
def test_best_weight_is_brute_force_argmin(weights, f, z):
    ctx = ScalarizationContext(lattice(weights), z)
    values = [tchebycheff(f, w, z) for w in weights]
    assert best_weight_index(f, ctx) == min(range(len(values)), key=lambda k: (values[k], k))


@given(st.lists(simplex, min_size=1, max_size=12), vec, vec, st.floats(0.1, 100))
def test_best_weight_scale_invariant(weights, f, z, c):
    # scaling the gap f - z scales every TCH value by c
    ctx = ScalarizationContext(lattice(weights), z)
    assert best_weight_index(z + c * (f - z), ctx) == best_weight_index(f, ctx) or np.isclose(
        sorted(tchebycheff(f, np.array(weights), z))[0],
        sorted(tchebycheff(f, np.array(weights), z))[min(1, len(weights) - 1)],
    )


def test_context_dimension_check():
    with pytest.raises(ValueError):
        ScalarizationContext(lattice([(1, 0)]), np.zeros(3))
