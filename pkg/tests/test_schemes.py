import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from approxlab.schemes import (
    DiagonalScheme,
    HilbertScheme,
    MatrixScheme,
    SchemeError,
    error_sequence,
    numerical_rank,
    oblique_projection,
    prescribe_errors,
    projection_gap_check,
    shapiro_gap,
    singular_values,
)

# frozen from tests/oracles.singular_values_charpoly (40-digit polynomial roots)
CHARPOLY = {
    "golden": ([[1, 1], [0, 1]], [1.618033988749895, 0.6180339887498949]),
    "swap": ([[0, 1], [1, 0]], [1.0, 1.0]),
    "diag": ([[3, 0, 0], [0, 1, 0], [0, 0, 2]], [3.0, 2.0, 1.0]),
    "tri": ([[2, 1, 0], [1, 3, 1], [0, 1, 4]], [4.732050807568878, 3.0, 1.2679491924311228]),
    "full": ([[1, 2, 3], [4, 5, 6], [7, 8, 10]],
             [17.412505166808593, 0.8751613501104356, 0.19686652111743022]),
    "skew": ([[3, 1], [2, -1]], [3.618033988749895, 1.381966011250105]),
    "nearsing": ([[1, 1, 1], [1, 1.0001, 1], [1, 1, 1.0002]],
                 [3.000100002222222, 0.00015773391579714283, 4.226386198061374e-05]),
}

# frozen from tests/oracles.best_rank_k_distance (subspace grid search)
RANK_K = {
    "golden": [1.618033988749895, 0.6180339887498948],
    "full": [17.412505166808597, 0.8751613501104326, 0.19686652111742953],
}


@pytest.mark.parametrize("name", sorted(CHARPOLY))
def test_singular_values_match_charpoly(name):
    mat, expected = CHARPOLY[name]
    np.testing.assert_allclose(singular_values(mat).values, expected, rtol=0, atol=1e-8)


@pytest.mark.parametrize("name", sorted(RANK_K))
def test_singular_values_match_rank_k_distance(name):
    sv = singular_values(CHARPOLY[name][0]).values
    np.testing.assert_allclose(sv, RANK_K[name], atol=1e-4)


def test_small_singular_values_have_relative_accuracy():
    # graded matrix: LAPACK and Jacobi should both resolve the 1e-12 value
    mat = np.diag([1.0, 1e-6, 1e-12]) @ np.array([[1, 0.5, 0.2], [0.3, 1, 0.1], [0.1, 0.2, 1]])
    ours = singular_values(mat).values
    ref = np.linalg.svd(mat, compute_uv=False)
    np.testing.assert_allclose(ours, ref, rtol=1e-6)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 7), st.integers(1, 7)),
              elements=st.floats(-10, 10)))
def test_singular_values_agree_with_lapack(mat):
    ours = singular_values(mat).values
    ref = np.linalg.svd(mat, compute_uv=False)
    scale = max(1.0, float(np.abs(mat).max()))
    np.testing.assert_allclose(ours[:ref.size], ref, atol=1e-12 * scale * 10)
    assert np.all(np.diff(ours) <= 0)
    assert ours[0] == pytest.approx(np.linalg.norm(mat, 2), abs=1e-11 * scale)


def test_matrix_dimension_cap():
    with pytest.raises(SchemeError):
        singular_values(np.zeros((65, 2)))


@pytest.mark.parametrize("eps, x", [
    ([1, 0.5, 0], [math.sqrt(3) / 2, 0.5]),
    ([1, 1, 0], [0, 1]),
    ([2, 1, 1, 0], [math.sqrt(3), 0, 1]),
])
def test_prescribe_examples(eps, x):
    got = prescribe_errors(eps)
    np.testing.assert_allclose(got, x, atol=1e-15)
    errs = error_sequence(got, HilbertScheme(8), len(eps) - 1).values
    np.testing.assert_allclose(errs, eps, atol=1e-15)


def test_prescribe_rejects_increasing():
    with pytest.raises(SchemeError):
        prescribe_errors([1, 2])


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=200))
def test_lethargy_round_trip(raw):
    eps = np.sort(np.asarray(raw))[::-1]
    x = prescribe_errors(eps)
    errs = error_sequence(x, HilbertScheme(256), len(eps) - 1).values
    np.testing.assert_allclose(errs, eps, rtol=1e-10, atol=1e-10 * max(eps[0], 1e-300))


@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-5, 5)))
def test_hilbert_tail_identity(x):
    n = x.size
    errs = HilbertScheme(64).errors(x, n)
    for k in range(n + 1):
        assert errs[k] == pytest.approx(math.hypot(*x[k:]), rel=1e-12, abs=1e-300)
    assert np.all(np.diff(errs) <= 1e-15)


def test_matrix_and_diagonal_errors():
    mat = MatrixScheme()
    assert error_sequence(np.diag([3, 1, 2]), mat, 4).tolist() == pytest.approx([3, 2, 1, 0, 0])
    d = 1 / np.arange(1, 9)
    np.testing.assert_array_equal(error_sequence(d[::-1], DiagonalScheme(), 7).values, d)


def test_shapiro_gap_examples():
    h = HilbertScheme(100)
    assert all(shapiro_gap(h, n) == 1.0 for n in range(50))
    diag = DiagonalScheme(np.ones(10))
    assert all(shapiro_gap(diag, n) == 1.0 for n in range(10))


def test_orthogonal_projection_gap():
    rng = np.random.default_rng(3)
    fam = [oblique_projection(rng, 8, n, 0.0) for n in range(1, 8)]
    bounds = projection_gap_check(fam, c=1.0)
    assert all(b.a_n == pytest.approx(1.0) for b in bounds)


def test_oblique_two_by_two():
    t = 1.7
    [b] = projection_gap_check([[[1, t], [0, 0]]])
    assert b.norm == pytest.approx(math.sqrt(1 + t * t))
    assert b.a_n == pytest.approx(1.0)
    assert b.margin >= 0


def test_random_oblique_family_margins():
    rng = np.random.default_rng(20)
    skews = rng.uniform(0, math.sqrt(15), size=15)
    fam = [oblique_projection(rng, 16, n, s) for n, s in zip(range(1, 16), skews)]
    bounds = projection_gap_check(fam, c=4.0)
    assert all(b.margin >= 0 for b in bounds)
    assert all(b.norm <= 4 + 1e-9 for b in bounds)


def test_projection_check_rejects_non_idempotent():
    with pytest.raises(SchemeError):
        projection_gap_check([[[1, 0], [0, 0.5]]])


def test_numerical_rank():
    assert numerical_rank([3, 1, 1e-14]) == 2
    assert numerical_rank([0, 0]) == 0
