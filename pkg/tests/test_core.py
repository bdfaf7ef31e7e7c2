import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from simplexwise.core import (CloudError, MetricViolationError, apply_isometry, cloud_from_coordinates,
                              cloud_from_matrix, perturb, random_orthogonal, round_sig,
                              subset_distance_matrix, validate_metric)
from simplexwise.corpus import SQUARE, TRAPEZIUM, TRIANGLE, s5

from conftest import point_arrays
from reference import Q_MINUS_SQ, S_MINUS_SQ, sqrt_matrix


def test_trapezium_shape():
    c = cloud_from_coordinates(TRAPEZIUM)
    assert (c.m, c.n) == (4, 2)
    npt.assert_allclose(c.measure, np.full(4, 0.25))


def test_single_point_cloud():
    c = cloud_from_coordinates([(0,)])
    assert c.m == 1
    assert c.distances.shape == (1, 1)


def test_unequal_dimension_rejected():
    with pytest.raises(CloudError, match="dimension"):
        cloud_from_coordinates([(0, 0), (1,)])


@pytest.mark.parametrize("w, msg", [([0.5, -0.5, 1.0], "negative"), ([0.2, 0.2, 0.2], "sum"),
                                    ([0.5, 0.5], "expected 3")])
def test_bad_weights(w, msg):
    with pytest.raises(CloudError, match=msg):
        cloud_from_coordinates(TRIANGLE, w)


def test_distances_are_read_only():
    c = cloud_from_coordinates(TRIANGLE)
    with pytest.raises(ValueError):
        c.distances[0, 1] = 7.0


def test_matrix_clouds():
    assert cloud_from_matrix(sqrt_matrix(S_MINUS_SQ), validate=True).m == 5
    assert cloud_from_matrix([[0, 1], [1, 0]]).m == 2
    with pytest.raises(MetricViolationError) as err:
        cloud_from_matrix([[0, 1], [2, 0]])
    assert err.value.violations[0].axiom == "symmetry"
    with pytest.raises(MetricViolationError):
        cloud_from_matrix([[1, 1], [1, 0]])


def test_triangle_check_is_opt_in():
    bad = [[0, 3, 1], [3, 0, 1], [1, 1, 0]]
    assert cloud_from_matrix(bad).m == 3
    with pytest.raises(MetricViolationError):
        cloud_from_matrix(bad, validate=True)


def test_validate_metric_reports():
    assert validate_metric(sqrt_matrix(Q_MINUS_SQ)) == []
    assert validate_metric([[0]]) == []
    report = validate_metric([[0, 3, 1], [3, 0, 1], [1, 1, 0]])
    assert {v.axiom for v in report} == {"triangle"}
    assert (0, 2, 1) in {v.indices for v in report}
    npt.assert_allclose(report[0].magnitude, 1.0)


def test_subset_distance_matrix():
    T = cloud_from_coordinates(TRAPEZIUM)
    D = subset_distance_matrix(T, [2, 3])
    npt.assert_array_equal(D.entries, [[4.0]])
    assert subset_distance_matrix(T, [0]).entries.size == 0
    tri = cloud_from_coordinates(TRIANGLE + [(9, 9)])
    npt.assert_allclose(subset_distance_matrix(tri, [0, 1, 2]).entries, [[4, 3], [0, 5]])
    with pytest.raises(CloudError):
        subset_distance_matrix(T, [1, 1])
    with pytest.raises(CloudError):
        subset_distance_matrix(T, [0, 1, 2, 3])


def test_reflection_keeps_distances():
    T = cloud_from_coordinates(TRAPEZIUM)
    npt.assert_array_equal(apply_isometry(T, np.diag([-1.0, 1.0])).distances, T.distances)
    npt.assert_array_equal(apply_isometry(T, np.eye(2)).points, T.points)


def test_isometry_of_s_minus_permutes_matrix(rng):
    S = s5()["S-"]
    perm = rng.permutation(5)
    moved = apply_isometry(S, random_orthogonal(3, rng), rng.normal(size=3), perm)
    expect = sqrt_matrix(S_MINUS_SQ)[np.ix_(perm, perm)]
    npt.assert_allclose(moved.distances, expect, atol=1e-9)


def test_non_orthogonal_rejected():
    with pytest.raises(CloudError):
        apply_isometry(cloud_from_coordinates(TRAPEZIUM), np.array([[1.0, 0.1], [0.0, 1.0]]))


def test_perturb_rules():
    T = cloud_from_coordinates(TRAPEZIUM)
    a, b = perturb(T, 0.1, seed=3), perturb(T, 0.1, seed=3)
    npt.assert_array_equal(a.points, b.points)
    with pytest.raises(CloudError):
        perturb(T, 0.0)
    with pytest.raises(CloudError):
        perturb(cloud_from_matrix([[0, 1], [1, 0]]), 0.1)


def test_round_sig_key_properties():
    x = np.array([-0.0, 1.23456789012345, -9.87654321098765e-7, 3e300])
    r = round_sig(x, 12)
    assert np.signbit(r[0]) == False  # noqa: E712
    npt.assert_array_equal(round_sig(r, 12), r)


@given(point_arrays(m_max=8, n_max=4), st.integers(0, 2**32 - 1))
def test_isometry_preserves_distance_multiset(pts, seed):
    rng = np.random.default_rng(seed)
    c = cloud_from_coordinates(pts)
    moved = apply_isometry(c, random_orthogonal(c.n, rng), rng.normal(size=c.n) * 5,
                           rng.permutation(c.m))
    npt.assert_allclose(np.sort(moved.distances.ravel()), np.sort(c.distances.ravel()), atol=1e-9)


@given(point_arrays(m_max=8, n_max=4), st.floats(1e-6, 1.0), st.integers(0, 2**32 - 1))
def test_perturb_moves_distances_at_most_2eps(pts, eps, seed):
    c = cloud_from_coordinates(pts)
    moved = perturb(c, eps, seed)
    assert np.all(np.linalg.norm(moved.points - c.points, axis=1) <= eps)
    assert np.all(np.abs(moved.distances - c.distances) <= 2 * eps)


@given(point_arrays(m_max=8, n_max=4))
def test_coordinate_matrices_validate(pts):
    assert validate_metric(cloud_from_coordinates(pts).distances) == []
