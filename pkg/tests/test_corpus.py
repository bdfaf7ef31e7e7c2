import numpy as np
import numpy.testing as npt
import pytest

from simplexwise import corpus
from simplexwise.core import CloudError

from reference import Q_MINUS_SQ, Q_PLUS_SQ, S_MINUS_SQ, S_PLUS_SQ


def test_five_point_distances_exact():
    S = corpus.s5()
    npt.assert_array_equal(S["S-"].distances, np.sqrt(np.array(S_MINUS_SQ, dtype=float)))
    npt.assert_array_equal(S["S+"].distances, np.sqrt(np.array(S_PLUS_SQ, dtype=float)))


def test_seven_point_distances_exact():
    Q = corpus.q7()
    npt.assert_array_equal(Q["Q-"].distances, np.sqrt(np.array(Q_MINUS_SQ, dtype=float)))
    npt.assert_array_equal(Q["Q+"].distances, np.sqrt(np.array(Q_PLUS_SQ, dtype=float)))


def test_t6_default_instance():
    pts = corpus.t6_points()
    npt.assert_allclose(pts, [(-1, 2, 0), (1, -2, 0), (0, 3, 0)], atol=0)
    T = corpus.t6()["T-"]
    assert T.distances[0, 2] == pytest.approx(3.0, abs=1e-12)
    x1, y1 = pts[0][:2]
    assert (x1 + 2) ** 2 + y1 ** 2 == pytest.approx(4 * corpus.T6_DEFAULT_L_SQ[2])
    assert 4 * corpus.T6_DEFAULT_L_SQ[2] == 5


def test_t6_equal_arms_from_coordinates():
    # |RC1| = |GC2|, |RC2| = |GC3|, |RC3| = |GC1|
    d = corpus.t6()["T-"].distances
    R, G, C1, C2, C3 = 0, 1, 2, 3, 4
    npt.assert_allclose([d[R, C1], d[R, C2], d[R, C3]], [d[G, C2], d[G, C3], d[G, C1]], atol=1e-12)


def test_t6_params_and_signs():
    a = corpus.build("T6", [np.sqrt(13) / 2, np.sqrt(13) / 2, np.sqrt(5) / 2])
    npt.assert_allclose(a["T-"].points, corpus.t6()["T-"].points, atol=1e-12)
    flipped = corpus.t6_points(signs=(1, 1, 1))
    assert flipped[0][1] == flipped[1][1] == 2.0
    with pytest.raises(CloudError, match="infeasible"):
        corpus.build("T6", [1, 1, 5])
    with pytest.raises(CloudError):
        corpus.t6_points(signs=(1, 0, 1))


def test_unknown_and_unparametrised():
    with pytest.raises(CloudError):
        corpus.build("NOPE")
    with pytest.raises(CloudError):
        corpus.build("TK", [1.0])


def test_square_has_four_distinct_points():
    sq = corpus.tri_sq()["square"]
    assert sq.m == 4 and np.all(sq.distances[~np.eye(4, dtype=bool)] > 0)
