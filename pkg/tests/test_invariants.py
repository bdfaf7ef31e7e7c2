import itertools
from fractions import Fraction
from math import comb

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplexwise import corpus
from simplexwise.core import CloudError, apply_isometry, cloud_from_coordinates, random_orthogonal
from simplexwise.invariants import (DegenerateMomentError, add, amd, asd, canonicalize, moments, pdd,
                                    rdd, sdd, sdm, sdv, simplified_rdd, simplify)
from simplexwise.metrics import m_inf, sdd_dist_emd

from conftest import point_arrays
from reference import AMD_TRIANGLE, PDD_S_SQ, SDM_K, SDM_T, m_inf_bruteforce, naive_sdd


@pytest.fixture(scope="module")
def TK():
    return corpus.tk()


def test_rdd_of_trapezium(TK):
    r = rdd(TK["T"], [2, 3])
    npt.assert_array_equal(r.D.entries, [[4.0]])
    npt.assert_allclose(r.R, [[np.sqrt(2), np.sqrt(10)], [np.sqrt(10), np.sqrt(2)]])
    assert rdd(TK["T"], [0]).D.entries.size == 0


def test_sdd_trapezium_kite(TK):
    for name in "TK":
        s = sdd(TK[name], 2)
        assert s.k == 6 and len(s) == 4
        assert s.multiplicities == [2, 1, 2, 1]
        assert sum(s.weights) == 1


def test_sdm_trapezium_kite(TK):
    npt.assert_allclose(sdm(TK["K"], 2, 1), SDM_K, rtol=0, atol=1e-9)
    npt.assert_allclose(sdm(TK["T"], 2, 1), SDM_T, rtol=0, atol=1e-9)


def test_pdd_of_five_point_clouds():
    S = corpus.s5()
    expect = np.sqrt(np.array(PDD_S_SQ, dtype=float))
    for c in S.values():
        p = pdd(c)
        npt.assert_allclose(p.rows, expect, atol=1e-9)
        assert p.weights == tuple([Fraction(1, 5)] * 5)


def test_amd_triangle():
    tri = corpus.tri_sq()["triangle"]
    npt.assert_allclose(amd(tri, 2), AMD_TRIANGLE, atol=1e-12)
    with pytest.raises(CloudError):
        amd(tri, 3)


def test_sdv_and_add_lengths(TK):
    npt.assert_allclose(sdv(TK["T"], [0, 1, 2, 3]),
                        np.sort(TK["T"].distances[np.triu_indices(4, 1)]))
    for h in (1, 2, 3):
        assert asd(TK["T"], h).shape == (comb(4, h), 4 + h * (h - 3) // 2)


def test_sdm_degenerate_moment():
    square = corpus.tri_sq()["square"]
    with pytest.raises(DegenerateMomentError):
        sdm(square, 1, 3)
    with pytest.raises(ValueError):
        moments(np.ones((2, 2)), 0)


def test_order_checks(TK):
    with pytest.raises(CloudError):
        sdd(TK["T"], 4)
    with pytest.raises(CloudError):
        sdd(TK["T"], 0)
    big = cloud_from_coordinates(np.arange(12.0)[:, None] ** 1.5)
    with pytest.raises(CloudError, match="h_max"):
        sdd(big, 5)


def test_simplify_is_idempotent(TK):
    r = simplified_rdd(TK["K"], [0, 3])
    s = simplify(r)
    npt.assert_array_equal(s.R, r.R)


@given(point_arrays(m_min=3, m_max=6), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_canonical_form_ignores_basis_order(pts, h, seed):
    c = cloud_from_coordinates(pts)
    h = min(h, c.m - 1)
    rng = np.random.default_rng(seed)
    A = list(rng.choice(c.m, h, replace=False))
    base = canonicalize(rdd(c, A)).key
    for p in itertools.permutations(A):
        assert canonicalize(rdd(c, list(p))).key == base


@given(point_arrays(m_min=3, m_max=7))
def test_weights_sum_exactly_to_one(pts):
    c = cloud_from_coordinates(pts)
    for h in (1, 2):
        if h < c.m:
            s = sdd(c, h)
            assert sum(s.weights) == 1
            assert sum(s.multiplicities) == comb(c.m, h)


@given(point_arrays(m_min=3, m_max=8, n_max=4), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_sdd_isometry_invariant(pts, h, seed):
    rng = np.random.default_rng(seed)
    c = cloud_from_coordinates(pts)
    moved = apply_isometry(c, random_orthogonal(c.n, rng), rng.normal(size=c.n),
                           rng.permutation(c.m))
    # rounding can split near-ties, so compare by distance, not bytes
    assert sdd_dist_emd(sdd(c, h), sdd(moved, h)) <= 1e-9


@settings(max_examples=25)
@given(point_arrays(m_min=3, m_max=7), st.integers(1, 3))
def test_sdd_matches_naive_enumeration(pts, h):
    c = cloud_from_coordinates(np.round(pts * 4) / 4)  # coarse grid forces coincidences
    h = min(h, c.m - 1)
    s = sdd(c, h)
    groups = naive_sdd(np.asarray(c.distances), h)
    assert sorted(s.multiplicities) == sorted(g[2] for g in groups)
    for D, R, count in groups:
        hits = [cnt for r, cnt in s.items if m_inf_bruteforce(r.dist, r.R, D, R) <= 1e-9]
        assert hits == [count]


def test_parallel_workers_are_deterministic():
    c = cloud_from_coordinates(np.random.default_rng(5).random((11, 3)))
    serial = sdd(c, 2, workers=1)
    for w in (2, 3, 4):
        assert sdd(c, 2, workers=w).key == serial.key


def test_rdd_distance_zero_for_reordered_basis(TK):
    a = canonicalize(rdd(TK["K"], [1, 3]))
    b = rdd(TK["K"], [3, 1])
    assert canonicalize(b) == a
    assert m_inf(a, b).value <= 1e-9
