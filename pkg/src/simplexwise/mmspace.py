"""Invariants of finite metric-measure spaces.

A weighted space is a :class:`~simplexwise.core.Cloud` with explicit, strictly
positive weights. WDD decorates an RDD with weights: every basis distance
carries the unordered pair of its endpoint weights, and every column of the
relative matrix gains the weight of its point as an extra row.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import assignment
from .assignment import ShapeMismatchError
from .core import Cloud, CloudError, TriangularDistanceMatrix, _check_basis, round_sig
from .invariants import SDD, _check_order, _make_key, _tri_flat, collapse, lexsort_columns
from .metrics import dist_emd, dist_lac


def require_weights(space: Cloud) -> Cloud:
    if space.weights is None:
        raise CloudError("a weighted space needs explicit weights")
    if np.any(space.weights <= 0):
        raise CloudError("weights of a weighted space must be strictly positive")
    return space


def _decoration(full_w: np.ndarray) -> np.ndarray:
    """Weight part of D: the basis weight for h=1, else sorted weight pairs per edge."""
    h = len(full_w)
    if h == 1:
        return full_w.copy()
    i, j = np.triu_indices(h, 1)
    return np.sort(np.stack([full_w[i], full_w[j]], axis=1), axis=1).ravel()


@dataclass(frozen=True, eq=False)
class WDD:
    """Weighted distance distribution of one basis.

    ``M`` has h distance rows plus a final weight row; its columns are
    unordered (stored lexicographically sorted).
    """

    D: TriangularDistanceMatrix
    basis_weights: np.ndarray
    M: np.ndarray

    @property
    def h(self) -> int:
        return self.D.h

    @property
    def m(self) -> int:
        return self.h + self.M.shape[1]

    @property
    def dist(self) -> np.ndarray:
        return self.D.full()

    @property
    def decoration(self) -> np.ndarray:
        return _decoration(self.basis_weights)


@dataclass(frozen=True, eq=False)
class CanonicalWDD(WDD):
    perm: tuple = ()
    key: bytes = b""

    def __eq__(self, other):
        return isinstance(other, CanonicalWDD) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def sort_key(self) -> tuple:
        return tuple(self.D.flat()) + tuple(self.decoration) + tuple(self.M.T.ravel())


class WSD(SDD):
    """Canonical WDDs over all h-subsets with multiplicities."""


def _wdd_arrays(space: Cloud, A: tuple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = space.distances[list(A)]
    mask = np.ones(space.m, dtype=bool)
    mask[list(A)] = False
    w = space.weights
    M = np.vstack([rows[:, mask], w[mask][None, :]])
    return rows[:, list(A)], w[list(A)], M


def wdd(space: Cloud, A: Sequence[int]) -> WDD:
    require_weights(space)
    A = _check_basis(space, A)
    full, bw, M = _wdd_arrays(space, A)
    return WDD(TriangularDistanceMatrix.from_full(full), bw, lexsort_columns(M))


def canonicalize_wdd(r: WDD, sig_digits: int = 12) -> CanonicalWDD:
    full = round_sig(r.dist, sig_digits)
    bw = round_sig(r.basis_weights, sig_digits)
    M = round_sig(r.M, sig_digits)
    h = r.h
    best = None
    for perm in itertools.permutations(range(h)):
        p = list(perm)
        fp = full[np.ix_(p, p)]
        Mp = lexsort_columns(np.vstack([M[:h][p], M[h:]]))
        cand = tuple(np.concatenate([_tri_flat(fp), _decoration(bw[p]), Mp.T.ravel()]).tolist())
        if best is None or cand < best[0]:
            best = (cand, perm, fp, bw[p], Mp)
    _, perm, fp, bwp, Mp = best
    return CanonicalWDD(TriangularDistanceMatrix.from_full(fp), bwp, Mp, perm,
                        _make_key(_tri_flat(fp), _decoration(bwp), Mp))


def wsd(space: Cloud, h: int, sig_digits: int | None = None) -> WSD:
    require_weights(space)
    _check_order(space, h)
    sig = space.tol.sig_digits if sig_digits is None else sig_digits
    items = (canonicalize_wdd(wdd(space, A), sig)
             for A in itertools.combinations(range(space.m), h))
    return WSD(h, space.m, collapse(items))


def wdd_dist(a: WDD, b: WDD, gamma: float = 1.0) -> float:
    """Max-type distance between WDDs, weights scaled by ``gamma``.

    Min over basis orders of the largest among: basis distance gaps,
    gamma times the gaps between matched weight decorations, and the
    bottleneck between columns under max(distance gaps, gamma * weight gap).
    """
    if a.h != b.h or a.M.shape != b.M.shape:
        raise ShapeMismatchError(f"WDDs differ in shape: h={a.h},{b.h}, M {a.M.shape} vs {b.M.shape}")
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    key_a, key_b = getattr(a, "key", None), getattr(b, "key", None)
    if key_a and key_a == key_b:
        return 0.0
    h = a.h
    iu = np.triu_indices(h, 1)
    fa, fb = a.dist, b.dist
    Db, Wb = fb[iu], b.decoration
    scale = np.ones((h + 1, 1))
    scale[h] = gamma
    Mb = (b.M * scale).T
    best = np.inf
    for perm in itertools.permutations(range(h)):
        p = list(perm)
        d = float(np.abs(fa[np.ix_(p, p)][iu] - Db).max()) if h > 1 else 0.0
        d = max(d, gamma * float(np.abs(_decoration(a.basis_weights[p]) - Wb).max()))
        Ma = (np.vstack([a.M[:h][p], a.M[h:]]) * scale).T
        d = max(d, assignment.bottleneck_cost(assignment.pairwise_linf(Ma, Mb)))
        best = min(best, d)
    return float(best)


def wsd_dist_emd(A: WSD, B: WSD, gamma: float = 1.0) -> float:
    return dist_emd(A, B, ground=lambda x, y: wdd_dist(x, y, gamma))


def wsd_dist_lac(A: WSD, B: WSD, gamma: float = 1.0) -> float:
    return dist_lac(A, B, ground=lambda x, y: wdd_dist(x, y, gamma))


# -- measured simplexwise distribution ------------------------------------------------

@dataclass(frozen=True, eq=False)
class MSDSample:
    vid: np.ndarray
    vsm: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.vid, self.vsm])


def msd_evaluate(space: Cloud, A: Sequence[int], thresholds) -> MSDSample:
    """Basis distances (row-major pairs) and the measure of each closed threshold ball.

    Balls range over all points, basis points included.
    """
    A = tuple(int(a) for a in A)
    if not A or any(not 0 <= a < space.m for a in A):
        raise CloudError(f"basis {A} has indices outside 0..{space.m - 1}")
    t = np.asarray(thresholds, dtype=float).reshape(-1)
    if len(t) != len(A):
        raise CloudError(f"need {len(A)} thresholds, got {len(t)}")
    if np.any(t < 0):
        raise CloudError("thresholds must be nonnegative")
    d = space.distances
    vid = d[np.ix_(A, A)][np.triu_indices(len(A), 1)]
    w = space.measure
    vsm = np.array([w[d[a] <= ti].sum() for a, ti in zip(A, t)])
    return MSDSample(vid, vsm)


def local_distribution(space: Cloud, p: int) -> tuple[tuple[float, float], ...]:
    """Breakpoints ``(r, mu(ball(p, r)))`` of the right-continuous step function.

    Values are rounded to the cloud's significant digits so that equal
    distributions compare equal despite summation order.
    """
    if not 0 <= p < space.m:
        raise CloudError(f"point index {p} outside 0..{space.m - 1}")
    d = np.asarray(space.distances[p])
    w = space.measure
    radii = np.unique(d)
    mass = np.array([w[d <= r].sum() for r in radii])
    sig = space.tol.sig_digits
    return tuple(zip(round_sig(radii, sig).tolist(), round_sig(mass, sig).tolist()))
