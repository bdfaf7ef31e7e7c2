"""Distance-based isometry invariants of finite clouds.

RDD / SDD and their canonical forms, the pointwise specialisations PDD and
AMD, and the averaged family SDV, ADD, ASD, SDM.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .core import Cloud, CloudError, TriangularDistanceMatrix, _check_basis, round_sig

H_MAX = 4


class DegenerateMomentError(ValueError):
    def __init__(self, coordinate: int):
        self.coordinate = coordinate
        super().__init__(f"standard deviation is zero at coordinate {coordinate}; "
                         "standardized moments are undefined there")


def lexsort_columns(R: np.ndarray) -> np.ndarray:
    """Columns of ``R`` in lexicographic order (first row most significant)."""
    if R.shape[1] <= 1:
        return R
    return R[:, np.lexsort(R[::-1])]


@dataclass(frozen=True, eq=False)
class RDD:
    """Relative distance distribution of one basis: ``D`` inside, ``R`` to the rest.

    Column ``q`` of ``R`` holds ``d(q, p_1), ..., d(q, p_h)``; columns are
    kept in lexicographic order.
    """

    D: TriangularDistanceMatrix
    R: np.ndarray

    @property
    def h(self) -> int:
        return self.D.h

    @property
    def m(self) -> int:
        return self.h + self.R.shape[1]

    @property
    def dist(self) -> np.ndarray:
        return self.D.full()


@dataclass(frozen=True, eq=False)
class CanonicalRDD(RDD):
    """RDD in the representative minimising (flattened D, flattened R) over basis orders."""

    perm: tuple = ()
    key: bytes = b""

    def __eq__(self, other):
        return isinstance(other, CanonicalRDD) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def sort_key(self) -> tuple:
        return tuple(self.D.flat()) + tuple(self.R.T.ravel())


def _tri_flat(full: np.ndarray) -> np.ndarray:
    return full[np.triu_indices(len(full), 1)]


def canonical_parts(full: np.ndarray, R: np.ndarray, extra=None):
    """Minimise over every basis order; inputs are assumed already rounded.

    ``extra(perm)`` may return an additional array that joins the comparison
    key right after the basis distances (used for weight decorations).
    Returns ``(perm, full_perm, R_perm)``.
    """
    h = len(full)
    best = None
    for perm in itertools.permutations(range(h)):
        p = list(perm)
        fp = full[np.ix_(p, p)]
        Rp = lexsort_columns(R[p])
        parts = [_tri_flat(fp)]
        if extra is not None:
            parts.append(np.asarray(extra(perm), dtype=float).ravel())
        parts.append(Rp.T.ravel())
        cand = tuple(np.concatenate(parts).tolist())
        if best is None or cand < best[0]:
            best = (cand, perm, fp, Rp)
    return best[1], best[2], best[3]


def _make_key(*arrays: np.ndarray) -> bytes:
    return b"|".join((np.ascontiguousarray(a, dtype=float) + 0.0).tobytes() for a in arrays)


def _raw_rdd_arrays(cloud: Cloud, A: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    rows = cloud.distances[list(A)]
    mask = np.ones(cloud.m, dtype=bool)
    mask[list(A)] = False
    return rows[:, list(A)], rows[:, mask]


def rdd(cloud: Cloud, A: Sequence[int]) -> RDD:
    A = _check_basis(cloud, A)
    full, R = _raw_rdd_arrays(cloud, A)
    return RDD(TriangularDistanceMatrix.from_full(full), lexsort_columns(R))


def canonicalize(r: RDD, sig_digits: int = 12) -> CanonicalRDD:
    full = round_sig(r.dist, sig_digits)
    R = round_sig(r.R, sig_digits)
    perm, fp, Rp = canonical_parts(full, R)
    return CanonicalRDD(TriangularDistanceMatrix.from_full(fp), Rp, perm, _make_key(_tri_flat(fp), Rp))


def simplify(r: RDD) -> RDD:
    """Drop the row correspondence inside each column: sort every column, then the columns."""
    return RDD(r.D, lexsort_columns(np.sort(r.R, axis=0)))


def simplified_rdd(cloud: Cloud, A: Sequence[int]) -> RDD:
    return simplify(rdd(cloud, A))


# -- SDD ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SDD:
    """Canonical RDDs over all h-subsets, identical ones collapsed with multiplicities."""

    h: int
    m: int
    items: tuple  # ((CanonicalRDD, multiplicity), ...) in canonical order

    @property
    def k(self) -> int:
        return comb(self.m, self.h)

    @property
    def weights(self) -> list[Fraction]:
        return [Fraction(c, self.k) for _, c in self.items]

    @property
    def rdds(self) -> list:
        return [r for r, _ in self.items]

    @property
    def multiplicities(self) -> list[int]:
        return [c for _, c in self.items]

    def expanded(self) -> list:
        """Every subset's RDD, uncollapsed (k entries)."""
        return [r for r, c in self.items for _ in range(c)]

    @property
    def key(self) -> bytes:
        return b"#".join(r.key + b"x" + str(c).encode() for r, c in self.items)

    def __eq__(self, other):
        return (isinstance(other, SDD) and (self.h, self.m) == (other.h, other.m)
                and self.key == other.key)

    def __hash__(self):
        return hash(self.key)

    def __len__(self):
        return len(self.items)


def _check_order(cloud: Cloud, h: int, h_max: int | None = H_MAX) -> None:
    if not 1 <= h < cloud.m:
        raise CloudError(f"order h={h} must satisfy 1 <= h < m={cloud.m}")
    if h_max is not None and h > h_max:
        raise CloudError(f"order h={h} exceeds the configured cap h_max={h_max}")


def _canonical_chunk(args) -> list:
    distances, subsets, sig = args
    m = len(distances)
    out = []
    for A in subsets:
        idx = list(A)
        rows = distances[idx]
        mask = np.ones(m, dtype=bool)
        mask[idx] = False
        full = round_sig(rows[:, idx], sig)
        R = round_sig(rows[:, mask], sig)
        perm, fp, Rp = canonical_parts(full, R)
        out.append(CanonicalRDD(TriangularDistanceMatrix.from_full(fp), Rp, perm,
                                _make_key(_tri_flat(fp), Rp)))
    return out


def collapse(items: Iterable) -> tuple:
    """Group canonical objects by key and sort them canonically."""
    counts: dict[bytes, list] = {}
    for r in items:
        slot = counts.setdefault(r.key, [r, 0])
        slot[1] += 1
    return tuple(sorted(((r, c) for r, c in counts.values()), key=lambda rc: rc[0].sort_key()))


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    try:
        return max(1, int(os.environ.get("SDD_THREADS", "1")))
    except ValueError:
        return 1


def _chunks(seq: list, n: int) -> list[list]:
    size = -(-len(seq) // n)
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def sdd(cloud: Cloud, h: int, sig_digits: int | None = None, h_max: int | None = H_MAX,
        workers: int | None = None) -> SDD:
    """Simplexwise Distance Distribution of order ``h``.

    Subsets may be split across ``workers`` processes (default from the
    ``SDD_THREADS`` environment variable); the final canonical sort makes
    the result independent of the split.
    """
    _check_order(cloud, h, h_max)
    sig = cloud.tol.sig_digits if sig_digits is None else sig_digits
    subsets = list(itertools.combinations(range(cloud.m), h))
    n = min(_workers(workers), len(subsets))
    dist = np.asarray(cloud.distances)
    if n <= 1:
        rdds = _canonical_chunk((dist, subsets, sig))
    else:
        with ProcessPoolExecutor(n) as pool:
            parts = pool.map(_canonical_chunk, [(dist, c, sig) for c in _chunks(subsets, n)])
            rdds = [r for part in parts for r in part]
    return SDD(h, cloud.m, collapse(rdds))


# -- PDD and AMD ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PDD:
    """Lexicographically sorted rows of neighbour distances, duplicates collapsed."""

    rows: np.ndarray
    weights: tuple

    def as_array(self) -> np.ndarray:
        """Rows prefixed by their weight, the usual tabular layout."""
        w = np.array([float(x) for x in self.weights])[:, None]
        return np.hstack([w, self.rows])


def _sorted_neighbour_rows(cloud: Cloud) -> np.ndarray:
    d = np.asarray(cloud.distances)
    m = cloud.m
    off = ~np.eye(m, dtype=bool)
    return np.sort(d[off].reshape(m, m - 1), axis=1)


def pdd(cloud: Cloud) -> PDD:
    if cloud.m < 2:
        raise CloudError("PDD needs at least 2 points")
    rows = _sorted_neighbour_rows(cloud)
    keyed = round_sig(rows, cloud.tol.sig_digits)
    order = np.lexsort(keyed.T[::-1])
    groups: list[list] = []
    for i in order:
        if groups and np.array_equal(keyed[groups[-1][0]], keyed[i]):
            groups[-1].append(i)
        else:
            groups.append([i])
    out_rows = np.array([rows[g[0]] for g in groups])
    weights = tuple(Fraction(len(g), cloud.m) for g in groups)
    return PDD(out_rows, weights)


def amd(cloud: Cloud, kmax: int | None = None) -> np.ndarray:
    """Average distance to the k-th nearest neighbour, k = 1..kmax."""
    kmax = cloud.m - 1 if kmax is None else kmax
    if not 1 <= kmax <= cloud.m - 1:
        raise CloudError(f"kmax={kmax} must satisfy 1 <= kmax <= m-1={cloud.m - 1}")
    return _sorted_neighbour_rows(cloud)[:, :kmax].mean(axis=0)


# -- SDV / ADD / ASD / SDM ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ADDVector:
    sdv: np.ndarray
    rbar: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.sdv, self.rbar])

    def __len__(self):
        return len(self.sdv) + len(self.rbar)


def sdv(cloud: Cloud, A: Sequence[int]) -> np.ndarray:
    A = tuple(int(a) for a in A)
    if len(A) < 2:
        raise CloudError("SDV needs at least 2 points")
    if len(set(A)) != len(A):
        raise CloudError(f"subset {A} has duplicate indices")
    return np.sort(_tri_flat(cloud.distances[np.ix_(A, A)]))


def add(cloud: Cloud, A: Sequence[int]) -> ADDVector:
    A = _check_basis(cloud, A)
    full, R = _raw_rdd_arrays(cloud, A)
    return ADDVector(np.sort(_tri_flat(full)), np.sort(R.mean(axis=0)))


def asd(cloud: Cloud, h: int, h_max: int | None = H_MAX) -> np.ndarray:
    """ADD vectors of all C(m, h) subsets as rows, each carrying weight 1/C(m, h)."""
    _check_order(cloud, h, h_max)
    return np.array([add(cloud, A).vector
                     for A in itertools.combinations(range(cloud.m), h)])


def moments(vectors: np.ndarray, l: int) -> np.ndarray:
    """Coordinate-wise l-th moment of equally weighted rows (population convention)."""
    if l < 1:
        raise ValueError(f"moment order l={l} must be >= 1")
    mu = vectors.mean(axis=0)
    if l == 1:
        return mu
    sigma = np.sqrt(((vectors - mu) ** 2).mean(axis=0))
    if l == 2:
        return sigma
    # near-zero spread is floating noise around a constant coordinate
    flat = sigma <= 1e-12 * np.maximum(1.0, np.abs(mu))
    if np.any(flat):
        raise DegenerateMomentError(int(np.flatnonzero(flat)[0]))
    return (((vectors - mu) / sigma) ** l).mean(axis=0)


def sdm(cloud: Cloud, h: int, l: int = 1, h_max: int | None = H_MAX) -> np.ndarray:
    return moments(asd(cloud, h, h_max), l)
