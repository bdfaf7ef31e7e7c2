"""Metrics between invariants: M-infinity on RDDs, LAC and EMD on SDDs,
the first-moment lower bound and the perturbation (Lipschitz) harness."""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import assignment
from .assignment import ShapeMismatchError
from .core import Cloud, CloudError, perturb
from .invariants import RDD, SDD, _chunks, _workers, sdd, sdm

SLACK = 1e-9


@dataclass(frozen=True)
class MetricReport:
    value: float
    witness: tuple | None = None  # (basis permutation, column bijection)


def _perm_variants(r: RDD) -> tuple[list, np.ndarray, np.ndarray]:
    """All basis reorderings of ``r``: permutations, D entries, R columns as points."""
    full = r.dist
    perms = list(itertools.permutations(range(r.h)))
    iu = np.triu_indices(r.h, 1)
    Ds = np.array([full[np.ix_(p, p)][iu] for p in perms])
    Rs = np.array([r.R[list(p)].T for p in perms])  # (h!, m-h, h)
    return perms, Ds, Rs


def _check_pair(a: RDD, b: RDD) -> None:
    if a.h != b.h or a.R.shape != b.R.shape:
        raise ShapeMismatchError(f"RDDs differ in shape: h={a.h},{b.h}, R {a.R.shape} vs {b.R.shape}")


def _m_inf_from(variants, b: RDD, witness: bool) -> MetricReport:
    perms, Ds, Rs = variants
    Db = b.dist[np.triu_indices(b.h, 1)]
    Rb = b.R.T
    best, best_w = np.inf, None
    for p, Dp, Rp in zip(perms, Ds, Rs):
        dl = float(np.abs(Dp - Db).max()) if Dp.size else 0.0
        res = assignment.bottleneck_cost(assignment.pairwise_linf(Rp, Rb), witness)
        wb, match = res if witness else (res, None)
        d = max(dl, wb)
        if d < best:
            best, best_w = d, (p, match)
    return MetricReport(float(best), best_w if witness else None)


def m_inf(a: RDD, b: RDD, witness: bool = False) -> MetricReport:
    """Min over basis permutations of max(L-inf on D, bottleneck on R columns)."""
    _check_pair(a, b)
    key_a, key_b = getattr(a, "key", None), getattr(b, "key", None)
    if key_a and key_a == key_b and not witness:
        return MetricReport(0.0)
    return _m_inf_from(_perm_variants(a), b, witness)


def _check_distributions(A, B) -> None:
    if A.h != B.h or A.m != B.m:
        raise ShapeMismatchError(f"distributions differ: (h, m) = ({A.h}, {A.m}) vs ({B.h}, {B.m})")


def _cost_rows(args) -> np.ndarray:
    ra, rb = args
    out = np.zeros((len(ra), len(rb)))
    for i, x in enumerate(ra):
        variants = _perm_variants(x)
        for j, y in enumerate(rb):
            if x.key != y.key:
                out[i, j] = _m_inf_from(variants, y, False).value
    return out


def ground_cost_matrix(A, B, ground: Callable | None = None, workers: int | None = None) -> np.ndarray:
    """Ground distances between the collapsed items of two distributions.

    The default M-infinity path splits rows over ``workers`` processes
    (default from ``SDD_THREADS``); a custom ``ground`` runs in-process.
    """
    ra, rb = [r for r, _ in A.items], [r for r, _ in B.items]
    if ground is not None:
        return np.array([[0.0 if x.key == y.key else ground(x, y) for y in rb] for x in ra])
    if ra and rb:
        _check_pair(ra[0], rb[0])
    n = min(_workers(workers), len(ra))
    if n <= 1:
        return _cost_rows((ra, rb))
    with ProcessPoolExecutor(n) as pool:
        parts = list(pool.map(_cost_rows, [(c, rb) for c in _chunks(ra, n)]))
    return np.vstack(parts)


def _ordered(A, B):
    # fixed argument order makes floating-point symmetry exact
    return (A, B) if A.key <= B.key else (B, A)


def dist_lac(A, B, ground: Callable | None = None) -> float:
    """LAC over the k x k ground-cost matrix of the uncollapsed items."""
    _check_distributions(A, B)
    if A.key == B.key:
        return 0.0
    A, B = _ordered(A, B)
    cu = ground_cost_matrix(A, B, ground)
    ia = np.repeat(np.arange(len(A.items)), [c for _, c in A.items])
    ib = np.repeat(np.arange(len(B.items)), [c for _, c in B.items])
    return assignment.lac(cu[np.ix_(ia, ib)])


def dist_emd(A, B, ground: Callable | None = None) -> float:
    """EMD between the collapsed weighted items."""
    _check_distributions(A, B)
    if A.key == B.key:
        return 0.0
    A, B = _ordered(A, B)
    value, _ = assignment.emd(A.weights, B.weights, ground_cost_matrix(A, B, ground))
    return value


def sdd_dist_lac(A: SDD, B: SDD) -> float:
    return dist_lac(A, B)


def sdd_dist_emd(A: SDD, B: SDD) -> float:
    return dist_emd(A, B)


def sdm_lower_bound(cloud_a: Cloud, cloud_b: Cloud, h: int) -> float:
    """L-inf distance between first-moment SDM vectors; never exceeds the SDD EMD."""
    if cloud_a.m != cloud_b.m:
        raise ShapeMismatchError(f"clouds differ in size: m={cloud_a.m} vs m={cloud_b.m}")
    return float(np.abs(sdm(cloud_a, h, 1) - sdm(cloud_b, h, 1)).max())


def order_preserving_linf_check(u, v) -> tuple[float, float]:
    """``(|sorted(u) - sorted(v)|_inf, |u - v|_inf)``; the first never exceeds the second."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ShapeMismatchError(f"vectors differ in length: {u.shape} vs {v.shape}")
    if u.size == 0:
        return 0.0, 0.0
    return float(np.abs(np.sort(u) - np.sort(v)).max()), float(np.abs(u - v).max())


def compare(cloud_a: Cloud, cloud_b: Cloud, h: int, metric: str = "emd") -> dict:
    """Comparison report for two clouds at order ``h``."""
    if cloud_a.m != cloud_b.m:
        raise ShapeMismatchError(f"clouds differ in size: m={cloud_a.m} vs m={cloud_b.m}")
    fn = {"emd": sdd_dist_emd, "lac": sdd_dist_lac}[metric]
    t0 = time.perf_counter()
    value = fn(sdd(cloud_a, h), sdd(cloud_b, h))
    elapsed = (time.perf_counter() - t0) * 1e3
    return {"metric": metric, "h": h, "value": value,
            "lower_bound_sdm": sdm_lower_bound(cloud_a, cloud_b, h), "elapsed_ms": elapsed}


# -- perturbation harness ---------------------------------------------------------------

@dataclass(frozen=True)
class Trial:
    index: int
    emd: float
    lac: float
    bound: float
    lower: float

    @property
    def violations(self) -> list[str]:
        out = []
        if self.emd > self.bound + SLACK:
            out.append("emd > 2eps")
        if self.lac > self.bound + SLACK:
            out.append("lac > 2eps")
        if self.lower > self.emd + SLACK:
            out.append("sdm lower bound > emd")
        return out


@dataclass
class LipschitzReport:
    eps: float
    h: int
    trials: list[Trial] = field(default_factory=list)

    @property
    def failed(self) -> list[Trial]:
        return [t for t in self.trials if t.violations]

    @property
    def ok(self) -> bool:
        return not self.failed


def lipschitz_check(cloud: Cloud, eps: float, trials: int, h: int, seed=0) -> LipschitzReport:
    """Perturb ``cloud`` ``trials`` times within ``eps`` and record both distances and bounds."""
    if cloud.kind != "coordinates":
        raise CloudError("the perturbation harness needs a coordinate cloud")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    base = sdd(cloud, h)
    base_sdm = sdm(cloud, h, 1)
    report = LipschitzReport(eps, h)
    for t in range(trials):
        moved = perturb(cloud, eps, seed=[int(seed), t])
        other = sdd(moved, h)
        cost = ground_cost_matrix(base, other)
        e, _ = assignment.emd(base.weights, other.weights, cost)
        ia = np.repeat(np.arange(len(base.items)), base.multiplicities)
        ib = np.repeat(np.arange(len(other.items)), other.multiplicities)
        la = assignment.lac(cost[np.ix_(ia, ib)])
        lower = float(np.abs(base_sdm - sdm(moved, h, 1)).max())
        report.trials.append(Trial(t, e, la, 2 * eps, lower))
    return report
