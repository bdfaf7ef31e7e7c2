"""Exact matching and transport solvers: L-infinity, bottleneck, LAC, EMD.

All solvers are pure functions; brute-force counterparts are provided for
testing small instances.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

import numpy as np


class ShapeMismatchError(ValueError):
    pass


class UnbalancedWeightsError(ValueError):
    pass


WEIGHT_TOL = 1e-12


def linf_matrix(N, N2) -> float:
    a, b = np.asarray(N, dtype=float), np.asarray(N2, dtype=float)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.abs(a - b).max())


def pairwise_linf(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Chebyshev distances between the rows of ``A`` (k x h) and ``B`` (l x h)."""
    return np.abs(A[:, None, :] - B[None, :, :]).max(axis=2)


# -- maximum bipartite matching ---------------------------------------------

def hopcroft_karp(adj: Sequence[Sequence[int]], n_right: int) -> tuple[int, list[int]]:
    """Maximum matching of a bipartite graph given by left adjacency lists.

    Returns ``(size, match_left)`` where ``match_left[u]`` is the right
    vertex matched to ``u`` or -1.
    """
    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    INF = n_left + 1
    dist = [0] * n_left

    def bfs() -> bool:
        queue = []
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                size += 1
    return size, match_l


def _perfect_under(cost: np.ndarray, t: float) -> list[int] | None:
    k = cost.shape[0]
    adj = [[j for j, ok in enumerate(row) if ok] for row in (cost <= t).tolist()]
    size, match = hopcroft_karp(adj, cost.shape[1])
    return match if size == k else None


def bottleneck_cost(cost, witness: bool = False):
    """Min over bijections of the max matched cost, by binary search on thresholds.

    Every threshold tried is an entry of ``cost``, so the answer is exact.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise ShapeMismatchError(f"bottleneck needs a non-empty square cost matrix, got {c.shape}")
    # every row and column has to be matched to something
    lower = max(c.min(axis=1).max(), c.min(axis=0).max())
    cand = np.unique(c[c >= lower])
    best = _perfect_under(c, cand[0])
    if best is not None:
        return (float(cand[0]), best) if witness else float(cand[0])
    lo, hi = 1, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        match = _perfect_under(c, cand[mid])
        if match is not None:
            hi, best = mid, match
        else:
            lo = mid + 1
    value = float(cand[lo])
    if not witness:
        return value
    if best is None or c[np.arange(len(best)), best].max() > value:
        best = _perfect_under(c, value)
    return value, best


def bottleneck(A, B, witness: bool = False):
    """Bottleneck distance between two equal-size point sets under the max-norm."""
    a = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_2d(np.asarray(B, dtype=float))
    if a.shape != b.shape:
        raise ShapeMismatchError(f"point sets differ in shape: {a.shape} vs {b.shape}")
    return bottleneck_cost(pairwise_linf(a, b), witness)


# -- linear assignment ---------------------------------------------------------

def assignment(cost) -> tuple[float, list[int]]:
    """Minimum-cost perfect assignment by shortest augmenting paths, O(k^3).

    Returns ``(total_cost, g)`` with row ``i`` assigned to column ``g[i]``.
    """
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeMismatchError(f"assignment needs a square cost matrix, got {c.shape}")
    n = c.shape[0]
    if n == 0:
        return 0.0, []
    rows = c.tolist()
    INF = math.inf
    # 1-based arrays; column 0 is the virtual start
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = rows[i0 - 1]
            ui0 = u[i0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    g = [0] * n
    for j in range(1, n + 1):
        g[p[j] - 1] = j - 1
    total = math.fsum(rows[i][g[i]] for i in range(n))
    return total, g


def lac(cost, witness: bool = False):
    """Linear Assignment Cost: optimal assignment total divided by k."""
    c = np.asarray(cost, dtype=float)
    total, g = assignment(c)
    value = total / c.shape[0] if c.shape[0] else 0.0
    return (value, g) if witness else value


# -- earth mover's distance ------------------------------------------------------

def _as_fractions(w) -> list[Fraction]:
    return [x if isinstance(x, Fraction) else Fraction(float(x)) for x in w]


def _check_side(w: list[Fraction], name: str, tol: float) -> None:
    if any(x < 0 for x in w):
        raise UnbalancedWeightsError(f"{name}: negative weight")
    if abs(float(sum(w)) - 1.0) > tol:
        raise UnbalancedWeightsError(f"{name}: weights sum to {float(sum(w))!r}, not 1")


def emd(wB, wD, cost, tol: float = WEIGHT_TOL) -> tuple[float, np.ndarray]:
    """Earth Mover's Distance between two weighted collections.

    Solved as a balanced transportation problem by successive shortest
    paths with node potentials. Flow amounts are exact rationals; costs are
    floats. Returns ``(value, flow)`` with ``flow`` of shape ``(k, l)``.
    """
    a = _as_fractions(wB)
    b = _as_fractions(wD)
    c = np.asarray(cost, dtype=float)
    if c.shape != (len(a), len(b)):
        raise ShapeMismatchError(f"cost shape {c.shape} does not match weights ({len(a)}, {len(b)})")
    _check_side(a, "source", tol)
    _check_side(b, "sink", tol)
    flow = np.zeros(c.shape)
    rows = [i for i in range(len(a)) if a[i] > 0]
    cols = [j for j in range(len(b)) if b[j] > 0]
    if not rows or not cols:
        return 0.0, flow
    sub = c[np.ix_(rows, cols)]
    f = _transport_ssp([a[i] for i in rows], [b[j] for j in cols], sub.tolist())
    for (r, s), x in f.items():
        flow[rows[r], cols[s]] = float(x)
    value = math.fsum(float(x) * sub[r, s] for (r, s), x in f.items())
    return value, flow


def _transport_ssp(supply: list[Fraction], demand: list[Fraction],
                   cost: list[list[float]]) -> dict[tuple[int, int], Fraction]:
    k, l = len(supply), len(demand)
    sup = list(supply)
    dem = list(demand)
    flow: dict[tuple[int, int], Fraction] = {}
    pot_l = [0.0] * k
    pot_r = [0.0] * l
    INF = math.inf
    while any(sup) and any(dem):
        # Dijkstra on reduced costs; left nodes 0..k-1, right nodes k..k+l-1
        dist = [INF] * (k + l)
        prev = [-1] * (k + l)
        done = [False] * (k + l)
        for i in range(k):
            if sup[i] > 0:
                dist[i] = 0.0
        target = -1
        while True:
            x, best = -1, INF
            for y in range(k + l):
                if not done[y] and dist[y] < best:
                    x, best = y, dist[y]
            if x < 0:
                break
            done[x] = True
            if x >= k:
                j = x - k
                if dem[j] > 0:
                    target = j
                    break
                for i in range(k):
                    if not done[i] and flow.get((i, j), 0) > 0:
                        rc = max(pot_r[j] - cost[i][j] - pot_l[i], 0.0)
                        if best + rc < dist[i]:
                            dist[i] = best + rc
                            prev[i] = x
            else:
                row = cost[x]
                pl = pot_l[x]
                for j in range(l):
                    y = k + j
                    if not done[y]:
                        rc = max(row[j] + pl - pot_r[j], 0.0)
                        if best + rc < dist[y]:
                            dist[y] = best + rc
                            prev[y] = x
        if target < 0:
            break
        dt = dist[k + target]
        for i in range(k):
            pot_l[i] += min(dist[i], dt)
        for j in range(l):
            pot_r[j] += min(dist[k + j], dt)
        # walk back: right <- left (forward arc) <- right (reverse arc) ...
        path = []
        y = k + target
        while True:
            i = prev[y]
            path.append((i, y - k, +1))
            if prev[i] < 0:
                start = i
                break
            y = prev[i]
            path.append((i, y - k, -1))
        delta = min(sup[start], dem[target])
        for i, j, sign in path:
            if sign < 0:
                delta = min(delta, flow[(i, j)])
        for i, j, sign in path:
            new = flow.get((i, j), Fraction(0)) + sign * delta
            if new:
                flow[(i, j)] = new
            else:
                flow.pop((i, j), None)
        sup[start] -= delta
        dem[target] -= delta
    return flow


def check_flow(flow: np.ndarray, wB, wD, tol: float = WEIGHT_TOL) -> list[str]:
    """Constraint violations of a flow matrix; empty when feasible."""
    problems = []
    f = np.asarray(flow, dtype=float)
    if np.any(f < -tol) or np.any(f > 1 + tol):
        problems.append("entries outside [0, 1]")
    if np.any(f.sum(axis=1) > np.asarray(wB, dtype=float) + tol):
        problems.append("row sums exceed source weights")
    if np.any(f.sum(axis=0) > np.asarray(wD, dtype=float) + tol):
        problems.append("column sums exceed sink weights")
    if abs(f.sum() - 1.0) > tol:
        problems.append(f"total flow {f.sum()!r} differs from 1")
    return problems


# -- brute-force oracles -----------------------------------------------------------

def bottleneck_bruteforce(cost) -> float:
    c = np.asarray(cost, dtype=float)
    k = c.shape[0]
    idx = np.arange(k)
    return float(min(c[idx, list(g)].max() for g in itertools.permutations(range(k))))


def lac_bruteforce(cost) -> float:
    c = np.asarray(cost, dtype=float)
    k = c.shape[0]
    idx = np.arange(k)
    return float(min(c[idx, list(g)].sum() for g in itertools.permutations(range(k)))) / k
