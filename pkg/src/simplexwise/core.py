"""Finite metric spaces: construction, validation, isometries and perturbations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np


class CloudError(ValueError):
    """Raised for malformed clouds (shapes, weights, metric axioms)."""


class MetricViolationError(CloudError):
    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        first = violations[0]
        super().__init__(
            f"{len(violations)} metric violation(s); first: {first.axiom} at "
            f"{first.indices} (magnitude {first.magnitude:.3g})"
        )


@dataclass(frozen=True)
class ToleranceConfig:
    eq: float = 1e-9
    weight: float = 1e-12
    sig_digits: int = 12

    def __post_init__(self):
        if self.eq <= 0 or self.weight <= 0 or self.sig_digits <= 0:
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = ToleranceConfig()
ABS_FLOOR = 1e-12


def close(a: float, b: float, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Distance equality on the relative grid with an absolute floor."""
    return abs(a - b) <= max(tol.eq * max(abs(a), abs(b)), ABS_FLOOR)


def round_sig(x, digits: int = DEFAULT_TOL.sig_digits) -> np.ndarray:
    """Round every entry of ``x`` to ``digits`` significant digits.

    The result is a deterministic function of the input bits, idempotent,
    and never contains negative zero, so ``tobytes()`` is usable as a key.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    nz = x != 0
    if np.any(nz):
        mag = np.floor(np.log10(np.abs(x[nz])))
        scale = 10.0 ** (digits - 1 - mag)
        out[nz] = np.round(x[nz] * scale) / scale
    return out + 0.0


class Violation(NamedTuple):
    axiom: str
    indices: tuple
    magnitude: float


@dataclass(frozen=True, eq=False)
class TriangularDistanceMatrix:
    """Distances inside a basis ``(p_1..p_h)``; ``entries[i, j-1] = d(p_i, p_j)`` for i < j."""

    h: int
    entries: np.ndarray

    @classmethod
    def from_full(cls, full: np.ndarray) -> "TriangularDistanceMatrix":
        h = full.shape[0]
        tri = np.zeros((max(h - 1, 0), max(h - 1, 0)))
        for i in range(h - 1):
            tri[i, i:] = full[i, i + 1:]
        return cls(h, tri)

    def full(self) -> np.ndarray:
        out = np.zeros((self.h, self.h))
        for i in range(self.h - 1):
            out[i, i + 1:] = self.entries[i, i:]
        return out + out.T

    def flat(self) -> np.ndarray:
        """Row-major list of the h(h-1)/2 stored distances."""
        return self.entries[np.triu_indices(max(self.h - 1, 0))]


def _freeze(a: np.ndarray | None) -> np.ndarray | None:
    if a is not None:
        a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Cloud:
    """A finite metric space given by coordinates (Euclidean) or by a distance matrix.

    ``weights`` is ``None`` when the caller gave none; ``measure`` always
    returns a probability vector (uniform by default).
    """

    kind: str
    points: np.ndarray | None = None
    matrix: np.ndarray | None = None
    weights: np.ndarray | None = None
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    @property
    def m(self) -> int:
        return len(self.points) if self.kind == "coordinates" else len(self.matrix)

    @property
    def n(self) -> int | None:
        return self.points.shape[1] if self.kind == "coordinates" else None

    @cached_property
    def distances(self) -> np.ndarray:
        if self.kind == "matrix":
            return self.matrix
        diff = self.points[:, None, :] - self.points[None, :, :]
        return _freeze(np.sqrt((diff * diff).sum(-1)))

    @property
    def measure(self) -> np.ndarray:
        if self.weights is None:
            return np.full(self.m, 1.0 / self.m)
        return self.weights

    def d(self, i: int, j: int) -> float:
        return float(self.distances[i, j])


def _check_weights(weights, m: int, tol: ToleranceConfig) -> np.ndarray | None:
    if weights is None:
        return None
    w = np.array(weights, dtype=float).reshape(-1)
    if len(w) != m:
        raise CloudError(f"weights: expected {m} entries, got {len(w)}")
    if np.any(w < 0):
        raise CloudError(f"weights: negative entry at index {int(np.argmax(w < 0))}")
    if abs(w.sum() - 1.0) > tol.weight:
        raise CloudError(f"weights: sum {w.sum()!r} is not 1 within {tol.weight}")
    return _freeze(w)


def cloud_from_coordinates(points, weights=None, tol: ToleranceConfig = DEFAULT_TOL) -> Cloud:
    rows = [list(map(float, p)) for p in points]
    if not rows:
        raise CloudError("a cloud needs at least one point")
    dims = {len(r) for r in rows}
    if len(dims) != 1:
        raise CloudError(f"points have unequal dimensions {sorted(dims)}")
    if dims == {0}:
        raise CloudError("points must have dimension >= 1")
    pts = np.array(rows, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise CloudError("points contain non-finite coordinates")
    return Cloud("coordinates", points=_freeze(pts),
                 weights=_check_weights(weights, len(pts), tol), tol=tol)


def _quadratic_checks(d: np.ndarray, tol: ToleranceConfig) -> list[Violation]:
    out = []
    for i in np.flatnonzero(np.abs(np.diag(d)) > ABS_FLOOR):
        out.append(Violation("zero_diagonal", (int(i),), float(abs(d[i, i]))))
    for i, j in zip(*np.nonzero(d < -ABS_FLOOR)):
        out.append(Violation("nonnegativity", (int(i), int(j)), float(-d[i, j])))
    asym = np.abs(d - d.T)
    slack = np.maximum(tol.eq * np.maximum(np.abs(d), np.abs(d.T)), ABS_FLOOR)
    for i, j in zip(*np.nonzero(np.triu(asym > slack, 1))):
        out.append(Violation("symmetry", (int(i), int(j)), float(asym[i, j])))
    return out


def validate_metric(matrix, tol: ToleranceConfig = DEFAULT_TOL) -> list[Violation]:
    """Every metric-axiom violation of a square matrix, within ``tol.eq``.

    Triangle violations are reported as ``(i, j, k)`` meaning
    ``d(i, k) > d(i, j) + d(j, k)``.
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise CloudError(f"matrix must be square, got shape {d.shape}")
    out = _quadratic_checks(d, tol)
    if len(d) >= 3:
        via = d[:, :, None] + d[None, :, :]  # via[i, j, k] = d(i, j) + d(j, k)
        direct = d[:, None, :]
        excess = direct - via
        bad = excess > np.maximum(tol.eq * np.maximum(direct, via), ABS_FLOOR)
        for i, j, k in zip(*np.nonzero(bad)):
            if len({i, j, k}) == 3:
                out.append(Violation("triangle", (int(i), int(j), int(k)), float(excess[i, j, k])))
    return out


def cloud_from_matrix(matrix, weights=None, validate: bool = False,
                      tol: ToleranceConfig = DEFAULT_TOL) -> Cloud:
    """Cloud from an explicit distance matrix.

    Symmetry, zero diagonal and nonnegativity are always enforced; the
    O(m^3) triangle check runs only with ``validate=True``.
    """
    d = np.array(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise CloudError(f"matrix must be square and non-empty, got shape {d.shape}")
    problems = validate_metric(d, tol) if validate else _quadratic_checks(d, tol)
    if problems:
        raise MetricViolationError(problems)
    return Cloud("matrix", matrix=_freeze(d), weights=_check_weights(weights, len(d), tol), tol=tol)


def _check_basis(cloud: Cloud, A: Sequence[int]) -> tuple[int, ...]:
    A = tuple(int(a) for a in A)
    if len(set(A)) != len(A):
        raise CloudError(f"basis {A} has duplicate indices")
    if not 1 <= len(A) < cloud.m:
        raise CloudError(f"basis size h={len(A)} must satisfy 1 <= h < m={cloud.m}")
    if any(not 0 <= a < cloud.m for a in A):
        raise CloudError(f"basis {A} has indices outside 0..{cloud.m - 1}")
    return A


def subset_distance_matrix(cloud: Cloud, A: Sequence[int]) -> TriangularDistanceMatrix:
    A = _check_basis(cloud, A)
    return TriangularDistanceMatrix.from_full(cloud.distances[np.ix_(A, A)])


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (may include a reflection)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def apply_isometry(cloud: Cloud, orthogonal, translation=None, permutation=None) -> Cloud:
    """Map every point ``p`` to ``Q p + t`` and relabel by ``permutation``.

    New point ``i`` is the image of old point ``permutation[i]``.
    """
    if cloud.kind != "coordinates":
        raise CloudError("isometries act on coordinate clouds only")
    Q = np.asarray(orthogonal, dtype=float)
    n = cloud.n
    if Q.shape != (n, n):
        raise CloudError(f"orthogonal matrix must be {n}x{n}, got {Q.shape}")
    if np.abs(Q.T @ Q - np.eye(n)).max() > cloud.tol.eq:
        raise CloudError("matrix is not orthogonal within tolerance")
    t = np.zeros(n) if translation is None else np.asarray(translation, dtype=float)
    perm = np.arange(cloud.m) if permutation is None else np.asarray(permutation)
    if sorted(perm.tolist()) != list(range(cloud.m)):
        raise CloudError("permutation must list every point index exactly once")
    pts = (cloud.points @ Q.T + t)[perm]
    w = None if cloud.weights is None else cloud.weights[perm]
    return cloud_from_coordinates(pts, w, cloud.tol)


def perturb(cloud: Cloud, eps: float, seed=None) -> Cloud:
    """Move each point by an independent uniform sample from the closed eps-ball."""
    if cloud.kind != "coordinates":
        raise CloudError("perturbation is defined for coordinate clouds only")
    if not eps > 0:
        raise CloudError(f"eps must be > 0, got {eps}")
    rng = np.random.default_rng(seed)
    m, n = cloud.points.shape
    direction = rng.standard_normal((m, n))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    # shrink by a few ulps so rounding never pushes a displacement past eps
    radius = eps * (1 - 1e-12) * rng.random((m, 1)) ** (1.0 / n)
    return cloud_from_coordinates(cloud.points + direction / norms * radius, cloud.weights, cloud.tol)
