"""Reference clouds that simpler distance invariants fail to tell apart."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .core import Cloud, CloudError, cloud_from_coordinates, cloud_from_matrix

NAMES = ("TK", "TRI_SQ", "S5", "Q7", "T6", "TREES9")

TRAPEZIUM = [(1, 1), (-1, 1), (-2, 0), (2, 0)]
KITE = [(0, 1), (-1, 0), (0, -1), (3, 0)]
TRIANGLE = [(0, 0), (4, 0), (0, 3)]
SQUARE = [(1, 0), (-1, 0), (0, 1), (0, -1)]

RED_M, RED_P = (-2, 0, -2), (2, 0, 2)

# point order in S5: R-, R+, G-, G+, B
S5_LABELS = ("R-", "R+", "G-", "G+", "B")
S5_COMMON = [RED_M, RED_P, (-1, -1, 0), (1, 1, 0)]

# point order in Q7: R, G, B-1, B+1, B-2, B+2, O
Q7_LABELS = ("R", "G", "B-1", "B+1", "B-2", "B+2", "O")
Q7_COMMON = [RED_M, RED_P, (-1, -1, 0), (1, 1, 0), (-1, 2, 0), (1, 2, 0)]

# squared half-lengths (l1^2, l2^2, l3^2) of the default 6-point instance
T6_DEFAULT_L_SQ = (13 / 4, 13 / 4, 5 / 4)


def tk() -> dict[str, Cloud]:
    return {"T": cloud_from_coordinates(TRAPEZIUM), "K": cloud_from_coordinates(KITE)}


def tri_sq() -> dict[str, Cloud]:
    return {"triangle": cloud_from_coordinates(TRIANGLE), "square": cloud_from_coordinates(SQUARE)}


def s5() -> dict[str, Cloud]:
    return {"S-": cloud_from_coordinates(S5_COMMON + [(0, 1, -1)]),
            "S+": cloud_from_coordinates(S5_COMMON + [(0, 1, 1)])}


def q7() -> dict[str, Cloud]:
    return {"Q-": cloud_from_coordinates(Q7_COMMON + [(0, 0, -1)]),
            "Q+": cloud_from_coordinates(Q7_COMMON + [(0, 0, 1)])}


def t6_points(l_sq=T6_DEFAULT_L_SQ, signs=None) -> list[tuple[float, float, float]]:
    """Blue points C1, C2, C3 with |RC1| = |GC2|, |RC2| = |GC3|, |RC3| = |GC1|.

    ``l_sq`` holds the squared half-lengths of the projected segments. The
    sign of each y-coordinate defaults to y1 > 0, y3 > 0 and y2 = -y1
    whenever y1^2 = y2^2.
    """
    l1, l2, l3 = (float(v) for v in l_sq)
    if min(l1, l2, l3) <= 0:
        raise CloudError("T6 parameters must be positive")
    x = [(l3 - l2) / 2, (l1 - l3) / 2, (l2 - l1) / 2]
    y_sq = [4 * l3 - (x[0] + 2) ** 2, 4 * l1 - (x[1] + 2) ** 2, 4 * l2 - (x[2] + 2) ** 2]
    for i, v in enumerate(y_sq):
        if v < -1e-12:
            raise CloudError(f"T6 parameters infeasible: y{i + 1}^2 = {v:.6g} < 0")
    y = [math.sqrt(max(v, 0.0)) for v in y_sq]
    if signs is None:
        same = math.isclose(y_sq[0], y_sq[1], rel_tol=1e-12, abs_tol=1e-12) and y[0] > 0
        signs = (1, -1 if same else 1, 1)
    if len(signs) != 3 or any(s not in (1, -1) for s in signs):
        raise CloudError(f"T6 signs must be three values from {{+1, -1}}, got {signs}")
    pts = [(x[i], signs[i] * y[i], 0.0) for i in range(3)]
    if len({tuple(np.round(p, 12)) for p in pts}) < 3:
        raise CloudError("T6 parameters make two blue points coincide")
    return pts


def t6(l_sq=T6_DEFAULT_L_SQ, signs=None) -> dict[str, Cloud]:
    """6-point clouds R, G, C1, C2, C3, O with O = (0, 0, -1) or (0, 0, +1)."""
    blue = t6_points(l_sq, signs)
    return {"T-": cloud_from_coordinates([RED_M, RED_P, *blue, (0, 0, -1)]),
            "T+": cloud_from_coordinates([RED_M, RED_P, *blue, (0, 0, 1)])}


# -- 9-point trees ----------------------------------------------------------------------
#
# Three branches of three leaves: distance 1 inside a branch, 2 across.
# Both spaces share one multiset of weights and every branch weighs 1/3;
# only the grouping into branches differs.

TREE_WEIGHTS = (
    Fraction(23, 140), Fraction(67, 420), Fraction(1, 105),
    Fraction(2, 15), Fraction(1, 15), Fraction(2, 15),
    Fraction(4, 21), Fraction(1, 28), Fraction(3, 28),
)
TREE_BRANCHES = {
    "X": ((0, 2, 1), (3, 4, 5), (6, 7, 8)),
    "Y": ((0, 3, 7), (2, 6, 5), (8, 4, 1)),
}


def tree_matrix(branches) -> np.ndarray:
    d = np.full((9, 9), 2.0)
    for b in branches:
        for i in b:
            for j in b:
                d[i, j] = 1.0
    np.fill_diagonal(d, 0.0)
    return d


def trees9() -> dict[str, Cloud]:
    w = [float(x) for x in TREE_WEIGHTS]
    return {name: cloud_from_matrix(tree_matrix(br), w, validate=True)
            for name, br in TREE_BRANCHES.items()}


def two_point_spaces() -> dict[str, Cloud]:
    return {"uniform": cloud_from_coordinates([(0,), (1,)], [0.5, 0.5]),
            "skewed": cloud_from_coordinates([(0,), (1,)], [1 / 3, 2 / 3])}


def build(name: str, params=None, signs=None) -> dict[str, Cloud]:
    if name not in NAMES:
        raise CloudError(f"unknown corpus {name!r}; choose from {', '.join(NAMES)}")
    if name == "T6":
        l_sq = T6_DEFAULT_L_SQ if not params else tuple(float(v) ** 2 for v in params)
        if len(l_sq) != 3:
            raise CloudError("T6 takes exactly three parameters l1 l2 l3")
        return t6(l_sq, signs)
    if params:
        raise CloudError(f"corpus {name} takes no parameters")
    return {"TK": tk, "TRI_SQ": tri_sq, "S5": s5, "Q7": q7, "TREES9": trees9}[name]()
