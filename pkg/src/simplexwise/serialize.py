"""Text formats for clouds and invariants.

Floats are written with 17 significant digits so every 64-bit value
survives a round trip.
"""

from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import Cloud, CloudError, TriangularDistanceMatrix, cloud_from_coordinates, cloud_from_matrix
from .invariants import SDD, CanonicalRDD, _make_key
from .mmspace import WSD, CanonicalWDD, _decoration


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    s = f"{x:.17g}"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 0, step: int = 1) -> str:
    """Deterministic JSON with fixed float formatting; flat lists stay on one line."""
    pad = " " * (indent + step)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f'{pad}{json.dumps(str(k))}: {dumps(v, indent + step, step)}'
                          for k, v in obj.items())
        return "{\n" + body + "\n" + " " * indent + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        body = ",\n".join(pad + dumps(v, indent + step, step) for v in obj)
        return "[\n" + body + "\n" + " " * indent + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    return json.dumps(obj)


# -- clouds ---------------------------------------------------------------------------

def cloud_to_dict(cloud: Cloud) -> dict:
    if cloud.kind == "coordinates":
        out = {"kind": "coords", "dim": cloud.n, "points": cloud.points}
    else:
        out = {"kind": "matrix", "matrix": cloud.matrix}
    if cloud.weights is not None:
        out["weights"] = cloud.weights
    return out


def cloud_from_dict(data: dict, validate: bool = False) -> Cloud:
    if not isinstance(data, dict):
        raise CloudError("cloud file must hold an object")
    kind = data.get("kind")
    weights = data.get("weights")
    if kind == "coords":
        if "points" not in data:
            raise CloudError("field 'points' is required for kind 'coords'")
        cloud = cloud_from_coordinates(data["points"], weights)
        if "dim" in data and int(data["dim"]) != cloud.n:
            raise CloudError(f"field 'dim' says {data['dim']} but points have dimension {cloud.n}")
        return cloud
    if kind == "matrix":
        if "matrix" not in data:
            raise CloudError("field 'matrix' is required for kind 'matrix'")
        return cloud_from_matrix(data["matrix"], weights, validate=validate)
    raise CloudError(f"field 'kind' must be 'coords' or 'matrix', got {kind!r}")


def save_cloud(cloud: Cloud, path) -> None:
    Path(path).write_text(dumps(cloud_to_dict(cloud)) + "\n")


def load_cloud(path, csv_kind: str = "coords", validate: bool = False) -> Cloud:
    """Read a cloud from JSON, or from CSV (one point per row, or a square grid)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open(newline="") as fh:
            rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
        if csv_kind == "matrix":
            return cloud_from_matrix(rows, validate=validate)
        return cloud_from_coordinates(rows)
    return cloud_from_dict(json.loads(path.read_text()), validate=validate)


# -- invariants ---------------------------------------------------------------------------

def _weight_fields(count: int, k: int) -> dict:
    w = Fraction(count, k)
    return {"weight_num": w.numerator, "weight_den": w.denominator}


def sdd_to_dict(s: SDD) -> dict:
    return {"h": s.h, "k": s.k, "items": [
        {**_weight_fields(c, s.k), "D": r.D.flat(), "R": r.R} for r, c in s.items]}


def _multiplicity(item: dict, k: int) -> int:
    c = Fraction(int(item["weight_num"]), int(item["weight_den"])) * k
    if c.denominator != 1:
        raise ValueError(f"weight {item['weight_num']}/{item['weight_den']} is not a multiple of 1/{k}")
    return int(c)


def _tri_from_flat(flat, h: int) -> TriangularDistanceMatrix:
    full = np.zeros((h, h))
    full[np.triu_indices(h, 1)] = flat
    return TriangularDistanceMatrix.from_full(full + full.T)


def sdd_from_dict(data: dict) -> SDD:
    h, k = int(data["h"]), int(data["k"])
    items = []
    m = None
    for it in data["items"]:
        D = _tri_from_flat(np.array(it["D"], dtype=float), h)
        R = np.array(it["R"], dtype=float).reshape(h, -1)
        m = h + R.shape[1]
        items.append((CanonicalRDD(D, R, (), _make_key(D.flat(), R)), _multiplicity(it, k)))
    return SDD(h, m, tuple(items))


def wsd_to_dict(s: WSD) -> dict:
    return {"h": s.h, "k": s.k, "items": [
        {**_weight_fields(c, s.k), "D": r.D.flat(), "W": r.basis_weights, "M": r.M}
        for r, c in s.items]}


def wsd_from_dict(data: dict) -> WSD:
    h, k = int(data["h"]), int(data["k"])
    items = []
    m = None
    for it in data["items"]:
        D = _tri_from_flat(np.array(it["D"], dtype=float), h)
        W = np.array(it["W"], dtype=float)
        M = np.array(it["M"], dtype=float).reshape(h + 1, -1)
        m = h + M.shape[1]
        items.append((CanonicalWDD(D, W, M, (), _make_key(D.flat(), _decoration(W), M)),
                      _multiplicity(it, k)))
    return WSD(h, m, tuple(items))
