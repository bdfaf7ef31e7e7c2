import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given

from simplexwise import corpus, serialize
from simplexwise.core import CloudError
from simplexwise.invariants import sdd
from simplexwise.mmspace import wsd

from conftest import point_arrays


@given(point_arrays(m_min=3, m_max=6))
def test_sdd_round_trip_bit_exact(pts):
    from simplexwise.core import cloud_from_coordinates
    c = cloud_from_coordinates(pts)
    for h in (1, 2):
        s = sdd(c, h)
        text = serialize.dumps(serialize.sdd_to_dict(s))
        back = serialize.sdd_from_dict(json.loads(text))
        assert back == s and back.key == s.key


def test_wsd_round_trip():
    for X in corpus.trees9().values():
        s = wsd(X, 2)
        back = serialize.wsd_from_dict(json.loads(serialize.dumps(serialize.wsd_to_dict(s))))
        assert back.key == s.key


def test_cloud_round_trip(tmp_path):
    for c in (*corpus.s5().values(), *corpus.trees9().values()):
        path = tmp_path / "c.json"
        serialize.save_cloud(c, path)
        back = serialize.load_cloud(path)
        npt.assert_array_equal(back.distances, c.distances)
        if c.weights is not None:
            npt.assert_array_equal(back.weights, c.weights)


def test_float_format():
    assert serialize.fmt_float(0.1) == "0.10000000000000001"
    assert serialize.fmt_float(2) == "2.0"
    assert float(serialize.fmt_float(np.pi)) == np.pi
    with pytest.raises(ValueError):
        serialize.fmt_float(float("nan"))


def test_csv_import(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("0,0\n4,0\n0,3\n")
    assert serialize.load_cloud(p).distances[1, 2] == 5.0
    q = tmp_path / "mat.csv"
    q.write_text("0,1\n1,0\n")
    assert serialize.load_cloud(q, csv_kind="matrix").kind == "matrix"


@pytest.mark.parametrize("doc, msg", [({"kind": "blob"}, "kind"), ({"kind": "coords"}, "points"),
                                      ({"kind": "coords", "dim": 3, "points": [[0, 0]]}, "dim")])
def test_bad_cloud_files(doc, msg):
    with pytest.raises(CloudError, match=msg):
        serialize.cloud_from_dict(doc)
