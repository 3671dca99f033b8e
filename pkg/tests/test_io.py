import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadyn.errors import MalformedFile, SchemaVersionMismatch
from quadyn.io import (MODULI_HEADER, RATIO_HEADER, SCHEMA, cascade_record, dumps, export,
                       import_, loads, puzzle_record, same)
from quadyn.modulus import AnnulusEstimate, moduli_series
from quadyn.paramspace import MisiurewiczPoint, find_feigenbaum, scan_windows
from quadyn.renorm import real_bounds_report, renorm_cascade
from quadyn.sector import distortion_constants, sector_certificate, synthetic_chain
from quadyn.tableau import compute_tableau, tableau_from_matrix

from conftest import C_FEIGENBAUM

finite = st.floats(allow_nan=False, allow_infinity=False)
anyfloat = st.floats()


def test_tableau_document(get_puzzle):
    T = compute_tableau(get_puzzle(-1, 7), 0j, 8, 8)
    doc = json.loads(dumps(T))
    assert doc["schema"] == SCHEMA and doc["type"] == "Tableau"
    assert doc["data"]["truncation"] == [8, 8]
    assert len(doc["data"]["entries"]) == 64
    assert loads(dumps(T)) == T


def test_puzzle_record_round_trip(get_puzzle, tmp_path):
    rec = puzzle_record(get_puzzle(-1, 3))
    back = import_(export(rec, tmp_path / "p.json"))
    assert same(rec, back)
    piece = json.loads(dumps(rec))["data"]["pieces"][0]
    assert isinstance(piece["boundary"][0], list) and len(piece["boundary"][0]) == 2


def test_cascade_and_bounds_round_trip(tmp_path):
    cas = renorm_cascade(-1)
    rec = cascade_record(cas)
    assert same(rec, loads(dumps(rec)))


def test_paramspace_objects_round_trip():
    fp = find_feigenbaum()
    assert same(fp, loads(dumps(fp)))
    sc = scan_windows(-2, (-1.8 - 0.01j, (0.1, 0.02)), (4, 1), 3)
    assert same(sc, loads(dumps(sc)))


def test_sector_objects_round_trip():
    d = distortion_constants(1.0, 2.0)
    assert math.isinf(d.C5)
    assert same(d, loads(dumps(d)))
    cert = sector_certificate(synthetic_chain())
    assert same(cert, loads(dumps(cert)))


@given(st.builds(complex, finite, finite), st.integers(1, 9), st.integers(1, 9),
       st.builds(complex, finite, finite), finite)
def test_misiurewicz_round_trip(c, m, k, lam, res):
    pt = MisiurewiczPoint(c, m, k, lam, abs(res))
    back = loads(dumps(pt))
    assert same(pt, back) and type(back.c) is complex


@given(anyfloat, st.integers(1, 4096), anyfloat, st.booleans())
def test_annulus_round_trip_full_precision(v, res, err, deg):
    est = AnnulusEstimate(v, res, err, v, err, deg)
    assert same(est, loads(dumps(est)))


def test_moduli_csv(get_puzzle, tmp_path):
    s = moduli_series(get_puzzle(-2, 4), 0, 4, resolution=64, refine=False)
    path = export(s, tmp_path / "m.csv")
    lines = path.read_text().splitlines()
    assert tuple(lines[0].split(",")) == MODULI_HEADER
    rows = import_(path)
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert all(same(a, b) for a, b in zip(rows, [tuple(r) for r in s.rows()]))


def test_ratio_csv(tmp_path):
    t = real_bounds_report(C_FEIGENBAUM, 2)
    rows = import_(export(t, tmp_path / "r.csv"))
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == ",".join(RATIO_HEADER)
    assert rows == list(t.rows())


def test_missing_version_tag(tmp_path):
    T = tableau_from_matrix(np.eye(3, dtype=int))
    doc = json.loads(dumps(T))
    del doc["schema"]
    with pytest.raises(SchemaVersionMismatch):
        loads(json.dumps(doc))
    doc["schema"] = "quadyn/0"
    with pytest.raises(SchemaVersionMismatch):
        loads(json.dumps(doc))


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    json.dumps({"schema": SCHEMA, "type": "Nope", "data": {}}),
    json.dumps({"schema": SCHEMA, "type": "MisiurewiczPoint", "data": {"c": [0, 1]}}),
    json.dumps({"schema": SCHEMA, "type": "Tableau",
                "data": {"x": [0, 0], "truncation": [2, 2], "entries": [1, 0, 1],
                         "is_critical": True}}),
])
def test_malformed(text):
    with pytest.raises(MalformedFile):
        loads(text)


def test_malformed_csv(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(MalformedFile):
        import_(path)


def test_unsupported_csv_object(tmp_path):
    with pytest.raises(TypeError):
        export(distortion_constants(1.0, 2.0), tmp_path / "d.csv")
