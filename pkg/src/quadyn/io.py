"""JSON and CSV persistence with a versioned schema tag.

Every JSON file is {"schema": "quadyn/1", "type": <name>, "data": {...}}.
Complex numbers are [re, im] pairs, rational angles are "p/q" strings and
floats are written with Python's shortest round-trip repr, so
import(export(x)) == x field for field.  Puzzles and cascades are exported
as plain records (PuzzleRecord, CascadeRecord) holding their geometry and
combinatorics; the records round-trip exactly.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import MalformedFile, SchemaVersionMismatch
from .modulus import AnnulusEstimate, CoveringReport, ModuliSeries
from .paramspace import FeigenbaumPoint, MisiurewiczPoint, WindowCell, WindowCluster, WindowScan
from .puzzle import Puzzle
from .renorm import (BoundsReport, Cascade, LevelBounds, RatioRow, RatioTable,
                     RealRenormalizationRecord)
from .sector import DistortionConstants, ArgumentDistortionCheck, SectorCertificate
from .tableau import Tableau, tableau_from_matrix

SCHEMA = "quadyn/1"


# ----- records for objects that hold live geometry ----------------------------

@dataclass(frozen=True)
class PieceRecord:
    depth: int
    id: int
    arcs: tuple             # ((start, end), ...) as Fractions
    vertices: tuple         # landing points on the boundary
    is_critical: bool
    boundary: tuple         # closed polyline, first point not repeated


@dataclass(frozen=True)
class PuzzleRecord:
    c: complex
    r: float
    depth: int
    base_angles: tuple
    pieces: tuple


@dataclass(frozen=True)
class LevelRecord:
    index: int
    period: int
    cumulative: int
    N: int
    base_point: complex | None
    annulus: AnnulusEstimate
    shared_vertices: tuple


@dataclass(frozen=True)
class CascadeRecord:
    c: complex
    levels: tuple
    stop_reason: str
    errors: tuple           # ((level, "ErrorType: message"), ...)


def puzzle_record(p: Puzzle) -> PuzzleRecord:
    pieces = []
    for n in range(p.max_depth + 1):
        for pc in p.pieces(n):
            pieces.append(PieceRecord(n, pc.id, tuple(tuple(a) for a in pc.arcs),
                                      tuple(complex(v) for v in pc.vertex_set), pc.is_critical,
                                      tuple(complex(z) for z in p.boundary(pc))))
    return PuzzleRecord(p.c, p.r, p.max_depth, tuple(p.base_angles), tuple(pieces))


def cascade_record(cas: Cascade) -> CascadeRecord:
    levels = tuple(LevelRecord(lv.index, lv.period, lv.cumulative, lv.N,
                               None if lv.base_point is None else complex(lv.base_point),
                               lv.annulus, tuple(complex(v) for v in lv.shared_vertices))
                   for lv in cas.levels)
    errors = tuple((int(i), f"{type(e).__name__}: {e}") for i, e in cas.errors)
    return CascadeRecord(complex(cas.c), levels, cas.stop_reason, errors)


# ----- field kinds ------------------------------------------------------------
# A kind is a string: f (float), i (int), s (str), b (bool), z (complex),
# q (Fraction), opt:K, list:K, tuple:K, obj:Name.

SCHEMAS = {
    "PieceRecord": (PieceRecord, dict(depth="i", id="i", arcs="tuple:tuple:q", vertices="tuple:z",
                                      is_critical="b", boundary="tuple:z")),
    "PuzzleRecord": (PuzzleRecord, dict(c="z", r="f", depth="i", base_angles="tuple:q",
                                        pieces="tuple:obj:PieceRecord")),
    "AnnulusEstimate": (AnnulusEstimate, dict(mod_value="f", grid_resolution="i", error_bound="f",
                                              coarse="f", fine="f", degenerate="b",
                                              outer_id="opt:tuple:i", inner_id="opt:tuple:i",
                                              convention="s")),
    "LevelRecord": (LevelRecord, dict(index="i", period="i", cumulative="i", N="i",
                                      base_point="opt:z", annulus="obj:AnnulusEstimate",
                                      shared_vertices="tuple:z")),
    "CascadeRecord": (CascadeRecord, dict(c="z", levels="tuple:obj:LevelRecord", stop_reason="s",
                                          errors="tuple:tuple:any")),
    "ModuliSeries": (ModuliSeries, dict(x="z", terms="list:opt:obj:AnnulusEstimate",
                                        partial_sums="list:f", errors="list:tuple:any")),
    "CoveringReport": (CoveringReport, dict(piece="tuple:i", child="tuple:i", kind="s", mod="f",
                                            image_mod="f", expected_ratio="f", ratio="f",
                                            relative_deviation="f", error_bound="f")),
    "WindowCell": (WindowCell, dict(c="z", period="opt:i", truncation="opt:tuple:i",
                                    error="opt:s")),
    "WindowCluster": (WindowCluster, dict(cells="tuple:i", center="opt:z", validated="b")),
    "WindowScan": (WindowScan, dict(center="z", corner="z", size="tuple:f", grid="tuple:i",
                                    target_period="i", cells="tuple:obj:WindowCell",
                                    clusters="tuple:obj:WindowCluster")),
    "MisiurewiczPoint": (MisiurewiczPoint, dict(c="z", preperiod="i", period="i",
                                                multiplier="z", residual="f")),
    "FeigenbaumPoint": (FeigenbaumPoint, dict(c="f", centers="tuple:f", ratios="tuple:f",
                                              last_center_error="f")),
    "RatioRow": (RatioRow, dict(i="i", length="f", left="f", right="f")),
    "RatioTable": (RatioTable, dict(c="f", level="i", period="i", I_rows="tuple:obj:RatioRow",
                                    J_rows="tuple:obj:RatioRow")),
    "RealRenormalizationRecord": (RealRenormalizationRecord, dict(
        c="f", period="i", cumulative="i", a="f", beta="f", endpoint="f", alpha="opt:f",
        images="tuple:tuple:f", margins="tuple:f", containment_margin="f")),
    "LevelBounds": (LevelBounds, dict(index="i", period="i", cumulative="i", depth="i", mod="f",
                                      error_bound="f", proxy="s", contained="b",
                                      orbit_points="i", violations="i")),
    "BoundsReport": (BoundsReport, dict(c="z", j_max="i", levels="tuple:obj:LevelBounds")),
    "ArgumentDistortionCheck": (ArgumentDistortionCheck, dict(pair="i", N0="f", min_margin="f")),
    "SectorCertificate": (SectorCertificate, dict(theta="f", C="f", lam="f", samples="i",
                                                  max_arg="f", violations="i",
                                                  argument_checks="tuple:obj:ArgumentDistortionCheck")),
    "DistortionConstants": (DistortionConstants, dict(
        C="f", lam="f", gamma="f", sigma="f", C0="f", C1="f", tau="f", m0="i", n0="i", C2="f",
        C4="f", C3="f", C5="f", log10_C3="f", log10_C5="f")),
}
_NAMES = {cls: name for name, (cls, _) in SCHEMAS.items()}


def _enc(v, kind):
    head, _, rest = kind.partition(":")
    if head == "opt":
        return None if v is None else _enc(v, rest)
    if head in ("list", "tuple"):
        return [_enc(x, rest) for x in v]
    if head == "obj":
        return _encode_obj(v)
    if head == "z":
        v = complex(v)
        return [v.real, v.imag]
    if head == "q":
        return f"{Fraction(v).numerator}/{Fraction(v).denominator}"
    if head == "f":
        return float(v)
    if head == "i":
        return int(v)
    if head == "b":
        return bool(v)
    if head == "s":
        return str(v)
    return _plain(v)


def _plain(v):
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.integer, np.floating)):
        return v.item()
    return v


def _dec(v, kind):
    head, _, rest = kind.partition(":")
    if head == "opt":
        return None if v is None else _dec(v, rest)
    if head == "list":
        return [_dec(x, rest) for x in _need(v, list)]
    if head == "tuple":
        return tuple(_dec(x, rest) for x in _need(v, list))
    if head == "obj":
        return _decode_obj(rest, v)
    if head == "z":
        re, im = _need(v, list)
        return complex(float(re), float(im))
    if head == "q":
        return Fraction(_need(v, str))
    if head == "f":
        return float(_need(v, (int, float)))
    if head == "i":
        if isinstance(v, bool) or not isinstance(v, int):
            raise MalformedFile(f"expected an integer, got {v!r}")
        return v
    if head == "b":
        return _need(v, bool)
    if head == "s":
        return _need(v, str)
    return _tuplify(v)


def _tuplify(v):
    return tuple(_tuplify(x) for x in v) if isinstance(v, list) else v


def _need(v, typ):
    if not isinstance(v, typ):
        raise MalformedFile(f"expected {typ}, got {type(v).__name__}")
    return v


def _encode_obj(obj):
    if isinstance(obj, Tableau):
        return {"type": "Tableau", "x": _enc(obj.x, "z"), "is_critical": obj.is_critical,
                "truncation": list(obj.truncation),
                "entries": [int(e) for e in np.asarray(obj.entries).ravel()]}
    if isinstance(obj, Puzzle):
        obj = puzzle_record(obj)
    elif isinstance(obj, Cascade):
        obj = cascade_record(obj)
    name = _NAMES.get(type(obj))
    if name is None:
        raise TypeError(f"cannot export objects of type {type(obj).__name__}")
    kinds = SCHEMAS[name][1]
    return {"type": name, **{f.name: _enc(getattr(obj, f.name), kinds[f.name])
                             for f in fields(obj) if f.name in kinds}}


def _decode_obj(name, d):
    d = _need(d, dict)
    if d.get("type") != name and name:
        raise MalformedFile(f"expected a {name}, found {d.get('type')!r}")
    if name == "Tableau":
        try:
            N, M = d["truncation"]
            a = np.array(d["entries"], dtype=np.int64)
            if a.size != N * M:
                raise MalformedFile("tableau entries do not match the truncation")
            T = tableau_from_matrix(a.reshape(N, M), _dec(d["x"], "z"))
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedFile(f"bad tableau: {exc}") from exc
        if T.is_critical != d["is_critical"]:
            T = Tableau(T.x, T.entries, bool(d["is_critical"]))
        return T
    if name not in SCHEMAS:
        raise MalformedFile(f"unknown object type {name!r}")
    cls, kinds = SCHEMAS[name]
    try:
        kw = {k: _dec(d[k], kind) for k, kind in kinds.items()}
    except KeyError as exc:
        raise MalformedFile(f"{name} lacks field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise MalformedFile(f"bad {name}: {exc}") from exc
    obj = cls(**kw)
    return obj


def to_document(obj) -> dict:
    body = _encode_obj(obj)
    return {"schema": SCHEMA, "type": body.pop("type"), "data": body}


def from_document(doc):
    if not isinstance(doc, dict):
        raise MalformedFile("top level must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise SchemaVersionMismatch(f"expected schema {SCHEMA!r}, found {doc.get('schema')!r}")
    if "type" not in doc or "data" not in doc:
        raise MalformedFile("document needs 'type' and 'data'")
    body = dict(_need(doc["data"], dict), type=doc["type"])
    return _decode_obj(doc["type"], body)


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=1, sort_keys=True)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"invalid JSON: {exc}") from exc
    return from_document(doc)


# ----- CSV --------------------------------------------------------------------

MODULI_HEADER = ("n", "mod", "partial_sum", "error_bound")
RATIO_HEADER = ("family", "i", "length", "left", "right", "ratio")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def csv_rows(obj):
    if isinstance(obj, ModuliSeries):
        return MODULI_HEADER, obj.rows()
    if isinstance(obj, RatioTable):
        return RATIO_HEADER, list(obj.rows())
    raise TypeError(f"no CSV layout for {type(obj).__name__}")


def write_csv(obj, path):
    header, rows = csv_rows(obj)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def read_csv(path) -> list:
    """Rows of a moduli-series or ratio-table CSV with numeric columns parsed."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) not in (MODULI_HEADER, RATIO_HEADER):
        raise MalformedFile("unrecognised CSV header")
    ints = {"n", "i"}
    out = []
    try:
        for r in rows[1:]:
            out.append(tuple(int(v) if h in ints else (v if h == "family" else float(v))
                             for h, v in zip(rows[0], r)))
    except ValueError as exc:
        raise MalformedFile(f"bad CSV value: {exc}") from exc
    return out


# ----- files ------------------------------------------------------------------

def export(obj, path) -> Path:
    """Write obj as CSV (for a .csv path) or as schema-tagged JSON."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        write_csv(obj, path)
    else:
        path.write_text(dumps(obj) + "\n")
    return path


def import_(path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_csv(path)
    try:
        text = path.read_text()
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"not a text file: {exc}") from exc
    return loads(text)


def same(a, b) -> bool:
    """Field-for-field equality treating NaN as equal to NaN."""
    if isinstance(a, float) and isinstance(b, float):
        return a == b or (math.isnan(a) and math.isnan(b))
    if isinstance(a, complex) and isinstance(b, complex):
        return same(a.real, b.real) and same(a.imag, b.imag)
    if isinstance(a, (list, tuple)) and isinstance(b, (list, tuple)):
        return type(a) is type(b) and len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, Tableau) or isinstance(b, Tableau):
        return a == b
    if hasattr(a, "__dataclass_fields__") and type(a) is type(b):
        return all(same(getattr(a, f.name), getattr(b, f.name)) for f in fields(a))
    return a == b
