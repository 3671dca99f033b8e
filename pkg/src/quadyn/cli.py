"""Command-line interface: one verb per operation family.

Exit codes: 0 on success, 2 on domain errors (bad input, wrong regime),
3 on numerical failures.  Floats are printed with 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import numpy as np

from . import io
from .errors import DomainError, QuadynError

JSON_SCHEMA = io.SCHEMA


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        v = complex(v)
        return f"{format(v.real, '.17g')},{format(v.imag, '.17g')}"
    if v is None:
        return "-"
    return str(v)


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im' or 're', got {text!r}")


def parse_angle(text: str):
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from None


def parse_pair(typ):
    def parse(text):
        try:
            a, b = text.replace("x", ",").split(",")
            return typ(a), typ(b)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected two values 'a,b', got {text!r}") from None
    return parse


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (np.integer, np.floating, np.bool_)):
        return v.item()
    return v


class Result:
    """Text lines for the terminal plus the object to serialize."""

    def __init__(self, lines, obj=None, kind=None, csv_obj=None):
        self.lines = lines
        self.obj = obj
        self.kind = kind            # type tag for plain dict payloads
        self.csv_obj = csv_obj

    def document(self) -> str:
        if not isinstance(self.obj, dict):
            return io.dumps(self.obj)
        doc = {"schema": JSON_SCHEMA, "type": self.kind, "data": _jsonable(self.obj)}
        return json.dumps(doc, indent=1, sort_keys=True)


# ----- verbs ------------------------------------------------------------------

def cmd_render(a):
    from .render import RenderSpec, interior_fraction, render, save_image
    spec = RenderSpec(target=a.target, c=a.c, center=a.center, width=a.width,
                      resolution=a.size, max_iter=a.max_iter, rays=tuple(a.rays),
                      equipotentials=tuple(a.equipotentials), puzzle_depth=a.puzzle_depth,
                      highlight=tuple(a.highlight))
    r = render(spec)
    if a.out:
        save_image(r, a.out)
    lines = [f"size {spec.resolution[0]}x{spec.resolution[1]}",
             f"interior_fraction {fmt(interior_fraction(r))}"]
    lines += [f"warning {w}" for w in r.warnings]
    data = {"target": spec.target, "c": spec.c, "center": spec.center, "width": spec.width,
            "resolution": spec.resolution, "interior_fraction": interior_fraction(r),
            "warnings": r.warnings}
    return Result(lines, data, "Rendering"), True


def cmd_ray(a):
    from .potential import trace_ray
    ray = trace_ray(a.c, a.theta, a.g_min)
    lines = [f"theta {a.theta}", f"points {len(ray)}", f"landed {fmt(ray.landed)}",
             f"landing {fmt(ray.landing)}", f"cauchy_diameter {fmt(ray.cauchy_diameter)}"]
    data = {"theta": ray.theta, "potentials": ray.potentials, "points": ray.points,
            "landing": ray.landing, "landed": ray.landed,
            "cauchy_diameter": ray.cauchy_diameter}
    return Result(lines, data, "ExternalRay"), False


def cmd_equipotential(a):
    from .potential import equipotential
    e = equipotential(a.c, a.R, a.samples)
    lines = [f"level {fmt(e.level)}", f"potential {fmt(e.potential)}",
             f"samples {e.points.size}", f"valid {int(e.valid.sum())}"]
    return Result(lines, {"level": e.level, "points": e.points}, "EquipotentialCurve"), False


def cmd_puzzle(a):
    from .puzzle import build_puzzle
    p = build_puzzle(a.c, a.depth)
    lines = [f"alpha_rays {' '.join(str(t) for t in p.base_angles)}"]
    for n in range(p.max_depth + 1):
        crit = p.critical(n)
        lines.append(f"depth {n} pieces {len(p.pieces(n))} critical {crit.id} "
                     f"vertices {p.vertex_count(n)}")
    return Result(lines, p), False


def _tableau(a):
    from .puzzle import build_puzzle
    from .tableau import compute_tableau
    p = build_puzzle(a.c, a.depth)
    return compute_tableau(p, a.x, a.depth + 1, a.columns)


def cmd_tableau(a):
    from .tableau import check_rules
    T = _tableau(a)
    rows = ["".join(str(int(v)) for v in row) for row in np.asarray(T.entries)]
    lines = [f"truncation {T.truncation[0]}x{T.truncation[1]}"] + rows
    lines.append(f"rule_violations {len(check_rules(T))}")
    return Result(lines, T), False


def cmd_tau(a):
    from .tableau import tau
    T = _tableau(a)
    lines = []
    data = {}
    for n in range(1, a.n + 1):
        v = tau(T, n)
        lines.append(f"tau({n}) {v}")
        data[n] = v
    return Result(lines, {"tau": data}, "TauFunction"), False


def cmd_detect(a):
    from .tableau import detect_period
    T = _tableau(a)
    period = detect_period(T)
    lines = [f"period {fmt(period)}", f"truncation {T.truncation[0]}x{T.truncation[1]}"]
    data = {"c": a.c, "period": period, "truncation": T.truncation}
    if a.c.imag == 0 and -2 <= a.c.real <= 0.25:
        from .renorm import real_renorm_detect
        rec = real_renorm_detect(a.c.real)
        lines.append(f"real_period {fmt(rec.period if rec else None)}")
        data["real_period"] = rec.period if rec else None
    return Result(lines, data, "Detection"), False


def cmd_cascade(a):
    from .renorm import renorm_cascade
    cas = renorm_cascade(a.c, a.k_max, resolution=a.resolution)
    lines = [f"periods {' '.join(map(str, cas.periods))}",
             f"cumulative {' '.join(map(str, cas.cumulative))}", f"stop {cas.stop_reason}"]
    for lv in cas.levels:
        lines.append(f"level {lv.index} period {lv.period} N {lv.N} "
                     f"mod {fmt(lv.annulus.mod_value)} degenerate {fmt(lv.degenerate)}")
    return Result(lines, io.cascade_record(cas)), False


def cmd_moduli(a):
    from .modulus import moduli_series
    from .puzzle import build_puzzle
    p = build_puzzle(a.c, a.depth)
    s = moduli_series(p, a.x, resolution=a.resolution)
    lines = ["n mod partial_sum error_bound"]
    lines += [" ".join(fmt(v) for v in row) for row in s.rows()]
    lines += [f"error {n} {msg}" for n, msg in s.errors]
    return Result(lines, s, csv_obj=s), False


def cmd_real_renorm(a):
    from .renorm import real_bounds_report, real_renorm_cascade
    recs = real_renorm_cascade(a.c.real if a.c.imag == 0 else a.c, a.k)
    lines = []
    for r in recs:
        lines.append(f"period {r.period} cumulative {r.cumulative} a {fmt(r.a)} "
                     f"containment_margin {fmt(r.containment_margin)}")
    table = real_bounds_report(a.c.real if a.c.imag == 0 else a.c, a.k)
    lines.append("family i length left right ratio")
    lines += [" ".join(fmt(v) for v in row) for row in table.rows()]
    lines.append(f"minimum_ratio {fmt(table.minimum)}")
    return Result(lines, table, csv_obj=table), False


def cmd_bounds(a):
    from .renorm import bounds_report, renorm_cascade
    cas = renorm_cascade(a.c, a.k_max, resolution=a.resolution)
    rep = bounds_report(cas, a.j_max, a.resolution)
    lines = [f"periods {' '.join(map(str, cas.periods))}"]
    for lv in rep.levels:
        lines.append(f"level {lv.index} m {lv.cumulative} depth {lv.depth} mod {fmt(lv.mod)} "
                     f"error {fmt(lv.error_bound)} unbranched {lv.violations}/{lv.orbit_points} "
                     f"proxy {lv.proxy.replace(' ', '_')}")
    lines.append(f"floor {fmt(rep.floor)}")
    return Result(lines, rep), False


def cmd_sector(a):
    from .sector import distortion_constants, sector_angle, sector_certificate, synthetic_chain
    lines = []
    if a.mu is not None:
        lines.append(f"sector_angle {fmt(sector_angle(a.mu, a.gamma))}")
    dc = distortion_constants(a.C, a.lam, a.gamma)
    for name in ("sigma", "C0", "C1", "tau", "m0", "n0", "C2", "C4", "C3", "C5",
                 "log10_C3", "log10_C5"):
        lines.append(f"{name} {fmt(getattr(dc, name))}")
    cert = sector_certificate(synthetic_chain(a.pairs, a.lam, a.C, a.gamma))
    lines += [f"theta_star {fmt(cert.theta)}", f"samples {cert.samples}",
              f"max_arg {fmt(cert.max_arg)}", f"violations {cert.violations}"]
    return Result(lines, {"constants": io.to_document(dc), "certificate": io.to_document(cert)},
                  "SectorReport"), False


def cmd_misiurewicz(a):
    from .paramspace import find_misiurewicz
    pt = find_misiurewicz(a.seed if a.seed is not None else a.c, a.m, a.k)
    lines = [f"c {fmt(pt.c)}", f"preperiod {pt.preperiod}", f"period {pt.period}",
             f"multiplier {fmt(pt.multiplier)}", f"residual {fmt(pt.residual)}"]
    return Result(lines, pt), False


def cmd_superstable(a):
    from .paramspace import find_superstable
    c = find_superstable(a.n, a.seed if a.seed is not None else a.c)
    return Result([f"c {fmt(c)}"], {"period": a.n, "c": c}, "SuperstableCenter"), False


def cmd_feigenbaum(a):
    from .paramspace import find_feigenbaum
    fp = find_feigenbaum(a.levels)
    lines = [f"c {fmt(fp.c)}", f"last_center_error {fmt(fp.last_center_error)}"]
    lines += [f"ratio {fmt(r)}" for r in fp.ratios]
    return Result(lines, fp), False


def cmd_scan(a):
    from .paramspace import scan_windows
    sc = scan_windows(a.c, (a.corner, a.box), a.grid, a.target, depth=a.depth)
    lines = [f"cells {len(sc.cells)}",
             f"hits {sum(1 for cl in sc.clusters for _ in cl.cells)}"]
    for cl in sc.clusters:
        lines.append(f"cluster cells {len(cl.cells)} center {fmt(cl.center)} "
                     f"validated {fmt(cl.validated)}")
    return Result(lines, sc), False


# ----- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--c", type=parse_complex, default=0j, help="parameter 're,im'")
    common.add_argument("--out", help="output file (.json, .csv, .png, .ppm by verb)")
    common.add_argument("--json", action="store_true", help="print a JSON document")

    ap = argparse.ArgumentParser(prog="quadyn", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    def puzzle_args(p, depth=8, columns=24):
        p.add_argument("--depth", type=int, default=depth)
        p.add_argument("--columns", type=int, default=columns)
        p.add_argument("--x", type=parse_complex, default=0j, help="orbit start (default 0)")

    p = verb("render", cmd_render, "escape-time image with overlays")
    p.add_argument("--target", choices=("julia", "mandelbrot"), default="julia")
    p.add_argument("--center", type=parse_complex, default=0j)
    p.add_argument("--width", type=float, default=4.0)
    p.add_argument("--size", type=parse_pair(int), default=(256, 256))
    p.add_argument("--max-iter", type=int, default=256)
    p.add_argument("--rays", type=parse_angle, nargs="*", default=[])
    p.add_argument("--equipotentials", type=float, nargs="*", default=[])
    p.add_argument("--puzzle-depth", type=int)
    p.add_argument("--highlight", type=parse_pair(int), nargs="*", default=[],
                   help="pieces as depth,id")

    p = verb("ray", cmd_ray, "trace an external ray")
    p.add_argument("--theta", type=parse_angle, required=True)
    p.add_argument("--g-min", type=float, default=0.0)

    p = verb("equipotential", cmd_equipotential, "sample an equipotential G = log R")
    p.add_argument("--R", type=float, default=4.0)
    p.add_argument("--samples", type=int, default=256)

    p = verb("puzzle", cmd_puzzle, "build the Yoccoz puzzle")
    p.add_argument("--depth", type=int, default=3)

    p = verb("tableau", cmd_tableau, "tableau of an end")
    puzzle_args(p)
    p = verb("tau", cmd_tau, "tau function of the critical tableau")
    puzzle_args(p, depth=11, columns=12)
    p.add_argument("--n", type=int, default=10)
    p = verb("detect", cmd_detect, "detect the renormalization period")
    puzzle_args(p)

    p = verb("cascade", cmd_cascade, "renormalization cascade")
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--resolution", type=int, default=256)

    p = verb("moduli", cmd_moduli, "moduli of the nested annuli")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--x", type=parse_complex, default=0j)
    p.add_argument("--resolution", type=int, default=128)

    p = verb("real-renorm", cmd_real_renorm, "real renormalization intervals and ratios")
    p.add_argument("--k", type=int, default=2)

    p = verb("bounds", cmd_bounds, "complex bounds along the cascade")
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--j-max", type=int, default=200)
    p.add_argument("--resolution", type=int, default=256)

    p = verb("sector", cmd_sector, "sector angle, distortion constants, certificate")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--mu", type=float)
    p.add_argument("--pairs", type=int, default=4)

    p = verb("misiurewicz", cmd_misiurewicz, "locate a Misiurewicz point")
    p.add_argument("--seed", type=parse_complex)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    p = verb("superstable", cmd_superstable, "locate a superstable center")
    p.add_argument("--seed", type=parse_complex)
    p.add_argument("--n", type=int, required=True)

    p = verb("feigenbaum", cmd_feigenbaum, "the Feigenbaum parameter")
    p.add_argument("--levels", type=int, default=12)

    p = verb("scan", cmd_scan, "scan a parameter box for renormalization windows")
    p.add_argument("--corner", type=parse_complex, required=True)
    p.add_argument("--box", type=parse_pair(float), required=True, help="width,height")
    p.add_argument("--grid", type=parse_pair(int), default=(10, 3), help="nx,ny")
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--depth", type=int, default=8)
    return ap


def _write(result: Result, path: str, image_written: bool) -> None:
    if image_written:
        return
    if path.lower().endswith(".csv"):
        if result.csv_obj is None:
            raise DomainError("this verb has no CSV output")
        io.write_csv(result.csv_obj, path)
        return
    with open(path, "w") as fh:
        fh.write(result.document() + "\n")


_NEGATIVE = re.compile(r"^-[0-9.]")


def _join_negative_values(argv):
    """Rewrite '--opt -1,0.5' as '--opt=-1,0.5' so argparse takes it as a value."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NEGATIVE.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_join_negative_values(argv))
    try:
        result, image_written = args.fn(args)
        if args.out:
            _write(result, args.out, image_written)
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except QuadynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:       # input checks in the library raise plain ValueError
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(result.document())
    else:
        print("\n".join(result.lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
