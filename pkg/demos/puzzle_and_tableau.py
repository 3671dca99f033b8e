"""Build the Yoccoz puzzle of the basilica and the airplane, read off their
critical tableaux and recover the renormalization periods.

    python demos/puzzle_and_tableau.py [--out DIR]
"""
import argparse
from pathlib import Path

from quadyn import build_puzzle, check_rules, compute_tableau, detect_period, tau
from quadyn.modulus import moduli_series
from quadyn.render import RenderSpec, render, save_image


def describe(name, c, depth=11):
    p = build_puzzle(c, depth)
    T = compute_tableau(p, 0j, 12, 24)
    print(f"{name} (c = {c}): {len(p.base_angles)} rays at alpha, "
          f"{len(p.pieces(depth))} pieces at depth {depth}")
    rows = ["".join(str(int(v)) for v in row) for row in T.entries[:6]]
    print("  critical tableau, first rows:")
    for r in rows:
        print("   ", r)
    print(f"  rule violations: {len(check_rules(T))}")
    print(f"  tau(2..8): {[tau(T, n) for n in range(2, 9)]}")
    print(f"  renormalization period: {detect_period(T)}")
    return p


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=None, help="directory for PNG renders")
    args = ap.parse_args()

    describe("basilica", -1 + 0j)
    describe("airplane", -1.75 + 0j)
    p = describe("Chebyshev", -2 + 0j)
    s = moduli_series(p, 0j, 6, resolution=96, refine=False)
    print("  Chebyshev moduli:", [round(v, 3) for v in s.values()])
    print("  partial sums grow without bound, so the critical end is a point")

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        spec = RenderSpec(c=-1 + 0j, resolution=(512, 512), rays=(1 / 3, 2 / 3),
                          equipotentials=(1.5,), puzzle_depth=3)
        save_image(render(spec), args.out / "basilica_puzzle.png")
        print(f"wrote {args.out / 'basilica_puzzle.png'}")


if __name__ == "__main__":
    main()
