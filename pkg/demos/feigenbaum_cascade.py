"""Follow the period-doubling cascade: superstable centers converge to the
Feigenbaum parameter, where the map renormalizes with period 2 at every
level and the annulus moduli stay bounded below.

    python demos/feigenbaum_cascade.py
"""
from quadyn import bounds_report, find_feigenbaum, real_bounds_report, renorm_cascade


def main():
    fp = find_feigenbaum()
    print("superstable centers of periods 2^k:")
    for k, c in enumerate(fp.centers[:8], start=1):
        print(f"  k={k:2d}  {c:.15f}")
    print(f"accumulation point c_F = {fp.c:.15f}")
    print(f"ratio of successive gaps: {fp.ratios[-1]:.6f}")

    for k in (1, 2, 3):
        t = real_bounds_report(fp.c, k)
        print(f"real bounds at level {k} (period {t.period}): smallest neighbour ratio {t.minimum:.4f}")

    cas = renorm_cascade(fp.c, 4)
    print(f"complex cascade periods: {cas.periods} ({cas.stop_reason})")
    rep = bounds_report(cas, J_max=200)
    for lv in rep.levels:
        print(f"  level {lv.index}: return time {lv.cumulative:2d}, mod {lv.mod:.4f}, "
              f"unbranched violations {lv.violations}/{lv.orbit_points}")
    print(f"modulus floor over the cascade: {rep.floor:.4f}")


if __name__ == "__main__":
    main()
