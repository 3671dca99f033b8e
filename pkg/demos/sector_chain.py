"""Compose square roots with schlicht Mobius maps and watch the image of the
upper half-plane stay out of a fixed sector at 0.

    python demos/sector_chain.py
"""
import math

import numpy as np

from quadyn import distortion_constants, evaluate_chain, sector_angle, sector_certificate
from quadyn.sector import synthetic_chain


def main():
    for mu in (0.5, 1, 2, 5):
        print(f"sector angle for mu={mu}, gamma=2: {sector_angle(mu, 2):.7f}")

    chain = synthetic_chain(4, lam=2.0, C=1.0)
    cert = sector_certificate(chain)
    print(f"4-pair chain: guaranteed angle {cert.theta:.5f}, "
          f"largest sampled argument {cert.max_arg:.5f} (bound {math.pi - cert.theta:.5f}), "
          f"{cert.violations}/{cert.samples} violations")

    rng = np.random.default_rng(0)
    z = rng.uniform(-20, 20, 20000) + 1j * rng.exponential(2.0, 20000)
    w = evaluate_chain(chain, z)
    print(f"20000 random points: min arg {np.angle(w).min():.5f}, max arg {np.angle(w).max():.5f}")

    d = distortion_constants(1.0, 2.0)
    print(f"distortion constants: C1={d.C1:.4g} C2={d.C2:.6g} log10 C3={d.log10_C3:.4g} "
          f"log10 C5={d.log10_C5:.4g}")


if __name__ == "__main__":
    main()
