#!/usr/bin/env python3
"""Fringe spacing of particle 2 versus the wavelength of particle 1.

Particle 2's detector never moves and its own wavelength is fixed; only the
partner's wavelength changes.  The extracted spacing grows linearly with
lambda1 with slope L2/d, which is the nonlocal two-color signature.
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import ghostsim as gs
from ghostsim import analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/wavelength_sweep")
    ap.add_argument("--points", type=int, default=9)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    lams = np.linspace(780e-9, 1600e-9, args.points)
    spacing = np.empty_like(lams)
    simplified = np.empty_like(lams)
    for i, lam1 in enumerate(lams):
        s = gs.Scenario.from_gamma(
            lambda1=lam1, lambda2=780e-9, L1=1.15, L2=0.325,
            d=0.5e-3, slit_width=0.1e-3, gamma=0.11e-3,
        )
        sl = gs.coincidence_slice(gs.joint_density(s), 0.0)
        spacing[i] = analysis.extract_fringes(sl).spacing
        simplified[i] = gs.fringe_width(s).simplified

    slope, icept = np.polyfit(lams, spacing, 1)
    print(f"fitted slope = {slope:.2f}  (L2/d = {0.325 / 0.5e-3:.2f})")
    for lam1, w in zip(lams, spacing):
        print(f"  lambda1 = {lam1 * 1e9:7.1f} nm -> spacing = {w * 1e3:.4f} mm")

    rows = ["lambda1,spacing,simplified"]
    rows += [f"{a!r},{b!r},{c!r}" for a, b, c in zip(lams, spacing, simplified)]
    (out / "sweep.csv").write_text("\n".join(rows) + "\n")

    fig, ax = plt.subplots(figsize=(5, 3.4), constrained_layout=True)
    ax.plot(lams * 1e9, spacing * 1e3, "o", ms=4, label="extracted")
    ax.plot(lams * 1e9, (slope * lams + icept) * 1e3, "-", lw=1,
            label=f"fit, slope {slope:.1f}")
    ax.plot(lams * 1e9, simplified * 1e3, "--", lw=1, label="closed form")
    ax.set(xlabel="lambda1 [nm]", ylabel="fringe spacing [mm]",
           title="spacing of particle 2 vs wavelength of particle 1")
    ax.legend(frameon=False, fontsize=8)
    fig.savefig(out / "wavelength_sweep.png", dpi=160)
    print(f"wrote {out}/wavelength_sweep.png")


if __name__ == "__main__":
    main()
