#!/usr/bin/env python3
"""Regenerate the CVD-optimized map from viridis and refresh the
regression snapshot.

Writes the snapshot table used by the test suite, plus optional
distribution artifacts (byte table, ImageJ LUT, ramp PNG).
"""

import argparse
import os

import numpy as np

from cmapopt import analyze, io as cio
from cmapopt.colormaps import builtin_colormap
from cmapopt.colorspace import srgb_to_jab
from cmapopt.cvd import CvdSpec
from cmapopt.optimize import fit_line_ols, optimize_colormap

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--snapshot",
                        default=os.path.join(REPO, "tests", "data", "cividis_snapshot.csv"))
    parser.add_argument("--dist", help="also write table/LUT/PNG artifacts into this directory")
    args = parser.parse_args()

    result = optimize_colormap(builtin_colormap("viridis"),
                               CvdSpec("deuteranomaly", 100.0),
                               method="max_range", n_out=256)
    result.name = "cividis"

    jab = srgb_to_jab(result.entries)
    deltas = np.linalg.norm(np.diff(jab, axis=0), axis=1)
    _, _, r2 = fit_line_ols(jab[:, 0])
    print(f"J' range: {jab[0, 0]:.2f} .. {jab[-1, 0]:.2f}   (r2 = {r2:.6f})")
    print(f"per-step delta: mean {deltas.mean():.4f}, max deviation "
          f"{np.max(np.abs(deltas - deltas.mean())):.4f}")
    print(f"clamp: {result.metadata['clamp']}")

    os.makedirs(os.path.dirname(args.snapshot), exist_ok=True)
    cio.export_table(result, args.snapshot, scale="unit")
    print(f"wrote {args.snapshot}")

    if args.dist:
        os.makedirs(args.dist, exist_ok=True)
        cio.export_table(result, os.path.join(args.dist, "cividis_bytes.txt"), scale="byte")
        cio.export_lut(result, os.path.join(args.dist, "cividis.lut"))
        cio.export_png(cio.ramp_raster(result, 512, 64),
                       os.path.join(args.dist, "cividis_ramp.png"), metadata=result)
        img = analyze.kovesi_test_image()
        cio.export_png(analyze.overlay(img, result),
                       os.path.join(args.dist, "cividis_testimage.png"), metadata=result)
        print(f"wrote artifacts to {args.dist}/")


if __name__ == "__main__":
    main()
