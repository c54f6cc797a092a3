#!/usr/bin/env python3
"""Sweep CVD severity and record the fraction of sRGB that survives as
distinct colors (the shrinking-gamut curve)."""

import argparse

from cmapopt.cvd import CVD_KINDS, gamut_fraction


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", choices=CVD_KINDS, default="deuteranomaly")
    parser.add_argument("--step", type=int, default=10)
    parser.add_argument("--resolution", type=int, default=64)
    parser.add_argument("--out", help="CSV output path (default: stdout only)")
    args = parser.parse_args()

    rows = []
    for severity in range(0, 101, args.step):
        frac = gamut_fraction(args.kind, severity, args.resolution)
        rows.append((severity, frac))
        print(f"{severity:3d}  {frac:.4f}")

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("severity,fraction\n")
            for severity, frac in rows:
                fh.write(f"{severity},{frac}\n")
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
