"""Command-line interface.

Subcommands: ``optimize``, ``simulate``, ``cdps``, ``testimage``,
``gamut-fraction``, ``list``.  Defaults follow the package's standard
configuration: deuteranomaly at severity 100, max-range linearization,
256 output entries.
"""

from __future__ import annotations

import argparse
import io as _stdio
import os
import sys

import numpy as np
from PIL import Image

import cmapopt
from cmapopt.analyze import cdps, kovesi_test_image, overlay
from cmapopt.colormaps import builtin_names
from cmapopt.colorspace import DEFAULT_VIEWING_CONDITIONS
from cmapopt.cvd import CVD_KINDS, CvdSpec, gamut_fraction, simulate_cvd
from cmapopt.io import (
    export_cdps,
    export_lut,
    export_png,
    export_table,
    load_colormap,
    load_viewing_conditions,
    ramp_raster,
)
from cmapopt.optimize import InfeasibleBoundsError, InfeasiblePointError, optimize_colormap

_METHODS = {"fit": "fit_original", "max-range": "max_range"}


def _add_cvd_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cvd-type", choices=CVD_KINDS, default="deuteranomaly")
    p.add_argument("--severity", type=float, default=100.0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cmapopt",
                                     description="CVD-aware colormap optimization and evaluation")
    parser.add_argument("--version", action="version", version=f"cmapopt {cmapopt.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the optimization pipeline on a colormap")
    p.add_argument("--input", required=True, help="colormap file or built-in name")
    _add_cvd_args(p)
    p.add_argument("--method", choices=sorted(_METHODS), default="max-range")
    p.add_argument("--size", type=int, default=256, help="output entry count")
    p.add_argument("--out-table")
    p.add_argument("--out-lut")
    p.add_argument("--out-png")
    p.add_argument("--scale", choices=("unit", "byte"), default="unit")
    p.add_argument("--viewing-conditions", help="JSON file overriding the defaults")

    p = sub.add_parser("simulate", help="apply CVD simulation to a colormap or PNG image")
    p.add_argument("--input", required=True, help="colormap file/name, or a .png image")
    _add_cvd_args(p)
    p.add_argument("--out-table")
    p.add_argument("--out-png")
    p.add_argument("--scale", choices=("unit", "byte"), default="unit")

    p = sub.add_parser("cdps", help="colormap-data perceptual sensitivity regression")
    p.add_argument("--image", required=True, help="scalar image (.png, .npy, or text table)")
    p.add_argument("--path", required=True, help="CSV of x,y pixel coordinates")
    p.add_argument("--map", required=True, help="colormap file or built-in name")
    p.add_argument("--out-csv", help="write data/perceptual delta pairs (+ JSON sidecar)")
    p.add_argument("--viewing-conditions")
    p.add_argument("--no-normalize", action="store_true",
                   help="trust that the image is already in [0, 1]")

    p = sub.add_parser("testimage", help="generate the sine-on-ramp contrast test image")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--wavelength", type=float, default=8.0)
    p.add_argument("--amplitude", type=float, default=0.05)
    p.add_argument("--overlay", help="render through this colormap instead of grayscale")
    p.add_argument("--out", required=True, help="output PNG")

    p = sub.add_parser("gamut-fraction", help="fraction of sRGB surviving CVD, per severity")
    p.add_argument("--cvd-type", choices=CVD_KINDS, default="deuteranomaly")
    p.add_argument("--severity", type=float, nargs="+", default=[100.0])
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--out", help="write severity,fraction CSV")

    sub.add_parser("list", help="list built-in colormaps")
    return parser


def _load_scalar_image(path: str, normalize: bool) -> np.ndarray:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".png":
        img = np.asarray(Image.open(path).convert("L"), dtype=float) / 255.0
    elif ext == ".npy":
        img = np.asarray(np.load(path), dtype=float)
    else:
        try:
            img = np.loadtxt(path, delimiter=",", dtype=float)
        except ValueError:
            img = np.loadtxt(path, dtype=float)
    if img.ndim != 2:
        raise ValueError(f"{path}: expected a 2-D scalar image, got shape {img.shape}")
    if normalize:
        lo, hi = float(img.min()), float(img.max())
        img = (img - lo) / (hi - lo) if hi > lo else np.zeros_like(img)
    return img


def _load_path_file(path: str) -> np.ndarray:
    try:
        coords = np.loadtxt(path, delimiter=",", dtype=float)
    except ValueError:
        coords = np.loadtxt(path, dtype=float)
    coords = np.atleast_2d(coords)
    if coords.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns (x, y), got {coords.shape[1]}")
    return coords


def _print_table(cmap) -> None:
    buf = _stdio.StringIO()
    for r, g, b in cmap.entries:
        buf.write(f"{r:.8f} {g:.8f} {b:.8f}\n")
    sys.stdout.write(buf.getvalue())


def _cmd_optimize(args) -> int:
    vc = load_viewing_conditions(args.viewing_conditions) if args.viewing_conditions \
        else DEFAULT_VIEWING_CONDITIONS
    cmap = load_colormap(args.input)
    spec = CvdSpec(args.cvd_type, args.severity)
    try:
        result = optimize_colormap(cmap, spec, method=_METHODS[args.method],
                                   vc=vc, n_out=args.size)
    except (InfeasibleBoundsError, InfeasiblePointError) as exc:
        other = "fit" if args.method == "max-range" else "max-range"
        print(f"error: {args.method} linearization infeasible for this input ({exc}); "
              f"try --method {other}", file=sys.stderr)
        return 1
    wrote = False
    if args.out_table:
        export_table(result, args.out_table, scale=args.scale)
        wrote = True
    if args.out_lut:
        export_lut(result, args.out_lut)
        wrote = True
    if args.out_png:
        export_png(ramp_raster(result), args.out_png, metadata=result)
        wrote = True
    if not wrote:
        _print_table(result)
    return 0


def _cmd_simulate(args) -> int:
    spec = CvdSpec(args.cvd_type, args.severity)
    if args.input.lower().endswith(".png"):
        rgb = np.asarray(Image.open(args.input).convert("RGB"), dtype=float) / 255.0
        out = simulate_cvd(rgb, spec)
        if not args.out_png:
            raise ValueError("--out-png is required when simulating a PNG image")
        export_png(out, args.out_png, metadata={"source": args.input, "cvd": spec.to_dict()})
        return 0
    cmap = load_colormap(args.input)
    cmap.entries = simulate_cvd(cmap.entries, spec)
    cmap.name = f"{cmap.name}-{spec.kind}-{spec.severity:g}"
    cmap.metadata = dict(cmap.metadata, cvd=spec.to_dict())
    if args.out_table:
        export_table(cmap, args.out_table, scale=args.scale)
    if args.out_png:
        export_png(ramp_raster(cmap), args.out_png, metadata=cmap)
    if not (args.out_table or args.out_png):
        _print_table(cmap)
    return 0


def _cmd_cdps(args) -> int:
    vc = load_viewing_conditions(args.viewing_conditions) if args.viewing_conditions \
        else DEFAULT_VIEWING_CONDITIONS
    image = _load_scalar_image(args.image, normalize=not args.no_normalize)
    path = _load_path_file(args.path)
    cmap = load_colormap(args.map)
    result = cdps(image, path, cmap, vc)
    print(f"slope={result.slope:.6f} r2={result.r2:.6f} n_pairs={result.n_pairs}")
    if args.out_csv:
        export_cdps(result, args.out_csv,
                    {"image": args.image, "path": args.path, "map": cmap.name,
                     "viewing_conditions": vc.to_dict()})
    return 0


def _cmd_testimage(args) -> int:
    img = kovesi_test_image(args.width, args.height, args.wavelength, args.amplitude)
    meta = {"width": args.width, "height": args.height,
            "wavelength_px": args.wavelength, "max_amplitude": args.amplitude}
    if args.overlay:
        cmap = load_colormap(args.overlay)
        export_png(overlay(img, cmap), args.out, metadata={**meta, "overlay": cmap.name})
    else:
        export_png(img, args.out, metadata=meta)
    return 0


def _cmd_gamut_fraction(args) -> int:
    rows = [(sev, gamut_fraction(args.cvd_type, sev, args.resolution))
            for sev in args.severity]
    for sev, frac in rows:
        print(f"{sev:g},{frac}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("severity,fraction\n")
            for sev, frac in rows:
                fh.write(f"{sev:g},{frac}\n")
    return 0


def _cmd_list(_args) -> int:
    for name in builtin_names():
        print(name)
    return 0


_COMMANDS = {
    "optimize": _cmd_optimize,
    "simulate": _cmd_simulate,
    "cdps": _cmd_cdps,
    "testimage": _cmd_testimage,
    "gamut-fraction": _cmd_gamut_fraction,
    "list": _cmd_list,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
