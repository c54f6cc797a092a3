"""Colormap ingestion and export: text tables, ImageJ LUTs, PNGs.

Tables are plain text, one row per entry, three columns (R, G, B),
either unit floats or 0-255 bytes (auto-detected on load).  Lines
starting with ``#`` are metadata comments and are skipped.  The ImageJ
LUT format is exactly 768 bytes: 256 red bytes, 256 green, 256 blue.
Binary formats get a ``<path>.meta.json`` sidecar instead of an
embedded header.
"""

from __future__ import annotations

import json
import os
import warnings

import numpy as np
from PIL import Image

import cmapopt
from cmapopt.colormaps import Colormap, builtin_colormap, builtin_names, resample_by_index
from cmapopt.colorspace import ViewingConditions

__all__ = [
    "ColormapParseError",
    "UnknownColormapError",
    "load_colormap",
    "export_table",
    "export_lut",
    "export_png",
    "export_cdps",
    "ramp_raster",
    "load_viewing_conditions",
    "round_half_up_bytes",
]


class ColormapParseError(ValueError):
    """A colormap table could not be parsed; message carries row/column."""


class UnknownColormapError(KeyError):
    """Requested name is neither a file nor a registered built-in."""


def round_half_up_bytes(values) -> np.ndarray:
    """[0, 1] floats to 0-255 bytes, halves rounding up (the package's
    single byte-quantization rule)."""
    v = np.asarray(values, dtype=float)
    return np.clip(np.floor(v * 255.0 + 0.5), 0, 255).astype(np.uint8)


def _parse_table(text: str, origin: str) -> tuple[np.ndarray, str]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f for f in stripped.replace(",", " ").replace(";", " ").split() if f]
        if len(fields) != 3:
            raise ColormapParseError(
                f"{origin}:{lineno}: expected 3 columns, found {len(fields)}")
        row = []
        for col, field in enumerate(fields, start=1):
            try:
                value = float(field)
            except ValueError:
                raise ColormapParseError(
                    f"{origin}:{lineno}: column {col}: {field!r} is not a number") from None
            if not np.isfinite(value) or value < 0.0:
                raise ColormapParseError(
                    f"{origin}:{lineno}: column {col}: {field!r} is not a "
                    f"nonnegative channel value")
            row.append(value)
        rows.append(row)
    if len(rows) < 2:
        raise ColormapParseError(f"{origin}: a colormap needs at least 2 rows")
    values = np.asarray(rows, dtype=float)
    if values.max() > 255.0:
        raise ColormapParseError(
            f"{origin}: channel values exceed 255; expected unit floats or 0-255 bytes")
    scale = "byte" if values.max() > 1.0 else "unit"
    if scale == "byte":
        values = values / 255.0
    return values, scale


def load_colormap(path_or_name: str, n: int = 256) -> Colormap:
    """Load a colormap table from a file, or a built-in by name.

    Files may be CSV, TSV or whitespace-separated, in unit or byte
    scale; the detected scale is recorded in the metadata.  ``n`` only
    applies to generated built-ins.
    """
    if os.path.exists(path_or_name):
        with open(path_or_name, "r", encoding="utf-8") as fh:
            entries, scale = _parse_table(fh.read(), path_or_name)
        name = os.path.splitext(os.path.basename(path_or_name))[0]
        return Colormap(entries, name, {"source": path_or_name, "scale": scale})
    try:
        return builtin_colormap(path_or_name, n)
    except KeyError:
        raise UnknownColormapError(
            f"{path_or_name!r} is not a file or a built-in colormap; "
            f"built-ins: {', '.join(builtin_names())}") from None


def _metadata_header(cmap: Colormap, extra: dict | None = None) -> str:
    meta = {"name": cmap.name, "tool_version": cmapopt.__version__}
    meta.update(cmap.metadata)
    meta.update(extra or {})
    lines = [f"# {key} = {json.dumps(value)}" for key, value in meta.items()]
    return "\n".join(lines)


def _require_displayable(cmap: Colormap) -> None:
    if np.any(cmap.entries < 0.0) or np.any(cmap.entries > 1.0):
        raise ValueError("colormap entries must be clamped to [0, 1] before export")


def export_table(cmap: Colormap, path: str, scale: str = "unit") -> None:
    """Write an N-row R G B table; ``scale`` is ``unit`` or ``byte``."""
    if scale not in ("unit", "byte"):
        raise ValueError(f"scale must be 'unit' or 'byte', got {scale!r}")
    _require_displayable(cmap)
    header = _metadata_header(cmap, {"scale": scale})
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        if scale == "byte":
            for r, g, b in round_half_up_bytes(cmap.entries):
                fh.write(f"{r} {g} {b}\n")
        else:
            for r, g, b in cmap.entries:
                fh.write(f"{r:.8f} {g:.8f} {b:.8f}\n")


def _sidecar(path: str, cmap_or_meta, extra: dict | None = None) -> None:
    if isinstance(cmap_or_meta, Colormap):
        meta = {"name": cmap_or_meta.name, "tool_version": cmapopt.__version__}
        meta.update(cmap_or_meta.metadata)
    else:
        meta = {"tool_version": cmapopt.__version__, **cmap_or_meta}
    meta.update(extra or {})
    with open(path + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, default=str)
        fh.write("\n")


def export_lut(cmap: Colormap, path: str) -> None:
    """Write the 768-byte ImageJ LUT (256 R bytes, 256 G, 256 B).

    Colormaps with other sizes are resampled to 256 entries first, with
    a warning.
    """
    _require_displayable(cmap)
    entries = cmap.entries
    if entries.shape[0] != 256:
        warnings.warn(f"resampling {entries.shape[0]}-entry colormap to 256 for LUT export")
        entries = resample_by_index(entries, 256)
    data = round_half_up_bytes(entries)
    with open(path, "wb") as fh:
        fh.write(data[:, 0].tobytes())
        fh.write(data[:, 1].tobytes())
        fh.write(data[:, 2].tobytes())
    _sidecar(path, cmap, {"format": "imagej-lut-768"})


def ramp_raster(cmap: Colormap, width: int = 256, height: int = 32) -> np.ndarray:
    """A width x height strip sweeping the colormap left to right."""
    from cmapopt.analyze import value_to_color

    v = np.linspace(0.0, 1.0, width)
    row = value_to_color(v, cmap)
    return np.tile(row[None, :, :], (height, 1, 1))


def export_png(raster, path: str, metadata: dict | None = None) -> None:
    """Write an (H, W, 3) float raster in [0, 1] as an 8-bit RGB PNG."""
    raster = np.asarray(raster, dtype=float)
    if raster.ndim == 2:
        raster = np.repeat(raster[:, :, None], 3, axis=2)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValueError(f"raster must be (H, W, 3) or (H, W), got shape {raster.shape}")
    Image.fromarray(round_half_up_bytes(raster), mode="RGB").save(path, format="PNG")
    if metadata is not None:
        _sidecar(path, metadata)


def export_cdps(result, path_csv: str, metadata: dict | None = None) -> None:
    """Write CDPS pairs as CSV plus a JSON sidecar with slope/r2."""
    with open(path_csv, "w", encoding="utf-8") as fh:
        fh.write("data_delta,perceptual_delta\n")
        for d, p in zip(result.data_deltas, result.perceptual_deltas):
            fh.write(f"{d:.10g},{p:.10g}\n")
    _sidecar(path_csv, metadata or {},
             {"slope": result.slope, "r2": result.r2, "n_pairs": result.n_pairs})


def load_viewing_conditions(path: str) -> ViewingConditions:
    """Read viewing conditions from JSON.

    Recognized keys: ``whitepoint`` (3 XYZ values, Y = 100 scale),
    ``L_A`` (or ``adapting_luminance``), ``Y_b`` (or
    ``background_luminance_factor``), ``surround``,
    ``discount_illuminant``.  Missing keys keep their defaults.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    kwargs = {}
    aliases = {
        "whitepoint": "whitepoint",
        "L_A": "adapting_luminance",
        "adapting_luminance": "adapting_luminance",
        "Y_b": "background_luminance_factor",
        "background_luminance_factor": "background_luminance_factor",
        "surround": "surround",
        "discount_illuminant": "discount_illuminant",
    }
    for key, value in raw.items():
        if key not in aliases:
            raise ValueError(f"unknown viewing-conditions key {key!r}")
        kwargs[aliases[key]] = tuple(value) if aliases[key] == "whitepoint" else value
    return ViewingConditions(**kwargs)
