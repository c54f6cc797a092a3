"""Colormap evaluation: perceptual deltas, CDPS, and Kovesi test images.

The CDPS ("colormap-data perceptual sensitivity") regression relates
perceptual color differences of rendered values to the underlying data
differences.  Perceptual deltas are normalized by the slope of an
achromatic linear-J' reference evaluated on the same sample pairs, so
that reference itself always scores slope 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cmapopt.colormaps import Colormap
from cmapopt.colorspace import DEFAULT_VIEWING_CONDITIONS, ViewingConditions, srgb_to_jab

__all__ = [
    "CdpsResult",
    "perceptual_deltas",
    "value_to_color",
    "cdps",
    "kovesi_test_image",
    "overlay",
    "regress_through_origin",
]

#: J' span of the achromatic reference colormap over normalized data [0, 1].
GRAY_JP_SPAN = 100.0


@dataclass
class CdpsResult:
    """Paired data/perceptual deltas plus their regression line.

    ``perceptual_deltas`` are already divided by the grayscale-reference
    slope; ``slope`` and ``r2`` come from a least-squares fit through
    the origin (zero data difference must mean zero perceptual
    difference, and acceptance-style ramp paths have constant data
    deltas, for which a free-intercept fit is undefined).
    """

    data_deltas: np.ndarray
    perceptual_deltas: np.ndarray
    slope: float
    r2: float

    @property
    def n_pairs(self) -> int:
        return self.data_deltas.size


def regress_through_origin(x, y) -> tuple[float, float]:
    """Least-squares slope of y = m*x and its uncentered r2.

    r2 = 1 - sum((y - m*x)^2) / sum(y^2); defined as 1.0 when the
    residuals vanish.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sxx = np.sum(x * x)
    if sxx == 0.0:
        raise ValueError("regression undefined: all data deltas are zero")
    m = float(np.sum(x * y) / sxx)
    ss_res = np.sum((y - m * x) ** 2)
    ss_tot = np.sum(y * y)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return m, float(r2)


def perceptual_deltas(cmap: Colormap, vc: ViewingConditions | None = None) -> np.ndarray:
    """Euclidean J'a'b' distance between consecutive colormap entries."""
    jab = srgb_to_jab(cmap.entries, vc)
    return np.linalg.norm(np.diff(jab, axis=0), axis=1)


def value_to_color(v, cmap: Colormap):
    """Nearest-entry lookup for normalized values in [0, 1].

    Index is round(v * (N - 1)) with halves rounding up.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v < 0.0) or np.any(v > 1.0):
        raise ValueError("values must lie in [0, 1]")
    n = len(cmap)
    idx = np.floor(v * (n - 1) + 0.5).astype(int)
    return cmap.entries[np.clip(idx, 0, n - 1)]


def _sample_path(image: np.ndarray, path) -> np.ndarray:
    path = np.asarray(path)
    if path.ndim != 2 or path.shape[1] != 2:
        raise ValueError("path must be an (N, 2) array of (x, y) coordinates")
    x = np.floor(path[:, 0] + 0.5).astype(int)
    y = np.floor(path[:, 1] + 0.5).astype(int)
    h, w = image.shape
    if np.any(x < 0) or np.any(x >= w) or np.any(y < 0) or np.any(y >= h):
        raise ValueError("path coordinates fall outside the image")
    return image[y, x]


def cdps(image, path, cmap: Colormap,
         vc: ViewingConditions | None = None) -> CdpsResult:
    """CDPS regression of a colormap against image data along a path.

    ``image`` is a normalized 2-D array of values in [0, 1]; ``path``
    is an ordered list of (x, y) pixel coordinates (nearest-pixel
    sampling).  Data deltas are |v[i+1] - v[i]| of consecutive samples;
    perceptual deltas are the J'a'b' distances of the rendered colors,
    divided by the slope of the linear-J' achromatic reference on the
    same pairs.
    """
    vc = vc or DEFAULT_VIEWING_CONDITIONS
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError(f"image must be 2-D, got shape {image.shape}")
    values = _sample_path(image, path)
    if values.size < 3:
        raise ValueError("path must contain at least 3 samples")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError("image must be normalized to [0, 1] before cdps")

    data = np.abs(np.diff(values))
    colors = value_to_color(values, cmap)
    jab = srgb_to_jab(colors, vc)
    raw = np.linalg.norm(np.diff(jab, axis=0), axis=1)

    # achromatic linear-J' reference on the same pairs
    gray = GRAY_JP_SPAN * data
    s_gray, _ = regress_through_origin(data, gray)
    perceptual = raw / s_gray

    slope, r2 = regress_through_origin(data, perceptual)
    return CdpsResult(data, perceptual, slope, r2)


def kovesi_test_image(width: int = 512, height: int = 128,
                      wavelength_px: float = 8.0,
                      max_amplitude: float = 0.05) -> np.ndarray:
    """Sine-on-ramp contrast test image, values in [0, 1].

    Row 0 is the top: the sine amplitude ramps from ``max_amplitude``
    there down to zero at the bottom row, which is a clean 0..1 ramp.
    """
    if wavelength_px <= 0:
        raise ValueError("wavelength_px must be positive")
    if height < 2:
        raise ValueError("height must be at least 2 rows")
    if width < 2 * wavelength_px:
        raise ValueError("width must be at least two wavelengths")
    x = np.arange(width)
    y = np.arange(height)
    amplitude = max_amplitude * (1.0 - y / (height - 1.0))
    ramp = x / (width - 1.0)
    img = ramp[None, :] + amplitude[:, None] * np.sin(2.0 * np.pi * x / wavelength_px)[None, :]
    return np.clip(img, 0.0, 1.0)


def overlay(image, cmap: Colormap) -> np.ndarray:
    """Render a normalized scalar image through a colormap.

    Returns an (H, W, 3) float RGB raster with the image's dimensions.
    """
    image = np.asarray(image, dtype=float)
    return value_to_color(image, cmap)
