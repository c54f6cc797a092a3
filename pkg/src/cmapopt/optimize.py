"""Colormap optimization pipeline.

Stages: simulate the input map as seen with a chosen CVD, convert to
CIECAM02-UCS, resample the (a', b') hue path to equal perceptual
spacing, replace J' with a straight line (either a least-squares fit of
the original trend or the steepest line that stays inside the sRGB
gamut), then convert back to sRGB and clamp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cmapopt.colormaps import Colormap
from cmapopt.colorspace import (
    DEFAULT_VIEWING_CONDITIONS,
    ViewingConditions,
    clamp_gamut,
    jab_to_srgb,
    srgb_to_jab,
)
from cmapopt.cvd import CvdSpec, simulate_cvd

__all__ = [
    "LINEARIZATION_METHODS",
    "JpBounds",
    "DegeneratePathError",
    "InfeasiblePointError",
    "InfeasibleBoundsError",
    "colormap_to_cvd_jab",
    "resample_equidistant",
    "compute_jp_bounds",
    "fit_line_ols",
    "linearize_fit_original",
    "max_range_line",
    "linearize_max_range",
    "optimize_colormap",
]

LINEARIZATION_METHODS = ("fit_original", "max_range")

#: In-gamut test tolerance for channel values, and the J' precision of
#: the gamut boundary search.
GAMUT_EPS = 1e-6
JP_PRECISION = 1e-3


class DegeneratePathError(ValueError):
    """The (a', b') path has zero length, so arc-length resampling is undefined."""


class InfeasiblePointError(ValueError):
    """Some (a', b') point admits no J' in [0, 100] inside the sRGB gamut."""


class InfeasibleBoundsError(ValueError):
    """No straight J' line fits inside the per-index [jmin, jmax] bounds."""


@dataclass
class JpBounds:
    """Per-index J' range that maps to a valid sRGB color at that
    index's (a', b')."""

    jmin: np.ndarray
    jmax: np.ndarray

    def __post_init__(self):
        self.jmin = np.asarray(self.jmin, dtype=float)
        self.jmax = np.asarray(self.jmax, dtype=float)
        if self.jmin.shape != self.jmax.shape or self.jmin.ndim != 1:
            raise ValueError("jmin and jmax must be 1-D arrays of equal length")

    def __len__(self) -> int:
        return self.jmin.size


def colormap_to_cvd_jab(cmap: Colormap, spec: CvdSpec,
                        vc: ViewingConditions | None = None) -> np.ndarray:
    """CVD-simulate each entry and convert to J'a'b'; order preserved."""
    return srgb_to_jab(simulate_cvd(cmap.entries, spec), vc)


def _hue_path_length(curve: np.ndarray) -> float:
    d = np.diff(curve[:, 1:], axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def resample_equidistant(curve, n_out: int = 256, dense_n: int = 10000) -> np.ndarray:
    """Resample a J'a'b' curve to equal (a', b') chord spacing.

    The curve is densified to ``dense_n`` points by piecewise-linear
    interpolation against index (the original vertices are kept in the
    dense grid, so the polyline geometry and its arc length are exact),
    then ``n_out`` points are picked at equal steps of cumulative arc
    length.  J' rides along, interpolated at the same arc positions.
    Endpoints are the original endpoints and total arc length is
    conserved up to corner-cutting between output samples.
    """
    curve = np.asarray(curve, dtype=float)
    n = curve.shape[0]
    if n_out < 2:
        raise ValueError(f"n_out must be >= 2, got {n_out}")
    u_orig = np.arange(n, dtype=float)
    u = np.union1d(np.linspace(0.0, n - 1.0, dense_n), u_orig)
    dense = np.stack([np.interp(u, u_orig, curve[:, k]) for k in range(3)], axis=1)

    seg = np.hypot(np.diff(dense[:, 1]), np.diff(dense[:, 2]))
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total <= 0.0:
        raise DegeneratePathError("all (a', b') points coincide; nothing to resample")

    keep = np.concatenate([[True], seg > 0.0])  # make s strictly increasing
    s, dense = s[keep], dense[keep]
    targets = np.linspace(0.0, total, n_out)
    out = np.stack([np.interp(targets, s, dense[:, k]) for k in range(3)], axis=1)
    out[0], out[-1] = curve[0], curve[-1]
    return out


def _valid_jp(jp: np.ndarray, ab: np.ndarray, vc: ViewingConditions) -> np.ndarray:
    jab = np.concatenate([jp[..., None], np.broadcast_to(ab, jp.shape + (2,))], axis=-1)
    rgb = jab_to_srgb(jab, vc, undefined="nan")
    return ((rgb >= -GAMUT_EPS) & (rgb <= 1.0 + GAMUT_EPS)).all(axis=-1)


def _gamut_violation(jp: np.ndarray, ab: np.ndarray, vc: ViewingConditions) -> np.ndarray:
    # worst channel excursion beyond [0, 1]; <= 0 means in gamut
    jab = np.concatenate([jp[..., None], np.broadcast_to(ab, jp.shape + (2,))], axis=-1)
    rgb = jab_to_srgb(jab, vc, undefined="nan")
    v = np.max(np.maximum(rgb - (1.0 + GAMUT_EPS), -GAMUT_EPS - rgb), axis=-1)
    return np.where(np.isfinite(v), v, np.inf)


def _rescue_sliver(ab: np.ndarray, fine: np.ndarray, fine_violation: np.ndarray,
                   vc: ViewingConditions) -> np.ndarray:
    # Gamut-extreme (a', b') points (e.g. a fully saturated yellow) admit
    # a J' band narrower than any fixed scan step.  Zoom in on the
    # violation minimum; NaN marks points that are truly infeasible.
    centers = fine[np.argmin(fine_violation, axis=0)]
    span = fine[1] - fine[0]
    for _ in range(5):
        offsets = np.linspace(-span, span, 41)
        local = np.clip(centers[None, :] + offsets[:, None], 0.0, 100.0)
        v = _gamut_violation(local, ab, vc)
        centers = local[np.argmin(v, axis=0), np.arange(ab.shape[0])]
        span /= 10.0
    good = _valid_jp(centers, ab, vc)
    return np.where(good, centers, np.nan)


def _scan_brackets(grid: np.ndarray, valid: np.ndarray):
    # Outermost valid grid values plus their flanking invalid neighbors;
    # zero-width brackets where the valid band touches the grid ends.
    first = np.argmax(valid, axis=0)
    last = valid.shape[0] - 1 - np.argmax(valid[::-1], axis=0)
    jmin_lo = grid[np.maximum(first - 1, 0)]
    jmin_hi = grid[first]
    jmax_lo = grid[last]
    jmax_hi = grid[np.minimum(last + 1, grid.size - 1)]
    return jmin_lo, jmin_hi, jmax_lo, jmax_hi


def compute_jp_bounds(curve, vc: ViewingConditions | None = None,
                      precision: float = JP_PRECISION) -> JpBounds:
    """Min and max J' giving a valid sRGB color at each point's (a', b').

    Scans J' in [0, 100], then bisects each boundary down to
    ``precision``.  Raises :class:`InfeasiblePointError` if some (a', b')
    lies entirely outside the sRGB gamut.
    """
    vc = vc or DEFAULT_VIEWING_CONDITIONS
    curve = np.asarray(curve, dtype=float)
    ab = curve[:, 1:]
    n = curve.shape[0]

    grid = np.linspace(0.0, 100.0, 1001)
    valid = _valid_jp(grid[:, None] * np.ones((1, n)), ab, vc)  # (grid, n)
    jmin_lo, jmin_hi, jmax_lo, jmax_hi = _scan_brackets(grid, valid)

    missing = ~valid.any(axis=0)
    if np.any(missing):
        # the valid band may be narrower than the scan step; retry finer
        cols = np.flatnonzero(missing)
        fine = np.linspace(0.0, 100.0, 10001)
        fine_violation = _gamut_violation(fine[:, None] * np.ones((1, cols.size)), ab[cols], vc)
        fine_valid = fine_violation <= 0.0
        caught = fine_valid.any(axis=0)
        f_lo, f_hi, x_lo, x_hi = _scan_brackets(fine, fine_valid)
        sub = np.flatnonzero(~caught)
        if sub.size:
            seeds = _rescue_sliver(ab[cols[sub]], fine, fine_violation[:, sub], vc)
            bad = cols[sub[~np.isfinite(seeds)]]
            if bad.size:
                raise InfeasiblePointError(
                    f"{bad.size} point(s) admit no J' in [0, 100] inside the sRGB gamut; "
                    f"first at index {bad[0]} with (a', b') = "
                    f"({ab[bad[0], 0]:.3f}, {ab[bad[0], 1]:.3f})")
            step = fine[1] - fine[0]
            f_lo[sub] = np.maximum(seeds - step, 0.0)
            f_hi[sub] = seeds
            x_lo[sub] = seeds
            x_hi[sub] = np.minimum(seeds + step, 100.0)
        jmin_lo[cols], jmin_hi[cols] = f_lo, f_hi
        jmax_lo[cols], jmax_hi[cols] = x_lo, x_hi

    # lower boundary: hi side is valid, bisect toward it
    lo, hi = jmin_lo.copy(), jmin_hi.copy()
    while np.max(hi - lo) > precision:
        mid = 0.5 * (lo + hi)
        ok = _valid_jp(mid, ab, vc)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    jmin = hi

    # upper boundary: lo side is valid
    lo, hi = jmax_lo.copy(), jmax_hi.copy()
    while np.max(hi - lo) > precision:
        mid = 0.5 * (lo + hi)
        ok = _valid_jp(mid, ab, vc)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    jmax = lo

    return JpBounds(jmin, jmax)


def fit_line_ols(values) -> tuple[float, float, float]:
    """Least-squares line of ``values`` against index.

    Returns (slope, intercept, r2); r2 is 1.0 for an exactly constant
    input (the fit reproduces it with zero residual).
    """
    y = np.asarray(values, dtype=float)
    x = np.arange(y.size, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - (intercept + slope * x)) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r2)


def linearize_fit_original(curve) -> np.ndarray:
    """Replace J' with its own least-squares line; (a', b') untouched."""
    curve = np.asarray(curve, dtype=float)
    slope, intercept, _ = fit_line_ols(curve[:, 0])
    out = curve.copy()
    out[:, 0] = intercept + slope * np.arange(curve.shape[0])
    return out


def max_range_line(bounds: JpBounds, direction: int = 1,
                   tol: float = 1e-6) -> tuple[float, float]:
    """Steepest line jmin[t] <= b + m*t <= jmax[t], as (slope, intercept).

    Maximizes ``direction * m`` exactly by enumerating the vertices of
    the feasible (intercept, slope) polygon: each candidate pins a lower
    bound at one index and an upper bound at another.  Ties in slope are
    broken toward the brighter line (larger midpoint).  Raises
    :class:`InfeasibleBoundsError` when the feasible set is empty.
    """
    jmin, jmax = bounds.jmin, bounds.jmax
    n = len(bounds)
    if n < 2:
        raise ValueError("need at least 2 indices")
    t = np.arange(n, dtype=float)

    with np.errstate(divide="ignore", invalid="ignore"):
        m = (jmin[:, None] - jmax[None, :]) / (t[:, None] - t[None, :])
        beta = jmin[:, None] - m * t[:, None]
    off_diag = ~np.eye(n, dtype=bool)
    cand_m = m[off_diag]
    cand_b = beta[off_diag]

    feasible = np.zeros(cand_m.size, dtype=bool)
    chunk = 8192
    for start in range(0, cand_m.size, chunk):
        cm = cand_m[start:start + chunk]
        cb = cand_b[start:start + chunk]
        line = cb[:, None] + cm[:, None] * t[None, :]
        feasible[start:start + chunk] = (
            (line >= jmin[None, :] - tol) & (line <= jmax[None, :] + tol)).all(axis=1)
    if not np.any(feasible):
        raise InfeasibleBoundsError(
            "no straight J' line fits inside the available [jmin, jmax] range")

    cm, cb = cand_m[feasible], cand_b[feasible]
    score = direction * cm
    near_best = score >= score.max() - 1e-9
    mid = cb + cm * (n - 1) / 2.0
    pick = np.flatnonzero(near_best)[np.argmax(mid[near_best])]
    return float(cm[pick]), float(cb[pick])


def linearize_max_range(curve, bounds: JpBounds) -> np.ndarray:
    """Replace J' with the steepest in-gamut line matching the original
    trend direction; (a', b') untouched."""
    curve = np.asarray(curve, dtype=float)
    direction = 1 if curve[-1, 0] >= curve[0, 0] else -1
    slope, intercept = max_range_line(bounds, direction)
    out = curve.copy()
    out[:, 0] = intercept + slope * np.arange(curve.shape[0])
    return out


def optimize_colormap(cmap: Colormap, spec: CvdSpec | None = None,
                      method: str = "max_range",
                      vc: ViewingConditions | None = None,
                      n_out: int = 256, dense_n: int = 10000) -> Colormap:
    """Run the full pipeline and return the optimized colormap.

    Metadata on the result records every stage parameter plus clamp
    diagnostics (worst channel overshoot before clamping, and the mean
    relative J'a'b' shift the clamp introduced).
    """
    spec = spec or CvdSpec()
    vc = vc or DEFAULT_VIEWING_CONDITIONS
    if method not in LINEARIZATION_METHODS:
        raise ValueError(f"method must be one of {LINEARIZATION_METHODS}, got {method!r}")

    curve = colormap_to_cvd_jab(cmap, spec, vc)
    # a whole-map hue excursion of 0.01 UCS units is far below a JND:
    # treat it as numerically achromatic
    degenerate = _hue_path_length(curve) <= 1e-2
    if degenerate:
        # pure-lightness map: nothing to space along the hue path
        x_old = np.linspace(0.0, 1.0, curve.shape[0])
        x_new = np.linspace(0.0, 1.0, n_out)
        resampled = np.stack([np.interp(x_new, x_old, curve[:, k]) for k in range(3)], axis=1)
    else:
        resampled = resample_equidistant(curve, n_out, dense_n)

    fit_r2 = None
    if method == "max_range":
        bounds = compute_jp_bounds(resampled, vc)
        linearized = linearize_max_range(resampled, bounds)
    else:
        _, _, fit_r2 = fit_line_ols(resampled[:, 0])
        linearized = linearize_fit_original(resampled)
    slope = float(linearized[1, 0] - linearized[0, 0])
    intercept = float(linearized[0, 0])

    rgb_pre = jab_to_srgb(linearized, vc, undefined="nan")
    undefined_points = int(np.sum(~np.isfinite(rgb_pre).all(axis=1)))
    if undefined_points:
        rgb_pre = np.where(np.isfinite(rgb_pre), rgb_pre, 0.0)
    rgb = clamp_gamut(rgb_pre)

    max_overshoot = float(np.max(np.abs(rgb_pre - rgb)))
    jab_final = srgb_to_jab(rgb, vc)
    diff = np.linalg.norm(jab_final - linearized, axis=1)
    norm = np.linalg.norm(linearized, axis=1)
    ok = norm > 1e-9
    mean_rel = float(np.mean(diff[ok] / norm[ok])) if np.any(ok) else 0.0

    metadata = {
        "source": cmap.name or "unnamed",
        "cvd": spec.to_dict(),
        "method": method,
        "n_out": int(n_out),
        "dense_n": int(dense_n),
        "viewing_conditions": vc.to_dict(),
        "degenerate_hue_path": bool(degenerate),
        "line": {"slope": slope, "intercept": intercept},
        "fit_r2": fit_r2,
        "clamp": {
            "max_channel_overshoot": max_overshoot,
            "mean_relative_jab_error": mean_rel,
            "undefined_points": undefined_points,
        },
    }
    name = f"{cmap.name}-{spec.kind}-{spec.severity:g}-{method}" if cmap.name else "optimized"
    return Colormap(rgb, name, metadata)
