"""Colormap container and the built-in map registry.

Built-ins: ``viridis`` (embedded original table), ``jet`` (classic
piecewise-linear ramp), ``grayscale-jp`` (achromatic with linear J'),
and ``cividis`` (regenerated by the optimization pipeline on first use,
not hardcoded).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cmapopt import _cmap_data
from cmapopt.colorspace import DEFAULT_VIEWING_CONDITIONS, clamp_gamut, jab_to_srgb

__all__ = ["Colormap", "builtin_colormap", "builtin_names", "resample_by_index"]


@dataclass
class Colormap:
    """An ordered array of sRGB entries plus provenance metadata."""

    entries: np.ndarray
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if e.ndim != 2 or e.shape[1] != 3 or e.shape[0] < 2:
            raise ValueError(f"entries must be an (N >= 2, 3) array, got shape {e.shape}")
        self.entries = e

    def __len__(self) -> int:
        return self.entries.shape[0]


def resample_by_index(entries: np.ndarray, n_out: int) -> np.ndarray:
    """Piecewise-linear channel interpolation against normalized index."""
    entries = np.asarray(entries, dtype=float)
    if n_out < 2:
        raise ValueError(f"n_out must be >= 2, got {n_out}")
    x_old = np.linspace(0.0, 1.0, entries.shape[0])
    x_new = np.linspace(0.0, 1.0, n_out)
    return np.stack([np.interp(x_new, x_old, entries[:, k]) for k in range(entries.shape[1])], axis=1)


_JET_SEGMENTS = {
    "r": ([0.0, 0.35, 0.66, 0.89, 1.0], [0.0, 0.0, 1.0, 1.0, 0.5]),
    "g": ([0.0, 0.125, 0.375, 0.64, 0.91, 1.0], [0.0, 0.0, 1.0, 1.0, 0.0, 0.0]),
    "b": ([0.0, 0.11, 0.34, 0.65, 1.0], [0.5, 1.0, 1.0, 0.0, 0.0]),
}


def _jet(n: int = 256) -> np.ndarray:
    x = np.linspace(0.0, 1.0, n)
    return np.stack([np.interp(x, *_JET_SEGMENTS[c]) for c in "rgb"], axis=1)


def _grayscale_jp(n: int = 256) -> np.ndarray:
    # Achromatic ramp with J' linear from 0 to 100; exactly neutral by
    # construction of the colorspace module.
    jab = np.zeros((n, 3))
    jab[:, 0] = np.linspace(0.0, 100.0, n)
    return clamp_gamut(jab_to_srgb(jab, DEFAULT_VIEWING_CONDITIONS))


_cividis_cache: dict[int, "Colormap"] = {}


def _cividis(n: int = 256) -> Colormap:
    # Regenerated from viridis by the full pipeline (deuteranomaly 100,
    # max-range linearization) rather than shipped as a table.
    if n not in _cividis_cache:
        from cmapopt.cvd import CvdSpec
        from cmapopt.optimize import optimize_colormap

        result = optimize_colormap(
            builtin_colormap("viridis"),
            CvdSpec("deuteranomaly", 100.0),
            method="max_range",
            n_out=n,
        )
        result.name = "cividis"
        _cividis_cache[n] = result
    return _cividis_cache[n]


_BUILTINS = ("viridis", "jet", "grayscale-jp", "cividis")


def builtin_names() -> tuple[str, ...]:
    return _BUILTINS


def builtin_colormap(name: str, n: int = 256) -> Colormap:
    """Return a built-in colormap by name (default 256 entries)."""
    if name == "viridis":
        entries = np.asarray(_cmap_data.VIRIDIS, dtype=float)
        if n != entries.shape[0]:
            entries = resample_by_index(entries, n)
        return Colormap(entries, "viridis", {"source": "builtin"})
    if name == "jet":
        return Colormap(_jet(n), "jet", {"source": "builtin"})
    if name == "grayscale-jp":
        return Colormap(_grayscale_jp(n), "grayscale-jp",
                        {"source": "builtin", "viewing_conditions": DEFAULT_VIEWING_CONDITIONS.to_dict()})
    if name == "cividis":
        cmap = _cividis(n)
        return Colormap(cmap.entries.copy(), cmap.name, dict(cmap.metadata))
    raise KeyError(f"unknown colormap {name!r}; built-ins are {', '.join(_BUILTINS)}")
