"""sRGB <-> CIECAM02-UCS (J'a'b') conversions.

Everything in this module is a pure function of its inputs.  Color
arguments are numpy arrays of shape (..., 3); the last axis holds either
(R, G, B) with nominal range [0, 1] or (J', a', b').  Euclidean distance
between J'a'b' triplets is the perceptual color-difference metric used
by every other module.

The appearance model needs viewing conditions; :class:`ViewingConditions`
carries the display-oriented defaults.  With the default
``discount_illuminant=True`` (complete chromatic adaptation) the
achromatic axis maps to a' = b' = 0 exactly, which the rest of the
package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from types import SimpleNamespace

import numpy as np

__all__ = [
    "ViewingConditions",
    "DEFAULT_VIEWING_CONDITIONS",
    "SURROUNDS",
    "srgb_to_linear",
    "linear_to_srgb",
    "srgb_to_xyz100",
    "xyz100_to_srgb",
    "xyz100_to_jmh",
    "jmh_to_xyz100",
    "xyz100_to_jab",
    "jab_to_xyz100",
    "srgb_to_jab",
    "jab_to_srgb",
    "clamp_gamut",
    "delta_e",
]


def _srgb_matrix() -> np.ndarray:
    # Linear RGB -> XYZ from the IEC 61966-2-1 primaries and D65 white,
    # derived exactly so that white (1,1,1) hits the whitepoint to the ulp.
    xy = np.array([[0.64, 0.33], [0.30, 0.60], [0.15, 0.06]])
    wx, wy = 0.3127, 0.3290
    cols = np.stack([xy[:, 0] / xy[:, 1],
                     np.ones(3),
                     (1.0 - xy[:, 0] - xy[:, 1]) / xy[:, 1]])
    white = np.array([wx / wy, 1.0, (1.0 - wx - wy) / wy])
    return cols * np.linalg.solve(cols, white)


M_RGB_TO_XYZ = _srgb_matrix()
M_XYZ_TO_RGB = np.linalg.inv(M_RGB_TO_XYZ)

#: XYZ of the sRGB D65 white, scaled to Y = 100.
D65_WHITE_XYZ100 = tuple(100.0 * M_RGB_TO_XYZ @ np.ones(3))

# CAT02 chromatic-adaptation and Hunt-Pointer-Estevez cone matrices.
_M_CAT02 = np.array([
    [0.7328, 0.4296, -0.1624],
    [-0.7036, 1.6975, 0.0061],
    [0.0030, 0.0136, 0.9834],
])
_M_HPE = np.array([
    [0.38971, 0.68898, -0.07868],
    [-0.22981, 1.18340, 0.04641],
    [0.0, 0.0, 1.0],
])
# The published cone-matrix rows sum to 1.00001 / 1.0 / 1.0; that rounding
# residue gives the adapted white a spurious chroma of ~5e-3 UCS units.
# Renormalizing pins the achromatic axis to a' = b' = 0 exactly and moves
# chromatic colors by < 1e-4.
_M_HPE = _M_HPE / _M_HPE.sum(axis=1, keepdims=True)
_M_CAT02_INV = np.linalg.inv(_M_CAT02)
_CAT02_TO_HPE = _M_HPE @ _M_CAT02_INV
_HPE_TO_CAT02 = _M_CAT02 @ np.linalg.inv(_M_HPE)

# Opponent/achromatic responses as a linear map of the adapted cone
# signals; the inverse model solves this 3x3 system.
_OPPONENT = np.array([
    [2.0, 1.0, 1.0 / 20.0],          # 2R + G + B/20  (= A/N_bb + 0.305)
    [1.0, -12.0 / 11.0, 1.0 / 11.0],  # a
    [1.0 / 9.0, 1.0 / 9.0, -2.0 / 9.0],  # b
])
_OPPONENT_INV = np.linalg.inv(_OPPONENT)

_T_COEF = 50000.0 / 13.0

# CAM02-UCS long/short-difference compromise coefficients (K_L = 1, so
# the metric is plain Euclidean).
_UCS_C1 = 0.007
_UCS_C2 = 0.0228

# F, c, N_c per surround.
SURROUNDS = {
    "average": (1.0, 0.69, 1.0),
    "dim": (0.9, 0.59, 0.9),
    "dark": (0.8, 0.525, 0.8),
}

# sRGB transfer-function breakpoints, paired so the two directions are
# exact inverses of each other.
_SRGB_KNEE = 0.04045
_LINEAR_KNEE = _SRGB_KNEE / 12.92


@dataclass(frozen=True)
class ViewingConditions:
    """CIECAM02 viewing conditions that fix the sRGB <-> J'a'b' mapping.

    Defaults are the self-luminous-display convention: D65 whitepoint,
    average surround, L_A = 64/(5*pi) cd/m^2 (a 64 lux ambient), Y_b = 20.
    ``discount_illuminant=True`` forces complete chromatic adaptation
    (D = 1), so grays carry exactly zero chroma; set it to False to get
    the textbook degree-of-adaptation formula.

    These are conventions, not measurements; exporters record them in
    output metadata so results can be reproduced.
    """

    whitepoint: tuple[float, float, float] = D65_WHITE_XYZ100
    adapting_luminance: float = 64.0 / (5.0 * np.pi)
    background_luminance_factor: float = 20.0
    surround: str = "average"
    discount_illuminant: bool = True

    def __post_init__(self):
        wp = np.asarray(self.whitepoint, dtype=float)
        if wp.shape != (3,) or not np.all(wp > 0):
            raise ValueError(f"whitepoint must be 3 positive XYZ values, got {self.whitepoint!r}")
        object.__setattr__(self, "whitepoint", tuple(float(v) for v in wp))
        if not self.adapting_luminance > 0:
            raise ValueError(f"adapting_luminance must be > 0, got {self.adapting_luminance!r}")
        if not 0 < self.background_luminance_factor <= 100:
            raise ValueError(
                f"background_luminance_factor must be in (0, 100], got {self.background_luminance_factor!r}")
        if self.surround not in SURROUNDS:
            raise ValueError(f"surround must be one of {sorted(SURROUNDS)}, got {self.surround!r}")

    @cached_property
    def cam(self) -> SimpleNamespace:
        """Derived CIECAM02 constants (F_L, n, z, N_bb, A_w, ...)."""
        F, c, N_c = SURROUNDS[self.surround]
        wp = np.asarray(self.whitepoint)
        Y_w = wp[1]
        L_A = self.adapting_luminance
        if self.discount_illuminant:
            D = 1.0
        else:
            D = np.clip(F * (1.0 - (1.0 / 3.6) * np.exp((-L_A - 42.0) / 92.0)), 0.0, 1.0)
        rgb_w = _M_CAT02 @ wp
        d_rgb = D * Y_w / rgb_w + 1.0 - D
        k = 1.0 / (5.0 * L_A + 1.0)
        F_L = 0.2 * k**4 * 5.0 * L_A + 0.1 * (1.0 - k**4) ** 2 * (5.0 * L_A) ** (1.0 / 3.0)
        n = self.background_luminance_factor / Y_w
        z = 1.48 + np.sqrt(n)
        N_bb = 0.725 * (1.0 / n) ** 0.2
        rgba_w = _adapt(_CAT02_TO_HPE @ (d_rgb * rgb_w), F_L)
        A_w = (_OPPONENT[0] @ rgba_w - 0.305) * N_bb
        c_factor = (1.64 - 0.29**n) ** 0.73
        return SimpleNamespace(F=F, c=c, N_c=N_c, D=D, d_rgb=d_rgb, F_L=F_L,
                               n=n, z=z, N_bb=N_bb, N_cb=N_bb, A_w=A_w,
                               c_factor=c_factor)

    def to_dict(self) -> dict:
        return {
            "whitepoint": list(self.whitepoint),
            "adapting_luminance": self.adapting_luminance,
            "background_luminance_factor": self.background_luminance_factor,
            "surround": self.surround,
            "discount_illuminant": self.discount_illuminant,
        }


DEFAULT_VIEWING_CONDITIONS = ViewingConditions()


def srgb_to_linear(c):
    """Decode the sRGB transfer function, channel-wise.

    Values outside [0, 1] are handled by the sign-symmetric extension
    f(-x) = -f(x), so out-of-gamut intermediates survive a round trip.
    """
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    with np.errstate(invalid="ignore"):
        out = np.where(a <= _SRGB_KNEE, a / 12.92, ((a + 0.055) / 1.055) ** 2.4)
    return np.copysign(out, c)


def linear_to_srgb(c):
    """Encode linear RGB with the sRGB transfer function (inverse of
    :func:`srgb_to_linear`), sign-symmetric outside the nominal range."""
    c = np.asarray(c, dtype=float)
    a = np.abs(c)
    with np.errstate(invalid="ignore"):
        out = np.where(a <= _LINEAR_KNEE, 12.92 * a, 1.055 * a ** (1.0 / 2.4) - 0.055)
    return np.copysign(out, c)


def srgb_to_xyz100(rgb):
    """sRGB in [0, 1] to XYZ scaled to Y_white = 100."""
    return 100.0 * (srgb_to_linear(rgb) @ M_RGB_TO_XYZ.T)


def xyz100_to_srgb(xyz):
    """XYZ (Y_white = 100) to sRGB; may land outside [0, 1]."""
    return linear_to_srgb((np.asarray(xyz, dtype=float) / 100.0) @ M_XYZ_TO_RGB.T)


def _adapt(rgb, F_L):
    # Post-adaptation nonlinear compression, odd-extended to negative
    # cone signals.
    x = (F_L * np.abs(rgb) / 100.0) ** 0.42
    return np.copysign(400.0 * x / (x + 27.13), rgb) + 0.1


def _unadapt(rgba, F_L):
    x = np.asarray(rgba) - 0.1
    ax = np.abs(x)
    with np.errstate(invalid="ignore", divide="ignore"):
        y = (27.13 * ax / (400.0 - ax)) ** (1.0 / 0.42)
    y = np.where(ax < 400.0, y, np.nan)  # |signal| >= 400 has no preimage
    return np.copysign(y, x) * (100.0 / F_L)


def xyz100_to_jmh(xyz, vc: ViewingConditions | None = None):
    """CIECAM02 forward model: XYZ -> (J, M, h).

    Returns an array shaped like the input with lightness J, colorfulness
    M and hue angle h in radians on the last axis.
    """
    vc = vc or DEFAULT_VIEWING_CONDITIONS
    p = vc.cam
    xyz = np.asarray(xyz, dtype=float)
    rgb_c = p.d_rgb * (xyz @ _M_CAT02.T)
    rgba = _adapt(rgb_c @ _CAT02_TO_HPE.T, p.F_L)
    ra, ga, ba = np.moveaxis(rgba, -1, 0)
    a = ra - 12.0 * ga / 11.0 + ba / 11.0
    b = (ra + ga - 2.0 * ba) / 9.0
    h = np.arctan2(b, a)
    e_t = 0.25 * (np.cos(h + 2.0) + 3.8)
    A = (2.0 * ra + ga + ba / 20.0 - 0.305) * p.N_bb
    J = 100.0 * (np.maximum(A, 0.0) / p.A_w) ** (p.c * p.z)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = _T_COEF * p.N_c * p.N_cb * e_t * np.hypot(a, b) / (ra + ga + 1.05 * ba)
        C = t**0.9 * np.sqrt(J / 100.0) * p.c_factor
    M = C * p.F_L**0.25
    return np.stack([J, M, h], axis=-1)


def jmh_to_xyz100(jmh, vc: ViewingConditions | None = None):
    """CIECAM02 inverse model: (J, M, h-radians) -> XYZ.

    Coordinates with no real-stimulus preimage (J <= 0 with nonzero M,
    or appearance values beyond the model's range) come back as NaN.
    """
    vc = vc or DEFAULT_VIEWING_CONDITIONS
    p = vc.cam
    jmh = np.asarray(jmh, dtype=float)
    J, M, h = np.moveaxis(jmh, -1, 0)
    achromatic = np.abs(M) <= 1e-14
    undefined = (J <= 0) & ~achromatic
    J = np.maximum(J, 0.0)

    C = M / p.F_L**0.25
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (C / (np.sqrt(J / 100.0) * p.c_factor)) ** (1.0 / 0.9)
    t = np.where(achromatic, 0.0, t)

    e_t = 0.25 * (np.cos(h + 2.0) + 3.8)
    A = p.A_w * (J / 100.0) ** (1.0 / (p.c * p.z))
    p2 = A / p.N_bb + 0.305
    # Solving the chroma equation for (a, b) gives one closed form valid
    # for every hue; its denominator is positive iff the coordinates are
    # reachable.
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = _T_COEF * p.N_c * p.N_cb * e_t / t
        den = p1 + (671.0 / 1403.0) * np.cos(h) + (6588.0 / 1403.0) * np.sin(h)
        a = p2 * np.cos(h) / den
        b = p2 * np.sin(h) / den
    zero = np.zeros_like(p2)
    a = np.where(t == 0.0, zero, a)
    b = np.where(t == 0.0, zero, b)
    undefined |= (t > 0) & ~(den > 0)

    rgba = np.stack([p2, a, b], axis=-1) @ _OPPONENT_INV.T
    rgb_c = _unadapt(rgba, p.F_L) @ _HPE_TO_CAT02.T
    xyz = (rgb_c / p.d_rgb) @ _M_CAT02_INV.T
    return np.where(undefined[..., None], np.nan, xyz)


def _jab_to_jmh(jab):
    jab = np.asarray(jab, dtype=float)
    jp, ap, bp = np.moveaxis(jab, -1, 0)
    J = jp / (1.7 - _UCS_C1 * jp)
    mp = np.hypot(ap, bp)
    M = np.expm1(_UCS_C2 * mp) / _UCS_C2
    h = np.arctan2(bp, ap)
    return np.stack([J, M, h], axis=-1)


def _jmh_to_jab(jmh):
    J, M, h = np.moveaxis(np.asarray(jmh, dtype=float), -1, 0)
    jp = (1.0 + 100.0 * _UCS_C1) * J / (1.0 + _UCS_C1 * J)
    mp = np.log1p(_UCS_C2 * M) / _UCS_C2
    return np.stack([jp, mp * np.cos(h), mp * np.sin(h)], axis=-1)


def xyz100_to_jab(xyz, vc: ViewingConditions | None = None):
    """XYZ (Y_white = 100) to CIECAM02-UCS (J', a', b')."""
    return _jmh_to_jab(xyz100_to_jmh(xyz, vc))


def jab_to_xyz100(jab, vc: ViewingConditions | None = None, *, undefined: str = "raise"):
    """CIECAM02-UCS (J', a', b') to XYZ.

    ``undefined`` controls what happens for points the inverse model
    cannot represent (J' <= 0 with nonzero chroma, or coordinates with
    no real-stimulus preimage): ``"raise"`` raises ValueError, ``"nan"``
    returns NaN for those points (useful when probing gamut limits).
    """
    if undefined not in ("raise", "nan"):
        raise ValueError(f"undefined must be 'raise' or 'nan', got {undefined!r}")
    xyz = jmh_to_xyz100(_jab_to_jmh(jab), vc)
    if undefined == "raise" and not np.all(np.isfinite(xyz)):
        raise ValueError("J'a'b' value has no XYZ preimage (J' <= 0 with nonzero "
                         "chroma, or outside the appearance model's range)")
    return xyz


def srgb_to_jab(rgb, vc: ViewingConditions | None = None):
    """sRGB (channels in [0, 1]) to CIECAM02-UCS (J', a', b')."""
    return xyz100_to_jab(srgb_to_xyz100(rgb), vc)


def jab_to_srgb(jab, vc: ViewingConditions | None = None, *, undefined: str = "raise"):
    """CIECAM02-UCS (J', a', b') to sRGB, *without* gamut clamping.

    Channels may land outside [0, 1]; that is the caller's signal that
    the requested color is outside the sRGB gamut.  See
    :func:`jab_to_xyz100` for the ``undefined`` modes.
    """
    return xyz100_to_srgb(jab_to_xyz100(jab, vc, undefined=undefined))


def clamp_gamut(rgb):
    """Clip every channel to [0, 1] (absolute colorimetric intent).

    Idempotent, and the identity on colors that are already valid.
    """
    return np.clip(np.asarray(rgb, dtype=float), 0.0, 1.0)


def delta_e(jab1, jab2):
    """Euclidean distance between J'a'b' triplets (the package's only
    color-difference metric)."""
    d = np.asarray(jab1, dtype=float) - np.asarray(jab2, dtype=float)
    return np.sqrt(np.sum(d * d, axis=-1))
