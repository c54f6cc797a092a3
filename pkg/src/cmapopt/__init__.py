"""CVD-aware colormap optimization and evaluation in CIECAM02-UCS."""

from cmapopt.colorspace import (
    DEFAULT_VIEWING_CONDITIONS,
    ViewingConditions,
    clamp_gamut,
    delta_e,
    jab_to_srgb,
    srgb_to_jab,
)
from cmapopt.cvd import CvdSpec, gamut_fraction, machado_matrix, simulate_cvd
from cmapopt.colormaps import Colormap, builtin_colormap, builtin_names
from cmapopt.optimize import (
    InfeasibleBoundsError,
    JpBounds,
    colormap_to_cvd_jab,
    compute_jp_bounds,
    linearize_fit_original,
    linearize_max_range,
    optimize_colormap,
    resample_equidistant,
)
from cmapopt.analyze import (
    CdpsResult,
    cdps,
    kovesi_test_image,
    overlay,
    perceptual_deltas,
    value_to_color,
)
from cmapopt.io import export_lut, export_png, export_table, load_colormap

__version__ = "0.1.0"
