"""8-bit renderings of fields: phase hue maps and grayscale intensity.

Images are ``uint8`` arrays with the same row/column layout as the grid
(row 0 is ``y = -half_width``).  Colour images have shape ``(ny, nx, 3)``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from matplotlib.colors import hsv_to_rgb

from .grid import ComplexField, ScalarField
from .vortex import default_amplitude_floor

BLUE_HUE = 240.0 / 360.0


def phase_hue(phase: np.ndarray) -> np.ndarray:
    """Hue in ``[0, 1)`` units: blue at phase 0 falling linearly to red at ``2 pi``."""
    frac = np.mod(phase, 2 * math.pi) / (2 * math.pi)
    return BLUE_HUE * (1.0 - frac)


def _to_uint8(unit: np.ndarray) -> np.ndarray:
    return np.rint(np.clip(unit, 0.0, 1.0) * 255.0).astype(np.uint8)


def render_phase(field: ComplexField, amplitude_floor: Optional[float] = None) -> np.ndarray:
    """Phase hue map with ``S = V = 1``; pixels with ``|U|`` below the floor are black.

    Parameters
    ----------
    field : ComplexField
    amplitude_floor : float, optional
        Defaults to the detection floor used by :mod:`fvhotel.vortex`.
    """
    if amplitude_floor is None:
        amplitude_floor = default_amplitude_floor(field)
    hsv = np.ones(field.values.shape + (3,))
    hsv[..., 0] = phase_hue(np.angle(field.values))
    rgb = _to_uint8(hsv_to_rgb(hsv))
    rgb[np.abs(field.values) < amplitude_floor] = 0
    return rgb


def render_intensity(scalar: ScalarField) -> np.ndarray:
    """Grayscale map of ``[0, max]`` onto ``[0, 255]``; an all-zero input is black."""
    values = scalar.values
    if np.any(values < 0):
        raise ValueError("intensity must be nonnegative")
    peak = values.max()
    if peak <= 0:
        return np.zeros(values.shape, dtype=np.uint8)
    return _to_uint8(values / peak)
