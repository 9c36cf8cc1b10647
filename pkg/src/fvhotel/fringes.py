"""Fork analysis of interferograms.

The fringe phase is recovered from intensity alone by isolating the carrier
sideband in the Fourier plane.  Fringe terminations are the windings of that
demodulated signal; the fork orientation at a point is the difference in the
number of fringes crossed along short horizontal segments just above and
below it.

Orientation follows image rows: row 0 (the ``-y`` edge of the window) is the
top of a rendered image, so an *upward-opening* fork has more fringes at
smaller ``y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import ComplexField, ReferenceWaveParams, ScalarField
from .vortex import Vortex, detect_vortices

UP = 1
DOWN = -1


def demodulate(intensity: ScalarField, tilt: float, bandwidth: float = 0.7) -> ComplexField:
    """Complex fringe signal ``~ U E*`` from the ``+tilt`` sideband.

    Frequencies within ``bandwidth * tilt`` of the carrier are kept.
    """
    grid = intensity.grid
    spec = np.fft.fft2(intensity.values)
    kx = 2 * math.pi * np.fft.fftfreq(grid.nx, d=grid.pitch)
    ky = 2 * math.pi * np.fft.fftfreq(grid.ny, d=grid.pitch_y)
    keep = np.hypot(kx[None, :] - tilt, ky[:, None]) < bandwidth * abs(tilt)
    return ComplexField(grid, np.fft.ifft2(spec * keep))


def fringe_dislocations(
    intensity: ScalarField,
    tilt: float,
    border_periods: float = 2.0,
    bandwidth: float = 0.7,
) -> list[Vortex]:
    """Fringe terminations, excluding a border of ``border_periods`` fringes."""
    sig = demodulate(intensity, tilt, bandwidth)
    xx, _ = sig.grid.mesh()
    carrier_free = ComplexField(sig.grid, sig.values * np.exp(-1j * tilt * xx))
    margin = border_periods * 2 * math.pi / abs(tilt)
    lim = sig.grid.half_width - margin
    return [v for v in detect_vortices(carrier_free) if abs(v.x) <= lim and abs(v.y) <= lim]


def _count_along_row(psi_row: np.ndarray) -> float:
    return float(np.sum(np.diff(np.unwrap(psi_row)))) / (2 * math.pi)


def fringe_count_difference(
    fringe_phase: np.ndarray,
    grid,
    x: float,
    y: float,
    half_length: int,
    offset: int = 1,
) -> int:
    """Fringes crossed above minus below the plaquette centred at ``(x, y)``.

    Segments run ``half_length`` pixels either side of the point on the rows
    ``offset`` pixels beyond the plaquette; "above" is the smaller-row side.
    """
    j = int(round((x - grid.x[0]) / grid.pitch - 0.5))
    i = int(round((y - grid.y[0]) / grid.pitch_y - 0.5))
    lo = max(j - half_length, 0)
    hi = min(j + 1 + half_length, grid.nx - 1)
    top = i - offset
    bottom = i + 1 + offset
    if top < 0 or bottom >= grid.ny:
        raise ValueError("segment rows fall outside the grid")
    up = _count_along_row(fringe_phase[top, lo:hi + 1])
    down = _count_along_row(fringe_phase[bottom, lo:hi + 1])
    return int(round(up - down))


@dataclass(frozen=True)
class Fork:
    x: float
    y: float
    charge: int
    orientation: int  # UP, DOWN or 0 (no fork)


def fork_orientations(
    intensity: ScalarField,
    tilt: float,
    points: Sequence[Vortex],
    max_half_length: int = 20,
    bandwidth: float = 0.7,
) -> list[Fork]:
    """Fork orientation at each point from the fringe-count difference.

    ``UP`` means more fringes on the row-0 side of the point.

    Segment half-length is half the distance to the nearest other point
    (at least 3 pixels, at most ``max_half_length``).
    """
    grid = intensity.grid
    psi = np.angle(demodulate(intensity, tilt, bandwidth).values)
    out = []
    for p in points:
        others = [p.distance(q) for q in points if q is not p]
        gap = min(others) / grid.pitch if others else 2 * max_half_length
        half = int(min(max(gap // 2, 3), max_half_length))
        diff = fringe_count_difference(psi, grid, p.x, p.y, half)
        # signed phase counts run opposite to fringe numbers for a negative tilt
        out.append(Fork(p.x, p.y, p.charge, int(np.sign(diff) * np.sign(tilt))))
    return out


def fork_sign_for_rooms(tilt: float) -> int:
    """Orientation of the fork of a positive vortex for a given tilt sign."""
    return UP if tilt > 0 else DOWN


def match_dislocations(
    dislocations: Sequence[Vortex], vortices: Sequence[Vortex], tolerance: float
) -> list[tuple[Vortex, Optional[Vortex]]]:
    """Pair each vortex with the nearest same-sign dislocation within ``tolerance``."""
    out = []
    for v in vortices:
        near = [d for d in dislocations if d.charge == v.charge and d.distance(v) <= tolerance]
        out.append((v, min(near, key=v.distance) if near else None))
    return out
