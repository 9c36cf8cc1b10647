"""Matplotlib figures (PNG) accompanying the raw PPM/PGM renders."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .grid import GridSpec  # noqa: E402
from .vortex import HotelState, SweepResult, Vortex  # noqa: E402

MM = 1e3


def _extent(grid: GridSpec):
    h = grid.half_width * MM
    return (-h, h, -h, h)


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps PNG bytes reproducible
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def _mark(ax, vortices: Sequence[Vortex]):
    for sign, marker, colour in ((1, "o", "white"), (-1, "s", "black")):
        pts = np.array([(v.x, v.y) for v in vortices if v.charge == sign]).reshape(-1, 2) * MM
        if len(pts):
            ax.scatter(pts[:, 0], pts[:, 1], s=22, marker=marker, facecolors="none",
                       edgecolors=colour, linewidths=1.0, label="+1" if sign > 0 else "-1")


def phase_figure(path, rgb: np.ndarray, grid: GridSpec, vortices: Sequence[Vortex] = (),
                 title: Optional[str] = None) -> Path:
    """Hue-mapped phase with detected vortices circled (+1) or boxed (-1)."""
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    ax.imshow(rgb, origin="lower", extent=_extent(grid), interpolation="nearest")
    _mark(ax, vortices)
    if vortices:
        ax.legend(loc="upper right", fontsize=7, framealpha=0.6)
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def intensity_figure(path, image: np.ndarray, grid: GridSpec, title: Optional[str] = None) -> Path:
    """Interferogram in image orientation (row 0 at the top)."""
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    h = grid.half_width * MM
    ax.imshow(image, cmap="gray", vmin=0, vmax=255, origin="upper",
              extent=(-h, h, h, -h), interpolation="nearest")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def sweep_figure(path, result: SweepResult) -> Path:
    """Vortex x-positions along the cut against mu, plus pair counts per regime."""
    fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(6.0, 6.4), sharex=True,
                                   gridspec_kw={"height_ratios": [3, 1]})
    for traj in result.trajectories:
        pts = np.asarray(traj.points)
        colour = "tab:red" if traj.charge > 0 else "tab:blue"
        ax0.plot(pts[:, 0], pts[:, 1] * MM, "-", color=colour, lw=1.0)
    for state, dets in zip(result.states, result.detections):
        for v in dets:
            ax0.plot(state.mu, v.x * MM, "." if v.charge > 0 else "x",
                     color="tab:red" if v.charge > 0 else "tab:blue", ms=3)
    ax0.set_ylabel("x of vortex (mm)")
    mus = [s.mu for s in result.states]
    ax1.step(mus, [len(s.full_pairs) for s in result.states], where="mid", label="pairs")
    ax1.step(mus, [len(s.vacant_rooms) for s in result.states], where="mid", label="vacant rooms")
    ax1.set_xlabel("mu")
    ax1.set_ylabel("count")
    ax1.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, path)


def hotel_title(state: HotelState) -> str:
    return f"mu = {state.mu:g}   {state.regime.value}   {state.correspondence.value}"
