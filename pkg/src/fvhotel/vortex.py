"""Phase singularities and the hotel bookkeeping built on them.

Vortices are found as nonzero discrete windings of the wrapped phase around
2x2 pixel plaquettes.  Outside the central vortex (the integer part of the
charge) they sit on the dislocation line along +x.  Walking outward along that
line, a positive vortex is a *room* and the negative vortex following it is its
*guest*.  A room with no guest after it marks an annihilated pair: the guest
has merged with the next room out and left the room vacant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid import (
    ComplexField,
    GridSpec,
    OpticalConfig,
    ScalarField,
    TruncationConfig,
    fractional_part,
    is_integer_charge,
)

__all__ = [
    "NumericalFailure",
    "UndersampledPlaquetteError",
    "LowAmplitudePathError",
    "InconsistentSignsError",
    "RegimeContradictionError",
    "TrackingLossError",
    "Vortex",
    "VortexPair",
    "Regime",
    "Correspondence",
    "HotelState",
    "Trajectory",
    "SweepResult",
    "default_amplitude_floor",
    "default_pairing_gate",
    "phase_map",
    "plaquette_winding",
    "winding_map",
    "boundary_winding",
    "detect_vortices",
    "net_charge",
    "enclosed_charge",
    "split_central",
    "pair_vortices",
    "classify_regime",
    "analyze_field",
    "match_vortices",
    "sweep_track",
]

TWO_PI = 2 * math.pi
# Wrapped edge differences this close to pi have no well-defined branch.
_BRANCH_TOL = 1e-12
HALF_TOL = 1e-9


class NumericalFailure(RuntimeError):
    """Base class for failures caused by resolution or sampling."""


class UndersampledPlaquetteError(NumericalFailure):
    def __init__(self, message: str, plaquettes: Sequence[tuple[int, int]] = ()):
        super().__init__(message)
        self.plaquettes = list(plaquettes)


class LowAmplitudePathError(NumericalFailure):
    pass


class InconsistentSignsError(NumericalFailure):
    pass


class RegimeContradictionError(NumericalFailure):
    pass


class TrackingLossError(NumericalFailure):
    pass


@dataclass(frozen=True)
class Vortex:
    x: float
    y: float
    charge: int

    def __post_init__(self):
        if self.charge not in (-1, 1):
            raise ValueError(f"vortex charge must be +-1, got {self.charge}")

    @property
    def r(self) -> float:
        return math.hypot(self.x, self.y)

    def distance(self, other: "Vortex") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class VortexPair:
    room: Vortex
    guest: Optional[Vortex] = None

    @property
    def annihilated(self) -> bool:
        return self.guest is None

    @property
    def separation(self) -> Optional[float]:
        return None if self.guest is None else self.room.distance(self.guest)


class Regime(str, enum.Enum):
    INTEGER = "INTEGER"
    PRE_HALF = "PRE_HALF"
    HALF = "HALF"
    POST_HALF = "POST_HALF"


class Correspondence(str, enum.Enum):
    FINITE = "FINITE"
    INF_TO_INF = "INF_TO_INF"
    INF_PLUS_ONE_TO_INF = "INF_PLUS_ONE_TO_INF"


@dataclass
class HotelState:
    mu: float
    central_charge: int
    pairs: list[VortexPair]
    regime: Regime
    correspondence: Correspondence
    # rooms at the window edge whose guest lies outside the window
    boundary_rooms: int = 0

    @property
    def full_pairs(self) -> list[VortexPair]:
        return [p for p in self.pairs if not p.annihilated]

    @property
    def vacant_rooms(self) -> list[VortexPair]:
        return [p for p in self.pairs if p.annihilated]


def default_amplitude_floor(field: ComplexField) -> float:
    return 1e-3 * float(np.max(np.abs(field.values)))


def default_pairing_gate(grid: GridSpec) -> float:
    return 10 * grid.pitch


def phase_map(field: ComplexField, amplitude_floor: Optional[float] = None) -> ScalarField:
    """Principal phase in ``[0, 2 pi)``; pixels with ``|U| <= floor`` are marked invalid."""
    if amplitude_floor is None:
        amplitude_floor = default_amplitude_floor(field)
    ph = np.mod(np.angle(field.values), TWO_PI)
    ph[ph >= TWO_PI] = 0.0
    valid = np.abs(field.values) > amplitude_floor
    return ScalarField(field.grid, np.where(valid, ph, 0.0), valid)


def _wrap(d):
    # into (-pi, pi]
    w = np.mod(d + math.pi, TWO_PI) - math.pi
    return np.where(w <= -math.pi, w + TWO_PI, w)


def _edge_differences(phase: np.ndarray):
    d_h = _wrap(phase[:, 1:] - phase[:, :-1])  # (i,j) -> (i,j+1)
    d_v = _wrap(phase[1:, :] - phase[:-1, :])  # (i,j) -> (i+1,j)
    return d_h, d_v


def _ambiguous(d: np.ndarray) -> np.ndarray:
    return np.abs(np.abs(d) - math.pi) < _BRANCH_TOL


def plaquette_winding(phase: ScalarField, i: int, j: int) -> int:
    """Winding of the phase counterclockwise around pixels ``(i,j)..(i+1,j+1)``.

    ``i`` indexes rows (y) and ``j`` columns (x).
    """
    ny, nx = phase.grid.shape
    if not (0 <= i < ny - 1 and 0 <= j < nx - 1):
        raise IndexError(f"plaquette ({i}, {j}) outside the grid")
    corners = [(i, j), (i, j + 1), (i + 1, j + 1), (i + 1, j)]
    if not all(phase.valid[c] for c in corners):
        raise ValueError(f"plaquette ({i}, {j}) touches a pixel with undefined phase")
    vals = [phase.values[c] for c in corners]
    diffs = _wrap(np.diff(vals + vals[:1]))
    if np.any(_ambiguous(diffs)):
        raise UndersampledPlaquetteError(f"ambiguous phase step in plaquette ({i}, {j})", [(i, j)])
    w = int(round(float(diffs.sum()) / TWO_PI))
    if abs(w) > 1:
        raise UndersampledPlaquetteError(f"winding {w} in plaquette ({i}, {j})", [(i, j)])
    return w


def winding_map(phase: ScalarField, check: Optional[np.ndarray] = None) -> np.ndarray:
    """Windings of every plaquette, shape ``(ny-1, nx-1)``.

    ``check`` selects plaquettes on which ambiguous branches and windings of
    magnitude above one raise :class:`UndersampledPlaquetteError`; by default
    those whose four corners are valid.
    """
    d_h, d_v = _edge_differences(phase.values)
    circ = d_h[:-1, :] + d_v[:, 1:] - d_h[1:, :] - d_v[:, :-1]
    w = np.rint(circ / TWO_PI).astype(int)
    if check is None:
        check = _plaquette_valid(phase.valid)
    amb = (
        _ambiguous(d_h[:-1, :]) | _ambiguous(d_v[:, 1:]) | _ambiguous(d_h[1:, :]) | _ambiguous(d_v[:, :-1])
    )
    bad = check & (amb | (np.abs(w) > 1))
    if bad.any():
        where = [tuple(int(v) for v in p) for p in np.argwhere(bad)]
        raise UndersampledPlaquetteError(
            f"{len(where)} undersampled plaquette(s), first at (row, col) = {where[0]}", where
        )
    return w


def _plaquette_valid(valid: np.ndarray) -> np.ndarray:
    return valid[:-1, :-1] & valid[:-1, 1:] & valid[1:, :-1] & valid[1:, 1:]


def boundary_winding(phase: ScalarField, region: np.ndarray) -> int:
    """Phase winding along the boundary of a set of plaquettes.

    ``region`` is a boolean ``(ny-1, nx-1)`` mask.  Only edges on the region
    boundary contribute, each traversed counterclockwise.  Raises
    :class:`LowAmplitudePathError` if a boundary pixel has undefined phase.
    """
    region = np.asarray(region, dtype=int)
    ny, nx = phase.grid.shape
    if region.shape != (ny - 1, nx - 1):
        raise ValueError("region mask must have shape (ny-1, nx-1)")
    d_h, d_v = _edge_differences(phase.values)
    # horizontal edge (i,j)->(i,j+1): bottom of plaquette i, top of plaquette i-1
    c_h = np.zeros((ny, nx - 1), dtype=int)
    c_h[:-1, :] += region
    c_h[1:, :] -= region
    # vertical edge (i,j)->(i+1,j): right side of plaquette (i,j-1), left of (i,j)
    c_v = np.zeros((ny - 1, nx), dtype=int)
    c_v[:, 1:] += region
    c_v[:, :-1] -= region
    on_path = np.zeros((ny, nx), dtype=bool)
    on_path[:, :-1] |= c_h != 0
    on_path[:, 1:] |= c_h != 0
    on_path[:-1, :] |= c_v != 0
    on_path[1:, :] |= c_v != 0
    if np.any(on_path & ~phase.valid):
        raise LowAmplitudePathError("boundary path crosses pixels with undefined phase")
    total = float(np.sum(c_h * d_h) + np.sum(c_v * d_v))
    w = total / TWO_PI
    if abs(w - round(w)) > 1e-6:
        raise NumericalFailure(f"boundary circulation {w} is not an integer")
    return int(round(w))


def _components(mask: np.ndarray) -> list[list[tuple[int, int]]]:
    # 8-connected clusters of True cells
    seen = np.zeros_like(mask, dtype=bool)
    out = []
    rows, cols = mask.shape
    for start in map(tuple, np.argwhere(mask)):
        if seen[start]:
            continue
        seen[start] = True
        stack, comp = [start], []
        while stack:
            i, j = stack.pop()
            comp.append((i, j))
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    a, b = i + di, j + dj
                    if 0 <= a < rows and 0 <= b < cols and mask[a, b] and not seen[a, b]:
                        seen[a, b] = True
                        stack.append((a, b))
        out.append(comp)
    return out


def detect_vortices(field: ComplexField, amplitude_floor: Optional[float] = None) -> list[Vortex]:
    """All unit-charge singularities, nearest the origin first.

    Vortices sit at plaquette centres.  Where the core pixels fall below the
    amplitude floor, the plaquettes touching them are merged into clusters and
    the winding is taken around each cluster's boundary; a unit winding is a
    vortex at the cluster centroid.  Clusters reaching the window edge are
    skipped.
    """
    phase = phase_map(field, amplitude_floor)
    valid_plaq = _plaquette_valid(phase.valid)
    w = winding_map(phase)
    w = np.where(valid_plaq, w, 0)
    x, y = field.grid.x, field.grid.y
    xc = 0.5 * (x[:-1] + x[1:])
    yc = 0.5 * (y[:-1] + y[1:])
    found = [Vortex(float(xc[j]), float(yc[i]), int(w[i, j])) for i, j in np.argwhere(w != 0)]
    rows, cols = valid_plaq.shape
    for comp in _components(~valid_plaq):
        idx = np.array(comp)
        if idx[:, 0].min() == 0 or idx[:, 1].min() == 0 or idx[:, 0].max() == rows - 1 or idx[:, 1].max() == cols - 1:
            continue
        region = np.zeros(valid_plaq.shape, dtype=bool)
        region[idx[:, 0], idx[:, 1]] = True
        wc = boundary_winding(phase, region)
        if wc == 0:
            continue
        if abs(wc) > 1:
            raise UndersampledPlaquetteError(
                f"winding {wc} around a masked core of {len(comp)} plaquettes", [tuple(map(int, c)) for c in comp]
            )
        found.append(Vortex(float(xc[idx[:, 1]].mean()), float(yc[idx[:, 0]].mean()), wc))
    found.sort(key=lambda v: (round(v.r, 15), v.x, v.y))
    return found


def _disk_region(grid: GridSpec, radius: float) -> np.ndarray:
    x, y = grid.x, grid.y
    xc = 0.5 * (x[:-1] + x[1:])
    yc = 0.5 * (y[:-1] + y[1:])
    if radius + 2 * max(grid.pitch, grid.pitch_y) > grid.half_width:
        raise ValueError(f"circle of radius {radius} is not interior to the grid")
    return np.hypot(xc[None, :], yc[:, None]) <= radius


def net_charge(field: ComplexField, radius: float, amplitude_floor: Optional[float] = None) -> int:
    """Winding of the phase around a digitised circle of ``radius`` about the origin."""
    phase = phase_map(field, amplitude_floor)
    return boundary_winding(phase, _disk_region(field.grid, radius))


def enclosed_charge(field: ComplexField, radius: float, amplitude_floor: Optional[float] = None) -> int:
    """Sum of all plaquette windings inside the same digitised circle."""
    phase = phase_map(field, amplitude_floor)
    region = _disk_region(field.grid, radius)
    w = winding_map(phase, check=region & _plaquette_valid(phase.valid))
    return int(w[region].sum())


def _room_sign(mu: float) -> int:
    return 1 if mu >= 0 else -1


def split_central(vortices: Sequence[Vortex], mu: float) -> tuple[list[Vortex], list[Vortex]]:
    """Separate the ``floor(|mu|)`` innermost vortices carrying the integer part of the charge."""
    sign = _room_sign(mu)
    n_central = int(math.floor(abs(mu) + HALF_TOL))
    ordered = sorted(vortices, key=lambda v: v.r)
    central = ordered[:n_central]
    if any(v.charge != sign for v in central):
        raise InconsistentSignsError(
            f"expected {n_central} central vortices of charge {sign:+d} nearest the origin"
        )
    return central, ordered[n_central:]


def pair_vortices(
    vortices: Sequence[Vortex],
    half_width: Optional[float] = None,
    room_sign: int = 1,
    edge_factor: float = 1.5,
) -> tuple[list[VortexPair], int]:
    """Assign guests to rooms walking outward from the origin.

    ``vortices`` excludes the central vortex.  Each room takes the guest
    immediately following it; a room followed by another room (or by nothing)
    is vacant.  When ``half_width`` is given, a vacant outermost room closer to
    the window edge than ``edge_factor`` times its spacing from the previous
    vortex is taken as cut off by the window: it is dropped and counted in the
    second return value.

    Raises :class:`InconsistentSignsError` when a guest has no room before it.
    """
    ordered = sorted(vortices, key=lambda v: v.r)
    pairs: list[VortexPair] = []
    pending: Optional[Vortex] = None
    for v in ordered:
        if v.charge == room_sign:
            if pending is not None:
                pairs.append(VortexPair(pending))
            pending = v
        else:
            if pending is None:
                raise InconsistentSignsError(f"guest at ({v.x:.6g}, {v.y:.6g}) has no room before it")
            pairs.append(VortexPair(pending, v))
            pending = None
    boundary = 0
    if pending is not None:
        cut_off = False
        if half_width is not None:
            edge = half_width - max(abs(pending.x), abs(pending.y))
            prev = ordered[-2].r if len(ordered) > 1 else 0.0
            cut_off = edge < edge_factor * (pending.r - prev)
        if cut_off:
            boundary = 1
        else:
            pairs.append(VortexPair(pending))
    return pairs, boundary


def classify_regime(mu: float, pairs: Sequence[VortexPair], central_charge: int, boundary_rooms: int = 0) -> HotelState:
    """Hotel regime and correspondence implied by ``mu`` and the observed pairs.

    Raises :class:`RegimeContradictionError` when the detections disagree with
    the regime expected from ``mu`` (a sign of insufficient resolution).
    """
    pairs = list(pairs)
    vacant = [p for p in pairs if p.annihilated]
    if is_integer_charge(mu):
        if pairs:
            raise RegimeContradictionError(f"integer charge {mu} but {len(pairs)} pair(s) detected")
        return HotelState(mu, central_charge, pairs, Regime.INTEGER, Correspondence.FINITE, boundary_rooms)
    frac = fractional_part(abs(mu))
    if abs(frac - 0.5) < HALF_TOL:
        if vacant:
            raise RegimeContradictionError(f"mu={mu}: vacant room at half-integer charge")
        return HotelState(mu, central_charge, pairs, Regime.HALF, Correspondence.INF_TO_INF, boundary_rooms)
    if frac < 0.5:
        if vacant:
            raise RegimeContradictionError(f"mu={mu}: annihilation detected below the half-integer")
        return HotelState(mu, central_charge, pairs, Regime.PRE_HALF, Correspondence.FINITE, boundary_rooms)
    if not vacant:
        raise RegimeContradictionError(f"mu={mu}: no vacant room resolved above the half-integer")
    return HotelState(
        mu, central_charge, pairs, Regime.POST_HALF, Correspondence.INF_PLUS_ONE_TO_INF, boundary_rooms
    )


def analyze_field(field: ComplexField, mu: float, amplitude_floor: Optional[float] = None) -> HotelState:
    """Detect, pair and classify the vortices of one field."""
    vortices = detect_vortices(field, amplitude_floor)
    central, rest = split_central(vortices, mu)
    pairs, boundary = pair_vortices(rest, field.grid.half_width, _room_sign(mu))
    return classify_regime(mu, pairs, sum(v.charge for v in central), boundary)


@dataclass
class Trajectory:
    charge: int
    points: list[tuple[float, float, float]] = field(default_factory=list)  # (mu, x, y)


@dataclass
class SweepResult:
    states: list[HotelState]
    trajectories: list[Trajectory]
    detections: list[list[Vortex]]


def match_vortices(
    previous: Sequence[Vortex], current: Sequence[Vortex], gate: float, tie_tol: float = 0.0
) -> dict[int, int]:
    """Nearest-neighbour assignment ``current index -> previous index``.

    Only equal charges within ``gate`` are matched, closest pairs first.
    Raises :class:`TrackingLossError` when a vortex has two candidates within
    the gate at distances differing by no more than ``tie_tol``.
    """
    cands = []
    for ci, c in enumerate(current):
        near = sorted(
            (c.distance(p), pi) for pi, p in enumerate(previous) if p.charge == c.charge and c.distance(p) <= gate
        )
        if len(near) > 1 and near[1][0] - near[0][0] <= tie_tol:
            raise TrackingLossError(f"ambiguous match for vortex at ({c.x:.6g}, {c.y:.6g})")
        cands.extend((d, ci, pi) for d, pi in near)
    cands.sort()
    out: dict[int, int] = {}
    used: set[int] = set()
    for d, ci, pi in cands:
        if ci in out or pi in used:
            continue
        out[ci] = pi
        used.add(pi)
    return out


def sweep_track(
    mu_values: Sequence[float],
    grid: GridSpec,
    optics: OpticalConfig,
    trunc: TruncationConfig = TruncationConfig(),
    pairing_gate: Optional[float] = None,
    amplitude_floor: Optional[float] = None,
    field_fn=None,
) -> SweepResult:
    """Hotel state at each charge plus vortex trajectories across the sweep.

    Vortices are linked between consecutive charges by
    :func:`match_vortices`; only paths spanning at least two charges are
    returned as trajectories.

    ``field_fn(mu)`` overrides field evaluation (used to reuse cached fields).
    """
    from .field import fractional_field_grid

    mus = [float(m) for m in mu_values]
    if any(b <= a for a, b in zip(mus, mus[1:])):
        raise ValueError("mu_values must be strictly increasing")
    gate = default_pairing_gate(grid) if pairing_gate is None else pairing_gate
    tie_tol = 0.5 * grid.pitch
    if field_fn is None:
        field_fn = lambda m: fractional_field_grid(m, grid, optics, trunc)  # noqa: E731
    states, detections, trajectories = [], [], []
    live: dict[int, Trajectory] = {}
    prev: list[Vortex] = []
    for mu in mus:
        fld = field_fn(mu)
        vortices = detect_vortices(fld, amplitude_floor)
        central, rest = split_central(vortices, mu)
        pairs, boundary = pair_vortices(rest, grid.half_width, _room_sign(mu))
        states.append(classify_regime(mu, pairs, sum(v.charge for v in central), boundary))
        detections.append(vortices)
        match = match_vortices(prev, vortices, gate, tie_tol)
        new_live: dict[int, Trajectory] = {}
        for ci, v in enumerate(vortices):
            tr = live[match[ci]] if ci in match else None
            if tr is None:
                tr = Trajectory(v.charge)
                trajectories.append(tr)
            tr.points.append((mu, v.x, v.y))
            new_live[ci] = tr
        live, prev = new_live, vortices
    tracked = [t for t in trajectories if len(t.points) > 1]
    return SweepResult(states, tracked, detections)
