"""Configuration records and sampled fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

HE_NE_WAVELENGTH = 632.8e-9
INTEGER_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid configuration value; ``field_name`` names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


def _require(cond: bool, name: str, message: str) -> None:
    if not cond:
        raise ConfigError(name, message)


def _finite(v) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        return False


def is_integer_charge(mu: float) -> bool:
    return abs(mu - round(mu)) < INTEGER_TOL


def fractional_part(mu: float) -> float:
    return mu - math.floor(mu)


@dataclass(frozen=True)
class OpticalConfig:
    """Wavelength and propagation distance, both in metres."""

    wavelength: float = HE_NE_WAVELENGTH
    z: float = 0.1

    def __post_init__(self):
        _require(_finite(self.wavelength) and self.wavelength > 0, "wavelength", "must be > 0")
        _require(_finite(self.z) and self.z > 0, "z", "must be > 0")

    @property
    def k(self) -> float:
        return 2 * math.pi / self.wavelength

    def bessel_argument(self, rho):
        """``k rho^2 / (4 z)``, the argument of the mode Bessel functions."""
        return self.k * np.square(rho) / (4 * self.z)


@dataclass(frozen=True)
class GridSpec:
    """Square window ``[-half_width, half_width]^2`` sampled on ``ny x nx`` pixels.

    Arrays on the grid are indexed ``[iy, ix]``.
    """

    half_width: float = 1e-3
    nx: int = 512
    ny: int = 512

    def __post_init__(self):
        _require(_finite(self.half_width) and self.half_width > 0, "half_width", "must be > 0")
        _require(int(self.nx) == self.nx and self.nx >= 16, "nx", "must be an integer >= 16")
        _require(int(self.ny) == self.ny and self.ny >= 16, "ny", "must be an integer >= 16")

    @property
    def pitch(self) -> float:
        return 2 * self.half_width / (self.nx - 1)

    @property
    def pitch_y(self) -> float:
        return 2 * self.half_width / (self.ny - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.ny)

    def mesh(self):
        return np.meshgrid(self.x, self.y)

    def polar(self):
        """``(rho, phi)`` per pixel with ``phi`` in ``[0, 2 pi)``, cut along +x."""
        xx, yy = self.mesh()
        return np.hypot(xx, yy), np.mod(np.arctan2(yy, xx), 2 * math.pi)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    def scaled(self, factor: float) -> "GridSpec":
        """Same pitch, window ``factor`` times wider."""
        nx = int(round((self.nx - 1) * factor)) + 1
        ny = int(round((self.ny - 1) * factor)) + 1
        return GridSpec(self.half_width * factor, nx, ny)


@dataclass(frozen=True)
class TruncationConfig:
    """Bounds of the symmetric mode sum ``n = -n_max .. n_max``.

    ``n_max=None`` selects the adaptive floor ``ceil(2 x_max) + 24`` where
    ``x_max`` is the largest Bessel argument in the window; the grid sweep then
    doubles ``n_max`` until the relative L-infinity change drops below
    ``tail_tol``.
    """

    n_max: Optional[int] = None
    tail_tol: float = 1e-4
    max_doublings: int = 6

    def __post_init__(self):
        if self.n_max is not None:
            _require(int(self.n_max) == self.n_max and self.n_max >= 1, "n_max", "must be an integer >= 1")
        _require(_finite(self.tail_tol) and self.tail_tol > 0, "tail_tol", "must be > 0")

    def floor_for(self, x_max: float) -> int:
        if self.n_max is not None:
            return int(self.n_max)
        return adaptive_floor(x_max)


def adaptive_floor(x_max: float) -> int:
    return int(math.ceil(2 * x_max)) + 24


@dataclass(frozen=True)
class ReferenceWaveParams:
    """Tilted, Gaussian-limited reference beam.

    ``tilt`` is the transverse spatial frequency (rad/m) multiplying ``x``;
    ``None`` means ten pixels per fringe on the grid it is applied to.
    ``width=None`` means twice the window half-width.
    """

    amplitude: float = 1.0
    tilt: Optional[float] = None
    width: Optional[float] = None
    shift: float = 0.0

    def __post_init__(self):
        _require(_finite(self.amplitude) and self.amplitude >= 0, "amplitude", "must be >= 0")
        if self.tilt is not None:
            _require(_finite(self.tilt), "tilt", "must be finite")
        if self.width is not None:
            _require(_finite(self.width) and self.width > 0, "width", "must be > 0")
        _require(_finite(self.shift), "shift", "must be finite")

    def resolved(self, grid: GridSpec) -> "ReferenceWaveParams":
        tilt = self.tilt if self.tilt is not None else default_tilt(grid)
        width = self.width if self.width is not None else 2 * grid.half_width
        return ReferenceWaveParams(self.amplitude, tilt, width, self.shift)


def default_tilt(grid: GridSpec) -> float:
    return 2 * math.pi / (10 * grid.pitch)


@dataclass
class ComplexField:
    grid: GridSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")

    def conj(self) -> "ComplexField":
        return ComplexField(self.grid, np.conj(self.values), dict(self.meta))


@dataclass
class ScalarField:
    """Real samples on a grid; ``valid`` marks pixels where the value is defined."""

    grid: GridSpec
    values: np.ndarray
    valid: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scalar field contains non-finite values")
        if self.valid is None:
            self.valid = np.ones(self.grid.shape, dtype=bool)
