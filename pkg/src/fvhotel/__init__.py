"""Fractional-charge vortex beams: mode-series propagation, singularity
bookkeeping and the room/guest pairing of vortices along the phase cut."""

__version__ = "0.1.0"

from .field import (
    SeriesNotConverged,
    fourier_coefficient,
    fractional_field,
    fractional_field_grid,
    fractional_field_points,
    fractional_phase_transmittance,
    integer_mode_field,
    integer_mode_grid,
    interferogram,
    reconstruct_phase_series,
    reference_wave,
)
from .grid import (
    ComplexField,
    ConfigError,
    GridSpec,
    OpticalConfig,
    ReferenceWaveParams,
    ScalarField,
    TruncationConfig,
)
from .specfun import DomainError, HalfIntOrder, bessel_j, gamma_real, scaled_bessel_pair
from .vortex import (
    Correspondence,
    HotelState,
    NumericalFailure,
    Regime,
    Vortex,
    VortexPair,
    analyze_field,
    boundary_winding,
    detect_vortices,
    net_charge,
    pair_vortices,
    sweep_track,
)

__all__ = [
    "ComplexField", "ConfigError", "Correspondence", "DomainError", "GridSpec",
    "HalfIntOrder", "HotelState", "NumericalFailure", "OpticalConfig",
    "ReferenceWaveParams", "Regime", "ScalarField", "SeriesNotConverged",
    "TruncationConfig", "Vortex", "VortexPair", "analyze_field", "bessel_j",
    "boundary_winding", "detect_vortices", "fourier_coefficient",
    "fractional_field", "fractional_field_grid", "fractional_field_points",
    "fractional_phase_transmittance", "gamma_real", "integer_mode_field",
    "integer_mode_grid", "interferogram", "net_charge", "pair_vortices",
    "reconstruct_phase_series", "reference_wave", "scaled_bessel_pair",
    "sweep_track",
]
