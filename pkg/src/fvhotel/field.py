"""Fields behind a fractional spiral phase plate lit by a unit plane wave.

The plate ``exp(i mu phi)`` is expanded in integer azimuthal harmonics with
coefficients ``c_n = exp(i pi mu) sin(pi mu) / (pi (mu - n))``.  Each harmonic
propagates paraxially to the closed-form mode

    U_n = sqrt(pi/8) e^{ikz} e^{in phi} e^{ix} (-i)^{|n|/2} 2 sqrt(x)
          [J_{(|n|-1)/2}(x) - i J_{(|n|+1)/2}(x)],     x = k rho^2 / (4 z),

so that ``U_0`` is the unobstructed plane wave ``e^{ikz}``.  Grid evaluation
runs every pixel through one downward Bessel recurrence per order parity and
accumulates the mode sum on the way (see :func:`specfun.scaled_bessel_sums`).
"""

from __future__ import annotations

import cmath
import math
from typing import Callable

import numpy as np

from .grid import (
    ComplexField,
    GridSpec,
    OpticalConfig,
    ReferenceWaveParams,
    ScalarField,
    TruncationConfig,
    is_integer_charge,
)
from .specfun import DomainError, scaled_bessel_pair, scaled_bessel_sums

__all__ = [
    "fractional_phase_transmittance",
    "fourier_coefficient",
    "reconstruct_phase_series",
    "integer_mode_field",
    "fractional_field",
    "fractional_field_grid",
    "integer_mode_grid",
    "reference_wave",
    "interferogram",
    "SeriesNotConverged",
]

MODE_NORM = math.sqrt(math.pi / 8)
_CHUNK = 1 << 16


class SeriesNotConverged(RuntimeError):
    """Mode sum still changing after the allowed number of doublings."""


def fractional_phase_transmittance(mu: float, phi):
    """Plate transmittance ``exp(i mu phi)``; works elementwise on arrays."""
    return np.exp(1j * mu * np.asarray(phi)) if np.ndim(phi) else cmath.exp(1j * mu * phi)


def _series_prefactor(mu: float) -> complex:
    return cmath.exp(1j * math.pi * mu) * math.sin(math.pi * mu) / math.pi


def fourier_coefficient(alpha: float, n: int) -> complex:
    """Coefficient of ``e^{in phi}`` in the expansion of ``e^{i alpha phi}`` on ``[0, 2 pi)``.

    Raises :class:`DomainError` for integer ``alpha``, where the coefficient is
    the Kronecker delta ``[n == alpha]``.
    """
    if is_integer_charge(alpha):
        raise DomainError(f"alpha={alpha} is an integer; the coefficient is delta(n, alpha)")
    return _series_prefactor(alpha) / (alpha - n)


def reconstruct_phase_series(alpha: float, phi, n_terms: int):
    """Partial sum ``sum_{|n| <= n_terms} c_n e^{in phi}``.

    Integer ``alpha`` returns ``e^{i alpha phi}`` exactly (single nonzero term).
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    phi_arr = np.asarray(phi, dtype=float)
    if is_integer_charge(alpha):
        m = int(round(alpha))
        if abs(m) > n_terms:
            out = np.zeros_like(phi_arr, dtype=complex)
        else:
            out = np.exp(1j * m * phi_arr)
        return out if np.ndim(phi) else complex(out)
    n = np.arange(-n_terms, n_terms + 1)
    coeff = _series_prefactor(alpha) / (alpha - n)
    flat = phi_arr.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, 256):
        block = flat[start:start + 256]
        out[start:start + 256] = np.exp(1j * np.outer(block, n)) @ coeff
    out = out.reshape(phi_arr.shape)
    return out if np.ndim(phi) else complex(out)


def _half_power(m: int) -> complex:
    # principal branch of (-i)^{m/2}
    return cmath.exp(-0.25j * math.pi * m)


def integer_mode_field(n: int, rho: float, phi: float, optics: OpticalConfig) -> complex:
    """Propagated field of the integer plate ``e^{in phi}`` at ``(rho, phi, z)``."""
    if rho < 0:
        raise DomainError("rho must be >= 0")
    m = abs(int(n))
    x = float(optics.bessel_argument(rho))
    lo, hi = scaled_bessel_pair(m, x)
    return (
        MODE_NORM
        * cmath.exp(1j * optics.k * optics.z)
        * cmath.exp(1j * (n * phi + x))
        * _half_power(m)
        * 2.0
        * (lo - 1j * hi)
    )


def _mode_sum(
    rho: np.ndarray,
    phi: np.ndarray,
    optics: OpticalConfig,
    coeff: Callable[[int], complex],
    m_limits: tuple[int, ...],
) -> list[np.ndarray]:
    """``sum_{|n| <= L} coeff(n) U_n`` at each point, for every ``L`` in ``m_limits``.

    The mode sum is regrouped by Bessel order: order ``nu`` multiplies
    ``B_{2nu+1} - i B_{2nu-1}`` where
    ``B_m = (-i)^{m/2} (coeff(m) e^{im phi} + coeff(-m) e^{-im phi})``.
    Even ``m`` feed the half-integer run, odd ``m`` the integer run.
    """
    x = optics.bessel_argument(rho)
    m_top = max(m_limits)
    cache: dict[int, np.ndarray | None] = {}

    def b(m: int):
        if m < 0 or m > m_top:
            return None
        if m not in cache:
            if m == 0:
                c0 = coeff(0)
                cache[m] = None if c0 == 0 else np.full(phi.shape, c0, dtype=complex)
            else:
                cp, cm = coeff(m), coeff(-m)
                if cp == 0 and cm == 0:
                    cache[m] = None
                else:
                    e = np.exp(1j * m * phi)
                    cache[m] = _half_power(m) * (cp * e + cm * np.conj(e))
            cache.pop(m + 6, None)
        return cache[m]

    def weight_for(lower_m: int, upper_m: int):
        # nu = (lower_m - 1)/2 = (upper_m + 1)/2
        lo_b, up_b = b(lower_m), b(upper_m)
        out = []
        for lim in m_limits:
            w = None
            if lo_b is not None and lower_m <= lim:
                w = lo_b
            if up_b is not None and 0 <= upper_m <= lim:
                w = -1j * up_b if w is None else w - 1j * up_b
            out.append(w)
        return out

    totals = [np.zeros(rho.shape, dtype=complex) for _ in m_limits]
    # half-integer orders: nu_j = j - 1/2, lower m = 2j, upper m = 2j - 2
    top_half = m_top // 2 + 1
    parts = scaled_bessel_sums(x, True, top_half, lambda j: weight_for(2 * j, 2 * j - 2), len(m_limits))
    for t, p in zip(totals, parts):
        t += p
    cache.clear()
    # integer orders: nu_j = j, lower m = 2j + 1, upper m = 2j - 1
    top_int = (m_top + 1) // 2
    parts = scaled_bessel_sums(x, False, top_int, lambda j: weight_for(2 * j + 1, 2 * j - 1), len(m_limits))
    for t, p in zip(totals, parts):
        t += p
    common = MODE_NORM * 2.0 * cmath.exp(1j * optics.k * optics.z) * np.exp(1j * x)
    return [common * t for t in totals]


def _order_cutoff(x_max: float) -> int:
    # J_nu(x) < ~1e-30 for nu beyond x + 12 x^(1/3) + 40; returns the matching m
    nu = x_max + 12.0 * x_max ** (1.0 / 3.0) + 40.0
    return 2 * int(math.ceil(nu)) + 2


def _chunked_mode_sum(rho, phi, optics, coeff, m_limits):
    rho = np.asarray(rho, dtype=float).reshape(-1)
    phi = np.asarray(phi, dtype=float).reshape(-1)
    outs = [np.empty(rho.shape, dtype=complex) for _ in m_limits]
    # sorting by radius lets inner chunks stop the recurrence early
    order = np.argsort(rho, kind="stable")
    for start in range(0, rho.size, _CHUNK):
        idx = order[start:start + _CHUNK]
        cut = _order_cutoff(float(optics.bessel_argument(rho[idx[-1]])))
        limits = tuple(min(lim, cut) for lim in m_limits)
        parts = _mode_sum(rho[idx], phi[idx], optics, coeff, limits)
        for o, p in zip(outs, parts):
            o[idx] = p
    return outs


def _fractional_coeff(mu: float):
    pref = _series_prefactor(mu)
    return lambda n: pref / (mu - n)


def _integer_coeff(n0: int):
    return lambda n: 1.0 if n == n0 else 0.0


def fractional_field(
    mu: float,
    rho: float,
    phi: float,
    optics: OpticalConfig,
    trunc: TruncationConfig = TruncationConfig(),
) -> complex:
    """Propagated field behind the plate ``e^{i mu phi}`` at a single point.

    Integer ``mu`` (within 1e-9) returns :func:`integer_mode_field` directly.
    """
    if rho < 0:
        raise DomainError("rho must be >= 0")
    if is_integer_charge(mu):
        return integer_mode_field(int(round(mu)), rho, phi, optics)
    n_max = trunc.floor_for(float(optics.bessel_argument(rho)))
    (u,) = _chunked_mode_sum(np.array([rho]), np.array([phi]), optics, _fractional_coeff(mu), (n_max,))
    return complex(u[0])


def fractional_field_points(mu, rho, phi, optics, trunc=TruncationConfig()) -> np.ndarray:
    """Vectorised :func:`fractional_field` for arrays of points (fixed truncation)."""
    rho = np.asarray(rho, dtype=float)
    phi = np.broadcast_to(np.asarray(phi, dtype=float), rho.shape)
    if np.any(rho < 0):
        raise DomainError("rho must be >= 0")
    if is_integer_charge(mu):
        coeff = _integer_coeff(int(round(mu)))
        n_max = abs(int(round(mu)))
    else:
        coeff = _fractional_coeff(mu)
        n_max = trunc.floor_for(float(optics.bessel_argument(rho.max(initial=0.0))))
    (u,) = _chunked_mode_sum(rho, phi, optics, coeff, (n_max,))
    return u.reshape(rho.shape)


def integer_mode_grid(n: int, grid: GridSpec, optics: OpticalConfig) -> ComplexField:
    rho, phi = grid.polar()
    (u,) = _chunked_mode_sum(rho, phi, optics, _integer_coeff(int(n)), (abs(int(n)),))
    return ComplexField(grid, u.reshape(grid.shape), {"mu": float(n), "n_max": abs(int(n))})


def fractional_field_grid(
    mu: float,
    grid: GridSpec,
    optics: OpticalConfig,
    trunc: TruncationConfig = TruncationConfig(),
) -> ComplexField:
    """Evaluate the fractional field on every pixel of ``grid``.

    With ``trunc.n_max=None`` the sum starts at the adaptive floor and is
    doubled until the relative L-infinity change is below ``trunc.tail_tol``;
    the more accurate (doubled) sum is returned.  ``meta`` records the
    truncation used and the last measured change.
    """
    if is_integer_charge(mu):
        f = integer_mode_grid(int(round(mu)), grid, optics)
        f.meta["mu"] = float(mu)
        return f
    rho, phi = grid.polar()
    coeff = _fractional_coeff(mu)
    if trunc.n_max is not None:
        (u,) = _chunked_mode_sum(rho, phi, optics, coeff, (int(trunc.n_max),))
        return ComplexField(grid, u.reshape(grid.shape), {"mu": float(mu), "n_max": int(trunc.n_max)})
    n_max = trunc.floor_for(float(optics.bessel_argument(rho.max())))
    for _ in range(trunc.max_doublings + 1):
        coarse, fine = _chunked_mode_sum(rho, phi, optics, coeff, (n_max, 2 * n_max))
        change = float(np.max(np.abs(fine - coarse)) / np.max(np.abs(fine)))
        if change < trunc.tail_tol:
            return ComplexField(
                grid,
                fine.reshape(grid.shape),
                {"mu": float(mu), "n_max": 2 * n_max, "tail_change": change},
            )
        n_max *= 2
    raise SeriesNotConverged(f"mode sum for mu={mu} not converged at n_max={n_max}")


def reference_wave(x, y, params: ReferenceWaveParams):
    """Tilted Gaussian reference ``A0 e^{-iqx} exp(-(rho^2 - beta x) / w^2)``.

    ``params`` must carry explicit ``tilt`` and ``width``
    (see :meth:`ReferenceWaveParams.resolved`).
    """
    if params.tilt is None or params.width is None:
        raise ValueError("reference_wave needs resolved tilt and width")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho2 = x * x + y * y
    env = np.exp(-(rho2 - params.shift * x) / params.width**2)
    out = params.amplitude * np.exp(-1j * params.tilt * x) * env
    return out if out.ndim else complex(out)


def interferogram(field: ComplexField, params: ReferenceWaveParams) -> ScalarField:
    """Intensity ``|U + E|^2`` of the field and the reference wave."""
    params = params.resolved(field.grid)
    xx, yy = field.grid.mesh()
    total = field.values + reference_wave(xx, yy, params)
    return ScalarField(field.grid, np.abs(total) ** 2)
