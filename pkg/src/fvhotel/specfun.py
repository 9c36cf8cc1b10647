"""Bessel functions of the first kind at integer and half-integer order.

Orders are carried as twice their value (:class:`HalfIntOrder`) so that the
sequence ``-1/2, 0, 1/2, 1, ...`` needed by the integer-mode propagator is
represented exactly.

Evaluation uses the power series for small arguments and Miller's downward
recurrence otherwise.  Downward sequences are normalised with the closed forms
``sqrt(x) J_{-1/2} = sqrt(2/pi) cos x`` and ``sqrt(x) J_{1/2} = sqrt(2/pi) sin x``
for half-integer orders and with the Neumann identity
``J_0 + 2 (J_2 + J_4 + ...) = 1`` for integer orders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "HalfIntOrder",
    "gamma_real",
    "bessel_j",
    "bessel_sequence",
    "scaled_bessel_pair",
    "scaled_bessel_sums",
]

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Above this magnitude a downward sequence is rescaled to stay clear of overflow.
_RESCALE_AT = 1e200
# Power series is used below this argument.
_SERIES_X = 2.0


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True, order=True)
class HalfIntOrder:
    """Bessel order ``nu`` stored as the integer ``2*nu``."""

    twice_order: int

    def __post_init__(self):
        if not isinstance(self.twice_order, (int, np.integer)):
            raise TypeError("twice_order must be an integer")
        if self.twice_order < -1:
            raise DomainError(f"order {self.twice_order}/2 below -1/2 is not supported")

    @classmethod
    def of(cls, nu: float) -> "HalfIntOrder":
        twice = round(2 * nu)
        if abs(2 * nu - twice) > 1e-12:
            raise DomainError(f"order {nu} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice_order / 2

    @property
    def is_half(self) -> bool:
        return self.twice_order % 2 == 1

    def __repr__(self):
        return f"HalfIntOrder({self.twice_order}/2)"


def _as_order(order) -> HalfIntOrder:
    if isinstance(order, HalfIntOrder):
        return order
    return HalfIntOrder.of(order)


def gamma_real(x: float) -> float:
    """Gamma function for positive real ``x``."""
    if not x > 0:
        raise DomainError(f"gamma_real requires x > 0, got {x}")
    return math.gamma(x)


def _series(nu: float, x: float, terms: int = 400) -> float:
    # sum_m (-1)^m (x/2)^(nu+2m) / (m! Gamma(nu+m+1))
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    log_lead = nu * (math.log(x) - math.log(2.0)) - math.lgamma(nu + 1)
    lead = math.exp(log_lead)
    q = -(x / 2) ** 2
    term, total = 1.0, 1.0
    for m in range(1, terms):
        term *= q / (m * (m + nu))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return lead * total


def _start_order(top: int, x_max: float) -> int:
    # Starting index for the downward recurrence, well into the region where
    # J decays faster than exponentially.
    reach = max(float(top), float(x_max))
    return int(math.ceil(reach + 8.0 * max(x_max, 1.0) ** (1 / 3) + 2.0 * math.sqrt(reach) + 30))


def _half_norm(f0, f1, x):
    # Least-squares scale mapping the unnormalised pair (f_{-1/2}, f_{1/2}) onto
    # the closed forms; cos and sin never vanish together.
    m = np.maximum(np.abs(f0), np.abs(f1))
    a, b = f0 / m, f1 / m
    return SQRT_2_OVER_PI * (a * np.cos(x) + b * np.sin(x)) / ((a * a + b * b) * m * np.sqrt(x))


def scaled_bessel_sums(
    x: np.ndarray,
    half: bool,
    top: int,
    weights: Callable[[int], Sequence[np.ndarray | complex | None]],
    n_sums: int = 1,
) -> list[np.ndarray]:
    """Weighted sums of ``sqrt(x) J_nu(x)`` over a run of orders.

    The orders are ``nu_j = j`` (``half=False``) or ``nu_j = j - 1/2``
    (``half=True``) for ``j = 0..top``.  ``weights(j)`` returns ``n_sums``
    weight arrays (broadcastable to ``x``, ``None`` meaning zero) and the
    result is ``[sum_j w_j[s] * sqrt(x) J_{nu_j}(x) for s in range(n_sums)]``.

    All points are advanced through one downward recurrence so the cost is
    linear in ``top`` and in ``x.size``; no table of orders is stored.
    ``x`` is one-dimensional and may contain zeros, where the limiting
    values are used.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be one-dimensional")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError("scaled_bessel_sums requires finite x >= 0")
    shape = x.shape
    zero = x == 0.0
    xs = np.where(zero, 1.0, x)
    sums = [np.zeros(x.size, dtype=complex) for _ in range(n_sums)]
    if x.size == 0:
        return [s.reshape(shape) for s in sums]

    start = _start_order(top, float(xs.max()))
    f_next = np.zeros(x.size)
    f = np.full(x.size, 1e-30)
    norm = np.zeros(x.size)
    two_over_x = 2.0 / xs
    # f currently holds index `start`; walk down to index 0.
    keep_low = {}
    for j in range(start, -1, -1):
        if j <= top:
            w = weights(j)
            for s in range(n_sums):
                if w[s] is not None:
                    sums[s] += w[s] * f
        if half:
            if j <= 1:
                keep_low[j] = f.copy()
        elif j % 2 == 0:
            norm += f if j == 0 else 2.0 * f
        if j == 0:
            break
        # J_{nu-1} = (2 nu / x) J_nu - J_{nu+1}
        nu = j - 0.5 if half else float(j)
        f_prev = nu * two_over_x * f - f_next
        f_next, f = f, f_prev
        big = np.abs(f) > _RESCALE_AT
        if big.any():
            scale = np.where(big, 1.0 / _RESCALE_AT, 1.0)
            f *= scale
            f_next *= scale
            norm *= scale
            for s in range(n_sums):
                sums[s] *= scale
            for key in keep_low:
                keep_low[key] *= scale

    root = np.sqrt(xs)
    if half:
        factor = _half_norm(keep_low[0], keep_low[1], xs) * root
    else:
        factor = root / norm
    out = []
    for s in range(n_sums):
        res = sums[s] * factor
        if zero.any():
            # sqrt(x) J_nu(x) -> sqrt(2/pi) for nu = -1/2, else 0
            w0 = weights(0)[s] if half else None
            res[zero] = 0.0 if w0 is None else (np.broadcast_to(w0, x.shape)[zero] * SQRT_2_OVER_PI)
        out.append(res.reshape(shape))
    return out


def bessel_sequence(x: float, half: bool, top: int) -> np.ndarray:
    """``J_{nu_j}(x)`` for ``j = 0..top`` with ``nu_j = j`` or ``j - 1/2``.

    Scalar Miller recurrence; stores the whole run of orders.
    """
    if not x > 0:
        raise DomainError("bessel_sequence requires x > 0")
    start = _start_order(top, x)
    f = np.zeros(start + 2)
    f[start] = 1e-30
    for j in range(start, 0, -1):
        nu = j - 0.5 if half else float(j)
        f[j - 1] = 2.0 * nu / x * f[j] - f[j + 1]
        if abs(f[j - 1]) > _RESCALE_AT:
            f[j - 1:] /= _RESCALE_AT
    if half:
        lam = float(_half_norm(f[0], f[1], x))
    else:
        lam = 1.0 / (f[0] + 2.0 * f[2:start + 1:2].sum())
    return f[: top + 1] * lam


def bessel_j(order, x: float) -> float:
    """Bessel function of the first kind ``J_nu(x)`` for real ``x >= 0``.

    ``order`` is a :class:`HalfIntOrder` or a number equal to an integer or
    half-integer not below ``-1/2``.
    """
    order = _as_order(order)
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"bessel_j requires finite x >= 0, got {x}")
    nu = order.value
    if order.twice_order == -1:
        if x == 0:
            raise DomainError("J_{-1/2} diverges at x = 0")
        return SQRT_2_OVER_PI * math.cos(x) / math.sqrt(x)
    if order.twice_order == 1:
        return SQRT_2_OVER_PI * math.sin(x) / math.sqrt(x)
    if x == 0:
        return 1.0 if order.twice_order == 0 else 0.0
    if x < _SERIES_X:
        return _series(nu, x)
    j = order.twice_order // 2 + (1 if order.is_half else 0)
    return float(bessel_sequence(x, order.is_half, j)[j])


def scaled_bessel_pair(n: int, x: float) -> tuple[float, float]:
    """``(sqrt(x) J_{(|n|-1)/2}(x), sqrt(x) J_{(|n|+1)/2}(x))``, finite at ``x = 0``."""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"scaled_bessel_pair requires finite x >= 0, got {x}")
    m = abs(int(n))
    if x == 0:
        return (SQRT_2_OVER_PI if m == 0 else 0.0), 0.0
    root = math.sqrt(x)
    lo = bessel_j(HalfIntOrder(m - 1), x)
    hi = bessel_j(HalfIntOrder(m + 1), x)
    return root * lo, root * hi
