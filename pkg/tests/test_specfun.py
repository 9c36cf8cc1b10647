"""Bessel/Gamma kernel against closed forms, recurrences and independent references.

Frozen reference values were computed with mpmath at 30 digits.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from fvhotel.specfun import (
    DomainError,
    HalfIntOrder,
    bessel_j,
    bessel_sequence,
    gamma_real,
    scaled_bessel_pair,
    scaled_bessel_sums,
)

SQ2PI = math.sqrt(2 / math.pi)


# --- gamma ---------------------------------------------------------------


@pytest.mark.parametrize("x, expected", [(1.0, 1.0), (0.5, math.sqrt(math.pi)), (5.0, 24.0)])
def test_gamma_examples(x, expected):
    assert gamma_real(x) == pytest.approx(expected, rel=1e-12)


def test_gamma_recurrence_up_to_50():
    xs = np.linspace(0.01, 49, 300)
    for x in xs:
        assert gamma_real(x + 1) == pytest.approx(x * gamma_real(x), rel=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma_real(x)


# --- orders --------------------------------------------------------------


def test_half_int_order_exact():
    assert HalfIntOrder.of(-0.5).twice_order == -1
    assert HalfIntOrder.of(3).twice_order == 6
    assert HalfIntOrder(7).value == 3.5 and HalfIntOrder(7).is_half
    assert HalfIntOrder(4) < HalfIntOrder(5)


def test_half_int_order_rejects():
    with pytest.raises(DomainError):
        HalfIntOrder(-3)
    with pytest.raises(DomainError):
        HalfIntOrder.of(0.3)


# --- bessel_j examples ---------------------------------------------------


@pytest.mark.parametrize(
    "nu, x, expected",
    [
        (0, 0.0, 1.0),
        (0.5, math.pi / 2, 0.63661977236758134),
        (3, 5.0, 0.36483123061366699),
        (20.5, 30.0, -0.064292512919191251),
        (40, 100.0, 0.072701754822811057),
        (100, 150.0, -0.015359526118405391),
        (7, 1.5, 2.4679795788287941e-05),
    ],
)
def test_bessel_frozen(nu, x, expected):
    assert bessel_j(nu, x) == pytest.approx(expected, rel=1e-9, abs=1e-300)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_j(1, -1.0)
    with pytest.raises(DomainError):
        bessel_j(-0.5, 0.0)
    with pytest.raises(DomainError):
        bessel_j(0.25, 1.0)


def test_half_integer_closed_forms():
    xs = np.geomspace(1e-3, 100, 400)
    for x in xs:
        s = SQ2PI / math.sqrt(x)
        assert bessel_j(0.5, x) == pytest.approx(s * math.sin(x), rel=1e-10, abs=1e-300)
        assert bessel_j(-0.5, x) == pytest.approx(s * math.cos(x), rel=1e-10, abs=1e-300)


def test_half_integer_upward_recurrence_small_order():
    # J_{3/2} and J_{5/2} built upward from the closed forms are well conditioned for x > nu
    for x in np.linspace(5, 100, 60):
        j_m, j_p = SQ2PI * math.cos(x) / math.sqrt(x), SQ2PI * math.sin(x) / math.sqrt(x)
        j32 = j_p / x - j_m
        j52 = 3 * j32 / x - j_p
        assert bessel_j(1.5, x) == pytest.approx(j32, abs=1e-12)
        assert bessel_j(2.5, x) == pytest.approx(j52, abs=1e-12)


def test_bessel_matches_scipy_grid():
    """Envelope-relative error over 0 <= x <= 200 and 2 nu <= 200."""
    xs = np.concatenate([np.linspace(0.0, 2.0, 21), np.linspace(2.5, 200.0, 80)])
    worst = 0.0
    for twice in range(0, 201, 7):
        nu = twice / 2
        for x in xs:
            ref = special.jv(nu, x)
            scale = max(abs(ref), 1e-3 / math.sqrt(max(x, 1.0)))
            worst = max(worst, abs(bessel_j(HalfIntOrder(twice), x) - ref) / scale)
    assert worst < 1e-9


def test_bessel_relative_away_from_zeros():
    rng = np.random.default_rng(7)
    for _ in range(400):
        twice = int(rng.integers(0, 201))
        x = float(rng.uniform(0, 200))
        ref = special.jv(twice / 2, x)
        if abs(ref) < 1e-6:
            continue
        assert bessel_j(HalfIntOrder(twice), x) == pytest.approx(ref, rel=1e-9)


def test_recurrence_residual_invariant():
    rng = np.random.default_rng(3)
    for _ in range(500):
        twice = int(rng.integers(1, 81))  # nu in [1/2, 40]
        nu = twice / 2
        x = float(rng.uniform(1e-6, 100))
        jm = bessel_j(HalfIntOrder(twice - 2), x)
        j0 = bessel_j(HalfIntOrder(twice), x)
        jp = bessel_j(HalfIntOrder(twice + 2), x)
        # the 2nu/x term is large for small x; scale the tolerance by it
        scale = max(1.0, abs(j0), abs(2 * nu / x * j0))
        assert abs(jm + jp - 2 * nu / x * j0) <= 1e-8 * scale


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 200), st.floats(0, 200, allow_nan=False))
def test_boundedness(twice, x):
    assert abs(bessel_j(HalfIntOrder(twice), x)) <= 1.0 + 1e-12


# --- sequences and scaled pairs -----------------------------------------


@pytest.mark.parametrize("half", [False, True])
@pytest.mark.parametrize("x", [2.5, 17.0, 95.0, 250.0])
def test_bessel_sequence_matches_scipy(half, x):
    seq = bessel_sequence(x, half, 120)
    orders = np.arange(121) - (0.5 if half else 0.0)
    ref = special.jv(orders, x)
    assert np.max(np.abs(seq - ref)) < 1e-12


def test_scaled_pair_examples():
    a, b = scaled_bessel_pair(0, 0.0)
    assert a == pytest.approx(0.7978845608, abs=1e-10) and b == 0.0
    assert scaled_bessel_pair(1, 0.0) == (0.0, 0.0)
    a, b = scaled_bessel_pair(2, 4.0)
    assert a == pytest.approx(-0.60384102658327890, abs=1e-12)
    assert b == pytest.approx(0.37057189670853791, abs=1e-12)


def test_scaled_pair_limit_continuity():
    a, b = scaled_bessel_pair(0, 1e-12)
    assert a == pytest.approx(SQ2PI, rel=1e-9) and abs(b) < 1e-9
    for n in (1, 2, 5):
        a, b = scaled_bessel_pair(n, 1e-10)
        assert abs(a) < 1e-4 and abs(b) < 1e-4


def test_scaled_pair_symmetric_in_n():
    for x in (0.3, 7.0, 40.0):
        assert scaled_bessel_pair(-3, x) == scaled_bessel_pair(3, x)


@pytest.mark.parametrize("half", [False, True])
def test_scaled_sums_vectorized(half):
    x = np.array([0.0, 0.7, 3.0, 25.0, 140.0])
    top = 60
    rng = np.random.default_rng(1)
    w = rng.normal(size=top + 1)
    (got,) = scaled_bessel_sums(x, half, top, lambda j: (w[j],))
    orders = np.arange(top + 1) - (0.5 if half else 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        ref = np.array([np.sum(w * np.sqrt(xi) * special.jv(orders, xi)) for xi in x])
    ref[0] = w[0] * SQ2PI if half else 0.0
    assert np.max(np.abs(got - ref)) < 1e-11
