"""Gamma function and sphere constants against independent references."""

import numpy as np
import pytest

from fracpot import ball_volume, gamma, sphere_surface

from oracles import gamma_series


def test_gamma_matches_series_oracle_on_unit_interval_shifted():
    # dense sweep of (0, 10]; the oracle uses only the zeta Taylor series
    # and the recurrence, nothing shared with the implementation
    xs = np.linspace(0.01, 10.0, 1000)
    for x in xs:
        ref = gamma_series(float(x))
        assert abs(gamma(float(x)) - ref) <= 1e-12 * abs(ref)


def test_gamma_half_integers_closed_form():
    assert gamma(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-15)
    assert gamma(1.5) == pytest.approx(0.5 * np.sqrt(np.pi), rel=1e-15)
    assert gamma(2.5) == pytest.approx(0.75 * np.sqrt(np.pi), rel=1e-15)


def test_gamma_integers_are_factorials():
    fact = 1.0
    for k in range(1, 12):
        assert gamma(float(k)) == pytest.approx(fact, rel=1e-13)
        fact *= k


def test_gamma_recurrence():
    for x in (0.3, 1.7, 4.2, 9.9):
        assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-13)


def test_gamma_reflection_negative_arguments():
    # Gamma(-1/2) = -2 sqrt(pi)
    assert gamma(-0.5) == pytest.approx(-2.0 * np.sqrt(np.pi), rel=1e-13)
    for x in (-0.3, -1.6, -2.2):
        ref = np.pi / (np.sin(np.pi * x) * gamma(1.0 - x))
        assert gamma(x) == pytest.approx(ref, rel=1e-12)


def test_gamma_poles_raise():
    for x in (0.0, -1.0, -2.0, -7.0):
        with pytest.raises(ValueError):
            gamma(x)


def test_sphere_surface_closed_forms():
    assert sphere_surface(1) == pytest.approx(2.0, rel=1e-15)
    assert sphere_surface(2) == pytest.approx(2.0 * np.pi, rel=1e-14)
    assert sphere_surface(3) == pytest.approx(4.0 * np.pi, rel=1e-14)
    assert sphere_surface(4) == pytest.approx(2.0 * np.pi**2, rel=1e-14)


def test_ball_volume_closed_forms():
    assert ball_volume(1) == pytest.approx(2.0, rel=1e-15)
    assert ball_volume(2) == pytest.approx(np.pi, rel=1e-14)
    assert ball_volume(3) == pytest.approx(4.0 * np.pi / 3.0, rel=1e-14)


def test_surface_is_dimension_times_volume():
    for n in range(1, 6):
        assert sphere_surface(n) == pytest.approx(n * ball_volume(n), rel=1e-13)
