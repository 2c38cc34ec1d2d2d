"""J0/Y0 rational approximations against independent oracles."""

from math import factorial

import mpmath
import numpy as np
import pytest

from helmdual.errors import DomainError
from helmdual.special import bessel_j0, bessel_y0

EULER_GAMMA = 0.57721566490153286061


def y0_series(x, terms=40):
    """Ascending series oracle: Y0 = (2/pi)[(ln(x/2)+gamma) J0 + sum_k ...]."""
    j0 = sum((-1) ** k * (x * x / 4.0) ** k / factorial(k) ** 2 for k in range(terms))
    harmonic = 0.0
    tail = 0.0
    for k in range(1, terms):
        harmonic += 1.0 / k
        tail += (-1) ** (k + 1) * harmonic * (x * x / 4.0) ** k / factorial(k) ** 2
    return 2.0 / np.pi * ((np.log(x / 2.0) + EULER_GAMMA) * j0 + tail)


def test_j0_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-6, 5.0, 150), np.linspace(5.001, 300.0, 250)])
    for x in xs:
        ref = float(mpmath.besselj(0, x))
        assert abs(bessel_j0(x) - ref) <= 1e-13 * max(abs(ref), 1e-1)


def test_y0_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-6, 5.0, 150), np.linspace(5.001, 300.0, 250)])
    for x in xs:
        ref = float(mpmath.bessely(0, x))
        assert abs(bessel_y0(x) - ref) <= 1e-13 * max(abs(ref), 1e-1)


def test_y0_against_series_small_arguments():
    for x in np.geomspace(1e-3, 2.0, 60):
        assert abs(bessel_y0(x) - y0_series(x)) <= 1e-10 * max(1.0, abs(y0_series(x)))


def test_vectorized_matches_scalar():
    xs = np.array([0.1, 1.0, 4.0, 6.0, 30.0])
    np.testing.assert_allclose(bessel_j0(xs), [bessel_j0(x) for x in xs], rtol=0)
    np.testing.assert_allclose(bessel_y0(xs), [bessel_y0(x) for x in xs], rtol=0)


def test_y0_domain():
    with pytest.raises(DomainError):
        bessel_y0(0.0)
    with pytest.raises(DomainError):
        bessel_y0(np.array([1.0, -2.0]))
