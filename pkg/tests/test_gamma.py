import math
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import loggamma

from psdist.gamma import SingularityError, cgamma, near_pole


@pytest.mark.parametrize("n", range(1, 10))
def test_factorials(n):
    assert cgamma(n) == pytest.approx(math.factorial(n - 1), rel=1e-13)


def test_half():
    assert cgamma(0.5) == pytest.approx(np.sqrt(np.pi), rel=1e-14)


@given(st.floats(-4.5, 6), st.floats(-8, 8))
def test_matches_scipy(x, y):
    z = complex(x, y)
    if near_pole(z, 1e-3):
        return
    assert cgamma(z) == pytest.approx(np.exp(loggamma(z)), rel=1e-11, abs=1e-300)


def test_vectorized_shape():
    z = np.array([[0.5 + 1j, 2.0], [-0.5, 3 - 2j]])
    out = cgamma(z)
    assert out.shape == z.shape
    np.testing.assert_allclose(out, np.exp(loggamma(z)), rtol=1e-12)


@pytest.mark.parametrize("y", [0.3, 1.0, 4.0])
def test_modulus_identities(y):
    # |G(iy)|^2 = pi / (y sinh pi y), |G(1/2 + iy)|^2 = pi / cosh pi y
    assert abs(cgamma(1j * y)) ** 2 == pytest.approx(np.pi / (y * np.sinh(np.pi * y)), rel=1e-12)
    assert abs(cgamma(0.5 + 1j * y)) ** 2 == pytest.approx(np.pi / np.cosh(np.pi * y), rel=1e-12)


@pytest.mark.parametrize("z", [0.0, -1.0, -3.0, -2 + 1e-9, 1e-10j])
def test_poles_raise(z):
    with pytest.raises(SingularityError):
        cgamma(z)


def test_near_pole_only_for_nonpositive_integers():
    assert not near_pole(1.0)
    assert not near_pole(-0.5)
    assert near_pole(-4.0)
