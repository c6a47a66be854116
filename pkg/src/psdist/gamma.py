"""Complex Gamma function by the Lanczos approximation (g = 7, n = 9)."""
import numpy as np

_G = 7.0
_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

POLE_TOL = 1e-8


class SingularityError(ArithmeticError):
    """Argument lies within POLE_TOL of a pole."""


def _lanczos(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    x = np.full_like(z, _COEF[0])
    for i in range(1, len(_COEF)):
        x = x + _COEF[i] / (z + i)
    t = z + _G + 0.5
    return np.sqrt(2 * np.pi) * np.exp((z + 0.5) * np.log(t) - t) * x


def near_pole(z, tol=POLE_TOL):
    """True where z is within ``tol`` of a non-positive integer."""
    z = np.asarray(z, dtype=complex)
    r = np.round(z.real)
    return (r <= 0) & (np.abs(z - r) < tol)


def cgamma(z):
    """Gamma(z) for complex z, with reflection for Re z < 1/2."""
    z = np.asarray(z, dtype=complex)
    if np.any(near_pole(z)):
        raise SingularityError("Gamma argument too close to a pole")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    right = z.real >= 0.5
    out[right] = _lanczos(z[right])
    zl = z[~right]
    if zl.size:
        out[~right] = np.pi / (np.sin(np.pi * zl) * _lanczos(1.0 - zl))
    return out[0] if scalar else out
