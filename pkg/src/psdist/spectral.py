"""Harish-Chandra c-function, Plancherel density and related spectral maps.

Spectral parameters are complex scalars: in rank one lambda is identified with
lambda * alpha, so that lambda_alpha = lambda and rho = (m_a + 2 m_2a) / 2.
On the disk (m_a = 1, m_2a = 0) this gives rho = 1/2.
"""
import numpy as np
from scipy import integrate

from .gamma import SingularityError, cgamma, near_pole
from .liegroup import DISK_ROOTS, DomainError, RootDatum

__all__ = [
    "SingularityError",
    "c_alpha",
    "c_function",
    "c_function_integral",
    "plancherel_density",
    "plancherel_case",
    "plancherel_gamma",
    "e_function",
    "laplace_eigenvalue",
]

DENSITY_CALIBRATION_POINT = 1.0


def _gamma_args(il, roots):
    return (
        il / 2 + roots.m_alpha / 4 + 0.5,
        il / 2 + roots.m_alpha / 4 + roots.m_2alpha / 2,
    )


def c_alpha(lam, roots=DISK_ROOTS):
    """Unnormalized factor 2^{-i l} G(i l) / (G(i l/2 + m/4 + 1/2) G(i l/2 + m/4 + m2/2))."""
    il = 1j * np.asarray(lam, dtype=complex)
    args = (il,) + _gamma_args(il, roots)
    for z in args:
        if np.any(near_pole(z)):
            raise SingularityError(f"Gamma argument near a pole at lambda={lam}")
    num = 2.0 ** (-il) * cgamma(il)
    d1, d2 = _gamma_args(il, roots)
    return num / (cgamma(d1) * cgamma(d2))


def c_function(lam, roots=DISK_ROOTS):
    """Gindikin-Karpelevich product, normalized by c(-i rho) = 1."""
    c0 = 1.0 / c_alpha(-1j * roots.rho, roots)
    return c0 * c_alpha(lam, roots)


def _logcosh(v):
    v = np.abs(v)
    return v + np.log1p(np.exp(-2 * v)) - np.log(2.0)


def c_function_integral(lam, tol=1e-13):
    """c(lambda) on the disk as the integral over Nbar, by quadrature.

    With nbar_u = [[1, 0], [u, 1]] one has H(nbar_u) = ln(1 + u^2) and
    d(nbar) = du / pi.  The substitution u = sinh(v) turns the integrand into
    cosh(v)^{-2 i lambda}, smooth and exponentially decaying for Re(i lambda) > 0.
    """
    s = 1j * complex(lam)
    if s.real <= 0:
        raise DomainError("c_function_integral needs Re(i lambda) > 0")
    vmax = 40.0 / s.real
    f = lambda v: np.exp(-2 * s * _logcosh(v))
    re, _ = integrate.quad(lambda v: f(v).real, 0, vmax, limit=2000, epsabs=tol, epsrel=tol)
    im, _ = integrate.quad(lambda v: f(v).imag, 0, vmax, limit=2000, epsabs=tol, epsrel=tol)
    return 2 * (re + 1j * im) / np.pi


def plancherel_gamma(lam, roots=DISK_ROOTS):
    """1 / (c(lambda) c(-lambda)) evaluated directly from the Gamma product."""
    lam = np.asarray(lam, dtype=float)
    return (1.0 / (c_function(lam, roots) * c_function(-lam, roots))).real


def plancherel_case(roots):
    """Case label (a)-(d) from the parities of the multiplicities."""
    ma, m2a = roots.m_alpha, roots.m_2alpha
    if m2a == 0:
        return "a" if ma % 2 == 0 else "b"
    if ma % 2 or m2a % 2 == 0:
        raise DomainError(
            "when 2 alpha is a root, m_alpha must be even and m_2alpha odd"
        )
    return "c" if (ma // 2) % 2 == 0 else "d"


def _density_shape(lam, roots):
    """lambda_alpha * p_alpha(lambda) * q_alpha(lambda), without the constant."""
    l = np.asarray(lam, dtype=float)
    ma, m2a = roots.m_alpha, roots.m_2alpha
    case = plancherel_case(roots)
    p = np.ones_like(l)
    if case == "a":
        p = l.copy()
        for k in range(1, ma // 2):
            p *= l**2 + k**2
        q = np.ones_like(l)
    elif case == "b":
        for k in range(0, (ma - 3) // 2 + 1):
            p *= l**2 + (k + 0.5) ** 2
        q = np.tanh(np.pi * l)
    elif case == "c":
        h = l / 2
        for k in range(0, ma // 4):
            p *= h**2 + (k + 0.5) ** 2
        for j in range(0, ma // 4 + (m2a - 1) // 2):
            p *= h**2 + (j + 0.5) ** 2
        q = np.tanh(np.pi * h)
    else:
        h = l / 2
        for k in range(0, (ma - 2) // 4 + 1):
            p *= h**2 + k**2
        for j in range(1, (ma + 2 * m2a) // 4):
            p *= h**2 + j**2
        with np.errstate(divide="ignore", invalid="ignore"):
            q = 1.0 / np.tanh(np.pi * h)
    return l * p * q


def plancherel_density(lam, roots=DISK_ROOTS):
    """Plancherel density 1 / (c(lambda) c(-lambda)) for real lambda.

    Evaluated through the closed forms C * lambda * p(lambda) * q(lambda) of the
    four multiplicity cases. The positive constant C is calibrated once by
    matching the Gamma product at lambda = DENSITY_CALIBRATION_POINT.
    """
    lam = np.asarray(lam, dtype=float)
    ref = DENSITY_CALIBRATION_POINT
    const = plancherel_gamma(ref, roots) / _density_shape(ref, roots)
    return const * _density_shape(lam, roots)


def e_function(lam, roots=DISK_ROOTS):
    """Harish-Chandra e-function for the longest Weyl element in rank one."""
    il = 1j * np.asarray(lam, dtype=complex)
    d1, d2 = _gamma_args(il, roots)
    for z in (d1, d2):
        if np.any(near_pole(z)):
            raise SingularityError(f"Gamma argument near a pole at lambda={lam}")
    return cgamma(d1) * cgamma(d2)


def laplace_eigenvalue(lam, roots=DISK_ROOTS):
    """Eigenvalue -(lambda^2 + rho^2) of the Laplacian on plane waves."""
    lam = np.asarray(lam, dtype=complex)
    return -(lam**2 + roots.rho**2)


def root_datum(m_alpha, m_2alpha=0):
    return RootDatum(m_alpha, m_2alpha)
