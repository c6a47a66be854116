"""Non-Euclidean quantization Op(a) and the Kohn-Nirenberg operator U.

    Ua(z, lam, b) = e^{-(i lam + rho)<z,b>} int_X int_{mu>0} int_B
        e^{(i mu + rho)<z,b'>} e^{(i lam + rho)<w,b>} e^{(-i mu + rho)<w,b'>}
        a(w, mu, b') KAPPA |c(mu)|^{-2} dmu dw db'

The direct path evaluates this as a Fourier transform in w followed by an
inversion in (mu, b').  The convolution path integrates
E_{mu,lam}(g^{-1} h) a(g.(o, 1), mu) over G with h, g frames of (z, b) and
(w, b'), using only matrix Iwasawa projections and the Haar density
e^{2 rho H(g)} dw db'.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    as_z,
    circle_quadrature,
    disk_quadrature,
    frames_from_tangent,
    horocycle_bracket,
    hyperbolic_distance,
    sl2_H,
)
from .liegroup import DomainError
from .spectral import plancherel_density
from .transforms import (
    KAPPA,
    RHO,
    SampledFunctionX,
    _plane_wave_table,
    helgason_ft,
    spectral_grid,
)

MAX_KN_NODES = 4e8
SELF_TEST_TOL = 1e-3


class UnderResolvedError(RuntimeError):
    """The a = 1 self-test of the quantization grid failed."""


def op_quantize(a, u: SampledFunctionX, lambda_grid=None, b_grid=None, tol=SELF_TEST_TOL):
    """Op(a)u(z) = KAPPA int int a(z,b) e_{lam,b}(z) u~(lam,b) |c(lam)|^{-2} dlam db.

    ``a`` is an order-zero symbol a(z, b).  The returned callable is checked
    once against Op(1)u = u at the center of u's support.
    """
    lambda_grid = lambda_grid or spectral_grid()
    b_grid = b_grid or circle_quadrature(160)
    U = helgason_ft(u, lambda_grid, b_grid)
    lam = lambda_grid.nodes
    wl = KAPPA * lambda_grid.weights * plancherel_density(lam)
    coef = U.values * wl[:, None] * b_grid.weights[None, :]
    bn = b_grid.nodes

    def apply(z, symbol=a):
        z = np.atleast_1d(as_z(z))
        out = np.empty(z.shape, dtype=complex)
        for i, zi in enumerate(z.ravel()):
            br = horocycle_bracket(zi, bn)
            kern = np.exp((1j * lam[:, None] + RHO) * br[None, :])
            out.flat[i] = np.sum(kern * coef * symbol(zi, bn)[None, :])
        return out if out.size > 1 else out[0]

    # self-test at the node nearest the support center, where u is exact
    i = int(np.argmin(np.abs(u.grid.nodes - u.center)))
    scale = np.max(np.abs(u.values))
    got = apply(u.grid.nodes[i], symbol=lambda z, b: np.ones_like(b))
    if scale > 0 and abs(got - u.values[i]) > tol * scale:
        raise UnderResolvedError(
            f"Op(1)u differs from u by {abs(got - u.values[i]) / scale:.2e} near the support center"
        )
    return apply


def plane_wave_symbol_law(a, lam, b):
    """Op(a) e_{lam,b} = a(., b) e_{lam,b}, evaluated in closed form."""
    from .geometry import plane_wave

    return lambda z: a(as_z(z), as_z(b)) * plane_wave(lam, as_z(b), as_z(z))


# --- Kohn-Nirenberg operator -----------------------------------------------

@dataclass(frozen=True)
class KNGrids:
    """Grids for the five-fold U quadrature (coarse by design)."""

    n_radial: int = 32
    n_angular: int = 256
    n_b: int = 256
    lambda_max: float = 16.0
    n_mu: int = 128


def _kn_setup(a_support, a_center, grids: KNGrids):
    q = disk_quadrature(a_support, grids.n_radial, grids.n_angular, center=a_center)
    bq = circle_quadrature(grids.n_b, offset=0.5)
    mg = spectral_grid(grids.lambda_max, grids.n_mu)
    cost = q.nodes.size * bq.thetas.size * mg.nodes.size
    if cost > MAX_KN_NODES:
        raise DomainError(f"Kohn-Nirenberg quadrature needs {cost:.2e} nodes (> {MAX_KN_NODES:.0e})")
    return q, bq, mg


def _symbol_table(a, w, bp, mu):
    """a(w, mu, b') on the (w, b') grid; ``a`` may ignore mu."""
    return np.asarray(a(w[:, None], mu, bp[None, :]), dtype=complex) * np.ones((w.size, bp.size))


def kohn_nirenberg_U(a, z, lam, b, support_radius, center=0.0, grids=KNGrids(), path="direct"):
    """Ua(z, lam, b) for a symbol a(w, mu, b') supported in a ball.

    Parameters
    ----------
    a : callable
        a(w, mu, b') with w, b' complex arrays and mu a float.
    support_radius, center : float, complex
        Ball containing the w-support.
    path : {"direct", "convolution"}
    """
    z, b = complex(as_z(z)), complex(as_z(b))
    q, bq, mg = _kn_setup(support_radius, center, grids)
    w, bp = q.nodes, bq.nodes
    dens = KAPPA * mg.weights * plancherel_density(mg.nodes)
    mu_dependent = getattr(a, "mu_dependent", True)
    static = None if mu_dependent else _symbol_table(a, w, bp, mg.nodes[0])

    if path == "direct":
        br_w = horocycle_bracket(w[:, None], bp[None, :])
        br_zb = horocycle_bracket(z, bp)
        f = q.weights * np.exp((1j * lam + RHO) * horocycle_bracket(w, b))
        amp = f[:, None] * np.exp(RHO * br_w)
        total = 0j
        waves = _plane_wave_table(mg.nodes, br_w, -1)
        zwaves = np.exp((1j * mg.nodes[:, None] + RHO) * br_zb[None, :])
        for k, wave in enumerate(waves):
            sym = static if static is not None else _symbol_table(a, w, bp, mg.nodes[k])
            ft = np.sum(amp * wave * sym, axis=0)
            total += dens[k] * np.sum(bq.weights * zwaves[k] * ft)
        return complex(np.exp(-(1j * lam + RHO) * horocycle_bracket(z, b)) * total)

    if path == "convolution":
        h = frames_from_tangent(z, b)
        hinv = np.linalg.inv(h)
        g = frames_from_tangent(w[:, None], bp[None, :])
        ginv = np.linalg.inv(g)
        H_hg = sl2_H(hinv @ g)
        H_gh = sl2_H(ginv @ h)
        haar = q.weights[:, None] * bq.weights[None, :] * np.exp(2 * RHO * sl2_H(g))
        amp = haar * np.exp(-RHO * H_hg - (1j * lam + RHO) * H_gh)
        total = 0j
        for k, wave in enumerate(_plane_wave_table(mg.nodes, H_hg, -1)):
            sym = static if static is not None else _symbol_table(a, w, bp, mg.nodes[k])
            total += dens[k] * np.sum(amp * wave * sym)
        return complex(total)

    raise DomainError(f"unknown path {path!r}")


def plateau(r_in, r_out, center=0.0):
    """Smooth cutoff: 1 for d <= r_in, 0 for d >= r_out."""
    center = complex(center)

    def step(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    def chi(w):
        d = np.asarray(hyperbolic_distance(as_z(w), center), dtype=float)
        x = (r_out - d) / (r_out - r_in)
        s1, s0 = step(x), step(1 - x)
        return s1 / (s1 + s0)

    return chi


def spatial_symbol(chi, b_profile=None):
    """a(w, mu, b') = chi(w) p(b'), independent of mu."""
    prof = b_profile or (lambda bp: 1.0)

    def a(w, mu, bp):
        return chi(w) * prof(bp)

    a.mu_dependent = False
    return a
