"""Intermediate values, Radon transforms, the Knapp-Stein intertwiner and
Patterson-Sullivan / Wigner distributions on the disk.

Symbols are functions on G/M = X x B, written a(z, b) with b = g.1 for the
frame g.  Measures: dn = du/pi on N (so that c(-i rho) = 1) and da = pi dt on
A, which makes int_X = int_A int_N for the Iwasawa coordinates z = g a_t n_u.o.
Every A- or N-integral is truncated exactly to the symbol's support, read off
from the half-plane picture where hyperbolic balls are Euclidean disks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import (
    PAIR_TOL,
    act,
    as_z,
    disk_quadrature,
    flow_points,
    from_lower_half_plane,
    geodesic_frame,
    horocycle_bracket,
    hyperbolic_distance,
    lower_half_plane,
    opposite_endpoint,
    sl2_H,
)
from .liegroup import DomainError, GroupElement, a_t, iwasawa_H, k_theta, n_u
from .spectral import c_function
from .transforms import RHO, BoundaryMeasure, bump

DA_SCALE = np.pi  # da = pi dt
DN_SCALE = 1.0 / np.pi  # dn = du / pi
RESIDUAL_FLOOR = 1e-12
W = np.array([[0.0, 1.0], [-1.0, 0.0]])


# --- types -----------------------------------------------------------------

@dataclass(frozen=True)
class SymbolFn:
    """Order-zero symbol a(z, b) with compact z-support in a ball.

    ``evaluate`` must accept broadcastable complex arrays z (disk) and b
    (unit circle) and vanish for d(center, z) > support_radius.
    """

    evaluate: Callable
    support_radius: float
    center: complex = 0.0

    def __call__(self, z, b):
        return self.evaluate(as_z(z), as_z(b))


@dataclass(frozen=True)
class PSData:
    lam: float
    mu: float
    t_phi: BoundaryMeasure
    t_psi: BoundaryMeasure


@dataclass(frozen=True)
class LineQuadrature:
    t_nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t, w = np.asarray(self.t_nodes, float), np.asarray(self.weights, float)
        if np.any(w <= 0):
            raise DomainError("line weights must be positive")
        if not np.allclose(t, -t[::-1], atol=1e-12):
            raise DomainError("line nodes must be symmetric about 0")
        object.__setattr__(self, "t_nodes", t)
        object.__setattr__(self, "weights", w)

    @property
    def t_max(self):
        return float(np.max(np.abs(self.t_nodes)))


def line_quadrature(t_max, n=128):
    x, w = np.polynomial.legendre.leggauss(n)
    return LineQuadrature(t_max * x, t_max * w)


@dataclass(frozen=True)
class PSGrids:
    """Node counts for the A-, N- and disk quadratures."""

    n_t: int = 48
    n_u: int = 48
    n_radial: int = 48
    n_angular: int = 96

    def refined(self, factor=2):
        return PSGrids(*(int(factor * n) for n in (self.n_t, self.n_u, self.n_radial, self.n_angular)))


# --- symbols ---------------------------------------------------------------

def bump_symbol(r0, center=0.0, b_profile=None):
    """Smooth bump in z about ``center`` times an optional profile in b."""
    f = bump(r0, center)
    prof = b_profile or (lambda b: 1.0)

    def ev(z, b):
        return f(z) * prof(b)

    return SymbolFn(ev, float(r0), complex(center))


def gaussian_bump_symbol(sigma, r0, center=0.0, b_profile=None):
    """exp(-d^2 / (2 sigma^2)) multiplied by a smooth cutoff of radius r0."""
    cut = bump(r0, center)
    prof = b_profile or (lambda b: 1.0)
    center = complex(center)

    def ev(z, b):
        d = hyperbolic_distance(z, center)
        return np.exp(-(d**2) / (2 * sigma**2)) * cut(z) / np.exp(-1.0) * prof(b)

    return SymbolFn(ev, float(r0), center)


def zero_symbol(r0=1.0, center=0.0):
    return SymbolFn(lambda z, b: np.zeros(np.broadcast(z, b).shape), float(r0), complex(center))


def translate_symbol(a: SymbolFn, g):
    """(a o g^{-1})(z, b) = a(g^{-1} z, g^{-1} b); support moves to g.center."""
    ginv = g.inv()
    return SymbolFn(lambda z, b: a.evaluate(act(ginv, z), act(ginv, b)),
                    a.support_radius, complex(act(g, a.center)))


def pullback_symbol(a: SymbolFn, g):
    """(a o g)(z, b) = a(g z, g b)."""
    return translate_symbol(a, g.inv())


def flowed_symbol(a: SymbolFn, t):
    """(a o G^{-t})(z, b) = a(G^{-t}(z, b)); support grows by |t|."""
    return SymbolFn(lambda z, b: a.evaluate(flow_points(z, b, -t), b),
                    a.support_radius + abs(t), a.center)


def time_reversed(a: SymbolFn):
    """Symbol composed with the flip (z, b) -> (z, b_opposite)."""
    return SymbolFn(lambda z, b: a.evaluate(z, opposite_endpoint(z, b)),
                    a.support_radius, a.center)


# --- intermediate values ---------------------------------------------------

def _mat(g):
    return g.matrix if isinstance(g, GroupElement) else np.asarray(g)


def intermediate_value(g, lam, mu):
    """d_{lam,mu}(g) = e^{(i lam + rho) H(g)} e^{(i mu + rho) H(g w)}.

    ``g`` may be a GroupElement or a stack (..., 2, 2) of SL2 matrices.
    """
    m = _mat(g)
    if m.shape[-2:] != (2, 2):
        raise DomainError("intermediate values need SL2 matrices")
    h1 = sl2_H(m)
    h2 = sl2_H(m @ W)
    return np.exp((1j * lam + RHO) * h1 + (1j * mu + RHO) * h2)


def d_lambda_closed(b, b2, lam):
    """(|b - b'| / 2)^{-2(i lam + rho)}."""
    b, b2 = as_z(b), as_z(b2)
    return (np.abs(b - b2) / 2) ** (-2 * (1j * lam + RHO))


# --- support geometry ------------------------------------------------------

def _frame_coords(g, c):
    """Upper-half-plane coordinates (p, q) of g^{-1}.c, so that the frame's
    Iwasawa points g a_t n_u . o correspond to p + iq = e^t (u + i)."""
    tau = np.conj(lower_half_plane(act(g.inv(), c)))
    return float(tau.real), float(tau.imag)


def _radon_window(g, a: SymbolFn):
    """Exact t-interval where the geodesic g a_t . o meets the support ball."""
    p, q = _frame_coords(g, a.center)
    R = a.support_radius
    disc = (q * np.sinh(R)) ** 2 - p**2
    if disc <= 0:
        return None
    y0, half = q * np.cosh(R), np.sqrt(disc)
    return np.log(y0 - half), np.log(y0 + half)


def _u_window(p, q, R):
    """u-interval where n_u . o lies in the ball about (p, q) of radius R."""
    disc = 2 * q * np.cosh(R) - 1 - q**2
    if disc <= 0:
        return None
    h = np.sqrt(disc)
    return p - h, p + h


def _gl(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _disk_from_frame(g, tau):
    """g . (lower half-plane point tau), vectorized over tau."""
    return act(g, from_lower_half_plane(tau))


def _frame_for(b, b2, frame=None):
    b, b2 = as_z(b), as_z(b2)
    if abs(b - b2) < PAIR_TOL:
        raise DomainError("geodesic endpoints coincide")
    return frame if frame is not None else geodesic_frame(b, b2)


# --- Radon transforms ------------------------------------------------------

def _line_integral(f: SymbolFn, g, weight, lq, n_t):
    win = _radon_window(g, f)
    if win is None:
        return 0j
    if lq is not None:
        if win[0] < -lq.t_max or win[1] > lq.t_max:
            raise DomainError(
                f"truncation |t| <= {lq.t_max:.3g} misses support window [{win[0]:.3g}, {win[1]:.3g}]"
            )
        t, w = lq.t_nodes, lq.weights
    else:
        t, w = _gl(win[0], win[1], n_t)
    mats = g.matrix @ np.array([a_t(s).matrix for s in t])
    z = act(g, from_lower_half_plane(-1j * np.exp(t)))
    vals = f(z, act(g, 1.0)) * weight(mats)
    return complex(DA_SCALE * np.sum(w * vals))


def radon_transform(f: SymbolFn, b, b2, lq: Optional[LineQuadrature] = None, n_t=64, frame=None):
    """Rf(b, b') = int_A f(g(b,b') a . o, b) da, with da = pi dt."""
    g = _frame_for(b, b2, frame)
    return _line_integral(f, g, lambda m: 1.0, lq, n_t)


def weighted_radon(f: SymbolFn, lam, mu, b, b2, lq=None, n_t=64, frame=None):
    """R_{lam,mu} f(b, b') = int_A d_{lam,mu}(g a) f(g a) da."""
    g = _frame_for(b, b2, frame)
    return _line_integral(f, g, lambda m: intermediate_value(m, lam, mu), lq, n_t)


# --- Knapp-Stein -----------------------------------------------------------

def knapp_stein_kernel(u, mu):
    """e^{-(i mu + rho) H(n_u^{-1} w)} = (1 + u^2)^{-(i mu + rho)}."""
    return (1 + np.asarray(u) ** 2) ** (-(1j * mu + RHO))


def knapp_stein(a: SymbolFn, g, mu, n_u_nodes=96):
    """L_mu a(g) = int_N (1+u^2)^{-(i mu + rho)} a(g n_u) dn, dn = du/pi."""
    if not np.isfinite(a.support_radius):
        raise DomainError("Knapp-Stein needs a compactly supported symbol")
    p, q = _frame_coords(g, a.center)
    win = _u_window(p, q, a.support_radius)
    if win is None:
        return 0j
    u, w = _gl(win[0], win[1], n_u_nodes)
    z = _disk_from_frame(g, u - 1j)
    vals = knapp_stein_kernel(u, mu) * a(z, act(g, 1.0))
    return complex(DN_SCALE * np.sum(w * vals))


def knapp_stein_deviation(a: SymbolFn, g, mu, n_u_nodes=400):
    """|L_mu a(g) / (c(mu) a(g . o, g . 1)) - 1|."""
    ref = c_function(mu) * a(act(g, 0.0), act(g, 1.0))
    return abs(knapp_stein(a, g, mu, n_u_nodes) / ref - 1)


def radon_of_knapp_stein(a: SymbolFn, lam, mu, b, b2, grids=PSGrids(), frame=None):
    """R_{lam,mu}(L_mu a)(b, b') as a (t, u) quadrature in frame coordinates."""
    g = _frame_for(b, b2, frame)
    p0, q0 = _frame_coords(g, a.center)
    R = a.support_radius
    t, wt = _gl(np.log(q0) - R, np.log(q0) + R, grids.n_t)
    gb = act(g, 1.0)
    total = 0j
    mats = g.matrix @ np.array([a_t(s).matrix for s in t])
    dvals = intermediate_value(mats, lam, mu)
    for ti, wi, di in zip(t, wt, dvals):
        win = _u_window(p0 * np.exp(-ti), q0 * np.exp(-ti), R)
        if win is None:
            continue
        u, wu = _gl(win[0], win[1], grids.n_u)
        z = _disk_from_frame(g, np.exp(ti) * (u - 1j))
        inner = DN_SCALE * np.sum(wu * knapp_stein_kernel(u, mu) * a(z, gb))
        total += DA_SCALE * wi * di * inner
    return complex(total)


# --- distributions ---------------------------------------------------------

def _pairs(data: PSData, m_density=64):
    """Points and weights of both factors, densities discretized."""

    def parts(T):
        pts, wts = list(T.atom_points), list(T.atom_weights)
        if T.density is not None:
            grid, vals = T.density
            pts += list(grid.nodes)
            wts += list(grid.weights * vals)
        return np.array(pts, dtype=complex), np.array(wts, dtype=complex)

    p1, w1 = parts(data.t_phi)
    p2, w2 = parts(data.t_psi)
    return p1, w1, p2, w2


def _check_atoms(data: PSData):
    for b, _ in data.t_phi.atoms:
        for b2, _ in data.t_psi.atoms:
            if abs(b.b - b2.b) < PAIR_TOL:
                raise DomainError("atoms of the two factors coincide")


def _geodesic_hits(a: SymbolFn, b, b2):
    if abs(b - b2) < PAIR_TOL:
        return False
    return _radon_window(geodesic_frame(b, b2), a) is not None


def _pair_sum(a, data, term):
    _check_atoms(data)
    p1, w1, p2, w2 = _pairs(data)
    total = 0j
    for bi, wi in zip(p1, w1):
        for bj, wj in zip(p2, w2):
            if wi == 0 or wj == 0 or not _geodesic_hits(a, bi, bj):
                continue
            total += wi * wj * term(bi, bj)
    return complex(total)


def ps_distribution(a: SymbolFn, data: PSData, grids=PSGrids()):
    """<a, PS_{lam,mu}> = sum over atom pairs of R_{lam,mu} a(b, b')."""
    return _pair_sum(a, data, lambda b, b2: weighted_radon(a, data.lam, data.mu, b, b2, n_t=grids.n_t))


def ps_of_knapp_stein(a: SymbolFn, data: PSData, grids=PSGrids()):
    """<L_mu a, PS_{lam,mu}>."""
    return _pair_sum(a, data, lambda b, b2: radon_of_knapp_stein(a, data.lam, data.mu, b, b2, grids))


def wigner_distribution(a: SymbolFn, data: PSData, grids=PSGrids()):
    """int_{BxB} int_X a(z,b) e^{(i lam+rho)<z,b>} e^{(i mu+rho)<z,b'>} dz T_phi(db) T_psi(db')."""
    _check_atoms(data)
    q = disk_quadrature(a.support_radius, grids.n_radial, grids.n_angular, center=a.center)
    z = q.nodes
    p1, w1, p2, w2 = _pairs(data)
    e2 = np.exp((1j * data.mu + RHO) * horocycle_bracket(z[:, None], p2[None, :])) @ w2
    total = 0j
    for bi, wi in zip(p1, w1):
        k1 = a(z, bi) * np.exp((1j * data.lam + RHO) * horocycle_bracket(z, bi))
        total += wi * np.sum(q.weights * k1 * e2)
    return complex(total)


@dataclass(frozen=True)
class IntertwineResult:
    lhs: complex
    rhs: complex
    residual: float


def intertwine_check(a: SymbolFn, data: PSData, grids=PSGrids()):
    """Wigner side against <L_mu a, PS_{lam,mu}>, by independent quadratures."""
    lhs = wigner_distribution(a, data, grids)
    rhs = ps_of_knapp_stein(a, data, grids)
    res = abs(lhs - rhs) / max(abs(lhs), RESIDUAL_FLOOR)
    return IntertwineResult(lhs, rhs, float(res))


def normalized_ps(a: SymbolFn, data: PSData, window_radius=3.0, grids=PSGrids()):
    """PS value divided by the value at a = 1 cut off to a ball about o."""
    ref = ps_distribution(bump_symbol(window_radius), data, grids)
    if abs(ref) < RESIDUAL_FLOOR:
        raise DomainError("reference window value vanishes")
    return ps_distribution(a, data, grids) / ref


def push_data(data: PSData, g):
    """Atoms b -> g.b with weights times e^{-(i s + rho)<g.o, g.b>}."""
    from .transforms import push_measure

    return PSData(data.lam, data.mu, push_measure(data.t_phi, g, data.lam),
                  push_measure(data.t_psi, g, data.mu))


def a_translation_check(a: SymbolFn, data: PSData, t, grids=PSGrids(n_t=192)):
    """PS(a o G^{-t}) / PS(a); the expected value is e^{i(lam - mu)t}."""
    base = ps_distribution(a, data, grids)
    if abs(base) < RESIDUAL_FLOOR:
        raise DomainError("PS(a) below the floor")
    moved = ps_distribution(flowed_symbol(a, t), data, grids)
    ratio = moved / base
    return {"ratio": ratio, "expected": np.exp(1j * (data.lam - data.mu) * t)}


# --- leading-order stationary phase of the Kohn-Nirenberg phase ------------

def kn_phase(mu, u, t, phi):
    """psi(mu, n_u, a_t, k_phi) = mu t - H(n_u a_t k_phi)."""
    return mu * t - iwasawa_H(n_u(u) @ a_t(t) @ k_theta(phi))


def kn_phase_gradient(x, h=1e-5):
    x = np.asarray(x, dtype=float)
    g = np.empty(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        g[i] = (kn_phase(*(x + e)) - kn_phase(*(x - e))) / (2 * h)
    return g
