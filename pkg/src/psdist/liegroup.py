"""Matrix groups and their Iwasawa / Cartan decompositions.

Supported groups are SL(2,R), SL(3,R), SL(n,R) and the real hyperbolic
group SO(1,n) preserving the form ``x0*y0 - x1*y1 - ... - xn*yn``.

Rank-one conventions: ``a_t = diag(e^{t/2}, e^{-t/2})`` in SL(2,R), so that
``H(a_t) = t`` and ``rho = 1/2``; in SO(1,n) ``a_t`` is the cosh/sinh boost
in the (0, n) plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DET_TOL = 1e-10
FORM_TOL = 1e-10

SL2 = "SL2"
SL3 = "SL3"
SLN = "SLn"
SOH = "SOH"
GROUP_TAGS = (SL2, SL3, SLN, SOH)


class DomainError(ValueError):
    """Input violates a group invariant or an operation's domain."""


def hyperbolic_form(n):
    """Matrix of the signature (1, n) form on R^{n+1}."""
    q = -np.eye(n + 1)
    q[0, 0] = 1.0
    return q


@dataclass(frozen=True)
class GroupElement:
    """A square matrix tagged with the group it is claimed to belong to."""

    matrix: np.ndarray
    group: str

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("matrix must be square")
        if self.group not in GROUP_TAGS:
            raise DomainError(f"unknown group tag {self.group!r}")
        dim = m.shape[0]
        if self.group == SL2 and dim != 2:
            raise DomainError("SL2 element must be 2x2")
        if self.group == SL3 and dim != 3:
            raise DomainError("SL3 element must be 3x3")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix has non-finite entries")
        det = np.linalg.det(m)
        if abs(det - 1.0) > DET_TOL:
            raise DomainError(f"det invariant violated: |det - 1| = {abs(det - 1.0):.3e}")
        if self.group == SOH:
            q = hyperbolic_form(dim - 1)
            resid = np.max(np.abs(m.T @ q @ m - q))
            if resid > FORM_TOL:
                raise DomainError(f"form invariant violated: residual {resid:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __matmul__(self, other):
        if isinstance(other, GroupElement):
            return GroupElement(self.matrix @ other.matrix, self.group)
        return NotImplemented

    def inv(self):
        return GroupElement(np.linalg.inv(self.matrix), self.group)


def sl_tag(n):
    return {2: SL2, 3: SL3}.get(n, SLN)


def element(matrix, group=None):
    """Wrap ``matrix`` as a GroupElement, inferring an SL tag from its size."""
    matrix = np.asarray(matrix, dtype=float)
    return GroupElement(matrix, group or sl_tag(matrix.shape[0]))


# --- SL(2,R) one-parameter subgroups --------------------------------------

def a_t(t):
    return GroupElement(np.diag([np.exp(t / 2), np.exp(-t / 2)]), SL2)


def n_u(u):
    return GroupElement(np.array([[1.0, u], [0.0, 1.0]]), SL2)


def nbar_u(u):
    return GroupElement(np.array([[1.0, 0.0], [u, 1.0]]), SL2)


def k_theta(theta):
    c, s = np.cos(theta), np.sin(theta)
    return GroupElement(np.array([[c, -s], [s, c]]), SL2)


# --- SO(1,n) realization ---------------------------------------------------

def soh_a(t, n):
    m = np.eye(n + 1)
    m[0, 0] = m[n, n] = np.cosh(t)
    m[0, n] = m[n, 0] = np.sinh(t)
    return GroupElement(m, SOH)


def soh_n(z):
    """Element n(0, z) of N in SO(1,n); ``z`` has n - 1 real entries.

    Over the reals the imaginary parameter w vanishes and [z, z] = -|z|^2.
    The off-diagonal blocks carry +z^T, which is what the form requires.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    n = z.size + 1
    zz = -float(z @ z)
    m = np.eye(n + 1)
    m[0, 0] = 1 - 0.5 * zz
    m[0, n] = 0.5 * zz
    m[n, 0] = -0.5 * zz
    m[n, n] = 1 + 0.5 * zz
    m[0, 1:n] = z
    m[n, 1:n] = z
    m[1:n, 0] = z
    m[1:n, n] = -z
    return GroupElement(m, SOH)


def soh_k(rotation, sign=1.0):
    """Block element diag(sign, rotation) of K = S(O(1) x O(n))."""
    rotation = np.asarray(rotation, dtype=float)
    n = rotation.shape[0]
    m = np.zeros((n + 1, n + 1))
    m[0, 0] = sign
    m[1:, 1:] = rotation
    return GroupElement(m, SOH)


# --- decompositions --------------------------------------------------------

@dataclass(frozen=True)
class IwasawaKAN:
    """g = k exp(a_log) n.

    ``a_log`` is the scalar t for the rank-one groups (SL2, SOH) and the
    vector of diagonal logarithms for SL(n), n >= 3.
    """

    k: np.ndarray
    a_log: object
    n: np.ndarray
    group: str

    def a_matrix(self):
        return _a_matrix(self.a_log, self.group, self.k.shape[0])

    def reconstruct(self):
        return self.k @ self.a_matrix() @ self.n


@dataclass(frozen=True)
class IwasawaNAK:
    """g = n exp(a_log) k; ``a_log`` is A(g) = -H(g^{-1})."""

    n: np.ndarray
    a_log: object
    k: np.ndarray
    group: str

    def a_matrix(self):
        return _a_matrix(self.a_log, self.group, self.k.shape[0])

    def reconstruct(self):
        return self.n @ self.a_matrix() @ self.k


@dataclass(frozen=True)
class CartanKAK:
    """g = k1 diag(exp(a_log)) k2 with a_log non-increasing."""

    k1: np.ndarray
    a_log: np.ndarray
    k2: np.ndarray

    def reconstruct(self):
        return self.k1 @ np.diag(np.exp(self.a_log)) @ self.k2


@dataclass(frozen=True)
class RootDatum:
    """Rank-one root data (multiplicities of alpha and 2 alpha)."""

    m_alpha: int
    m_2alpha: int = 0
    rank: int = 1

    def __post_init__(self):
        for m in (self.m_alpha, self.m_2alpha):
            if int(m) != m or m < 0:
                raise DomainError("multiplicities must be non-negative integers")
        if self.m_alpha < 1:
            raise DomainError("m_alpha must be positive")
        if self.rank != 1:
            raise DomainError("only rank-one root data are supported")

    @property
    def rho(self):
        return (self.m_alpha + 2 * self.m_2alpha) / 2

    @classmethod
    def real_hyperbolic(cls, n):
        """Root data of SO(1,n)/SO(n); the disk is n = 2."""
        return cls(n - 1, 0)


DISK_ROOTS = RootDatum(1, 0)


def _a_matrix(a_log, group, dim):
    if group == SL2:
        return np.diag([np.exp(a_log / 2), np.exp(-a_log / 2)])
    if group == SOH:
        return soh_a(a_log, dim - 1).matrix
    return np.diag(np.exp(a_log))


def _check(g):
    if not isinstance(g, GroupElement):
        raise DomainError("expected a GroupElement")
    return g


def _kan_sl(m):
    q, r = np.linalg.qr(m)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    r = signs[:, None] * r
    d = np.diag(r)
    if np.any(d <= 0):
        raise DomainError("matrix is not invertible")
    return q, np.log(d), r / d[:, None]


def _kan_soh(m):
    dim = m.shape[0]
    n = dim - 1
    xi = np.zeros(dim)
    xi[0] = xi[n] = 1.0
    gxi = m @ xi
    t = np.log(abs(gxi[0]))
    v = gxi * np.exp(-t)
    sign = np.sign(v[0])
    s = v[1:]
    s = s / np.linalg.norm(s)
    en = np.zeros(n)
    en[-1] = 1.0
    # Householder reflection taking e_n to s (identity if already equal)
    h = en - s
    if np.linalg.norm(h) < 1e-14:
        rot = np.eye(n)
    else:
        h = h / np.linalg.norm(h)
        rot = np.eye(n) - 2.0 * np.outer(h, h)
    if sign * np.linalg.det(rot) < 0:
        if n == 1:
            raise DomainError("element outside SO(1,1)")
        flip = np.eye(n)
        flip[0, 0] = -1.0
        rot = rot @ flip
    k = np.zeros((dim, dim))
    k[0, 0] = sign
    k[1:, 1:] = rot
    # k^T g lies in MAN; absorb its M-part (the middle block) into k
    p = k.T @ m
    mpart = np.eye(dim)
    mpart[1:n, 1:n] = p[1:n, 1:n]
    k = k @ mpart
    nmat = soh_a(-t, n).matrix @ k.T @ m
    return k, float(t), nmat


def iwasawa_kan(g):
    """Iwasawa decomposition g = k a n with positive-diagonal normalization."""
    g = _check(g)
    if g.group == SOH:
        k, t, n = _kan_soh(g.matrix)
        return IwasawaKAN(k, t, n, g.group)
    k, logs, n = _kan_sl(g.matrix)
    a_log = float(logs[0] - logs[1]) if g.group == SL2 else logs
    return IwasawaKAN(k, a_log, n, g.group)


def iwasawa_H(g):
    """Iwasawa projection H(g), the A-part logarithm of g = k exp H(g) n."""
    return iwasawa_kan(g).a_log


def iwasawa_nak(g):
    """Decomposition g = n a k, obtained from the KAN factors of g^{-1}."""
    g = _check(g)
    kan = iwasawa_kan(g.inv())
    n = np.linalg.inv(kan.n)
    a_log = -kan.a_log
    return IwasawaNAK(n, a_log, kan.k.T, g.group)


def cartan_kak(g):
    g = _check(g)
    if g.group == SOH:
        raise DomainError("cartan_kak supports the real SL tags only")
    u, s, vt = np.linalg.svd(g.matrix)
    if np.linalg.det(u) < 0:
        u[:, -1] *= -1
        vt[-1, :] *= -1
    return CartanKAK(u, np.log(s), vt)


def hyperbolic_H(g):
    """Closed-form Iwasawa projection in SO(1,n): t = ln|g_00 + g_0n|."""
    g = _check(g)
    if g.group != SOH:
        raise DomainError("hyperbolic_H expects an SOH element")
    m = g.matrix
    return float(np.log(abs(m[0, 0] + m[0, -1])))


def weyl_longest(group, n=None):
    """Fixed representative of the longest Weyl group element."""
    if group == SL2:
        return GroupElement(np.array([[0.0, 1.0], [-1.0, 0.0]]), SL2)
    if group == SL3:
        return GroupElement(np.array([[0.0, 0, 1], [0, -1, 0], [1, 0, 0]]), SL3)
    if group == SLN:
        if n is None or n < 2:
            raise DomainError("SLn needs its size n")
        w = np.fliplr(np.eye(n))
        if np.linalg.det(w) < 0:
            w[n // 2, n - 1 - n // 2] = -1.0
        return GroupElement(w, sl_tag(n))
    if group == SOH:
        if n is None or n < 2:
            raise DomainError("SOH needs its size n >= 2")
        # diag(-1, -1, 1, ..., 1): flips the boost plane, det +1
        m = np.eye(n + 1)
        m[0, 0] = m[1, 1] = -1.0
        return GroupElement(m, SOH)
    raise DomainError(f"unknown group tag {group!r}")


def weyl_action(group, a_log, n=None):
    """Ad(w) on the diagonal logarithm vector of an element of A.

    For SL2 the scalar coordinate t of a_t is accepted and returned.
    """
    w = weyl_longest(group, n).matrix
    a_log = np.asarray(a_log, dtype=float)
    if group == SL2 and a_log.ndim == 0:
        r = np.diag(w @ np.diag([a_log / 2, -a_log / 2]) @ w.T)
        return float(r[0] - r[1])
    return np.diag(w @ np.diag(a_log) @ w.T)


def check_Hnw_symmetry(group, params):
    """Compare H(nw) and H(n^{-1}w) in their first A-coordinate.

    For SL2 ``params`` is u and the coordinate is t; for SL3 it is (d, e, f)
    and the coordinate is s in a = diag(e^s, e^t, e^{-s-t}).
    """
    if group == SL2:
        (u,) = np.atleast_1d(params)
        n = n_u(u)
        coord = lambda g: iwasawa_H(g)
    elif group == SL3:
        d, e, f = params
        n = GroupElement(np.array([[1.0, d, e], [0, 1, f], [0, 0, 1]]), SL3)
        coord = lambda g: float(iwasawa_H(g)[0])
    else:
        raise DomainError(f"unsupported tag {group!r}")
    w = weyl_longest(group)
    s = coord(n @ w)
    s_prime = coord(n.inv() @ w)
    return {"s": s, "sPrime": s_prime, "residual": abs(s - s_prime)}


def random_sl(n, rng, scale=1.0):
    """Random SL(n,R) element k1 * exp(diag) * k2 * nilpotent part.

    Orthogonal factors are QR-projected Gaussians.
    """
    def ortho():
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        return q

    logs = rng.normal(scale=scale, size=n)
    logs -= logs.mean()
    upper = np.triu(rng.normal(scale=scale, size=(n, n)), 1) + np.eye(n)
    m = ortho() @ np.diag(np.exp(logs)) @ upper @ ortho()
    m /= np.linalg.det(m) ** (1.0 / n)
    return GroupElement(m, sl_tag(n))


def random_soh(n, rng, scale=1.0):
    """Random SO(1,n) element k a_t n(z) k'."""
    def rot():
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        return q

    t = rng.normal(scale=scale)
    z = rng.normal(scale=scale, size=n - 1)
    g = soh_k(rot()) @ soh_a(t, n) @ soh_n(z) @ soh_k(rot())
    return g
