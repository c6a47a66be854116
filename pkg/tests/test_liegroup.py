import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdist import liegroup as lg

W2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


# --- construction ----------------------------------------------------------

@pytest.mark.parametrize(
    "matrix, group",
    [
        ([[1.0, 2.0], [3.0, 4.0]], lg.SL2),  # det = -2
        ([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], lg.SL2),
        (np.eye(3), lg.SL2),
        ([[np.nan, 0.0], [0.0, 1.0]], lg.SL2),
        (np.diag([2.0, 0.5, 1.0]), lg.SOH),  # det 1 but not a form isometry
    ],
)
def test_invalid_elements_raise(matrix, group):
    with pytest.raises(lg.DomainError):
        lg.GroupElement(np.array(matrix), group)


def test_domain_error_names_invariant():
    with pytest.raises(lg.DomainError, match="det"):
        lg.GroupElement(np.array([[2.0, 0.0], [0.0, 2.0]]), lg.SL2)
    with pytest.raises(lg.DomainError, match="form"):
        lg.GroupElement(np.diag([2.0, 0.5, 1.0]), lg.SOH)


def test_unknown_tag():
    with pytest.raises(lg.DomainError):
        lg.GroupElement(np.eye(2), "SU2")


# --- Iwasawa KAN -----------------------------------------------------------

def test_kan_of_a_t():
    f = lg.iwasawa_kan(lg.a_t(1.0))
    np.testing.assert_allclose(f.k, np.eye(2), atol=1e-14)
    assert f.a_log == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(f.n, np.eye(2), atol=1e-14)


def test_kan_of_n_inverse_w_gives_ln2():
    g = lg.n_u(1.0).inv() @ lg.GroupElement(W2, lg.SL2)
    assert lg.iwasawa_H(g) == pytest.approx(np.log(2.0), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kan_reconstruction(n):
    rng = np.random.default_rng(11 + n)
    worst = 0.0
    for _ in range(200):
        g = lg.random_sl(n, rng)
        f = lg.iwasawa_kan(g)
        worst = max(worst, np.max(np.abs(f.reconstruct() - g.matrix)))
        # K orthogonal, N unipotent upper triangular
        np.testing.assert_allclose(f.k.T @ f.k, np.eye(n), atol=1e-12)
        np.testing.assert_allclose(np.tril(f.n, -1), 0.0, atol=1e-14)
        np.testing.assert_allclose(np.diag(f.n), 1.0, atol=1e-14)
    assert worst <= 1e-10


def test_kan_is_deterministic():
    g = lg.random_sl(3, np.random.default_rng(0))
    f1, f2 = lg.iwasawa_kan(g), lg.iwasawa_kan(g)
    assert np.array_equal(f1.k, f2.k) and np.array_equal(f1.n, f2.n)
    assert np.array_equal(f1.a_log, f2.a_log)


@pytest.mark.parametrize("theta", [0.0, 0.4, 2.0, -2.9])
def test_H_vanishes_on_K(theta):
    assert lg.iwasawa_H(lg.k_theta(theta)) == pytest.approx(0.0, abs=1e-14)


@given(st.floats(-6, 6))
def test_H_of_a_t(t):
    assert lg.iwasawa_H(lg.a_t(t)) == pytest.approx(t, abs=1e-12)


def test_H_equals_minus_A_of_inverse():
    rng = np.random.default_rng(3)
    for _ in range(100):
        g = lg.random_sl(2, rng)
        assert lg.iwasawa_H(g) == pytest.approx(-lg.iwasawa_nak(g.inv()).a_log, abs=1e-10)


# --- NAK / KAK -------------------------------------------------------------

def test_nak_of_a_t_and_n_u():
    f = lg.iwasawa_nak(lg.a_t(0.8))
    np.testing.assert_allclose(f.n, np.eye(2), atol=1e-14)
    assert f.a_log == pytest.approx(0.8, abs=1e-14)
    np.testing.assert_allclose(f.k, np.eye(2), atol=1e-14)
    f = lg.iwasawa_nak(lg.n_u(1.7))
    np.testing.assert_allclose(f.n, lg.n_u(1.7).matrix, atol=1e-14)
    assert f.a_log == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(f.k, np.eye(2), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_nak_and_kak_reconstruction(n):
    rng = np.random.default_rng(5)
    for _ in range(200):
        g = lg.random_sl(n, rng)
        assert np.max(np.abs(lg.iwasawa_nak(g).reconstruct() - g.matrix)) <= 1e-10
        assert np.max(np.abs(lg.cartan_kak(g).reconstruct() - g.matrix)) <= 1e-10


@pytest.mark.parametrize("t", [0.0, 0.5, 3.0])
def test_kak_of_a_t(t):
    f = lg.cartan_kak(lg.a_t(t))
    np.testing.assert_allclose(f.a_log, [t / 2, -t / 2], atol=1e-13)


def test_kak_matches_eigenvalues_of_gtg():
    rng = np.random.default_rng(8)
    for _ in range(50):
        g = lg.random_sl(3, rng)
        ev = np.sort(np.linalg.eigvalsh(g.matrix.T @ g.matrix))[::-1]
        np.testing.assert_allclose(lg.cartan_kak(g).a_log, 0.5 * np.log(ev), atol=1e-10)


def test_kak_bi_invariance():
    rng = np.random.default_rng(9)
    for _ in range(100):
        g = lg.random_sl(2, rng)
        k1, k2 = lg.k_theta(rng.uniform(0, 6)), lg.k_theta(rng.uniform(0, 6))
        np.testing.assert_allclose(lg.cartan_kak(k1 @ g @ k2).a_log, lg.cartan_kak(g).a_log, atol=1e-10)


def test_kak_rejects_soh():
    with pytest.raises(lg.DomainError):
        lg.cartan_kak(lg.soh_a(0.3, 2))


# --- cocycle and Weyl ------------------------------------------------------

def test_cocycle_identity():
    rng = np.random.default_rng(21)
    for _ in range(200):
        g1, g2 = lg.random_sl(2, rng), lg.random_sl(2, rng)
        k = lg.k_theta(rng.uniform(0, 2 * np.pi))
        g2k = g2 @ k
        kk = lg.GroupElement(lg.iwasawa_kan(g2k).k, lg.SL2)
        lhs = lg.iwasawa_H(g1 @ g2 @ k)
        rhs = lg.iwasawa_H(g1 @ kk) + lg.iwasawa_H(g2k)
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_weyl_representatives():
    np.testing.assert_array_equal(lg.weyl_longest(lg.SL2).matrix, W2)
    np.testing.assert_array_equal(
        lg.weyl_longest(lg.SL3).matrix, [[0, 0, 1], [0, -1, 0], [1, 0, 0]]
    )


@pytest.mark.parametrize("group, n", [(lg.SL2, None), (lg.SL3, None), (lg.SOH, 3)])
def test_weyl_square_is_sign_diagonal(group, n):
    w = lg.weyl_longest(group, n).matrix
    w2 = w @ w
    np.testing.assert_allclose(w2, np.diag(np.diag(w2)), atol=1e-14)
    np.testing.assert_allclose(np.abs(np.diag(w2)), 1.0)


@given(st.floats(-5, 5))
def test_weyl_action_is_minus_identity_on_sl2(t):
    assert lg.weyl_action(lg.SL2, t) == pytest.approx(-t, abs=1e-12)


def test_weyl_action_on_sl3_reverses_diagonal():
    a = np.array([0.7, -0.2, -0.5])
    np.testing.assert_allclose(lg.weyl_action(lg.SL3, a), a[::-1])
    assert np.max(np.abs(lg.weyl_action(lg.SL3, a) + a)) > 0.1


# --- H(nw) symmetry ----------------------------------------------------------

def test_Hnw_symmetry_sl2_grid():
    for u in np.linspace(-5, 5, 201):
        assert lg.check_Hnw_symmetry(lg.SL2, u)["residual"] <= 1e-10


def test_sl3_counterexample_values():
    r = lg.check_Hnw_symmetry(lg.SL3, (1.0, 1.0, 1.0))
    assert r["s"] == pytest.approx(0.5 * np.log(3), abs=1e-10)
    assert r["sPrime"] == pytest.approx(0.5 * np.log(2), abs=1e-10)
    assert r["residual"] == pytest.approx(0.5 * np.log(1.5), abs=1e-10)


def test_sl3_symmetric_point():
    r = lg.check_Hnw_symmetry(lg.SL3, (0.0, 1.0, 1.0))
    assert r["residual"] <= 1e-10
    # oracle: first diagonal log of H for both products
    n = lg.GroupElement(np.array([[1.0, 0, 1], [0, 1, 1], [0, 0, 1]]), lg.SL3)
    w = lg.weyl_longest(lg.SL3)
    h1 = lg.iwasawa_kan(n @ w).a_log[0]
    h2 = lg.iwasawa_kan(n.inv() @ w).a_log[0]
    assert h1 == pytest.approx(h2, abs=1e-12)


def test_unsupported_tag_in_symmetry_check():
    with pytest.raises(lg.DomainError):
        lg.check_Hnw_symmetry(lg.SLN, (1.0,))


# --- SO(1, n) ------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("t", [-1.3, 0.0, 0.4, 2.2])
def test_hyperbolic_H_of_a_t(n, t):
    assert lg.hyperbolic_H(lg.soh_a(t, n)) == pytest.approx(t, abs=1e-12)


def test_hyperbolic_H_on_K_block():
    rot3 = rot(0.9)
    m = np.eye(4)
    m[1:3, 1:3] = rot3
    assert lg.hyperbolic_H(lg.GroupElement(m, lg.SOH)) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_soh_n_symmetry_and_closed_form(n):
    rng = np.random.default_rng(n)
    w = lg.weyl_longest(lg.SOH, n)
    for _ in range(20):
        z = rng.normal(size=n - 1)
        nz = lg.soh_n(z)
        h1 = lg.hyperbolic_H(nz @ w)
        h2 = lg.hyperbolic_H(nz.inv() @ w)
        assert h1 == pytest.approx(h2, abs=1e-10)
        assert h1 == pytest.approx(np.log(1 + z @ z), abs=1e-10)


@pytest.mark.parametrize("n", [2, 3])
def test_soh_kan_reconstruction(n):
    rng = np.random.default_rng(40 + n)
    for _ in range(50):
        g = lg.random_soh(n, rng)
        f = lg.iwasawa_kan(g)
        assert np.max(np.abs(f.reconstruct() - g.matrix)) <= 1e-10
        assert f.a_log == pytest.approx(lg.hyperbolic_H(g), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_roundtrip_property(seed):
    rng = np.random.default_rng(seed)
    g = lg.random_sl(int(rng.integers(2, 5)), rng, scale=1.5)
    for f in (lg.iwasawa_kan(g), lg.iwasawa_nak(g), lg.cartan_kak(g)):
        assert np.max(np.abs(f.reconstruct() - g.matrix)) <= 1e-9 * max(1.0, np.abs(g.matrix).max())
