import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psdist import geometry as geo
from psdist import liegroup as lg
from psdist import transforms as tr
from psdist.liegroup import DomainError


def random_disk(rng, n, rmax=0.9):
    return np.sqrt(rng.uniform(0, rmax**2, n)) * np.exp(2j * np.pi * rng.uniform(size=n))


def random_circle(rng, n):
    return np.exp(2j * np.pi * rng.uniform(size=n))


# --- types -----------------------------------------------------------------

def test_disk_point_rejects_boundary():
    with pytest.raises(DomainError):
        geo.DiskPoint(1.0)
    assert geo.DiskPoint(0.5j).z == 0.5j


def test_boundary_point_wraps():
    assert geo.BoundaryPoint(-np.pi / 2).theta == pytest.approx(1.5 * np.pi)
    assert geo.BoundaryPoint.from_complex(1j).b == pytest.approx(1j)


# --- brackets ----------------------------------------------------------------

@given(st.floats(0, 2 * np.pi))
def test_bracket_at_origin(theta):
    assert geo.horocycle_bracket(0.0, np.exp(1j * theta)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("t", [-2.0, 0.3, 1.7])
def test_bracket_of_a_t(t):
    assert geo.horocycle_bracket(geo.act(lg.a_t(t), 0.0), 1.0) == pytest.approx(t, abs=1e-12)


def test_bracket_equivariance():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        g = lg.random_sl(2, rng)
        z, b = random_disk(rng, 1)[0], random_circle(rng, 1)[0]
        gb = geo.act(g, b)
        res = geo.horocycle_bracket(geo.act(g, z), gb) - geo.horocycle_bracket(z, b) \
            - geo.horocycle_bracket(geo.act(g, 0.0), gb)
        assert abs(res) <= 1e-9


def test_bracket_k_invariance_and_reflection():
    rng = np.random.default_rng(2)
    for _ in range(300):
        k = lg.k_theta(rng.uniform(0, 2 * np.pi))
        z, b = random_disk(rng, 1)[0], random_circle(rng, 1)[0]
        assert geo.horocycle_bracket(geo.act(k, z), geo.act(k, b)) == pytest.approx(
            geo.horocycle_bracket(z, b), abs=1e-10)
        g = lg.random_sl(2, rng)
        lhs = geo.horocycle_bracket(geo.act(g.inv(), 0.0), b)
        rhs = -geo.horocycle_bracket(geo.act(g, 0.0), geo.act(g, b))
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_bracket_matrix_route():
    rng = np.random.default_rng(3)
    for _ in range(500):
        g = lg.random_sl(2, rng)
        k = lg.k_theta(rng.uniform(0, 2 * np.pi))
        closed = geo.horocycle_bracket(geo.act(g, 0.0), geo.act(k, 1.0))
        assert closed == pytest.approx(geo.bracket_matrix_route(g, k), abs=1e-9)


# --- boundary action and frames ----------------------------------------------

@pytest.mark.parametrize("theta", [0.1, 0.9, -2.0])
def test_rotation_acts_by_double_angle(theta):
    gb, jac = geo.boundary_action(lg.k_theta(theta), geo.BoundaryPoint(0.3))
    direct = geo.mobius(geo.disk_matrix(lg.k_theta(theta)), np.exp(0.3j))
    assert gb.b == pytest.approx(direct, abs=1e-14)
    assert gb.b == pytest.approx(np.exp(1j * (0.3 + 2 * theta)), abs=1e-14)
    assert jac == pytest.approx(1.0, abs=1e-14)


def test_identity_action():
    gb, jac = geo.boundary_action(lg.a_t(0.0), geo.BoundaryPoint(1.1))
    assert gb.theta == pytest.approx(1.1) and jac == pytest.approx(1.0)


def test_jacobian_matches_derivative_of_boundary_map():
    rng = np.random.default_rng(4)
    h = 1e-6
    for _ in range(20):
        g = lg.random_sl(2, rng)
        th = rng.uniform(0, 2 * np.pi)
        _, jac = geo.boundary_action(g, geo.BoundaryPoint(th))
        a1 = np.angle(geo.act(g, np.exp(1j * (th + h))))
        a0 = np.angle(geo.act(g, np.exp(1j * (th - h))))
        d = np.angle(np.exp(1j * (a1 - a0))) / (2 * h)
        assert jac == pytest.approx(d, rel=1e-6)


def test_jacobian_integrates_to_one():
    rng = np.random.default_rng(5)
    q = geo.circle_quadrature(512)
    for _ in range(10):
        g = lg.random_sl(2, rng, scale=0.6)
        vals = [geo.boundary_action(g, geo.BoundaryPoint(t))[1] for t in q.thetas]
        assert np.sum(q.weights * vals) == pytest.approx(1.0, abs=1e-8)


def test_geodesic_frame_base_and_antipodal():
    np.testing.assert_allclose(geo.geodesic_frame(1.0, -1.0).matrix, np.eye(2), atol=1e-14)
    th = 0.8
    g = geo.geodesic_frame(np.exp(1j * th), -np.exp(1j * th))
    np.testing.assert_allclose(g.matrix, lg.k_theta(th / 2).matrix, atol=1e-12)


def test_geodesic_frame_property():
    rng = np.random.default_rng(6)
    for _ in range(200):
        b, b2 = random_circle(rng, 2)
        g = geo.geodesic_frame(b, b2)
        assert abs(geo.act(g, 1.0) - b) <= 1e-9
        assert abs(geo.act(g, -1.0) - b2) <= 1e-9
        # g.o is the point of the geodesic nearest o
        foot = geo.act(g, 0.0)
        for t in (-0.1, 0.1):
            assert abs(geo.act(g @ lg.a_t(t), 0.0)) >= abs(foot) - 1e-12


def test_geodesic_frame_coincident():
    with pytest.raises(DomainError):
        geo.geodesic_frame(1.0, 1.0 + 1e-10j)


def test_frames_from_tangent_vectorized():
    rng = np.random.default_rng(7)
    z, b = random_disk(rng, 30), random_circle(rng, 30)
    stack = geo.frames_from_tangent(z, b)
    for i in range(30):
        g = geo.frame_from_tangent(z[i], b[i])
        np.testing.assert_allclose(stack[i], g.matrix, atol=1e-12)
        assert geo.act(g, 0.0) == pytest.approx(z[i], abs=1e-12)
        assert geo.act(g, 1.0) == pytest.approx(b[i], abs=1e-12)


# --- flow ----------------------------------------------------------------------

@pytest.mark.parametrize("t", [-1.0, 0.0, 0.5, 2.5])
def test_flow_from_base_point(t):
    p = geo.TangentPoint(geo.DiskPoint(0.0), geo.BoundaryPoint(0.0))
    q = geo.geodesic_flow(p, t)
    assert q.z.z == pytest.approx(np.tanh(t / 2), abs=1e-12)
    assert q.b.theta == 0.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 0.8), st.floats(0, 6.28), st.floats(0, 6.28))
def test_flow_additivity(s, t, r, phi, beta):
    p = geo.TangentPoint(geo.DiskPoint(r * np.exp(1j * phi)), geo.BoundaryPoint(beta))
    two = geo.geodesic_flow(geo.geodesic_flow(p, t), s)
    one = geo.geodesic_flow(p, s + t)
    assert abs(two.z.z - one.z.z) <= 1e-9
    assert geo.flow_points(p.z.z, p.b.b, s + t) == pytest.approx(one.z.z, abs=1e-9)


# --- quadrature ------------------------------------------------------------------

@pytest.mark.parametrize("R", [0.5, 1.5, 3.0])
def test_disk_area(R):
    q = geo.disk_quadrature(R, 200, 16)
    assert np.sum(q.weights) == pytest.approx(geo.hyperbolic_area(R), rel=1e-6)


def test_uniform_radial_rule_is_second_order():
    exact = geo.hyperbolic_area(1.5)
    e1 = abs(np.sum(geo.disk_quadrature(1.5, 100, 8, radial="uniform").weights) - exact)
    e2 = abs(np.sum(geo.disk_quadrature(1.5, 200, 8, radial="uniform").weights) - exact)
    assert e1 / e2 == pytest.approx(4.0, rel=0.01)


def test_indicator_integral():
    q = geo.disk_quadrature(2.0, 4000, 8, radial="uniform")
    ind = geo.hyperbolic_distance(q.nodes) <= 1.0
    assert q.integrate(ind) == pytest.approx(geo.hyperbolic_area(1.0), rel=1e-4)


def test_circle_integral():
    q = geo.circle_quadrature(37)
    assert np.sum(q.weights) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("args", [(1.0, 3, 8), (1.0, 8, 2), (0.0, 8, 8), (-1.0, 8, 8)])
def test_invalid_grids(args):
    with pytest.raises(DomainError):
        geo.disk_quadrature(*args)
    with pytest.raises(DomainError):
        geo.circle_quadrature(3)


def test_grid_json_roundtrip():
    q = geo.disk_quadrature(1.2, 8, 12, center=0.1 - 0.2j)
    q2 = geo.DiskQuadrature.from_json(q.to_json())
    np.testing.assert_array_equal(q.nodes, q2.nodes)
    np.testing.assert_array_equal(q.weights, q2.weights)
    assert q2.center == q.center and q2.max_radius == q.max_radius
    c = geo.circle_quadrature(16, 0.5)
    c2 = geo.CircleQuadrature.from_json(c.to_json())
    np.testing.assert_array_equal(c.thetas, c2.thetas)
    assert set(json.loads(q.to_json())) == {"max_radius", "center", "nodes", "weights"}


def test_poisson_normalization():
    rng = np.random.default_rng(8)
    q = geo.circle_quadrature(512)
    for z in random_disk(rng, 50):
        val = np.sum(q.weights * geo.poisson_kernel(z, q.nodes))
        assert abs(val - 1) <= 1e-8


def test_measure_invariance():
    # int f(g.z, g.b) e^{2 rho <z,b>} dz db = int f(z, b) e^{2 rho <z,b>} dz db
    rng = np.random.default_rng(9)
    f_space = tr.bump(1.0, 0.2 + 0.1j)

    def f(z, b):
        return f_space(z) * (1 + 0.5 * np.real(b) + 0.3 * np.imag(b**2))

    def integral(center, fz, weight=geo.poisson_kernel):
        qd = geo.disk_quadrature(1.0, 64, 128, center=center)
        qb = geo.circle_quadrature(256)
        z, b = qd.nodes[:, None], qb.nodes[None, :]
        vals = fz(z, b) * weight(z, b)
        return np.sum(qd.weights[:, None] * qb.weights[None, :] * vals)

    flat = lambda z, b: np.ones(np.broadcast(z, b).shape)
    ref = integral(0.2 + 0.1j, f)
    ref_flat = integral(0.2 + 0.1j, f, flat)
    for _ in range(3):
        g = lg.random_sl(2, rng, scale=0.5)
        pulled = lambda z, b, g=g: f(geo.act(g, z), geo.act(g, b))
        center = geo.act(g.inv(), 0.2 + 0.1j)
        assert integral(center, pulled) == pytest.approx(ref, rel=1e-5)
        # control: dz db alone is not invariant
        assert abs(integral(center, pulled, flat) / ref_flat - 1) > 1e-3


# --- Laplacian -------------------------------------------------------------------

def test_laplacian_of_plane_wave():
    f = lambda z: geo.plane_wave(1.0, 1.0, z)
    errs = [abs(geo.hyperbolic_laplacian_fd(f, 0.3, h) + 1.25 * f(0.3)) for h in (4e-3, 2e-3, 1e-3)]
    assert errs[-1] < 1e-5
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.8)


@pytest.mark.parametrize("z", [0.0, 0.4j, -0.5 + 0.2j])
def test_laplacian_of_constant(z):
    assert geo.hyperbolic_laplacian_fd(lambda w: 3.0, z, 1e-3) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("lam", [0.5, 1.5])
def test_laplacian_of_spherical_function(lam):
    u = tr.poisson_transform(tr.BoundaryMeasure.uniform(512), lam)
    z = 0.2 - 0.3j
    got = geo.hyperbolic_laplacian_fd(u, z, 1e-3)
    assert got == pytest.approx(-(lam**2 + 0.25) * u(z), rel=1e-5)


def test_laplacian_step_guard():
    with pytest.raises(DomainError):
        geo.hyperbolic_laplacian_fd(lambda z: 1.0, 0.0, 0.05)
