"""Registry of numerical checks grouped into suites, and the Report they produce."""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List

import numpy as np

from . import geometry as geo
from . import liegroup as lg
from . import psdistrib as ps
from . import quantization as qz
from . import spectral as sp
from . import transforms as tr

REPORT_VERSION = "1.0"
SUITES = ("iwasawa", "brackets", "spectral", "inversion", "intertwining", "counterexample")
THREADS_ENV = "PSDIST_THREADS"

DEFAULT_TOLERANCES = {
    "reconstruction": 1e-10,
    "kernel": 1e-10,
    "counterexample": 1e-10,
    "cocycle": 1e-9,
    "bracket": 1e-9,
    "poisson": 1e-8,
    "area": 1e-6,
    "measure": 1e-5,
    "c_cross": 1e-6,
    "c_norm": 1e-10,
    "density_ratio": 1e-7,
    "fd_order": 1.8,
    "inversion": 1e-3,
    "plancherel": 1e-3,
    "boundary_values": 1e-8,
    "kappa": 1e-3,
    "intertwine_pair": 1e-4,
    "intertwine_grid": 1e-3,
    "eigendistribution": 1e-6,
    "ps_equivariance": 1e-6,
    "time_reversal": 1e-8,
    "d_lambda": 1e-8,
    "kn": 1e-2,
}

DEFAULT_GRIDS = {
    "disk_radial": 48,
    "disk_angular": 96,
    "circle": 512,
    "circle_b": 160,
    "lambda_max": tr.DEFAULT_LAMBDA_MAX,
    "lambda_nodes": tr.DEFAULT_LAMBDA_NODES,
    "kn_probes": 3,
}


@dataclass
class SuiteConfig:
    suite: str = "all"
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int = 20240101
    grid_sizes: Dict[str, float] = field(default_factory=dict)
    output_path: str = "psdist-report"

    def __post_init__(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ValueError(f"tolerance {k} must be positive")

    def tol(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def grid(self, key):
        return self.grid_sizes.get(key, DEFAULT_GRIDS[key])

    @classmethod
    def from_file(cls, path, **overrides):
        """Load a JSON config; parse errors name the file and line."""
        with open(path) as fh:
            text = fh.read()
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}:{e.lineno}: {e.msg}") from None
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls(
            suite=d.get("suite", "all"),
            tolerances=d.get("tolerances", {}),
            seed=int(d.get("seed", 20240101)),
            grid_sizes=d.get("grid_sizes", {}),
            output_path=d.get("output_path", "psdist-report"),
        )


@dataclass
class Check:
    name: str
    expected: object
    observed: object
    residual: float
    tolerance: float
    passed: bool
    paper_ref: str


def make_check(name, expected, observed, residual, tolerance, paper_ref, higher_is_better=False):
    residual = float(residual)
    passed = residual >= tolerance if higher_is_better else residual <= tolerance
    return Check(name, _jsonable(expected), _jsonable(observed), residual, float(tolerance),
                 bool(passed), paper_ref)


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


@dataclass
class Report:
    version: str
    config: dict
    checks: List[Check]
    extras: dict
    wall_time: float

    @property
    def summary(self):
        n_pass = sum(c.passed for c in self.checks)
        return {"total": len(self.checks), "passed": n_pass, "failed": len(self.checks) - n_pass}

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def to_dict(self, timing=True):
        d = {
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "checks": [asdict(c) for c in self.checks],
            "extras": self.extras,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, timing=True):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


# --- checks ----------------------------------------------------------------

REGISTRY: Dict[str, List[Callable]] = {s: [] for s in SUITES}


def register(suite):
    def deco(fn):
        REGISTRY[suite].append(fn)
        return fn

    return deco


def _roundtrip_residual(g):
    m = g.matrix
    kan, nak, kak = lg.iwasawa_kan(g), lg.iwasawa_nak(g), lg.cartan_kak(g)
    return max(
        np.max(np.abs(kan.reconstruct() - m)),
        np.max(np.abs(nak.reconstruct() - m)),
        np.max(np.abs(kak.reconstruct() - m)),
    )


@register("iwasawa")
def check_roundtrip(cfg, extras):
    rng = np.random.default_rng(cfg.seed)
    out = []
    for n in (2, 3):
        res = max(_roundtrip_residual(lg.random_sl(n, rng)) for _ in range(1000))
        out.append(make_check(f"roundtrip_kan_nak_kak_SL{n}", 0.0, res, res, cfg.tol("reconstruction"),
                              "Iwasawa theorem; Cartan decomposition theorem"))
    return out


@register("iwasawa")
def check_rank_one_kernel(cfg, extras):
    w = lg.weyl_longest(lg.SL2)
    u = np.linspace(-5, 5, 201)
    res = max(abs(lg.iwasawa_H(lg.n_u(x).inv() @ w) - np.log1p(x * x)) for x in u)
    return [make_check("H(n_u^-1 w) = ln(1+u^2)", 0.0, res, res, cfg.tol("kernel"),
                       'Remark "Some remarks"(2)')]


@register("iwasawa")
def check_cocycle_and_symmetry(cfg, extras):
    rng = np.random.default_rng(cfg.seed + 1)
    res = 0.0
    for _ in range(200):
        g1, g2 = lg.random_sl(2, rng), lg.random_sl(2, rng)
        k = lg.k_theta(rng.uniform(0, 2 * np.pi))
        k2 = lg.iwasawa_kan(g2 @ k).k
        lhs = lg.iwasawa_H(g1 @ g2 @ k)
        rhs = lg.iwasawa_H(g1 @ lg.GroupElement(k2, lg.SL2)) + lg.iwasawa_H(g2 @ k)
        res = max(res, abs(lhs - rhs))
    sym = max(lg.check_Hnw_symmetry(lg.SL2, [u])["residual"] for u in np.linspace(-5, 5, 41))
    soh = 0.0
    for n in (2, 3):
        w = lg.weyl_longest(lg.SOH, n)
        for _ in range(20):
            z = rng.normal(size=n - 1)
            nz = lg.soh_n(z)
            soh = max(soh, abs(lg.hyperbolic_H(nz @ w) - lg.hyperbolic_H(nz.inv() @ w)))
    wa = lg.weyl_action(lg.SL2, 0.7)
    h3 = np.array([0.5, 0.2, -0.7])
    return [
        make_check("cocycle H(g1 g2 k)", 0.0, res, res, cfg.tol("cocycle"), 'Lemma "invariance0"'),
        make_check("H(nw)=H(n^-1 w) on SL2", 0.0, sym, sym, cfg.tol("kernel"), 'Remark "Some remarks"(1)'),
        make_check("H(nw)=H(n^-1 w) on SOH(n)", 0.0, soh, soh, cfg.tol("cocycle"), "H(nw)=H(n^{-1}w), where $n\\in N$"),
        make_check("Ad(w) = -id on SL2", -0.7, wa, abs(wa + 0.7), cfg.tol("kernel"),
                   'Lemma "minus identity"'),
        make_check("Ad(w) != -id on SL3", "nonzero",
                   lg.weyl_action(lg.SL3, h3).tolist(),
                   float(np.max(np.abs(lg.weyl_action(lg.SL3, h3) + h3))), 1e-3,
                   '"The special linear groups"', higher_is_better=True),
    ]


@register("counterexample")
def check_sl3(cfg, extras):
    r = lg.check_Hnw_symmetry(lg.SL3, [1.0, 1.0, 1.0])
    tol = cfg.tol("counterexample")
    zero = lg.check_Hnw_symmetry(lg.SL3, [0.0, 1.0, 1.0])
    return [
        make_check("SL3 s at (1,1,1)", 0.5 * np.log(3), r["s"], abs(r["s"] - 0.5 * np.log(3)), tol,
                   'Eqs. (s eq)/(s′ eq)'),
        make_check("SL3 s' at (1,1,1)", 0.5 * np.log(2), r["sPrime"], abs(r["sPrime"] - 0.5 * np.log(2)), tol,
                   'Eqs. (s eq)/(s′ eq)'),
        make_check("SL3 residual = ln(3/2)/2", 0.5 * np.log(1.5), r["residual"],
                   abs(r["residual"] - 0.5 * np.log(1.5)), tol,
                   'the equations contradict if $d=e=f=1$'),
        make_check("SL3 residual at (0,1,1)", 0.0, zero["residual"], zero["residual"], tol,
                   '"The special linear groups"'),
    ]


@register("brackets")
def check_brackets(cfg, extras):
    rng = np.random.default_rng(cfg.seed + 2)
    eq = kinv = refl = route = 0.0
    for _ in range(1000):
        g = lg.random_sl(2, rng)
        z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        b = np.exp(2j * np.pi * rng.uniform())
        go, gb = geo.act(g, 0.0), geo.act(g, b)
        eq = max(eq, abs(geo.horocycle_bracket(geo.act(g, z), gb) - geo.horocycle_bracket(z, b)
                         - geo.horocycle_bracket(go, gb)))
        k = lg.k_theta(rng.uniform(0, 2 * np.pi))
        kinv = max(kinv, abs(geo.horocycle_bracket(geo.act(k, z), geo.act(k, b)) - geo.horocycle_bracket(z, b)))
        refl = max(refl, abs(geo.horocycle_bracket(geo.act(g.inv(), 0.0), b) + geo.horocycle_bracket(go, gb)))
        route = max(route, abs(geo.horocycle_bracket(go, geo.act(k, 1.0)) - geo.bracket_matrix_route(g, k)))
    tol = cfg.tol("bracket")
    return [
        make_check("bracket equivariance", 0.0, eq, eq, tol, "Eq. (equivariance)"),
        make_check("bracket K-invariance", 0.0, kinv, kinv, 1e-10, "invariant under the diagonal action of $K$"),
        make_check("bracket reflection identity", 0.0, refl, refl, tol, 'Corollary "cor need"'),
        make_check("bracket closed form vs matrix route", 0.0, route, route, tol,
                   "$\\left\\langle gK,kM\\right\\rangle := A(k^{-1}g) = -H(g^{-1}k)$"),
    ]


@register("brackets")
def check_poisson_normalization(cfg, extras):
    rng = np.random.default_rng(cfg.seed + 3)
    cq = geo.circle_quadrature(int(cfg.grid("circle")))
    z = 0.9 * np.sqrt(rng.uniform(size=50)) * np.exp(2j * np.pi * rng.uniform(size=50))
    vals = geo.poisson_kernel(z[:, None], cq.nodes[None, :]) @ cq.weights
    res = float(np.max(np.abs(vals - 1)))
    g = lg.random_sl(2, rng, 0.6)
    jac = [geo.boundary_action(g, b)[1] for b in cq.nodes]
    jres = abs(float(np.dot(jac, cq.weights)) - 1)
    q = geo.disk_quadrature(3.0, 200, 16)
    area = abs(q.weights.sum() / geo.hyperbolic_area(3.0) - 1)
    return [
        make_check("int_B e^{2 rho <z,b>} db = 1", 1.0, float(vals[np.argmax(np.abs(vals - 1))].real), res,
                   cfg.tol("poisson"), "$\\int_B e^{2\\rho\\langle z,b\\rangle} \\, db = 1$"),
        make_check("int_B jacobian db = 1", 1.0, 1 + jres, jres, cfg.tol("poisson"), 'Lemma "integral formula 1"'),
        make_check("disk quadrature area", 0.0, area, area, cfg.tol("area"), "invariant measures on $X=G/K$"),
    ]


@register("brackets")
def check_measure_invariance(cfg, extras):
    """int f(g.z, g.b) e^{2 rho <z,b>} dz db against the same integral of f."""
    rng = np.random.default_rng(cfg.seed + 30)
    c0 = 0.2 + 0.1j
    base = tr.bump(1.0, c0)
    cq = geo.circle_quadrature(256)

    def f(z, b):
        return base(z) * (1 + 0.5 * np.real(b) + 0.3 * np.imag(b**2))

    def integral(fn, center):
        q = geo.disk_quadrature(1.0, int(cfg.grid("disk_radial")) + 16, 128, center=center)
        z, b = q.nodes[:, None], cq.nodes[None, :]
        return np.sum(q.weights[:, None] * cq.weights[None, :] * fn(z, b) * geo.poisson_kernel(z, b))

    ref = integral(f, c0)
    worst = 0.0
    for _ in range(3):
        g = lg.random_sl(2, rng, 0.5)
        moved = integral(lambda z, b: f(geo.act(g, z), geo.act(g, b)), geo.act(g.inv(), c0))
        worst = max(worst, abs(moved / ref - 1))
    return [make_check("G-invariance of e^{2 rho <z,b>} dz db", ref, ref * (1 + worst), worst, cfg.tol("measure"),
                       "$e^{2\\rho\\langle z,b\\rangle}\\,dz\\,db$ is a $G$-invariant measure")]


def fd_order_study(lams=(0.5, 1.0, 2.0), probes=(0.3, -0.2 + 0.25j, 0.1 - 0.4j), h0=1e-2):
    """Errors of the FD Laplacian on plane waves at h0, h0/2, h0/4 and the
    observed orders log2(e(h)/e(h/2))."""
    rows = []
    for lam in lams:
        for z in probes:
            f = lambda w, lam=lam: geo.plane_wave(lam, 1.0, w)
            exact = sp.laplace_eigenvalue(lam) * f(z)
            errs = [abs(geo.hyperbolic_laplacian_fd(f, z, h0 / 2**k) - exact) for k in range(3)]
            orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
            rows.append({"lambda": lam, "z": z, "errors": errs, "orders": orders})
    return rows


@register("brackets")
def check_laplacian(cfg, extras):
    rows = fd_order_study()
    worst = min(min(r["orders"]) for r in rows)
    return [make_check("FD Laplacian order on e_{lambda,b}", 2.0, worst, worst, cfg.tol("fd_order"),
                       "Eq. (character of the Laplacian)", higher_is_better=True)]


@register("spectral")
def check_c_function(cfg, extras):
    rng = np.random.default_rng(cfg.seed + 4)
    s = rng.uniform(0.2, 2.0, 20) + 1j * rng.uniform(-3, 3, 20)  # s = i lambda
    lams = -1j * s
    cross = max(abs(sp.c_function(l) - sp.c_function_integral(l)) for l in lams)
    norm = abs(sp.c_function(-0.5j) - 1)
    grid = np.array([0.5, 1.0, 2.0, 4.0])
    ratio = sp.plancherel_density(grid) / (grid * np.tanh(np.pi * grid))
    spread = float(np.ptp(ratio) / np.mean(ratio))
    lam = np.linspace(0.25, 8, 32)
    consist = float(np.max(np.abs(sp.plancherel_density(lam) * sp.c_function(lam) * sp.c_function(-lam) - 1)))
    dens = sp.plancherel_density(np.linspace(0.01, 20, 400))
    monotone = bool(np.all(dens > 0) and np.all(np.diff(dens) > 0))
    extras["cfunction_table"] = {
        "lambda": lam.tolist(),
        "c_re": sp.c_function(lam).real.tolist(),
        "c_im": sp.c_function(lam).imag.tolist(),
        "density": sp.plancherel_density(lam).tolist(),
    }
    return [
        make_check("c product vs N-bar integral", 0.0, cross, cross, cfg.tol("c_cross"),
                   "Eq. (c-function); Eq. (to the integrals)"),
        make_check("c(-i rho) = 1", 1.0, sp.c_function(-0.5j), norm, cfg.tol("c_norm"), "$c(-i\\rho)=1$"),
        make_check("density / (lambda tanh pi lambda) constant", float(np.pi), ratio.tolist(), spread,
                   cfg.tol("density_ratio"), "case (b)"),
        make_check("density * c(l) c(-l) = 1", 1.0, 1 + consist, consist, 1e-7, "$|c(\\lambda)|^{-2}$"),
        make_check("density positive and increasing", True, monotone, 0.0 if monotone else 1.0, 0.5,
                   "case (b)"),
    ]


def inversion_study(cfg):
    r0 = 1.5
    lg_ = tr.spectral_grid(cfg.grid("lambda_max"), int(cfg.grid("lambda_nodes")))
    bq = geo.circle_quadrature(int(cfg.grid("circle_b")))
    f = tr.sample_bump(r0, 0.0, int(cfg.grid("disk_radial")), int(cfg.grid("disk_angular")))
    F = tr.helgason_ft(f, lg_, bq)
    inv = tr.helgason_inverse(F)
    d = np.linspace(0, 1.35, 10)
    probes = np.tanh(d / 2) * np.exp(1j * np.linspace(0, 2 * np.pi, 10, endpoint=False))
    exact = tr.bump(r0)(probes)
    err = float(np.max(np.abs(inv(probes) - exact)) / np.max(np.abs(f.values)))
    pl = tr.plancherel_check(f, f, lg_, bq)
    rec1 = tr.helgason_inverse(F, kappa=1.0)(0.0)
    kappa = float((tr.bump(r0)(0.0) / rec1).real)
    return err, pl, kappa


@register("inversion")
def check_inversion(cfg, extras):
    err, pl, kappa = inversion_study(cfg)
    kres = abs(kappa / tr.KAPPA - 1)
    return [
        make_check("Fourier inversion round trip", 0.0, err, err, cfg.tol("inversion"),
                   "Eq. (Fourier inversion formula)"),
        make_check("Plancherel sides", pl.space_side, pl.spectral_side, pl.relative_gap, cfg.tol("plancherel"),
                   'Theorem "Plancherel formula"'),
        make_check("inversion constant calibration", tr.KAPPA, kappa, kres, cfg.tol("kappa"),
                   "multiply these measures by the factor $(2\\pi)^{-l/2}$"),
    ]


@register("inversion")
def check_transform_invariants(cfg, extras):
    """Boundary-value equivariance, inversion on a span of bumps, translation."""
    rng = np.random.default_rng(cfg.seed + 31)
    lam = 1.3
    bv = 0.0
    for _ in range(20):
        g = lg.random_sl(2, rng, 0.7)
        T = tr.BoundaryMeasure.atom(rng.uniform(0, 2 * np.pi))
        z = 0.8 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        lhs = tr.poisson_transform(tr.push_measure(T, g, lam), lam)(z)
        rhs = tr.poisson_transform(T, lam)(geo.act(g.inv(), z))
        bv = max(bv, abs(lhs - rhs) / abs(rhs))

    lgr = tr.spectral_grid(cfg.grid("lambda_max"), int(cfg.grid("lambda_nodes")))
    bq = geo.circle_quadrature(int(cfg.grid("circle_b")))
    r0 = 1.5
    centers, weights = (0.0, 0.3, -0.25j), (1.0, 2.0, -1.0)
    R = max(float(geo.hyperbolic_distance(c)) for c in centers) + r0
    grid = geo.disk_quadrature(R, int(cfg.grid("disk_radial")) + 16, 160)
    f = tr.sample(lambda z: sum(w * tr.bump(r0, c)(z) for c, w in zip(centers, weights)), grid, R)
    inv = tr.helgason_inverse(tr.helgason_ft(f, lgr, bq))
    probes = 0.6 * np.sqrt(rng.uniform(size=10)) * np.exp(2j * np.pi * rng.uniform(size=10))
    exact = sum(w * tr.bump(r0, c)(probes) for c, w in zip(centers, weights))
    span = float(np.max(np.abs(inv(probes) - exact)) / np.max(np.abs(f.values)))

    # f o g^{-1} for a radial bump f is the bump about g.o
    g = lg.random_sl(2, rng, 0.3)
    c = complex(geo.act(g, 0.0))
    f0 = tr.sample_bump(r0, 0.0, int(cfg.grid("disk_radial")), int(cfg.grid("disk_angular")))
    fc = tr.sample_bump(r0, c, int(cfg.grid("disk_radial")), int(cfg.grid("disk_angular")))
    inv0 = tr.helgason_inverse(tr.helgason_ft(f0, lgr, bq))
    invc = tr.helgason_inverse(tr.helgason_ft(fc, lgr, bq))
    pts = geo.act(g, probes)
    shift = float(np.max(np.abs(invc(pts) - inv0(geo.act(g.inv(), pts)))) / np.max(np.abs(f0.values)))
    return [
        make_check("boundary-value equivariance of P_lambda", 0.0, bv, bv, cfg.tol("boundary_values"),
                   "Eq. (boundary values equivariance 1)"),
        make_check("inversion on a span of 3 bumps", 0.0, span, span, cfg.tol("inversion"),
                   "Eq. (Fourier inversion formula)"),
        make_check("inversion commutes with translation", 0.0, shift, shift, cfg.tol("inversion"),
                   "Eq. (equivariance)"),
    ]


def kn_smoke(n_probes=3, grids=qz.KNGrids(), lam=2.0):
    """U(1) = 1, G-equivariance and direct-vs-convolution at a few probes."""
    one = qz.spatial_symbol(qz.plateau(2.0, 3.0))
    probes = [(0.0, 1.0), (0.1 + 0.05j, np.exp(1j)), (-0.15j, np.exp(2.5j))][:n_probes]
    ones = [qz.kohn_nirenberg_U(one, z, lam, b, 3.0, 0.0, grids) for z, b in probes]
    c, R = 0.1 + 0.1j, 2.0
    base = tr.bump(R, c)

    def a(w, mu, bp):
        return base(w) * (1 + 0.5 * np.real(bp))

    a.mu_dependent = False
    rng = np.random.default_rng(7)
    equiv, paths = [], []
    for _ in range(n_probes):
        g = lg.random_sl(2, rng, 0.4)

        def ag(w, mu, bp, g=g):
            return a(geo.act(g, w), mu, geo.act(g, bp))

        ag.mu_dependent = False
        lhs = qz.kohn_nirenberg_U(ag, 0.0, lam, 1.0, R, geo.act(g.inv(), c), grids)
        rhs = qz.kohn_nirenberg_U(a, geo.act(g, 0.0), lam, geo.act(g, 1.0), R, c, grids)
        conv = qz.kohn_nirenberg_U(a, geo.act(g, 0.0), lam, geo.act(g, 1.0), R, c, grids, path="convolution")
        equiv.append(abs(lhs - rhs))
        paths.append(abs(conv - rhs))
    return {
        "ones": ones,
        "one_err": float(max(abs(v - 1) for v in ones)),
        "equiv_err": float(max(equiv)),
        "path_err": float(max(paths)),
    }


@register("inversion")
def check_kohn_nirenberg(cfg, extras):
    r = kn_smoke(int(cfg.grid("kn_probes")))
    tol = cfg.tol("kn")
    return [
        make_check("U(1) = 1", 1.0, r["ones"], r["one_err"], tol, 'Lemma "lemma U isometry"'),
        make_check("U G-equivariance", 0.0, r["equiv_err"], r["equiv_err"], tol, 'Prop. "U unitary"'),
        make_check("U direct vs convolution", 0.0, r["path_err"], r["path_err"], tol, 'Prop. "U formula one"'),
    ]


def reference_symbol():
    return ps.bump_symbol(1.0, 0.2 + 0.1j, lambda b: 1 + 0.5 * np.real(b))


def atom_grid_data(lam, mu, rng):
    phi = tr.BoundaryMeasure([(th, complex(*rng.normal(size=2))) for th in (0.0, 0.35, -0.4)])
    psi = tr.BoundaryMeasure([(th, complex(*rng.normal(size=2))) for th in (np.pi, 2.6, -2.7)])
    return ps.PSData(lam, mu, phi, psi)


def refinement_study(a, data, levels=(6, 8, 12, 16, 24)):
    rows = []
    for n in levels:
        r = ps.intertwine_check(a, data, ps.PSGrids(n, n, n, 2 * n))
        rows.append({"n": n, "residual": r.residual})
    return rows


@register("intertwining")
def check_intertwining(cfg, extras):
    a = reference_symbol()
    pair = ps.PSData(2.0, 2.0, tr.BoundaryMeasure.atom(0.0), tr.BoundaryMeasure.atom(np.pi))
    r1 = ps.intertwine_check(a, pair)
    rng = np.random.default_rng(cfg.seed + 5)
    grid = atom_grid_data(2.0, 1.0, rng)
    r9 = ps.intertwine_check(a, grid)
    study = refinement_study(a, pair)
    extras["refinement"] = study
    res = [s["residual"] for s in study]
    # halving must at least halve the residual until it is below 1e-5
    bad = [res[i + 1] / res[i] for i in range(len(res) - 1) if res[i] > 1e-5]
    worst = max(bad) if bad else 0.0
    return [
        make_check("intertwining, single pair", r1.lhs, r1.rhs, r1.residual, cfg.tol("intertwine_pair"),
                   'Theorem "Intertwining Formula"'),
        make_check("intertwining, 3x3 atoms", r9.lhs, r9.rhs, r9.residual, cfg.tol("intertwine_grid"),
                   'Lemma (intertwining)'),
        make_check("residual decreases under refinement", "<= 0.5", worst, worst, 0.5,
                   'Theorem "Intertwining Formula"'),
    ]


@register("intertwining")
def check_eigendistribution(cfg, extras):
    a = reference_symbol()
    out = []
    for lam, mu, t in [(2.0, 1.0, 0.7), (3.0, 3.0, 1.1), (1.0, 2.0, -0.4)]:
        data = ps.PSData(lam, mu, tr.BoundaryMeasure([(0.0, 1), (0.4, 0.5j)]),
                         tr.BoundaryMeasure([(np.pi, 1), (2.5, -0.3)]))
        r = ps.a_translation_check(a, data, t)
        out.append(make_check(f"A-eigendistribution ({lam:g},{mu:g},{t:g})", r["expected"], r["ratio"],
                              abs(r["ratio"] - r["expected"]), cfg.tol("eigendistribution"),
                              "Eq. (eigendistributions)"))
    return out


def stationary_phase_study(mus=(5.0, 10.0, 20.0)):
    a = ps.gaussian_bump_symbol(0.7, 3.0, 0.2 + 0.1j)
    g = geo.frame_from_tangent(0.2 + 0.1j, np.exp(0.3j))
    devs = [ps.knapp_stein_deviation(a, g, m) for m in mus]
    slope = float(np.polyfit(np.log(mus), np.log(devs), 1)[0])
    return devs, slope


@register("intertwining")
def check_stationary_phase(cfg, extras):
    devs, slope = stationary_phase_study()
    decreasing = all(devs[i + 1] < devs[i] for i in range(len(devs) - 1))
    return [
        make_check("Knapp-Stein leading order decreasing", True, decreasing, 0.0 if decreasing else 1.0, 0.5,
                   "Eq. (integrate this)"),
        make_check("Knapp-Stein decay exponent", -1.0, slope, abs(slope + 1), 0.3, "Eq. (integrate this)"),
    ]


@register("intertwining")
def check_ps_symmetries(cfg, extras):
    a = reference_symbol()
    rng = np.random.default_rng(cfg.seed + 6)
    data = atom_grid_data(2.0, 1.0, rng)
    g = lg.random_sl(2, rng, 0.5)
    v0 = ps.ps_distribution(a, data)
    v1 = ps.ps_distribution(ps.translate_symbol(a, g), ps.push_data(data, g))
    eq = abs(v1 - v0) / abs(v0)
    cq = geo.circle_quadrature(24)
    T = tr.BoundaryMeasure((), (cq, 1 + 0.3 * np.cos(cq.thetas) + 0.2j * np.sin(2 * cq.thetas)))
    diag = ps.PSData(1.5, 1.5, T, T)
    w0 = ps.ps_distribution(a, diag)
    w1 = ps.ps_distribution(ps.time_reversed(a), diag)
    tr_res = abs(w1 - w0) / abs(w0)
    grad0 = float(np.max(np.abs(ps.kn_phase_gradient([1.0, 0.0, 0.0, 0.0]))))
    grad1 = float(np.linalg.norm(ps.kn_phase_gradient([1.1, 0.1, 0.1, 0.1])))
    return [
        make_check("PS equivariance under pushed data", v0, v1, eq, cfg.tol("ps_equivariance"),
                   'Proposition "ps invariant"'),
        make_check("PS time reversal", w0, w1, tr_res, cfg.tol("time_reversal"), 'Corollary "time reversal"'),
        make_check("phase gradient vanishes at (1,e,e,e)", 0.0, grad0, grad0, 1e-7,
                   'Proposition "critical points calculus"'),
        make_check("phase gradient off the critical point", "> 1e-3", grad1, grad1, 1e-3,
                   'Proposition "critical points calculus"', higher_is_better=True),
    ]


@register("intertwining")
def check_intermediate_values(cfg, extras):
    """d_lambda closed form, its equivariance, and the off-diagonal matrix form."""
    rng = np.random.default_rng(cfg.seed + 32)
    lam, mu = 1.7, 0.6
    closed = equiv = off = 0.0
    for _ in range(100):
        b, b2 = np.exp(2j * np.pi * rng.uniform(size=2))
        g = geo.geodesic_frame(b, b2)
        closed = max(closed, abs(ps.intermediate_value(g, lam, lam) - ps.d_lambda_closed(b, b2, lam)))
        h = lg.random_sl(2, rng, 0.7)
        ho, hb, hb2 = geo.act(h, 0.0), geo.act(h, b), geo.act(h, b2)
        br1, br2 = geo.horocycle_bracket(ho, hb), geo.horocycle_bracket(ho, hb2)
        rhs = np.exp((1j * lam + tr.RHO) * (br1 + br2)) * ps.d_lambda_closed(b, b2, lam)
        equiv = max(equiv, abs(ps.d_lambda_closed(hb, hb2, lam) - rhs) / abs(rhs))
        rhs = np.exp((1j * lam + tr.RHO) * br1 + (1j * mu + tr.RHO) * br2) * ps.intermediate_value(g, lam, mu)
        off = max(off, abs(ps.intermediate_value(h @ g, lam, mu) - rhs) / abs(rhs))
    base = abs(ps.intermediate_value(lg.a_t(0.0), lam, mu) - 1)
    tol = cfg.tol("d_lambda")
    return [
        make_check("d_lambda closed form vs frames", 0.0, closed, closed, tol,
                   'Remark "Some remarks"(2)'),
        make_check("d_lambda(M, wM) = 1", 1.0, 1 + base, base, tol, 'Remark "Some remarks"(2)'),
        make_check("d_lambda equivariance", 0.0, equiv, equiv, tol, "Eq. (equivariance dlambda)"),
        make_check("d_{lambda,mu} equivariance off the diagonal", 0.0, off, off, tol,
                   "Lemma (equivariance property off-diag)"),
    ]


# --- runner ----------------------------------------------------------------

def _threads():
    try:
        n = int(os.environ.get(THREADS_ENV, "1"))
    except ValueError:
        n = 1
    return max(1, n)


def run_suite(cfg: SuiteConfig) -> Report:
    """Run every registered check of the suite; order follows the registry."""
    t0 = time.perf_counter()
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    fns = [fn for s in suites for fn in REGISTRY[s]]
    extras_each = [dict() for _ in fns]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda i: fns[i](cfg, extras_each[i]), range(len(fns))))
    checks = [c for r in results for c in r]
    extras = {}
    for e in extras_each:
        extras.update(e)
    config = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "tolerances": {**DEFAULT_TOLERANCES, **cfg.tolerances},
        "grid_sizes": {**DEFAULT_GRIDS, **cfg.grid_sizes},
    }
    return Report(REPORT_VERSION, _jsonable_tree(config), checks, _jsonable_tree(extras),
                  time.perf_counter() - t0)


def _jsonable_tree(x):
    if isinstance(x, dict):
        return {k: _jsonable_tree(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable_tree(v) for v in x]
    return _jsonable(x)
