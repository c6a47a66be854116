"""Command line entry point: ``psdist <subcommand>``.

Every subcommand writes UTF-8 JSON or CSV to stdout or to ``--out``.
``verify`` exits with status 1 when any check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import geometry as geo
from . import liegroup as lg
from . import psdistrib as ps
from . import spectral as sp
from . import transforms as tr
from .gamma import SingularityError
from .verification import SUITES, SuiteConfig, run_suite

CSV_HEADER = ("lambda", "c_re", "c_im", "density")


def _write(text, out=None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


def _cpair(z):
    z = complex(z)
    return [z.real, z.imag]


def _parse_complex(text):
    """'0.2,0.1' or '0.2+0.1j' -> complex."""
    text = text.strip()
    if "," in text:
        re_, im_ = text.split(",")
        return complex(float(re_), float(im_))
    return complex(text.replace(" ", ""))


def parse_atoms(text):
    """'angle:wRe:wIm,angle:wRe:wIm' -> BoundaryMeasure."""
    atoms = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        parts = item.split(":")
        if len(parts) == 1:
            parts += ["1", "0"]
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"bad atom {item!r}; expected angle:weightRe:weightIm")
        th, wr, wi = map(float, parts)
        atoms.append((th, complex(wr, wi)))
    if not atoms:
        raise argparse.ArgumentTypeError("empty atom list")
    return tr.BoundaryMeasure(atoms)


def _parse_kv(items):
    out = {}
    for item in items or []:
        k, _, v = item.partition("=")
        if not _:
            raise SystemExit(f"expected key=value, got {item!r}")
        out[k.strip()] = float(v)
    return out


# --- decompose ---------------------------------------------------------------

def decompose(matrix, group=None, kind="all"):
    """Factor a group element; returns a JSON-ready dict of row-major arrays."""
    g = lg.element(matrix, group)
    out = {"group": g.group, "matrix": g.matrix.tolist()}
    if kind in ("kan", "all"):
        f = lg.iwasawa_kan(g)
        out["kan"] = {"k": f.k.tolist(), "a_log": np.asarray(f.a_log).tolist(), "n": f.n.tolist(),
                      "residual": float(np.max(np.abs(f.reconstruct() - g.matrix)))}
    if kind in ("nak", "all"):
        f = lg.iwasawa_nak(g)
        out["nak"] = {"n": f.n.tolist(), "a_log": np.asarray(f.a_log).tolist(), "k": f.k.tolist(),
                      "residual": float(np.max(np.abs(f.reconstruct() - g.matrix)))}
    if kind in ("kak", "all") and g.group != lg.SOH:
        f = lg.cartan_kak(g)
        out["kak"] = {"k1": f.k1.tolist(), "a_log": f.a_log.tolist(), "k2": f.k2.tolist(),
                      "residual": float(np.max(np.abs(f.reconstruct() - g.matrix)))}
    return out


def _cmd_decompose(args):
    try:
        matrix = json.loads(args.matrix)
    except json.JSONDecodeError as e:
        raise SystemExit(f"--matrix: {e}")
    _write(_dump(decompose(matrix, args.group, args.kind)), args.out)
    return 0


# --- cfunction ---------------------------------------------------------------

def cfunction_rows(lam):
    lam = np.asarray(lam, dtype=float)
    c = sp.c_function(lam)
    dens = sp.plancherel_density(lam)
    return [(float(l), float(v.real), float(v.imag), float(d)) for l, v, d in zip(lam, c, dens)]


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([repr(x) for x in r])
    return buf.getvalue()


def _cmd_cfunction(args):
    lam = np.linspace(args.lambda_min, args.lambda_max, args.n)
    rows = cfunction_rows(lam)
    _write(rows_to_csv(rows), args.out)
    if args.svg:
        table = {k: [r[i] for r in rows] for i, k in enumerate(CSV_HEADER)}
        _plot_cfunction(table, args.svg)
    return 0


# --- transform ---------------------------------------------------------------

NAMED_BUMPS = {
    "radial": (1.5, 0.0),
    "offcenter": (1.5, 0.25 + 0.1j),
}


def transform_roundtrip(name="radial", lambda_max=tr.DEFAULT_LAMBDA_MAX, lambda_nodes=tr.DEFAULT_LAMBDA_NODES,
                        n_b=160, n_probes=10, fourier_out=None):
    """Forward and inverse transform of a named bump; errors at probes inside the support."""
    if name not in NAMED_BUMPS:
        raise SystemExit(f"unknown bump {name!r}; choose from {sorted(NAMED_BUMPS)}")
    r0, center = NAMED_BUMPS[name]
    grid = tr.spectral_grid(lambda_max, lambda_nodes)
    bq = geo.circle_quadrature(n_b)
    f = tr.sample_bump(r0, center, 48, 96)
    F = tr.helgason_ft(f, grid, bq)
    if fourier_out:
        _write(F.to_json(), fourier_out)
    inv = tr.helgason_inverse(F)
    d = np.linspace(0, 0.9 * r0, n_probes)
    ang = np.linspace(0, 2 * np.pi, n_probes, endpoint=False)
    # probes at hyperbolic distance d from the bump center
    probes = geo.mobius(geo._translate(center), np.tanh(d / 2) * np.exp(1j * ang))
    exact = tr.bump(r0, center)(probes)
    got = inv(probes)
    scale = float(np.max(np.abs(f.values)))
    err = np.abs(got - exact) / scale
    pl = tr.plancherel_check(f, f, grid, bq)
    return {
        "bump": name,
        "support_radius": r0,
        "center": _cpair(center),
        "probes": [_cpair(p) for p in probes],
        "abs_error": err.tolist(),
        "max_rel_error": float(np.max(err)),
        "plancherel": {"space": _cpair(pl.space_side), "spectral": _cpair(pl.spectral_side),
                       "relative_gap": pl.relative_gap},
        "grid": {"lambda_max": lambda_max, "lambda_nodes": lambda_nodes, "circle": n_b},
    }


def _cmd_transform(args):
    res = transform_roundtrip(args.bump, args.lambda_max, args.lambda_nodes, args.circle, args.probes,
                              args.fourier_out)
    _write(_dump(res), args.out)
    return 0


# --- ps ----------------------------------------------------------------------

def make_symbol(name, center, radius):
    if name == "bump":
        return ps.bump_symbol(radius, center)
    if name == "gaussian":
        return ps.gaussian_bump_symbol(radius / 4, radius, center)
    raise SystemExit(f"unknown symbol {name!r}; choose bump or gaussian")


def ps_pairing(lam, mu, phi, psi, symbol="bump", center=0.0, radius=1.0, grids=ps.PSGrids()):
    """Both sides of the intertwining identity as a JSON-ready dict."""
    a = make_symbol(symbol, center, radius)
    data = ps.PSData(lam, mu, phi, psi)
    r = ps.intertwine_check(a, data, grids)
    return {
        "lhs": _cpair(r.lhs),
        "rhs": _cpair(r.rhs),
        "residual": r.residual,
        "config": {
            "lambda": lam,
            "mu": mu,
            "phi": [[b.theta, *_cpair(w)] for b, w in phi.atoms],
            "psi": [[b.theta, *_cpair(w)] for b, w in psi.atoms],
            "symbol": symbol,
            "center": _cpair(center),
            "radius": radius,
            "grids": {"n_t": grids.n_t, "n_u": grids.n_u, "n_radial": grids.n_radial,
                      "n_angular": grids.n_angular},
        },
    }


def _cmd_ps(args):
    grids = ps.PSGrids(args.n_t, args.n_u, args.n_radial, args.n_angular)
    res = ps_pairing(args.lam, args.mu, args.phi, args.psi, args.symbol, _parse_complex(args.center),
                     args.radius, grids)
    _write(_dump(res), args.out)
    return 0


# --- verify ------------------------------------------------------------------

def _plot_cfunction(table, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    lam = np.asarray(table["lambda"])
    c = np.asarray(table["c_re"]) + 1j * np.asarray(table["c_im"])
    fig, ax = plt.subplots(1, 2, figsize=(8, 3.2))
    ax[0].plot(lam, np.abs(c))
    ax[0].set_xlabel("lambda")
    ax[0].set_ylabel("|c(lambda)|")
    ax[1].plot(lam, table["density"])
    ax[1].set_xlabel("lambda")
    ax[1].set_ylabel("Plancherel density")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_refinement(rows, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.loglog([r["n"] for r in rows], [max(r["residual"], 1e-16) for r in rows], "o-")
    ax.set_xlabel("nodes per direction")
    ax.set_ylabel("relative residual")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def emit_artifacts(report, formats, out_dir, timing=True):
    """Write report.json always, plus CSV/SVG where the report has the data.

    Returns the list of written paths.
    """
    formats = set(formats) | {"json"}
    bad = formats - {"json", "csv", "svg"}
    if bad:
        raise ValueError(f"unknown formats {sorted(bad)}")
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {out_dir}: {e}") from e
    written = []

    def path(name):
        p = os.path.join(out_dir, name)
        written.append(p)
        return p

    _write(report.to_json(timing), path("report.json"))
    table = report.extras.get("cfunction_table")
    if "csv" in formats:
        rows = [tuple(r) for r in zip(*(table[k] for k in CSV_HEADER))] if table else []
        if table:
            _write(rows_to_csv(rows), path("cfunction.csv"))
        checks = io.StringIO()
        w = csv.writer(checks, lineterminator="\n")
        w.writerow(("name", "residual", "tolerance", "passed", "paper_ref"))
        for c in report.checks:
            w.writerow((c.name, repr(c.residual), repr(c.tolerance), c.passed, c.paper_ref))
        _write(checks.getvalue(), path("checks.csv"))
    if "svg" in formats:
        if table:
            _plot_cfunction(table, path("cfunction.svg"))
        if report.extras.get("refinement"):
            _plot_refinement(report.extras["refinement"], path("refinement.svg"))
    return written


def _cmd_verify(args):
    try:
        if args.config:
            cfg = SuiteConfig.from_file(args.config, suite=args.suite, seed=args.seed, output_path=args.out)
        else:
            cfg = SuiteConfig(suite=args.suite or "all", seed=args.seed if args.seed is not None else 20240101,
                              output_path=args.out or "psdist-report")
    except (ValueError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    cfg.tolerances.update(_parse_kv(args.tol))
    cfg.grid_sizes.update(_parse_kv(args.grid))
    formats = [f for f in args.formats.split(",") if f]
    if set(formats) - {"json", "csv", "svg"}:
        print(f"config error: unknown formats in {args.formats!r}", file=sys.stderr)
        return 2
    report = run_suite(cfg)
    try:
        emit_artifacts(report, formats, cfg.output_path, timing=not args.no_timing)
    except (OSError, ValueError) as e:
        print(f"output error: {e}", file=sys.stderr)
        return 2
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  residual={c.residual:.3e} tol={c.tolerance:.1e}")
    s = report.summary
    print(f"{s['passed']}/{s['total']} passed in {report.wall_time:.1f} s; report in {cfg.output_path}")
    return 0 if report.ok else 1


# --- counterexample-sl3 ------------------------------------------------------

def _cmd_counterexample(args):
    r = lg.check_Hnw_symmetry(lg.SL3, (args.d, args.e, args.f))
    out = {"d": args.d, "e": args.e, "f": args.f,
           "s": float(r["s"]), "sPrime": float(r["sPrime"]), "residual": float(r["residual"])}
    _write(_dump(out), args.out)
    return 0


# --- parser ------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="psdist", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="KAN/NAK/KAK factors of a matrix")
    d.add_argument("--matrix", required=True, help="row-major JSON array")
    d.add_argument("--group", choices=lg.GROUP_TAGS, default=None)
    d.add_argument("--kind", choices=("kan", "nak", "kak", "all"), default="all")
    d.add_argument("--out")
    d.set_defaults(fn=_cmd_decompose)

    c = sub.add_parser("cfunction", help="CSV table of c(lambda) and the Plancherel density")
    c.add_argument("--lambda-min", type=float, default=0.05, help="c has a pole at 0")
    c.add_argument("--lambda-max", type=float, default=8.0)
    c.add_argument("--n", type=int, default=161)
    c.add_argument("--out")
    c.add_argument("--svg", help="also plot |c| and the density to this SVG file")
    c.set_defaults(fn=_cmd_cfunction)

    t = sub.add_parser("transform", help="Fourier round trip of a named bump")
    t.add_argument("--bump", default="radial", choices=sorted(NAMED_BUMPS))
    t.add_argument("--lambda-max", type=float, default=tr.DEFAULT_LAMBDA_MAX)
    t.add_argument("--lambda-nodes", type=int, default=tr.DEFAULT_LAMBDA_NODES)
    t.add_argument("--circle", type=int, default=160)
    t.add_argument("--probes", type=int, default=10)
    t.add_argument("--fourier-out", help="write the FourierData JSON here")
    t.add_argument("--out")
    t.set_defaults(fn=_cmd_transform)

    s = sub.add_parser("ps", help="Wigner and Patterson-Sullivan sides for atomic data")
    s.add_argument("--lam", type=float, required=True)
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--phi", type=parse_atoms, required=True, help="angle:wRe:wIm[,angle:wRe:wIm...]")
    s.add_argument("--psi", type=parse_atoms, required=True)
    s.add_argument("--symbol", choices=("bump", "gaussian"), default="bump")
    s.add_argument("--center", default="0,0", help="re,im")
    s.add_argument("--radius", type=float, default=1.0)
    for name, default in (("n-t", 48), ("n-u", 48), ("n-radial", 48), ("n-angular", 96)):
        s.add_argument(f"--{name}", type=int, default=default)
    s.add_argument("--out")
    s.set_defaults(fn=_cmd_ps)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=SUITES + ("all",), default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--config", help="JSON config file")
    v.add_argument("--out", help="output directory")
    v.add_argument("--formats", default="json", help="comma list of json,csv,svg")
    v.add_argument("--tol", action="append", metavar="KEY=VALUE")
    v.add_argument("--grid", action="append", metavar="KEY=VALUE")
    v.add_argument("--no-timing", action="store_true", help="omit wall_time from report.json")
    v.set_defaults(fn=_cmd_verify)

    x = sub.add_parser("counterexample-sl3", help="H(nw) vs H(n^-1 w) on SL(3,R)")
    for name in ("d", "e", "f"):
        x.add_argument(f"--{name}", type=float, default=1.0)
    x.add_argument("--out")
    x.set_defaults(fn=_cmd_counterexample)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (lg.DomainError, SingularityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
