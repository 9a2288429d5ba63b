"""Batch verification campaigns with JSON, CSV and Markdown reports.

Every check produces rows ``(suite, check, point, value, tolerance, pass,
anchor)`` with ``pass`` meaning ``|value| <= tolerance``.  Residuals that
carry a natural size are divided by it, so tolerances are relative.

Points are drawn uniformly from ``[-2, 2]^d`` except for the sphere-based
suites, which use normalised Gaussians.  Each suite owns a child generator
seeded from ``(seed, suite)`` so selecting suites does not change the others.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import autos, cayley, decomp, einstein, fueter, heis, hypersurface
from .jets import coordinate_field
from .polyspace import poly_field, random_poly_field

SUITES = ("algebra", "einstein", "fueter", "cayley", "hypersurface", "autos")

ANCHORS = {
    "algebra": {
        "commutators": "e:commutators",
        "contact_annihilates_frame": "e:Heisenbegr ctct forms",
        "four_part_signature": "New21",
        "casimir_3": "e:cross",
        "casimir_minus1": "e:cross",
        "projector_idempotent": "e:T^o conf change",
        "n1_three_part_identity": "New21",
    },
    "einstein": {
        "con01": "Prop con0 eq. con01",
        "con03": "Prop con0 eq. con03",
        "hessian_relations": "Lemma vcom01",
        "vertical_hessian_diag": "Prop vcom01H",
        "vertical_hessian_offdiag": "Prop vcom01H",
        "ricci_traceless": "Prop trric",
        "scal_constant": "e:conf change scalar curv",
        "yamabe": "t:einstein preserving",
        "scal_3sasakian": "Corollary 3sas",
    },
    "fueter": {
        "antiplu_ii_iii_agree": "Prop antiplu",
        "completion_antiregular": "Prop antiplu proof",
        "completion_real_part": "Prop antiplu proof",
        "crf_witness_system": "crf1",
        "crf_hessian_identity": "Corollary crfth13h",
        "crf_quaternion_identity": "Corollary crfth13h",
        "q_not_antiregular": "Def d:anti-regular functions",
    },
    "cayley": {
        "round_trip": "e:Cayley transf ctct form",
        "siegel_constraint": "e:Cayley transf ctct form",
        "conformality": "e:Cayley transf ctct form",
    },
    "hypersurface": {
        "qc_invariance": "Prop p:QRhypersurface",
        "verdict": "Def d:QRhypersurface",
        "dtheta_relation": "Corollary umb proof",
    },
    "autos": {
        "dilation_nu": "Def d:3-ctct v field (autvf)",
        "dilation_O": "Def d:3-ctct v field (autvf)",
        "translation_nu": "Def d:3-ctct v field (autvf)",
        "translation_O": "Def d:3-ctct v field (autvf)",
        "rotation_fit": "Def d:3-ctct v field (autvf)",
        "cartan_vs_flow": "Prop qaut13c proof (lieaut13c)",
        "reconstruction": "Prop qaut1",
        "compatibility": "Prop qaut1",
        "non_qc_detected": "Def d:3-ctct v field (autvf)",
    },
}

DEFAULT_TOL = {
    "algebra.commutators": 0.0,
    "algebra.contact_annihilates_frame": 1e-12,
    "algebra.four_part_signature": 1e-12,
    "algebra.casimir_3": 1e-12,
    "algebra.casimir_minus1": 1e-12,
    "algebra.projector_idempotent": 1e-12,
    "algebra.n1_three_part_identity": 1e-12,
    "einstein.con01": 1e-8,
    "einstein.con03": 1e-8,
    "einstein.hessian_relations": 1e-8,
    "einstein.vertical_hessian_diag": 1e-8,
    "einstein.vertical_hessian_offdiag": 1e-8,
    "einstein.ricci_traceless": 1e-8,
    "einstein.scal_constant": 1e-8,
    "einstein.yamabe": 1e-7,
    "einstein.scal_3sasakian": 1e-8,
    "fueter.antiplu_ii_iii_agree": 0.0,
    "fueter.completion_antiregular": 1e-8,
    "fueter.completion_real_part": 1e-12,
    "fueter.crf_witness_system": 1e-8,
    "fueter.crf_hessian_identity": 1e-8,
    "fueter.crf_quaternion_identity": 1e-8,
    "fueter.q_not_antiregular": 0.0,
    "cayley.round_trip": 1e-12,
    "cayley.siegel_constraint": 1e-12,
    "cayley.conformality": 1e-10,
    "hypersurface.qc_invariance": 1e-8,
    "hypersurface.verdict": 0.0,
    "hypersurface.dtheta_relation": 1e-8,
    "autos.dilation_nu": 1e-9,
    "autos.dilation_O": 1e-9,
    "autos.translation_nu": 1e-9,
    "autos.translation_O": 1e-9,
    "autos.rotation_fit": 1e-9,
    "autos.cartan_vs_flow": 1e-6,
    "autos.reconstruction": 1e-10,
    "autos.compatibility": 1e-10,
    "autos.non_qc_detected": 0.0,
}

COLUMNS = ("suite", "check", "point", "value", "tolerance", "pass", "anchor")


class UsageError(ValueError):
    pass


@dataclass
class CampaignConfig:
    n: int = 1
    seed: int = 0
    points: int = 200
    suites: tuple = SUITES
    tolerances: dict = field(default_factory=dict)
    perturb: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("n must be >= 1")
        if self.points < 1:
            raise UsageError("points must be >= 1")
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise UsageError(f"unknown suite(s): {', '.join(bad)}")
        for key in self.tolerances:
            if key not in DEFAULT_TOL:
                raise UsageError(f"unknown tolerance key {key!r}")
        self.suites = tuple(s for s in SUITES if s in self.suites)

    def tol(self, suite, check):
        key = f"{suite}.{check}"
        return self.tolerances.get(key, DEFAULT_TOL[key])


class _Collector:
    def __init__(self, cfg: CampaignConfig, suite: str):
        self.cfg = cfg
        self.suite = suite
        self.rows = []

    def add(self, check, values, points=None):
        """One row per entry of ``values``; ``points`` gives the matching coordinates."""
        tol = self.cfg.tol(self.suite, check)
        vals = np.atleast_1d(np.asarray(values, dtype=float))
        pts = None if points is None else np.atleast_2d(np.asarray(points, dtype=float))
        for i, v in enumerate(vals):
            v = float(v)
            self.rows.append(
                {
                    "suite": self.suite,
                    "check": check,
                    "point": None if pts is None else [float(x) for x in pts[i]],
                    "value": v,
                    "tolerance": tol,
                    "pass": bool(abs(v) <= tol),
                    "anchor": ANCHORS[self.suite][check],
                }
            )


def _frob_max(a, axes=(0, 1)):
    return np.max(np.abs(a), axis=axes)


# --- suites --------------------------------------------------------------------
def _suite_algebra(cfg, rng, out):
    n = cfg.n
    table = heis.commutator_table(n)
    out.add("commutators", [0.0 if ok else 1.0 for *_, ok in table])
    d = heis.dim(n)
    pts = rng.uniform(-2, 2, size=(cfg.points, d))
    th = heis.contact_form(pts, n)
    C = heis.frame_data(n).matrix(pts)[: 4 * n]  # (4n, d, *batch)
    ann = np.einsum("sk...,ak...->sa...", th, C)
    out.add("contact_annihilates_frame", _frob_max(ann), pts)

    m = 4 * n
    I = decomp.standard_triple(n)
    psi = rng.normal(size=(m, m, cfg.points))
    parts = decomp.four_part(psi)
    signs = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
    worst = np.zeros(cfg.points)
    for part, sg in zip(parts, signs):
        for Is, e in zip(I, sg):
            # commuting with I_s means I_s P I_s = -P
            worst = np.maximum(worst, _frob_max(decomp.sandwich(Is, part, Is) + e * part))
    worst = np.maximum(worst, _frob_max(sum(parts) - psi))
    out.add("four_part_signature", worst)

    p3, pm = decomp.split_3_minus1(psi)
    out.add("casimir_3", _frob_max(decomp.casimir(p3) - 3 * p3))
    out.add("casimir_minus1", _frob_max(decomp.casimir(pm) + pm))
    idem = np.maximum.reduce(
        [
            _frob_max(decomp.split_3_minus1(p3)[0] - p3),
            _frob_max(decomp.split_3_minus1(pm)[1] - pm),
            _frob_max(decomp.split_3_minus1(p3)[1]),
            _frob_max(decomp.project_3_0(decomp.project_3_0(psi)) - decomp.project_3_0(psi)),
            _frob_max(decomp.project_sym_minus1(decomp.project_sym_minus1(psi)) - decomp.project_sym_minus1(psi)),
        ]
    )
    out.add("projector_idempotent", idem)
    s1 = rng.normal(size=(4, 4, cfg.points))
    s1 = s1 + np.swapaxes(s1, 0, 1)
    t3 = decomp.split_3_minus1(s1)[0]
    out.add("n1_three_part_identity", _frob_max(t3 - np.eye(4)[..., None] * np.trace(s1, axis1=0, axis2=1) / 4))


def _einstein_instances(cfg, rng, count=3):
    d = heis.dim(cfg.n)
    out = []
    for _ in range(count):
        c, nu = rng.uniform(0.2, 2.0, size=2)
        g0 = rng.uniform(-1, 1, size=d)
        out.append(einstein.SolutionParams(float(c), float(nu), cfg.n, tuple(g0)))
    return out


def _suite_einstein(cfg, rng, out):
    n = cfg.n
    d = heis.dim(n)
    pts = rng.uniform(-2, 2, size=(cfg.points, d))
    instances = _einstein_instances(cfg, rng)
    for params in instances:
        h = einstein.solution_h(params)
        if cfg.perturb:
            h = h + cfg.perturb * coordinate_field(0, d, "t1")
        hd = einstein.HData(h, pts, n)
        sc = hd.scale()
        out.add("con01", _frob_max(einstein.residual_con01(hd, pts)) / sc, pts)
        if n >= 2:
            out.add("con03", _frob_max(einstein.residual_con03(hd, pts)) / sc, pts)
        out.add("hessian_relations", einstein.hessian_relations(hd, pts) / sc, pts)
        diag, off = einstein.vertical_hessian(hd, pts)
        out.add("vertical_hessian_diag", np.max(np.abs(diag - 8 * einstein.mu_o(params)), axis=0) / sc, pts)
        out.add("vertical_hessian_offdiag", off / sc, pts)
        out.add("ricci_traceless", _frob_max(einstein.conformal_ricci_traceless(hd, pts)) / sc, pts)
        target = einstein.expected_scal(params)
        out.add("scal_constant", (einstein.conformal_scal(hd, pts) - target) / target, pts)
        u = einstein.yamabe_u(h, n)
        res, usc = einstein.yamabe_residual(u, pts, target, n, return_scale=True)
        out.add("yamabe", res / usc, pts)
    # c nu = 1/8 gives the 3-Sasakian normalisation
    nu = float(rng.uniform(0.5, 2.0))
    params = einstein.SolutionParams(1.0 / (8 * nu), nu, n)
    origin = np.zeros((1, d))
    value = einstein.conformal_scal(einstein.solution_h(params), origin, n)
    out.add("scal_3sasakian", (value - 16 * n * (n + 2)) / (16 * n * (n + 2)), origin)


def _suite_fueter(cfg, rng, out):
    n = cfg.n
    m = 4 * n
    basis, monos = fueter.pluriharmonic_basis(n, 3, rng=rng)
    tol = 1e-10
    agree = []
    for k in range(50):
        if k % 2 == 0:
            f = poly_field(basis @ rng.normal(size=basis.shape[1]), monos, m)
        else:
            f = random_poly_field(rng, m, 3)
        x = rng.uniform(-1, 1, size=(10, m))
        hess = f.jet(x, 2).hessian()
        ii = max(float(np.max(np.abs(fueter.dd_matrix(hess, i, n)))) for i in (1, 2, 3)) <= tol
        iii = float(np.max(fueter.pluriharmonic_residuals(f, x))) <= tol
        agree.append(0.0 if ii == iii else 1.0)
    out.add("antiplu_ii_iii_agree", agree)

    f = poly_field(basis @ rng.normal(size=basis.shape[1]), monos, m)
    F = fueter.completion_field(f)
    x = rng.uniform(-2, 2, size=(cfg.points, m))
    worst = np.zeros(cfg.points)
    for a in range(1, n + 1):
        q = fueter.dirac(F, a, x)
        worst = np.maximum(worst, np.max(np.abs(np.stack(np.broadcast_arrays(*q.coeffs()))), axis=0))
    out.add("completion_antiregular", worst, x)
    out.add("completion_real_part", F(x).t - f(x), x)
    qfield = fueter.QuaternionField(*(coordinate_field(c, m) for c in range(4)))
    out.add("q_not_antiregular", float(fueter.dirac(qfield, 1, x[:1]).t[0]) != 4.0)

    B, build = fueter.anti_crf_witnesses(n, 2, rng=rng)
    W = build(B @ rng.normal(size=B.shape[1]))
    gp = rng.uniform(-2, 2, size=(cfg.points, heis.dim(n)))
    out.add("crf_witness_system", _frob_max(fueter.crf_system_residual(W, gp), axes=0), gp)
    hres, qres, lam = fueter.crf_identities(W, gp)
    sc = np.maximum(1.0, np.abs(lam))
    out.add("crf_hessian_identity", _frob_max(hres) / sc, gp)
    out.add("crf_quaternion_identity", _frob_max(qres) / sc, gp)


def _suite_cayley(cfg, rng, out):
    s = cayley.random_sphere_points(rng, cfg.n, cfg.points)
    v = cayley.random_tangents(rng, s)
    z = cayley.cayley(s)
    out.add("round_trip", np.max(np.abs(cayley.inverse_cayley(z) - s), axis=-1), s)
    out.add("siegel_constraint", cayley.siegel_constraint(z), s)
    out.add("conformality", cayley.conformality_residual(s, v), s)


def _suite_hypersurface(cfg, rng, out):
    n = cfg.n
    surfaces = [
        (hypersurface.sphere(n), hypersurface.QC),
        (hypersurface.ellipsoid(n, [1.0] * n + [2.0]), hypersurface.QC),
        (hypersurface.ellipsoid(n, [0.5] + [1.5] * n), hypersurface.QC),
        (hypersurface.deformed_sphere(n, 0.5), hypersurface.NOT_QC),
    ]
    per = max(1, cfg.points // len(surfaces))
    for surf, expected in surfaces:
        pts = hypersurface.sample_points(surf, rng, per)
        verdict, worst, _ = hypersurface.qc_check(surf, pts)
        out.add("verdict", 0.0 if verdict == expected else 1.0)
        if expected == hypersurface.QC:
            inv = []
            for p in pts:
                inv.append(hypersurface.qc_check(surf, p[None])[1])
            out.add("qc_invariance", inv, pts)
        rel = []
        for p in pts:
            H = hypersurface.horizontal_space(surf, p)
            X, Y = H @ rng.normal(size=H.shape[1]), H @ rng.normal(size=H.shape[1])
            rel.append(hypersurface.dtheta_relation_residual(surf, p, X, Y))
        out.add("dtheta_relation", rel, pts)


def _suite_autos(cfg, rng, out):
    n = cfg.n
    d = heis.dim(n)
    pts = rng.uniform(-2, 2, size=(cfg.points, d))
    Q = autos.dilation_generator(n)
    ok, fit = autos.qc_field_check(Q, pts)
    out.add("dilation_nu", fit.nu - 2.0, pts)
    out.add("dilation_O", np.max(np.abs(fit.O), axis=(-2, -1)), pts)

    for _ in range(2):
        T = autos.translation_generator(rng.normal(size=d))
        ok, fit = autos.qc_field_check(T, pts)
        out.add("translation_nu", fit.nu, pts)
        out.add("translation_O", np.max(np.abs(fit.O), axis=(-2, -1)), pts)

    tau = rng.normal(size=3)
    R = autos.rotation_generator(n, tau / np.linalg.norm(tau))
    ok, fit = autos.qc_field_check(R, pts)
    out.add("rotation_fit", np.maximum(fit.residual, fit.antisymmetry), pts)

    v = rng.normal(size=pts.shape)
    for field_ in (Q, T, R):
        diff = autos.lie_derivative_eta(field_, pts, v) - autos.flow_lie_derivative(field_, pts, v)
        out.add("cartan_vs_flow", np.max(np.abs(diff), axis=0), pts)
        out.add("reconstruction", autos.reconstruction_error(field_, pts), pts)
        comp = autos.compatibility_residuals(*autos.triple_of(field_), pts)
        out.add("compatibility", np.maximum.reduce(list(comp.values())), pts)

    bad = autos.VectorField(lambda xs: [0.0] * (4 * n) + [2.0 * xs[0], 0.0, 0.0], n, "t1*xi1")
    ok, fit = autos.qc_field_check(bad, pts)
    out.add("non_qc_detected", 1.0 if ok else 0.0)


_RUNNERS = {
    "algebra": _suite_algebra,
    "einstein": _suite_einstein,
    "fueter": _suite_fueter,
    "cayley": _suite_cayley,
    "hypersurface": _suite_hypersurface,
    "autos": _suite_autos,
}


def run(cfg: CampaignConfig) -> dict:
    """Run the selected suites; returns ``{"meta": ..., "rows": [...]}``."""
    rows = []
    for suite in cfg.suites:
        rng = np.random.default_rng([cfg.seed, SUITES.index(suite)])
        col = _Collector(cfg, suite)
        _RUNNERS[suite](cfg, rng, col)
        rows.extend(col.rows)
    meta = {
        "n": cfg.n,
        "seed": cfg.seed,
        "points": cfg.points,
        "version": __version__,
        "suites": list(cfg.suites),
        "perturb": cfg.perturb,
        "sampling": "uniform on [-2,2]^d; sphere suites: normalised Gaussians",
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return {"meta": meta, "rows": rows}


def all_pass(report: dict) -> bool:
    return all(r["pass"] for r in report["rows"])


def to_json(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in report["rows"]:
        w.writerow([json.dumps(r[c]) if c == "point" else r[c] for c in COLUMNS])
    return buf.getvalue()


def to_markdown(report: dict) -> str:
    meta = report["meta"]
    lines = [
        f"# QC verification campaign (n={meta['n']}, seed={meta['seed']}, points={meta['points']})",
        "",
        f"Sampling: {meta['sampling']}.",
        "",
        "| suite | check | rows | failed | worst |value| | tolerance | anchor |",
        "|---|---|---|---|---|---|---|",
    ]
    groups = {}
    for r in report["rows"]:
        groups.setdefault((r["suite"], r["check"]), []).append(r)
    for (suite, check), rs in groups.items():
        worst = max(abs(r["value"]) for r in rs)
        failed = sum(not r["pass"] for r in rs)
        anchor = rs[0]["anchor"] if failed else ""
        lines.append(f"| {suite} | {check} | {len(rs)} | {failed} | {worst:.3e} | {rs[0]['tolerance']:.1e} | {anchor} |")
    lines += ["", "PASS" if all_pass(report) else "FAIL", ""]
    return "\n".join(lines)


def _parse_tol(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise UsageError(f"--tol value for {key!r} is not a number") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcgeom", description="Run QC-geometry verification campaigns.")
    p.add_argument("--n", type=int, default=1, help="quaternionic dimension (default 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=200, help="random points per check (default 200)")
    p.add_argument("--suite", action="append", choices=SUITES, help="suite to run; repeatable (default: all)")
    p.add_argument("--tol", action="append", metavar="KEY=VALUE", help="override a tolerance, e.g. einstein.con01=1e-9")
    p.add_argument("--format", choices=("json", "csv", "md", "all"), default="all")
    p.add_argument("--out", default="qc-report", help="output directory (default ./qc-report)")
    p.add_argument("--perturb", type=float, default=0.0, metavar="EPS", help="add EPS*t1 to the Einstein solutions")
    p.add_argument("--list-tolerances", action="store_true", help="print tolerance keys and defaults, then exit")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.list_tolerances:
        for k, v in DEFAULT_TOL.items():
            print(f"{k}={v:g}")
        return 0
    try:
        cfg = CampaignConfig(
            n=args.n,
            seed=args.seed,
            points=args.points,
            suites=tuple(args.suite or SUITES),
            tolerances=_parse_tol(args.tol),
            perturb=args.perturb,
        )
    except UsageError as exc:
        print(f"qcgeom: error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    report = run(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    writers = {"json": ("report.json", to_json), "csv": ("report.csv", to_csv), "md": ("summary.md", to_markdown)}
    for fmt, (name, fn) in writers.items():
        if args.format in (fmt, "all"):
            (out / name).write_text(fn(report))
    print(to_markdown(report))
    print(f"{len(report['rows'])} rows in {time.perf_counter() - start:.1f} s; reports in {out}/")
    return 0 if all_pass(report) else 1


if __name__ == "__main__":
    sys.exit(main())
