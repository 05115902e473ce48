"""Config-driven verification harness.

Builds model families, runs the named check suites over geometric u-sweeps,
asserts tolerance bands, and writes CSV / JSON / markdown / SVG reports.

Exit codes: 0 all checks pass, 1 tolerance failure, 2 config or I/O error.
CSV and JSON outputs are bit-deterministic for a fixed config (wall-clock
timings appear only in the markdown summary).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asym
from .collar import CollarError, U_MIN, collar_from_u, make_grid
from .curvature import CurvatureWorkspace, upper_index
from .differentials import CollarSystem, diagonal_family, wp_cometric, wp_metric
from .fields import CollarField, constant_field, pairing_l2, volume_integral
from .green import SolverConfig, solve_T
from .operators import ck_norm, maass

PI = math.pi

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_CONFIG = 2

SUITE_IDS = (
    "verify-calculus", "wp-asymptotics", "ricci-asymptotics", "green-props",
    "approximants", "holo-curvature", "perturbed", "lengths", "equivalence",
    "g2-bounds",
)


class ConfigError(ValueError):
    pass


# -- configuration ----------------------------------------------------------

@dataclass
class RunConfig:
    n_tau: int = 1024
    n_modes: int = 24
    u_min: float = 0.025
    u_max: float = 0.1
    points: int = 5
    spacing: str = "geometric"
    c: float = 0.5
    suites: tuple = SUITE_IDS
    tolerances: dict = field(default_factory=dict)
    perturbation_C: tuple = (1.0, 10.0)
    kappa: float = 1.0
    out_dir: str = "collarlab-out"
    formats: tuple = ("csv", "json", "markdown")
    seed: int = 1234

    def validate(self) -> "RunConfig":
        if not self.u_min < self.u_max <= 0.15:
            raise ConfigError("sweep requires u_min < u_max <= 0.15")
        if self.u_min < U_MIN:
            raise ConfigError(f"u_min below the resolvable floor {U_MIN}")
        if self.points < 4:
            raise ConfigError("sweep needs at least 4 points")
        if self.n_tau < 512:
            raise ConfigError("n_tau must be at least 512")
        if self.spacing != "geometric":
            raise ConfigError("only geometric sweep spacing is supported")
        bad = [s for s in self.suites if s not in SUITE_IDS]
        if bad:
            raise ConfigError(f"unknown suites: {', '.join(bad)}")
        bad = [f for f in self.formats
               if f not in ("csv", "json", "markdown", "svg-lines")]
        if bad:
            raise ConfigError(f"unknown formats: {', '.join(bad)}")
        if not 0.0 < self.c < 1.0:
            raise ConfigError("cutoff c must lie in (0, 1)")
        return self

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        known = {
            "grid", "sweep", "suites", "tolerances", "perturbation",
            "coupling", "output", "seed", "c",
        }
        bad = set(raw) - known
        if bad:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(bad))}")
        grid = raw.get("grid", {})
        sweep = raw.get("sweep", {})
        out = raw.get("output", {})
        try:
            cfg = cls(
                n_tau=int(grid.get("n_tau", 1024)),
                n_modes=int(grid.get("n_modes", 24)),
                u_min=float(sweep.get("u_min", 0.025)),
                u_max=float(sweep.get("u_max", 0.1)),
                points=int(sweep.get("points", 5)),
                spacing=str(sweep.get("spacing", "geometric")),
                c=float(raw.get("c", 0.5)),
                suites=tuple(raw.get("suites", SUITE_IDS)),
                tolerances={str(k): float(v)
                            for k, v in raw.get("tolerances", {}).items()},
                perturbation_C=tuple(float(x) for x in
                                     raw.get("perturbation", {}).get("C", (1.0, 10.0))),
                kappa=float(raw.get("coupling", {}).get("kappa", 1.0)),
                out_dir=str(out.get("directory", "collarlab-out")),
                formats=tuple(out.get("formats", ("csv", "json", "markdown"))),
                seed=int(raw.get("seed", 1234)),
            )
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"malformed config value: {exc}") from exc
        return cfg.validate()

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def sweep_values(self) -> list:
        us = np.geomspace(self.u_max, self.u_min, self.points)
        return [float(u) for u in us]

    def tol(self, check_id: str, default: float) -> float:
        return self.tolerances.get(check_id, default)


# -- records ----------------------------------------------------------------

@dataclass
class CheckRecord:
    suite: str
    check_id: str
    u: float
    t_abs: float
    measured: complex
    target: complex
    rel_err: float
    passed: bool
    report_only: bool = False


@dataclass
class SuiteReport:
    suite: str
    records: list
    wall_clock: float

    @property
    def status(self) -> str:
        ok = all(r.passed for r in self.records if not r.report_only)
        return "pass" if ok else "fail"


def _record(suite, check_id, u, measured, target, tol, *, mode="rel",
            report_only=False) -> CheckRecord:
    """Build a record; mode picks how rel_err and pass are derived.

    rel  : rel_err = |measured - target| / |target|, pass iff <= tol;
    abs  : rel_err = |measured - target|, pass iff <= tol;
    floor: pass iff Re measured >= Re target (exponent thresholds);
    band : pass iff Re target - tol <= Re measured <= Re target + tol.
    """
    measured = complex(measured)
    target = complex(target)
    if mode == "abs" or target == 0:
        rel = abs(measured - target)
    else:
        rel = abs(measured - target) / abs(target)
    if mode == "floor":
        ok = measured.real >= target.real
    elif mode == "band":
        ok = abs(measured.real - target.real) <= tol
    else:
        ok = rel <= tol
    return CheckRecord(suite, check_id, float(u), math.exp(-PI / u),
                       measured, target, float(rel), bool(ok), report_only)


# -- suites ------------------------------------------------------------------

def _suite_verify_calculus(cfg: RunConfig) -> list:
    recs = []
    c = cfg.c
    for u in (0.1, 0.05, 0.025):
        col = collar_from_u(u, c)
        grid = make_grid(col, cfg.n_tau)
        tau = grid.nodes

        measured = grid.integrate(np.sin(tau) ** 2)
        closed = PI / 2 + u * math.log(c) - math.sin(2 * u * math.log(c)) / 2
        recs.append(_record("verify-calculus", "calculus-sin2", u, measured,
                            closed, cfg.tol("calculus-sin2", 1e-10)))
        recs.append(_record("verify-calculus", "calculus-sin2-band", u,
                            measured, PI / 2,
                            cfg.tol("calculus-sin2-band", 2 * u)))

        a = 2.0 / u
        prof = np.exp(a * (tau + PI)) * np.sin(tau) ** 2
        antider = lambda s: (math.exp(a * (s + PI)) * (1.0 / (2 * a)
                             - (a * math.cos(2 * s) + 2 * math.sin(2 * s))
                             / (2 * (a * a + 4))))
        closed = antider(col.tau_max) - antider(col.tau_min)
        recs.append(_record("verify-calculus", "calculus-exp", u,
                            grid.integrate(prof), closed,
                            cfg.tol("calculus-exp", 1e-10)))

        area = volume_integral(constant_field(col, grid, 1.0))
        closed = 2 * PI * u / math.tan(u * math.log(1.0 / c))
        recs.append(_record("verify-calculus", "calculus-area", u, area,
                            closed, cfg.tol("calculus-area", 1e-10)))
    return recs


def _wp_diag(u: float, c: float, n_tau: int) -> tuple:
    col = collar_from_u(u, c)
    system = CollarSystem([col], [make_grid(col, n_tau)])
    bspec, qspec = diagonal_family(system)
    h = wp_metric(bspec, system).values[0, 0].real
    hc = wp_cometric(qspec, system).values[0, 0].real
    return h, hc


def _suite_wp_asymptotics(cfg: RunConfig) -> list:
    recs = []
    for u in cfg.sweep_values():
        h, hc = _wp_diag(u, cfg.c, cfg.n_tau)
        recs.append(_record("wp-asymptotics", "wp-metric-diag", u,
                            h * 2.0 / u**3, 1.0,
                            cfg.tol("wp-metric-diag", 3 * u)))
        recs.append(_record("wp-asymptotics", "wp-cometric-diag", u,
                            hc * u**3 / 2.0, 1.0,
                            cfg.tol("wp-cometric-diag", 3 * u)))
    _, hc = _wp_diag(0.1, cfg.c, cfg.n_tau)
    recs.append(_record("wp-asymptotics", "wp-cometric-spot", 0.1, hc,
                        2000.0, cfg.tol("wp-cometric-spot", 1e-3)))
    return recs


def _suite_ricci_asymptotics(cfg: RunConfig) -> list:
    recs = []
    rel_seq = []
    target = 3.0 / (4.0 * PI**2)
    us = cfg.sweep_values()
    for u in us:
        ws = CurvatureWorkspace.single_collar(u, c=cfg.c, n_tau=cfg.n_tau)
        val = ws.tau().values[0, 0].real / u**2
        rel_seq.append(abs(val - target) / target)
        tol = cfg.tol("ricci-diag", 0.15) if u == us[-1] else math.inf
        recs.append(_record("ricci-asymptotics", "ricci-diag", u, val, target,
                            tol))
    mono = all(b < a for a, b in zip(rel_seq, rel_seq[1:]))
    recs.append(_record("ricci-asymptotics", "ricci-converging", us[-1],
                        1.0 if mono else 0.0, 1.0, 0.0, mode="band"))
    return recs


def _random_compact_field(col, grid, rng, n_modes=3) -> CollarField:
    """Random smooth real field vanishing outside the middle 70%."""
    tau = grid.nodes
    a, b = tau[0], tau[-1]
    lo, hi = a + 0.15 * (b - a), b - 0.15 * (b - a)
    x = np.clip((tau - lo) / (hi - lo), 0.0, 1.0)
    window = np.where((x > 0) & (x < 1), np.sin(PI * x) ** 4, 0.0)
    modes = {}
    prof0 = window * (rng.standard_normal() * np.cos(
        rng.uniform(1, 4) * PI * x) + rng.standard_normal())
    modes[0] = prof0.astype(complex)
    for _ in range(n_modes - 1):
        n = int(rng.integers(1, 5))
        z = (rng.standard_normal() + 1j * rng.standard_normal()) / 2
        prof = window * np.cos(rng.uniform(1, 3) * PI * x + rng.uniform(0, PI))
        modes[n] = modes.get(n, 0) + z * prof
        modes[-n] = modes.get(-n, 0) + np.conj(z) * prof
    return CollarField(col, grid, modes)


def _suite_green_props(cfg: RunConfig) -> list:
    recs = []
    rng = np.random.default_rng(cfg.seed)
    u = 0.05
    col = collar_from_u(u, cfg.c)
    grid = make_grid(col, cfg.n_tau)
    scfg = SolverConfig()
    worst = {"lower": math.inf, "upper": math.inf, "resid": 0.0, "selfadj": 0.0}
    fields = [_random_compact_field(col, grid, rng) for _ in range(100)]
    solved = []
    for f in fields:
        g = solve_T(f, scfg)
        solved.append(g)
        norm_gg = pairing_l2(g, g).real
        cross = pairing_l2(g, f).real
        norm_ff = pairing_l2(f, f).real
        worst["lower"] = min(worst["lower"], cross - norm_gg)
        worst["upper"] = min(worst["upper"], norm_ff - cross)
        worst["resid"] = max(worst["resid"], g.residual_sup / f.sup_norm())
    for f, g, f2, g2 in zip(fields[:50], solved[:50], fields[50:], solved[50:]):
        lhs = pairing_l2(g, f2)
        rhs = pairing_l2(f, g2)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        worst["selfadj"] = max(worst["selfadj"], abs(lhs - rhs) / scale)
    # the two spectral margins must be nonnegative up to slack
    recs.append(_record("green-props", "spectral-lower", u, worst["lower"],
                        -cfg.tol("spectral-lower", 1e-10), 0.0, mode="floor"))
    recs.append(_record("green-props", "spectral-upper", u, worst["upper"],
                        -cfg.tol("spectral-upper", 1e-10), 0.0, mode="floor"))
    recs.append(_record("green-props", "residual", u, worst["resid"], 0.0,
                        cfg.tol("residual", 1e-6), mode="abs"))
    recs.append(_record("green-props", "self-adjoint", u, worst["selfadj"],
                        0.0, cfg.tol("self-adjoint", 1e-8), mode="abs"))

    # positivity and sup contraction on a nonnegative full-collar input;
    # the support precondition is deliberately waived here
    pos = CollarField(col, grid, {0: (np.sin(grid.nodes) ** 4).astype(complex)})
    gp = solve_T(pos, SolverConfig(warn_support=False))
    recs.append(_record("green-props", "positivity", u,
                        float(gp.modes[0].real.min()), -1e-12, 0.0,
                        mode="floor"))
    recs.append(_record("green-props", "sup-contraction", u,
                        pos.sup_norm() - gp.sup_norm(), 0.0, 0.0,
                        mode="floor"))

    # report-only stability monitors across the sweep
    for u_s in cfg.sweep_values():
        col_s = collar_from_u(u_s, cfg.c)
        grid_s = make_grid(col_s, cfg.n_tau)
        ap = asym.build_approximants(col_s, grid_s, -u_s / PI)
        g = solve_T(ap.ftilde, SolverConfig(warn_support=False))
        num = math.sqrt(abs(pairing_l2(maass(g, 0, "K"), maass(g, 0, "K"))))
        den = math.sqrt(abs(pairing_l2(maass(ap.ftilde, 0, "K"),
                                       maass(ap.ftilde, 0, "K"))))
        recs.append(_record("green-props", "mode-energy-ratio", u_s,
                            num / den, 0.0, math.inf, mode="abs",
                            report_only=True))
        recs.append(_record("green-props", "schauder-ratio", u_s,
                            ck_norm(g, 2) / ck_norm(ap.ftilde, 1), 0.0,
                            math.inf, mode="abs", report_only=True))
    recs.append(_record("green-props", "bc-sensitivity", 0.05,
                        asym.bc_sensitivity_check(0.05, cfg.n_tau), 0.0,
                        cfg.tol("bc-sensitivity", 0.05), mode="abs"))
    return recs


def _suite_approximants(cfg: RunConfig) -> list:
    recs = []
    us = cfg.sweep_values()
    errs = {"err_e": [], "err_xi": [], "err_T": []}
    pairs = {"ef": [], "k0": [], "xi_e": []}
    eta2 = []
    for u in us:
        d = asym.approximant_errors(u, c=cfg.c, n_tau=cfg.n_tau)
        for k in errs:
            errs[k].append((u, d[k]))
        for k in pairs:
            pairs[k].append((u, d[k]))
        col = collar_from_u(u, cfg.c)
        grid = make_grid(col, cfg.n_tau)
        spec = asym.CutoffSpec()
        d2 = asym.cutoff_eval(spec, grid.nodes / u, "eta", 2)
        eta2.append(grid.integrate(np.abs(d2)) / u)
    floors = {"err_e": 3.7, "err_xi": 4.7, "err_T": 4.7}
    names = {"err_e": "err-e", "err_xi": "err-xi", "err_T": "err-T"}
    for k, samples in errs.items():
        fit = asym.fit_power_law(samples)
        recs.append(_record("approximants", f"{names[k]}-exponent", us[-1],
                            fit.exponent, floors[k],
                            cfg.tol(f"{names[k]}-exponent", 0.0), mode="floor"))
    for k, tid in (("ef", "ef-pairing"), ("k0", "k0-pairing"),
                   ("xi_e", "xi-pairing")):
        t = asym.target(tid)
        u = us[-1]
        recs.append(_record("approximants", tid, u, dict(pairs[k])[u],
                            t.constant * u**t.exponent, cfg.tol(tid, 0.15)))
    spread = (max(eta2) - min(eta2)) / (sum(eta2) / len(eta2))
    recs.append(_record("approximants", "eta2-mass-constant", us[-1], spread,
                        0.0, cfg.tol("eta2-mass-constant", 0.01), mode="abs"))
    return recs


def _suite_holo_curvature(cfg: RunConfig) -> list:
    recs = []
    us = cfg.sweep_values()
    for u in us:
        ws = CurvatureWorkspace.single_collar(u, c=cfg.c, n_tau=cfg.n_tau)
        rep = ws.g1_terms()
        strict = u == us[-1]
        tol = cfg.tol("g1-terms", 0.15) if strict else math.inf
        for k in rep.terms:
            recs.append(_record("holo-curvature", k, u, rep.terms[k],
                                rep.targets[k], tol))
        recs.append(_record("holo-curvature", "g1-sum", u, rep.total,
                            rep.total_target, tol))
        p2 = ws.P2((0, 0, 0), (0, 0, 0))
        recs.append(_record("holo-curvature", "t-pairing", u, p2 / u**7,
                            3.0 / (256.0 * PI**4),
                            cfg.tol("t-pairing", 0.15) if strict else math.inf))
    return recs


def _suite_perturbed(cfg: RunConfig) -> list:
    recs = []
    us = cfg.sweep_values()
    for u in us:
        ws = CurvatureWorkspace.single_collar(u, c=cfg.c, n_tau=cfg.n_tau)
        strict = u == us[-1]
        for C in cfg.perturbation_C:
            val = ws.perturbed_curvature(0, 0, 0, 0, C)
            pred = asym.perturbed_prediction(u, C)
            tol = cfg.tol("perturbed-diag", 0.15) if strict else math.inf
            recs.append(_record("perturbed", f"perturbed-diag-C{C:g}", u, val,
                                pred, tol))
            recs.append(_record("perturbed", f"perturbed-positive-C{C:g}", u,
                                1.0 if val.real > 0 else 0.0, 1.0, 0.0,
                                mode="band"))
            t_up = ws.tau_upper()[0, 0].real
            tt_up = upper_index(ws.perturbed_metric(C).values)[0, 0].real
            ok = 0.0 < tt_up < t_up
            recs.append(_record("perturbed", f"inverse-dominance-C{C:g}", u,
                                1.0 if ok else 0.0, 1.0, 0.0, mode="band"))
    # determinant structure on a two-collar model with a nondegenerate block
    A = np.array([[2.0, 0.3], [0.3, 1.5]], dtype=complex)
    B = np.array([[1.0, 0.1], [0.1, 1.2]], dtype=complex)
    C = cfg.perturbation_C[0]
    for u in us:
        ws = CurvatureWorkspace.from_u_values([u, u], c=cfg.c,
                                              n_tau=cfg.n_tau)
        tt = ws.perturbed_metric(C).values
        full = np.block([[tt, np.zeros((2, 2))], [np.zeros((2, 2)), A + C * B]])
        pred = (np.prod([u**2 * (3.0 / (4 * PI**2) + C * u / 2)
                         for _ in range(2)])
                * np.linalg.det(A + C * B))
        ratio = np.linalg.det(full).real / pred.real
        tol = cfg.tol("det-structure", 0.15) if u == us[-1] else math.inf
        recs.append(_record("perturbed", "det-structure", u, ratio, 1.0, tol))
    return recs


def _suite_lengths(cfg: RunConfig) -> list:
    recs = []
    for rec in asym.length_derivative_check(cfg.sweep_values()):
        recs.append(_record("lengths", "length-derivative", rec["u"],
                            rec["fd"], rec["predicted"],
                            cfg.tol("length-derivative", 3 * rec["u"])))
    u_spot = PI / 10.0  # t = e^(-10)
    fd = asym.length_derivative_fd(math.exp(-10.0))
    recs.append(_record("lengths", "length-spot", u_spot, fd, 2174.0,
                        cfg.tol("length-spot", 0.01)))
    return recs


def _suite_equivalence(cfg: RunConfig) -> list:
    recs = []
    vals = {}
    bands = {"poincare": (1.0, 10.0, 3.0), "mcmullen": (0.1, 1.0, 1.0 / 3.0)}
    for u in (0.05, 0.025):
        r = asym.equivalence_ratios(u, c=cfg.c, n_tau=cfg.n_tau)
        vals[u] = r
        for key, (lo, hi, limit) in bands.items():
            rec = _record("equivalence", f"{key}-band", u, r[key], limit,
                          math.inf)
            rec.passed = lo <= r[key] <= hi
            recs.append(rec)
    for key in ("poincare", "mcmullen"):
        a, b = vals[0.05][key], vals[0.025][key]
        var = abs(a - b) / max(abs(a), abs(b))
        recs.append(_record("equivalence", f"{key}-variation", 0.025, var,
                            0.0, cfg.tol(f"{key}-variation", 0.10), mode="abs"))
    return recs


def _suite_g2_bounds(cfg: RunConfig) -> list:
    recs = []
    us = tuple(cfg.sweep_values())
    out = asym.g2_spotcheck(u_values=us, kappa=cfg.kappa, c=cfg.c,
                            n_tau=cfg.n_tau)
    for case, rec in sorted(out.items()):
        fit = rec["fit"]
        if fit is None:
            r = _record("g2-bounds", f"{case}-exponent", us[-1], math.nan,
                        4.7, 0.0, mode="floor")
            r.passed = False
            recs.append(r)
        else:
            recs.append(_record("g2-bounds", f"{case}-exponent", us[-1],
                                fit.exponent, 4.7,
                                cfg.tol(f"{case}-exponent", 0.0), mode="floor"))
    resid = asym.zero_coupling_residual(0.05, c=cfg.c, n_tau=cfg.n_tau)
    recs.append(_record("g2-bounds", "zero-coupling", 0.05, resid, 0.0,
                        cfg.tol("zero-coupling", 1e-14), mode="abs"))
    return recs


_SUITE_FUNCS = {
    "verify-calculus": _suite_verify_calculus,
    "wp-asymptotics": _suite_wp_asymptotics,
    "ricci-asymptotics": _suite_ricci_asymptotics,
    "green-props": _suite_green_props,
    "approximants": _suite_approximants,
    "holo-curvature": _suite_holo_curvature,
    "perturbed": _suite_perturbed,
    "lengths": _suite_lengths,
    "equivalence": _suite_equivalence,
    "g2-bounds": _suite_g2_bounds,
}


def run_suite(cfg: RunConfig, suite: str) -> SuiteReport:
    if suite not in _SUITE_FUNCS:
        raise ConfigError(f"unknown suite {suite!r}")
    t0 = time.perf_counter()
    records = _SUITE_FUNCS[suite](cfg)
    return SuiteReport(suite, records, time.perf_counter() - t0)


def _run_suite_packed(args) -> SuiteReport:
    raw, suite = args
    return run_suite(RunConfig.from_dict(raw), suite)


def run_all(cfg: RunConfig, raw_cfg: dict | None = None) -> list:
    workers = int(os.environ.get("COLLARLAB_WORKERS", "1"))
    suites = list(cfg.suites)
    if workers > 1 and raw_cfg is not None and len(suites) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            reports = list(ex.map(_run_suite_packed,
                                  [(raw_cfg, s) for s in suites]))
        return reports
    return [run_suite(cfg, s) for s in suites]


# -- report emission ---------------------------------------------------------

CSV_COLUMNS = ("suite", "check_id", "u", "t_abs", "measured_re", "measured_im",
               "target_re", "target_im", "rel_err", "pass")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _row_dict(r: CheckRecord) -> dict:
    return {
        "suite": r.suite,
        "check_id": r.check_id,
        "u": _fmt(r.u),
        "t_abs": _fmt(r.t_abs),
        "measured_re": _fmt(r.measured.real),
        "measured_im": _fmt(r.measured.imag),
        "target_re": _fmt(r.target.real),
        "target_im": _fmt(r.target.imag),
        "rel_err": _fmt(r.rel_err),
        "pass": "true" if r.passed else "false",
    }


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit_report(reports: list, out_dir: str, formats) -> list:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    rows = [r for rep in reports for r in rep.records]

    if "csv" in formats:
        lines = [",".join(CSV_COLUMNS)]
        for r in rows:
            d = _row_dict(r)
            lines.append(",".join(d[c] for c in CSV_COLUMNS))
        path = os.path.join(out_dir, "report.csv")
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)

    if "json" in formats:
        payload = {
            "suites": [
                {
                    "suite": rep.suite,
                    "status": rep.status,
                    "records": [_row_dict(r) for r in rep.records],
                }
                for rep in reports
            ]
        }
        path = os.path.join(out_dir, "report.json")
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")
        written.append(path)

    if "markdown" in formats:
        lines = ["# collarlab report", ""]
        overall = all(rep.status == "pass" for rep in reports)
        lines.append(f"Overall: **{'pass' if overall else 'fail'}**")
        lines.append("")
        for rep in reports:
            lines.append(f"## {rep.suite} - {rep.status} "
                         f"({rep.wall_clock:.2f} s)")
            lines.append("")
            lines.append("| check | u | measured | target | rel_err | pass |")
            lines.append("|---|---|---|---|---|---|")
            for r in rep.records:
                m = (f"{r.measured.real:.6g}"
                     if r.measured.imag == 0 else f"{r.measured:.6g}")
                t = (f"{r.target.real:.6g}"
                     if r.target.imag == 0 else f"{r.target:.6g}")
                mark = "pass" if r.passed else ("info" if r.report_only
                                                else "FAIL")
                lines.append(f"| {r.check_id} | {r.u:.4g} | {m} | {t} | "
                             f"{r.rel_err:.3g} | {mark} |")
            lines.append("")
        path = os.path.join(out_dir, "report.md")
        _atomic_write(path, "\n".join(lines))
        written.append(path)

    if "svg-lines" in formats:
        by_check = {}
        for r in rows:
            by_check.setdefault(r.check_id, []).append(r)
        for check_id, group in sorted(by_check.items()):
            pts = sorted((math.log10(r.u),
                          math.log10(max(r.rel_err, 1e-16))) for r in group)
            path = os.path.join(out_dir, f"{check_id}.svg")
            _atomic_write(path, _svg_line(check_id, pts))
            written.append(path)
    return written


def _svg_line(title: str, pts: list) -> str:
    w, h, pad = 480, 320, 40
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5
    sx = lambda x: pad + (x - x0) / (x1 - x0) * (w - 2 * pad)
    sy = lambda y: h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)
    path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
    dots = "".join(
        f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="#1f77b4"/>'
        for x, y in pts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">'
        f'<rect width="{w}" height="{h}" fill="white"/>'
        f'<text x="{w // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>'
        f'<text x="{w // 2}" y="{h - 8}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">log10 u</text>'
        f'<text x="12" y="{h // 2}" text-anchor="middle" '
        f'font-family="monospace" font-size="11" '
        f'transform="rotate(-90 12 {h // 2})">log10 rel_err</text>'
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" '
        f'points="{path}"/>{dots}</svg>\n'
    )


# -- entry point --------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="collarlab",
        description="Collar-model numerical verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run check suites from a config")
    runp.add_argument("--config", help="path to a JSON run config")
    runp.add_argument("--suite", action="append", default=None,
                      help="suite id (repeatable); overrides config")
    runp.add_argument("--out", default=None, help="output directory override")
    runp.add_argument("--format", default=None,
                      help="comma-separated formats override")
    runp.add_argument("--seed", type=int, default=None, help="seed override")
    args = parser.parse_args(argv)

    try:
        raw = {}
        if args.config:
            with open(args.config) as fh:
                raw = json.load(fh)
            if not isinstance(raw, dict):
                raise ConfigError("config root must be a JSON object")
        if args.suite:
            raw["suites"] = args.suite
        if args.out:
            raw.setdefault("output", {})["directory"] = args.out
        if args.format:
            raw.setdefault("output", {})["formats"] = args.format.split(",")
        if args.seed is not None:
            raw["seed"] = args.seed
        cfg = RunConfig.from_dict(raw)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        reports = run_all(cfg, raw_cfg=raw)
    except (CollarError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        emit_report(reports, cfg.out_dir, cfg.formats)
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    failing = [r.check_id for rep in reports for r in rep.records
               if not r.passed and not r.report_only]
    for rep in reports:
        print(f"{rep.suite}: {rep.status} ({rep.wall_clock:.2f} s)")
    if failing:
        print("failing checks: " + ", ".join(sorted(set(failing))),
              file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
