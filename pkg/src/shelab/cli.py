"""Command line: ``shelab {simulate,verify,dual,rates}``.

Exit codes: 0 ok, 1 a verification verdict failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys

import numpy as np

from . import __version__
from .analytic import cov_exact_half_closed, lower_tail_rate, mgf_rate
from .config import KNOWN_TESTS, RunConfig, load, manifest
from .dual import DualConfig, duality_log_mgf, solve_dual
from .ensemble import checks
from .ensemble.report import EnsembleReport
from .ensemble.runner import default_workers, run_ensemble
from .errors import ConfigError, SheLabError
from .lattice import SeedScheme
from .plots import svg_chart
from .solver import simulate, write_snapshots_csv

FIELD_TESTS = {"covariance", "association", "ergodicity", "extremes", "mean_one"}


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_manifest(cfg: RunConfig, args, command, seed):
    m = manifest(cfg, seed=seed, command=command, out=os.path.abspath(args.out), version=__version__)
    _write(os.path.join(args.out, "manifest.ini"), m.dumps())


def _load(args) -> RunConfig:
    if args.config is None:
        return RunConfig(raw={}, source="<defaults>")
    return load(args.config)


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    cfg = _load(args)
    sim = cfg.sim_config()
    seed = cfg.seed(args.seed)
    path = cfg.get("simulation", "path")
    traj = simulate(sim, SeedScheme(seed, path))
    os.makedirs(args.out, exist_ok=True)
    for k, snap in zip(sim.record_steps, traj.snapshots):
        with open(os.path.join(args.out, f"u_step{k:07d}.csv"), "w", newline="") as fh:
            write_snapshots_csv(fh, [snap], sim.grid)
    _write_manifest(cfg, args, "simulate", seed)
    for t, s in zip(traj.times, traj.integrals):
        print(f"t={t:.6g} S_N,t={s:.10g}")
    return 0


# ---------------------------------------------------------------- verify

def _t(cfg, key, default):
    v = cfg.get("tests", key)
    return default if v is None else v


def run_verification(cfg: RunConfig, seed=None, workers=None, oracle_scale=1.0, store=None):
    """Run the ensemble of ``cfg`` and every enabled check; returns (report, store).

    A precomputed ``store`` for the same configuration skips the simulation.
    """
    ens = cfg.ensemble_config(seed)
    T = ens.sim.T
    report = EnsembleReport(meta=dict(paths=ens.paths, dx=ens.sim.grid.dx, dt=ens.sim.grid.dt,
                                      L=ens.sim.grid.length, gamma=ens.sim.coeff.gamma, seed=ens.seed))
    if not ens.tests:
        return report, None
    need_fields = FIELD_TESTS & ens.tests
    if need_fields and not ens.keep_fields:
        raise ConfigError(f"tests {sorted(need_fields)} need keep_fields = true",
                          where=f"{cfg.source}: [ensemble] keep_fields")
    if store is None:
        store = run_ensemble(ens, workers=workers)
    order = [t for t in KNOWN_TESTS if t in ens.tests]
    for name in order:
        if name == "clt":
            times = cfg.get("tests", "clt_times") or (T,)
            report.extend(checks.test_clt(store, times, level=cfg.get("tests", "clt_level"),
                                          rel_tol=cfg.get("tests", "clt_rel_tol"), oracle_scale=oracle_scale))
        elif name == "covariance":
            report.extend(checks.test_covariance(store, _t(cfg, "covariance_t", T),
                                                 cfg.get("tests", "covariance_offsets"),
                                                 rel_tol=cfg.get("tests", "covariance_rel_tol")))
        elif name == "association":
            report.extend(checks.test_association(store, _t(cfg, "association_t", T),
                                                  cfg.get("tests", "association_offsets"),
                                                  quantiles=cfg.get("tests", "association_quantiles")))
        elif name == "ergodicity":
            report.extend(checks.test_ergodicity(store, _t(cfg, "ergodicity_t", T),
                                                 N_list=cfg.get("tests", "ergodicity_N")))
        elif name == "extremes":
            report.extend(checks.test_extremes(store, _t(cfg, "extremes_t", T), cfg.get("tests", "extremes_N")))
        elif name == "mgf":
            lam = cfg.get("tests", "mgf_lambda")
            t = _t(cfg, "mgf_t", T)
            Ns = cfg.get("tests", "mgf_N") or (ens.sim.N,)
            for N in Ns:
                oracle = None
                if oracle_scale != 1.0:
                    oracle = oracle_scale * duality_log_mgf(DualConfig(lam=lam, N=N, t=t)) / N
                report.extend(checks.estimate_log_mgf(store, lam, t, N, oracle=oracle,
                                                      rel_tol=cfg.get("tests", "mgf_rel_tol")))
            if len(Ns) > 1:
                report.extend(checks.test_mgf_trend(store, lam, t, Ns))
        elif name == "lower_tail":
            report.extend(checks.test_lower_tail(store, cfg.get("tests", "lower_tail_a"),
                                                 _t(cfg, "lower_tail_t", T),
                                                 _t(cfg, "lower_tail_N", ens.sim.N),
                                                 slack=cfg.get("tests", "lower_tail_slack")))
        elif name == "mean_one":
            report.extend(checks.test_mean_one(store, _t(cfg, "mean_t", T), cfg.get("tests", "mean_x")))
        elif name == "variance_growth":
            report.extend(checks.test_variance_growth(store, T))
    return report, store


def write_plots(report: EnsembleReport, store, cfg: RunConfig, out: str):
    written = []
    cov = report.by_test("covariance") + report.by_test("covariance_bound")
    if cov:
        t = cov[0].params["t"]
        pts = sorted({(e.params["x"], e.estimate) for e in cov})
        xs = np.linspace(0, max(p[0] for p in pts) or 1.0, 200)
        svg = svg_chart([dict(x=xs, y=cov_exact_half_closed(t, xs), kind="line", label="exact"),
                         dict(x=[p[0] for p in pts], y=[p[1] for p in pts], kind="points", label="ensemble")],
                        title=f"Cov(u(t,x), u(t,0)), t={t:g}", xlabel="x", ylabel="covariance")
        written.append(("covariance.svg", svg))
    clt = report.by_test("clt_variance")
    if clt and store is not None:
        t = max(e.params["t"] for e in clt)
        if t > 0:
            N = store.config.sim.N
            y = (store.S(t) - N) / math.sqrt(N)
            counts, edges = np.histogram(y, bins=40, density=True)
            mid = 0.5 * (edges[1:] + edges[:-1])
            xs = np.linspace(edges[0], edges[-1], 200)
            dens = np.exp(-xs**2 / (2 * t)) / math.sqrt(2 * math.pi * t)
            svg = svg_chart([dict(x=mid, y=counts, kind="bars", width=edges[1] - edges[0], label="ensemble"),
                             dict(x=xs, y=dens, kind="line", label=f"N(0, {t:g})")],
                            title=f"(S - N)/sqrt(N), N={N:g}, t={t:g}", xlabel="value", ylabel="density")
            written.append(("clt_histogram.svg", svg))
    ext = report.by_test("extremes_slope")
    if ext and store is not None:
        t = ext[0].params["t"]
        Ns = sorted(cfg.get("tests", "extremes_N"))
        M = checks.window_maxima(store, t, Ns).mean(axis=0)
        svg = svg_chart([dict(x=np.log(Ns), y=M, kind="points", label="mean max")],
                        title=f"max over [0,N] of u(t,.), t={t:g}", xlabel="log N", ylabel="max")
        written.append(("extremes.svg", svg))
    mg = report.by_test("mgf")
    if mg:
        Ns = [e.params["N"] for e in mg]
        lam, t = mg[0].params["lam"], mg[0].params["t"]
        series = [dict(x=Ns, y=[e.estimate for e in mg], kind="points", label="ensemble")]
        if not math.isnan(mg[0].oracle):
            series.append(dict(x=Ns, y=[e.oracle for e in mg], kind="line", label="dual PDE"))
        series.append(dict(x=[min(Ns), max(Ns)], y=[mgf_rate(lam, t)] * 2, kind="line", label="N -> inf"))
        written.append(("mgf_trend.svg",
                        svg_chart(series, title=f"(1/N) log E exp(-{lam:g} S), t={t:g}", xlabel="N",
                                  ylabel="log MGF / N")))
    for name, svg in written:
        _write(os.path.join(out, name), svg)
    return [n for n, _ in written]


def cmd_verify(args) -> int:
    cfg = _load(args)
    seed = cfg.seed(args.seed)
    scale = 2.0 if args.debug_misset_oracle else 1.0
    report, store = run_verification(cfg, seed=seed, workers=args.workers, oracle_scale=scale)
    os.makedirs(args.out, exist_ok=True)
    _write(os.path.join(args.out, "report.csv"), report.to_csv())
    summary = report.summary()
    _write(os.path.join(args.out, "summary.txt"), summary)
    write_plots(report, store, cfg, args.out)
    _write_manifest(cfg, args, "verify", seed)
    sys.stdout.write(summary)
    if report.inconclusive:
        print(f"warning: {len(report.inconclusive)} inconclusive entries", file=sys.stderr)
    return 1 if report.failed else 0


# ---------------------------------------------------------------- dual / rates

def cmd_dual(args) -> int:
    cfg = _load(args)
    dc = cfg.dual_config()
    sol = solve_dual(dc)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "dual_v.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "v"])
        for x, v in zip(sol.x, sol.v.values):
            w.writerow([repr(float(x)), repr(float(v))])
    _write_manifest(cfg, args, "dual", cfg.seed(args.seed))
    rate = mgf_rate(dc.lam, dc.t) if dc.t > 0 else -dc.lam
    print(f"lambda={dc.lam:g} N={dc.N:g} t={dc.t:g}")
    print(f"mass={sol.mass:.10g}")
    print(f"mass/N={sol.mass / dc.N:.10g}")
    print(f"log_mgf/N={-sol.mass / dc.N:.10g}")
    print(f"mgf_rate={rate:.10g}")
    return 0


def cmd_rates(args) -> int:
    cfg = _load(args)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["quantity", "param", "t", "value"])
    for t in cfg.get("rates", "times"):
        for lam in cfg.get("rates", "lambdas"):
            w.writerow(["mgf_rate", repr(lam), repr(t), repr(mgf_rate(lam, t))])
        for a in cfg.get("rates", "a"):
            w.writerow(["lower_tail_rate", repr(a), repr(t), repr(lower_tail_rate(a, t))])
    return 0


COMMANDS = {"simulate": cmd_simulate, "verify": cmd_verify, "dual": cmd_dual, "rates": cmd_rates}


def _u64(s):
    v = int(s, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shelab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--seed", type=_u64, metavar="U64")
        sp.add_argument("--workers", type=int, default=default_workers(), metavar="K")
        sp.add_argument("--out", default="shelab-out", metavar="DIR")
        if name == "verify":
            sp.add_argument("--debug-misset-oracle", action="store_true",
                            help="negative control: double the CLT and MGF oracles")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SheLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
