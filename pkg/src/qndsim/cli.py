"""Command-line interface: one subcommand per figure-reproducing workflow.

    qndsim <subcommand> --config cfg.json [--out DIR] [--seed N] [--threads N]

Subcommands: metrics, heat, fourier, asym, measure, optimize, plan, sweep.
Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 convergence failure.  Artifact filenames are fixed per subcommand; each
artifact embeds the run-manifest hash.  Re-running with the same config and
seed reproduces identical artifacts regardless of the thread-count hint.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .constants import TWO_PI
from .dynamics import (
    DivergenceError,
    FourierTruncation,
    fourier_heating_solve,
    unbalanced_simulate,
)
from .dynamics.fourier import SingularSystemError
from .io import jsonable, manifest_hash, write_csv, write_json
from .measure import (
    MeasurementConfig,
    ks_distance,
    mc_sample_outcomes,
    outcome_cdf,
    single_jump_pdf,
    visibility_from_histogram,
    visibility_from_model,
)
from .metrics import (
    DriveSpec,
    TrajectoryScenario,
    merit_report,
    phonon_trajectory_analytic,
)
from .params import (
    ConfigurationError,
    Couplings,
    apply_stray_capacitance,
    derive_rates,
    residual_coupling,
)
from .plan import (
    FitFailureError,
    InfeasiblePlanError,
    optimize_delta_nb,
    plan_experiment,
    strong_coupling_boundary,
    sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CONVERGENCE = 4


class ConvergenceFailure(RuntimeError):
    pass


def _require(section, name: str):
    if section is None:
        raise ConfigError(name, f"subcommand requires a '{name}' section")
    return section


def _pool(threads: int | None):
    n = threads or int(os.environ.get("QNDSIM_THREADS", "0")) or 1
    return ThreadPoolExecutor(max_workers=n)


def cmd_metrics(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    report = merit_report(cfg.circuit, cfg.couplings, cfg.membrane, cfg.drive)
    rates = derive_rates(cfg.circuit)
    payload = jsonable(report)
    payload["omega_s_hz"] = rates.omega_s / TWO_PI
    payload["gamma_t_hz"] = rates.gamma_t / TWO_PI
    write_json(out / "merit_report.json", payload, manifest)
    columns = sorted(payload)
    write_csv(out / "metrics.csv", columns, [payload], manifest)
    lam_p = report.lambda_prime if report.lambda_prime is not None else float("nan")
    print(f"lambda = {report.lambda_total:g}")
    print(f"lambda_b = {report.lambda_b if report.lambda_b is not None else 'n/a'}")
    print(f"lambda_p = {report.lambda_p if report.lambda_p is not None else 'n/a'}")
    print(f"lambda_prime = {lam_p:g}")
    return [out / "merit_report.json", out / "metrics.csv"]


def cmd_heat(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    """Covariance-oracle heating curves against the analytic forms."""
    from .dynamics import build_rlc_linear_model, covariance_evolve

    section = _require(cfg.heat, "heat")
    drive = _require(cfg.drive, "drive")
    gb = cfg.membrane.damping_rate()
    t_end = section.t_end or 4.0 / gb
    t = np.linspace(0.0, t_end, 321)
    rows = []
    for g1_hz in section.g1_grid_hz:
        c = dataclasses.replace(cfg.couplings, g1=TWO_PI * g1_hz)
        model = build_rlc_linear_model(cfg.circuit, c, drive, cfg.membrane)
        sol = covariance_evolve(model, t)
        ana = phonon_trajectory_analytic(
            t, TrajectoryScenario.RLC_APPROX, drive, cfg.circuit, c, cfg.membrane
        )
        for tk, nb, na in zip(t, sol.n_b, ana):
            rows.append({"g1_hz": g1_hz, "t_s": tk, "nb_sim": nb, "nb_analytic": na})
    write_csv(out / "heating_curves.csv",
              ["g1_hz", "t_s", "nb_sim", "nb_analytic"], rows, manifest)
    return [out / "heating_curves.csv"]


def cmd_fourier(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    section = _require(cfg.fourier, "fourier")
    drive = _require(cfg.drive, "drive")
    from .metrics import induced_heating_double_limit

    rates = derive_rates(cfg.circuit)
    gb = cfg.membrane.damping_rate()
    n_e = cfg.circuit.electrical_occupation(rates.omega_s)
    rows = []
    worst = 0.0
    for g1_hz in section.g1_grid_hz:
        c = dataclasses.replace(cfg.couplings, g1=TWO_PI * g1_hz)
        sol = fourier_heating_solve(cfg.circuit, c, drive, cfg.membrane,
                                    cfg.truncation, compute_residual=True)
        heat = induced_heating_double_limit(drive, cfg.circuit, c, cfg.membrane)
        gamma_eff = gb + heat.Gamma_b
        nb_inf_ana = (
            gb * cfg.membrane.occupation()
            + heat.Gamma_b * (rates.omega_s / cfg.membrane.omega_m) * (n_e + 0.5)
        ) / gamma_eff
        thalf_ana = math.log(2.0) / gamma_eff
        rel = abs(sol.T_half - thalf_ana) / thalf_ana
        worst = max(worst, rel)
        rows.append({
            "g1": g1_hz,
            "T_half_sim": sol.T_half,
            "T_half_analytic": thalf_ana,
            "rel_err": rel,
            "nb_inf_sim": sol.n_b_steady,
            "nb_inf_analytic": nb_inf_ana,
            "rel_err_nb_inf": abs(sol.n_b_steady - nb_inf_ana) / nb_inf_ana,
            "residual": sol.residual,
        })
        if sol.warnings:
            raise ConvergenceFailure("; ".join(sol.warnings))
    write_csv(out / "T_half.csv",
              ["g1", "T_half_sim", "T_half_analytic", "rel_err",
               "nb_inf_sim", "nb_inf_analytic", "rel_err_nb_inf", "residual"],
              rows, manifest)
    return [out / "T_half.csv"]


def cmd_asym(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    section = _require(cfg.asym, "asym")
    drive = _require(cfg.drive, "drive")
    from .metrics import induced_heating_double_limit, residual_heating

    rows = []
    base_circuit = cfg.circuit
    for (fr, fl, fc) in section.triples:
        circ = dataclasses.replace(
            base_circuit,
            delta_R=fr * base_circuit.parasitic_R,
            delta_L=fl * base_circuit.parasitic_L,
            delta_C=fc * base_circuit.C0,
        )
        rates = derive_rates(circ)
        for frac in section.delta_g1_fracs:
            dg = frac * cfg.couplings.g1
            g_r = residual_coupling(cfg.couplings.g1, dg, circ.delta_C, circ.C0)
            c = dataclasses.replace(cfg.couplings, g_r=g_r, delta_g1=dg)
            sol = unbalanced_simulate(circ, c, drive, cfg.membrane, cfg.truncation)
            heat = induced_heating_double_limit(drive, circ, c, cfg.membrane)
            n_e = circ.electrical_occupation(rates.omega_s)
            h_ana = (
                cfg.membrane.damping_rate() * cfg.membrane.occupation()
                + (heat.Gamma_b * rates.omega_s / (2.0 * cfg.membrane.omega_m)
                   + residual_heating(drive, circ, c, cfg.membrane))
                * (1.0 + 2.0 * n_e)
            )
            rows.append({
                "delta_R_frac": fr, "delta_L_frac": fl, "delta_C_frac": fc,
                "delta_g1_over_g1": frac, "g_r_over_g1": g_r / cfg.couplings.g1,
                "h_sim": sol.heating_rate, "h_analytic": h_ana,
                "rel_err": abs(sol.heating_rate - h_ana) / h_ana,
            })
    write_csv(out / "heating_rates.csv",
              ["delta_R_frac", "delta_L_frac", "delta_C_frac",
               "delta_g1_over_g1", "g_r_over_g1", "h_sim", "h_analytic",
               "rel_err"],
              rows, manifest)
    return [out / "heating_rates.csv"]


def cmd_measure(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    section = _require(cfg.measurement, "measurement")
    if section.lambda_prime is None or section.delta_nb is None:
        raise ConfigError("measurement", "needs lambda_prime and delta_nb")
    mc_cfg = MeasurementConfig(
        lambda_prime=section.lambda_prime,
        n_bar_m=section.n_eff if section.n_eff is not None else 0.0,
        delta_nb=section.delta_nb,
        n_windows=section.n_windows,
        segments_per_window=section.segments,
        hilbert_cutoff=section.hilbert_cutoff,
        rng_seed=cfg.seed,
    )
    hist = mc_sample_outcomes(mc_cfg)
    rows = []
    dens = hist.density
    err = hist.poisson_err
    for k in range(len(hist.counts)):
        rows.append({
            "bin_left": hist.bin_edges[k],
            "bin_right": hist.bin_edges[k + 1],
            "count": int(hist.counts[k]),
            "density": dens[k],
            "poisson_err": err[k],
        })
    write_csv(out / "histogram.csv",
              ["bin_left", "bin_right", "count", "density", "poisson_err"],
              rows, manifest)
    vs = np.linspace(hist.bin_edges[0], hist.bin_edges[-1], 2001)
    pdf_rows = [{"v_over_sigma": v, "density": d}
                for v, d in zip(vs, single_jump_pdf(vs, mc_cfg))]
    write_csv(out / "pdf.csv", ["v_over_sigma", "density"], pdf_rows, manifest)
    vis = visibility_from_histogram(hist, mc_cfg, strict=False)
    model_vis = visibility_from_model(mc_cfg, strict=False)
    ks = ks_distance(hist.samples, lambda v: outcome_cdf(v, mc_cfg))
    write_json(out / "measure_summary.json", {
        "xi_mc": vis.xi, "xi_mc_err": vis.xi_uncertainty,
        "xi_model": model_vis.xi, "ks_distance": ks,
        "cutoff_exceeded": hist.cutoff_exceeded,
        "windows": mc_cfg.n_windows,
    }, manifest)
    return [out / "histogram.csv", out / "pdf.csv", out / "measure_summary.json"]


def cmd_optimize(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    section = _require(cfg.optimization, "optimization")
    rows = []
    diag = {}
    for lam in section.lambda_primes:
        r = optimize_delta_nb(lam, section.n_eff, method=section.method,
                              n_windows=section.n_windows, rng_seed=cfg.seed)
        rows.append({
            "lambda_prime": lam, "n_eff": section.n_eff,
            "delta_nb_opt": r.delta_nb_opt, "xi_max": r.xi_max,
            "method": r.method, "delta_nb_opt_err": r.delta_nb_opt_err,
        })
        diag[str(lam)] = jsonable(r)
    write_csv(out / "optimize.csv",
              ["lambda_prime", "n_eff", "delta_nb_opt", "xi_max", "method",
               "delta_nb_opt_err"], rows, manifest)
    write_json(out / "optimize.json", diag, manifest)
    return [out / "optimize.csv", out / "optimize.json"]


def cmd_plan(cfg: RunConfig, out: Path, manifest: str) -> list[Path]:
    section = _require(cfg.plan, "plan")
    plan = plan_experiment(
        cfg.circuit, cfg.couplings, cfg.membrane,
        delta_nb_target=section.delta_nb,
        N_e_target=section.N_e,
        T_target=section.T,
    )
    payload = jsonable(plan)
    write_json(out / "plan.json", payload, manifest)
    write_csv(out / "plan.csv", sorted(payload), [payload], manifest)
    print(f"alpha_sq = {plan.alpha_sq_total:g}, P_in = {plan.P_in:g} W, "
          f"T = {plan.T:g} s, intracavity = {plan.intracavity_photons:g}")
    return [out / "plan.json", out / "plan.csv"]


def cmd_sweep(cfg: RunConfig, out: Path, manifest: str,
              threads: int | None) -> list[Path]:
    section = _require(cfg.sweep, "sweep")
    artifacts = []
    if section.axis == "lambda_prime":
        opt = cfg.optimization
        n_eff = opt.n_eff if opt else 1.0
        rows = []
        for lam in section.grid:
            ana = optimize_delta_nb(lam, n_eff)
            mc_cfg = MeasurementConfig(
                lambda_prime=lam, n_bar_m=n_eff, delta_nb=ana.delta_nb_opt,
                n_windows=(cfg.measurement.n_windows if cfg.measurement
                           else 40_000),
                rng_seed=cfg.seed,
            )
            vis = visibility_from_histogram(
                mc_sample_outcomes(mc_cfg), mc_cfg, strict=False
            )
            rows.append({
                "lambda_prime": lam, "delta_nb_opt": ana.delta_nb_opt,
                "xi_analytic": ana.xi_max, "xi_mc": vis.xi,
                "poisson_err": vis.xi_uncertainty,
            })
        write_csv(out / "visibility.csv",
                  ["lambda_prime", "delta_nb_opt", "xi_analytic", "xi_mc",
                   "poisson_err"], rows, manifest)
        return [out / "visibility.csv"]

    plan_section = _require(cfg.plan, "plan")
    bare = Couplings(
        g1=cfg.couplings.g1 * (cfg.circuit.C0 + cfg.circuit.stray_Cs)
        / cfg.circuit.C0,
        g2=cfg.couplings.g2 * (cfg.circuit.C0 + cfg.circuit.stray_Cs)
        / cfg.circuit.C0,
        g_r=cfg.couplings.g_r * (cfg.circuit.C0 + cfg.circuit.stray_Cs)
        / cfg.circuit.C0,
        delta_g1=cfg.couplings.delta_g1
        * (cfg.circuit.C0 + cfg.circuit.stray_Cs) / cfg.circuit.C0,
    )
    rates = derive_rates(cfg.circuit)
    quality_grid = section.quality_Q or (
        (cfg.membrane.quality_Q,) if cfg.membrane.quality_Q else (1e6,)
    )

    def evaluate(value):
        def point(q):
            if section.axis == "Cs_over_C0":
                couplings = apply_stray_capacitance(
                    bare, cfg.circuit.C0, value * cfg.circuit.C0)
                membrane = dataclasses.replace(
                    cfg.membrane, quality_Q=q, gamma_b=None)
            elif section.axis == "Q":
                couplings = cfg.couplings
                membrane = dataclasses.replace(
                    cfg.membrane, quality_Q=value, gamma_b=None)
            elif section.axis == "g_r_over_g1":
                couplings = dataclasses.replace(
                    cfg.couplings, g_r=value * cfg.couplings.g1)
                membrane = cfg.membrane
            else:
                raise ConfigError("sweep.axis", f"unsupported axis {section.axis}")
            plan = plan_experiment(
                cfg.circuit, couplings, membrane,
                delta_nb_target=plan_section.delta_nb,
                N_e_target=plan_section.N_e,
                T_target=plan_section.T,
            )
            row = jsonable(plan)
            row["quality_Q"] = q
            row["strong_coupling_boundary_Cs"] = strong_coupling_boundary(
                bare.g1, rates.gamma_t)
            return row
        return [point(q) for q in quality_grid]

    with _pool(threads) as pool:
        futures = {v: pool.submit(evaluate, v) for v in section.grid}
        results = sweep(section.axis, section.grid,
                        lambda v: {"rows": futures[v].result()})
    rows = []
    for r in results:
        if r.error is not None:
            rows.append({section.axis: r.value, "error": r.error})
            continue
        for sub in r.columns["rows"]:
            sub[section.axis] = r.value
            sub.pop("n_bar_m", None)
            rows.append(sub)
    columns = [section.axis, "quality_Q", "alpha_sq_total", "flux", "T",
               "P_in", "intracavity_photons", "N_e", "lambda_total",
               "lambda_prime", "N_eff", "delta_nb_electrical",
               "delta_nb_mechanical", "delta_nb_total", "D_sq", "g1",
               "gamma_t", "strong_coupling", "strong_coupling_boundary_Cs",
               "no_qnd", "error"]
    write_csv(out / "sweep.csv", columns, rows, manifest)
    return [out / "sweep.csv"]


COMMANDS = {
    "metrics": cmd_metrics,
    "heat": cmd_heat,
    "fourier": cmd_fourier,
    "asym": cmd_asym,
    "measure": cmd_measure,
    "optimize": cmd_optimize,
    "plan": cmd_plan,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qndsim",
        description="QND phonon-number readout: metrics, solvers, planning",
    )
    parser.add_argument("command", choices=sorted(list(COMMANDS) + ["sweep"]))
    parser.add_argument("--config", required=True, help="JSON configuration")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed override")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker-pool size (or QNDSIM_THREADS)")
    args = parser.parse_args(argv)

    started = time.time()
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = manifest_hash(cfg.raw, cfg.seed, __version__)
    try:
        if args.command == "sweep":
            artifacts = cmd_sweep(cfg, out, manifest, args.threads)
        else:
            artifacts = COMMANDS[args.command](cfg, out, manifest)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigurationError,) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceFailure, SingularSystemError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DivergenceError, InfeasiblePlanError, FitFailureError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    write_json(out / "manifest.json", {
        "hash": manifest,
        "seed": cfg.seed,
        "version": __version__,
        "command": args.command,
        "config": cfg.raw,
        "artifacts": [p.name for p in artifacts],
        "wall_time_s": time.time() - started,
    }, manifest)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
