"""Render static figures from qndsim CSV artifacts.

    qndsim-render --kind <name> --in <csv...> --out <file>

Pure file transform: no physics is recomputed, identical CSVs give
identical images (timestamps suppressed).  Each kind validates the column
schema of its inputs and exits nonzero naming the first missing column.

Kinds:
  histogram_pdf   outcome histogram(s) with analytic density overlays
                  (inputs: alternating histogram.csv pdf.csv pairs)
  visibility      visibility vs lambda' with Poisson error bars (log x)
  heating_curves  n_b(t) simulation vs analytic per coupling
  heating_rates   heating rate vs residual coupling (log-log)
  relaxation      T_half and steady occupation vs coupling (log-log)
  planner_sweep   intracavity photons vs stray capacitance per quality
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PNG_METADATA = {"Software": "qndsim-figures"}


class SchemaError(ValueError):
    pass


def read_csv(path: Path) -> tuple[list[str], dict[str, np.ndarray]]:
    lines = Path(path).read_text().splitlines()
    k = 0
    saw_manifest = False
    while k < len(lines) and lines[k].startswith("#"):
        saw_manifest = saw_manifest or "manifest:" in lines[k]
        k += 1
    if not saw_manifest:
        raise SchemaError(f"{path}: missing manifest header line")
    if k >= len(lines):
        raise SchemaError(f"{path}: no header row")
    columns = lines[k].split(",")
    rows = [line.split(",") for line in lines[k + 1:] if line]
    data = {}
    for j, name in enumerate(columns):
        cells = [r[j] if j < len(r) else "" for r in rows]
        vals = []
        for c in cells:
            try:
                vals.append(float(c))
            except ValueError:
                vals.append(np.nan)
        data[name] = np.array(vals)
    return columns, data


def require(columns: list[str], needed: list[str], path: Path):
    for name in needed:
        if name not in columns:
            raise SchemaError(f"{path}: missing column '{name}'")


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=150)
    return fig, ax


def render_histogram_pdf(paths: list[Path], out: Path):
    if len(paths) % 2 != 0:
        raise SchemaError("histogram_pdf takes histogram/pdf file pairs")
    fig, ax = _new_axes()
    colors = plt.cm.viridis(np.linspace(0.15, 0.85, max(len(paths) // 2, 1)))
    for k in range(0, len(paths), 2):
        cols_h, hist = read_csv(paths[k])
        require(cols_h, ["bin_left", "bin_right", "density", "poisson_err"],
                paths[k])
        cols_p, pdf = read_csv(paths[k + 1])
        require(cols_p, ["v_over_sigma", "density"], paths[k + 1])
        color = colors[k // 2]
        centers = 0.5 * (hist["bin_left"] + hist["bin_right"])
        width = hist["bin_right"] - hist["bin_left"]
        if len(centers):
            ax.bar(centers, hist["density"], width=width, alpha=0.45,
                   color=color, linewidth=0.0,
                   label=f"samples {paths[k].stem}")
        if len(pdf["v_over_sigma"]):
            ax.plot(pdf["v_over_sigma"], pdf["density"], ":", color=color,
                    linewidth=1.6, label=f"model {paths[k + 1].stem}")
    ax.set_xlabel(r"$V_M / \sigma$")
    ax.set_ylabel("probability density")
    if ax.has_data():
        ax.legend(fontsize=7)
    return fig


def render_visibility(paths: list[Path], out: Path):
    fig, ax = _new_axes()
    for path in paths:
        cols, data = read_csv(path)
        require(cols, ["lambda_prime", "xi_mc", "poisson_err"], path)
        if len(data["lambda_prime"]) == 0:
            continue
        ax.errorbar(data["lambda_prime"], data["xi_mc"],
                    yerr=data["poisson_err"], fmt="o", capsize=3,
                    label="Monte Carlo")
        if "xi_analytic" in cols:
            ax.plot(data["lambda_prime"], data["xi_analytic"], "r:",
                    label="single-jump model")
    ax.set_xscale("log")
    ax.set_xlabel(r"$\lambda'$")
    ax.set_ylabel(r"visibility $\xi$")
    if ax.has_data():
        ax.legend(fontsize=8)
    return fig


def render_heating_curves(paths: list[Path], out: Path):
    fig, ax = _new_axes()
    for path in paths:
        cols, data = read_csv(path)
        require(cols, ["g1_hz", "t_s", "nb_sim", "nb_analytic"], path)
        for g1 in np.unique(data["g1_hz"][~np.isnan(data["g1_hz"])]):
            sel = data["g1_hz"] == g1
            ax.plot(data["t_s"][sel], data["nb_sim"][sel], "-",
                    label=f"simulated, g1 = {g1:g} Hz")
            ax.plot(data["t_s"][sel], data["nb_analytic"][sel], ":k",
                    linewidth=1.2)
    ax.set_xlabel("time (s)")
    ax.set_ylabel(r"$n_b(t)$")
    ax.set_yscale("log")
    if ax.has_data():
        ax.legend(fontsize=7)
    return fig


def render_heating_rates(paths: list[Path], out: Path):
    fig, ax = _new_axes()
    markers = "osD^v"
    for path in paths:
        cols, data = read_csv(path)
        require(cols, ["g_r_over_g1", "h_sim", "h_analytic", "delta_C_frac"],
                path)
        if len(data["g_r_over_g1"]) == 0:
            continue
        for j, dc in enumerate(np.unique(data["delta_C_frac"])):
            sel = data["delta_C_frac"] == dc
            order = np.argsort(data["g_r_over_g1"][sel])
            x = data["g_r_over_g1"][sel][order]
            ax.plot(x, data["h_analytic"][sel][order], "-", color="0.3")
            ax.plot(x, data["h_sim"][sel][order], markers[j % 5],
                    label=rf"$\delta C/C_0$ = {dc:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$g_r / g_1$")
    ax.set_ylabel(r"heating rate $h$ (1/s)")
    if ax.has_data():
        ax.legend(fontsize=8)
    return fig


def render_relaxation(paths: list[Path], out: Path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6), dpi=150)
    for path in paths:
        cols, data = read_csv(path)
        require(cols, ["g1", "T_half_sim", "T_half_analytic", "rel_err"],
                path)
        if len(data["g1"]) == 0:
            continue
        ax1.loglog(data["g1"], data["T_half_analytic"], ":k",
                   label="analytic")
        ax1.loglog(data["g1"], data["T_half_sim"], "rs", label="simulated")
        if "nb_inf_sim" in cols:
            ax2.loglog(data["g1"], data["nb_inf_analytic"], ":k")
            ax2.loglog(data["g1"], data["nb_inf_sim"], "bD")
    ax1.set_xlabel(r"$g_1$ (Hz)")
    ax1.set_ylabel(r"$T_{1/2}$ (s)")
    ax2.set_xlabel(r"$g_1$ (Hz)")
    ax2.set_ylabel(r"$n_b(\infty)$")
    if ax1.has_data():
        ax1.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render_planner_sweep(paths: list[Path], out: Path):
    fig, ax = _new_axes()
    for path in paths:
        cols, data = read_csv(path)
        require(cols, ["Cs_over_C0", "quality_Q", "intracavity_photons"],
                path)
        qs = data["quality_Q"]
        for q in np.unique(qs[~np.isnan(qs)]):
            sel = qs == q
            order = np.argsort(data["Cs_over_C0"][sel])
            ax.loglog(data["Cs_over_C0"][sel][order],
                      data["intracavity_photons"][sel][order], "o-",
                      label=f"Q = {q:g}")
    ax.set_xlabel(r"$C_s / C_0$")
    ax.set_ylabel("intracavity photons")
    if ax.has_data():
        ax.legend(fontsize=8)
    return fig


KINDS = {
    "histogram_pdf": render_histogram_pdf,
    "visibility": render_visibility,
    "heating_curves": render_heating_curves,
    "heating_rates": render_heating_rates,
    "relaxation": render_relaxation,
    "planner_sweep": render_planner_sweep,
}


def render(kind: str, inputs: list[Path], out: Path) -> None:
    fig = KINDS[kind](inputs, out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", metadata=PNG_METADATA)
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qndsim-render",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True, choices=sorted(KINDS))
    parser.add_argument("--in", dest="inputs", required=True, nargs="+")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        render(args.kind, [Path(p) for p in args.inputs], Path(args.out))
    except FileNotFoundError as exc:
        print(f"input not found: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
