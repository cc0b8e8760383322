"""Visibility optimization over delta_nb and experiment planning.

The optimizer maximizes the analytic visibility xi(n, lambda' dn, dn) by
tuning the per-window heating dn, or fits a quartic through Monte-Carlo
visibilities.  The planner inverts the closed-form heating relations to
turn a target (delta_nb, N_e or T) into photon budget, probe power,
intracavity photons and the renormalized lambda'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import HBAR
from .measure import (
    MeasurementConfig,
    mc_sample_outcomes,
    visibility_from_histogram,
    visibility_from_model,
)
from .metrics import (
    DeltaNb,
    DriveSpec,
    delta_nb,
    induced_heating_double_limit,
    lambda_family,
    lambda_prime_and_occupation,
    residual_heating,
    snr_squared,
)
from .params import (
    CircuitSpec,
    ConfigurationError,
    Couplings,
    MembraneSpec,
    derive_rates,
)

DELTA_NB_BOUNDS = (1e-5, 3.0)


class FitFailureError(RuntimeError):
    """The Monte-Carlo visibility fit has no interior maximum."""


@dataclass(frozen=True)
class OptimizationResult:
    delta_nb_opt: float
    xi_max: float
    method: str  # "analytic_pdf" or "mc_poly_fit"
    lambda_prime: float
    n_eff: float
    fit_coefficients: tuple[float, ...] = ()
    fit_residual: float = 0.0
    delta_nb_grid: tuple[float, ...] = ()
    xi_grid: tuple[float, ...] = ()
    xi_err_grid: tuple[float, ...] = ()
    delta_nb_opt_err: float = 0.0


def _analytic_xi(lambda_prime: float, n_eff: float, dn: float) -> tuple[float, bool]:
    """(visibility, has_true_valley) of the single-jump model at dn."""
    cfg = MeasurementConfig(lambda_prime=lambda_prime, n_bar_m=n_eff, delta_nb=dn,
                            n_windows=1)
    try:
        vis = visibility_from_model(cfg, strict=False)
        return vis.xi, not vis.degenerate_valley
    except Exception:
        return -1.0, False


def optimize_delta_nb(
    lambda_prime: float,
    n_eff: float,
    method: str = "analytic_pdf",
    n_windows: int = 40_000,
    rng_seed: int = 7,
    grid_points: int = 7,
) -> OptimizationResult:
    """Best per-window heating for a given lambda' and equilibrium occupation.

    analytic_pdf: coarse log-spaced scan over [1e-5, 3] followed by bounded
    1-D refinement of the analytic visibility.  mc_poly_fit: Monte-Carlo
    visibilities with Poisson error bars on a grid around the analytic
    optimum, quartic fit, vertex extraction with a parametric-bootstrap
    uncertainty.
    """
    if lambda_prime <= 1.0:
        raise ConfigurationError("optimization needs lambda_prime > 1")
    lo, hi = DELTA_NB_BOUNDS
    scan = np.geomspace(lo, hi, 121)
    pairs = [_analytic_xi(lambda_prime, n_eff, d) for d in scan]
    xi_scan = np.array([p[0] for p in pairs])
    valley = np.array([p[1] for p in pairs])
    # prefer optima with a genuine interior valley; fall back to the
    # boundary-minimum contrast when the two-peak structure never resolves
    ranked = np.where(valley, xi_scan, -np.inf)
    if np.isfinite(ranked).any() and ranked.max() > -np.inf:
        k = int(np.argmax(ranked))
    else:
        k = int(np.argmax(xi_scan))
    left = scan[max(k - 1, 0)]
    right = scan[min(k + 1, len(scan) - 1)]
    res = minimize_scalar(
        lambda ln_d: -_analytic_xi(lambda_prime, n_eff, math.exp(ln_d))[0],
        bounds=(math.log(left), math.log(right)),
        method="bounded",
        options={"xatol": 1e-5},
    )
    dn_opt = math.exp(res.x)
    xi_opt = -res.fun
    analytic = OptimizationResult(
        delta_nb_opt=dn_opt,
        xi_max=xi_opt,
        method="analytic_pdf",
        lambda_prime=lambda_prime,
        n_eff=n_eff,
    )
    if method == "analytic_pdf":
        return analytic
    if method != "mc_poly_fit":
        raise ValueError(f"unknown optimization method {method!r}")

    grid = dn_opt * np.geomspace(0.45, 2.2, grid_points)
    xi_vals, xi_errs = [], []
    for j, dn in enumerate(grid):
        cfg = MeasurementConfig(
            lambda_prime=lambda_prime, n_bar_m=n_eff, delta_nb=float(dn),
            n_windows=n_windows, rng_seed=rng_seed + j,
        )
        vis = visibility_from_histogram(mc_sample_outcomes(cfg), cfg, strict=False)
        xi_vals.append(vis.xi)
        xi_errs.append(max(vis.xi_uncertainty, 1e-6))
    x = np.log(grid)
    w = 1.0 / np.array(xi_errs)
    coeffs, cov = np.polyfit(x, xi_vals, deg=4, w=w, cov="unscaled")
    fitted = np.polyval(coeffs, x)
    resid = float(np.sqrt(np.mean((fitted - np.array(xi_vals)) ** 2)))

    def vertex_of(c):
        deriv = np.polyder(np.poly1d(c))
        curve = np.polyder(deriv)
        roots = deriv.r
        best, best_xi = None, -np.inf
        for r in roots:
            if abs(r.imag) > 1e-9:
                continue
            xr = float(r.real)
            if x.min() <= xr <= x.max() and curve(xr) < 0.0:
                val = float(np.poly1d(c)(xr))
                if val > best_xi:
                    best, best_xi = xr, val
        return best, best_xi

    x_star, xi_star = vertex_of(coeffs)
    if x_star is None:
        raise FitFailureError(
            "quartic fit has no interior maximum with negative curvature; "
            f"grid={list(grid)}, xi={xi_vals}"
        )
    rng = np.random.default_rng(rng_seed)
    draws = rng.multivariate_normal(coeffs, cov, size=256)
    vertices = []
    for c in draws:
        v, _ = vertex_of(c)
        if v is not None:
            vertices.append(v)
    spread = float(np.std(np.exp(vertices))) if len(vertices) > 8 else 0.0
    return OptimizationResult(
        delta_nb_opt=float(math.exp(x_star)),
        xi_max=xi_star,
        method="mc_poly_fit",
        lambda_prime=lambda_prime,
        n_eff=n_eff,
        fit_coefficients=tuple(float(c) for c in coeffs),
        fit_residual=resid,
        delta_nb_grid=tuple(float(g) for g in grid),
        xi_grid=tuple(float(v) for v in xi_vals),
        xi_err_grid=tuple(float(e) for e in xi_errs),
        delta_nb_opt_err=spread,
    )


class InfeasiblePlanError(RuntimeError):
    """The targeted combination of heating, occupation and time is impossible."""


@dataclass(frozen=True)
class ExperimentPlan:
    alpha_sq_total: float
    flux: float  # photons / s
    T: float  # s
    P_in: float  # W
    intracavity_photons: float
    N_e: float
    lambda_total: float
    lambda_prime: float
    N_eff: float
    delta_nb_electrical: float
    delta_nb_mechanical: float
    delta_nb_total: float
    D_sq: float
    g1: float
    gamma_t: float
    strong_coupling: bool
    n_bar_m: float
    no_qnd: bool = False


def _electrical_coefficient(
    circuit: CircuitSpec, couplings: Couplings, membrane: MembraneSpec
) -> tuple[float, float]:
    """(delta_nb_el, Gamma_b*T) per probe photon: both independent of T."""
    probe = DriveSpec(measurement_time_T=1.0, photon_number_alpha_sq=1.0)
    parts = delta_nb(probe, circuit, couplings, membrane)
    heat = induced_heating_double_limit(probe, circuit, couplings, membrane)
    return parts.electrical, heat.Gamma_b


def plan_experiment(
    circuit: CircuitSpec,
    couplings: Couplings,
    membrane: MembraneSpec,
    delta_nb_target: float | None = None,
    N_e_target: float | None = None,
    T_target: float | None = None,
) -> ExperimentPlan:
    """Fill in the free member of (delta_nb, N_e, T) and price the probe.

    delta_nb_target is the total per-window heating (electrical plus
    gamma_b n_m T); the three quantities are linked by the closed-form
    heating relations, so exactly two must be given.  The plan reports
    P_in = hbar omega_s flux and intracavity photons flux / gamma_t.
    """
    given = [delta_nb_target is not None, N_e_target is not None,
             T_target is not None]
    if sum(given) != 2:
        raise ConfigurationError(
            "exactly two of (delta_nb, N_e, T) must be targeted")
    rates = derive_rates(circuit)
    gb = membrane.damping_rate()
    n_m = membrane.occupation()
    dn_el_per_photon, gbT_per_photon = _electrical_coefficient(
        circuit, couplings, membrane
    )

    if delta_nb_target is not None and T_target is not None:
        T = T_target
        dn_el = delta_nb_target - gb * n_m * T
        if dn_el < 0.0:
            raise InfeasiblePlanError(
                f"mechanical bath alone adds {gb * n_m * T:g} > "
                f"target {delta_nb_target:g} in T={T:g} s"
            )
        alpha_sq = dn_el / dn_el_per_photon if dn_el_per_photon > 0 else 0.0
        n_e_eff = dn_el / (T * (gb + gbT_per_photon * alpha_sq / T)) if T > 0 else 0.0
    elif delta_nb_target is not None and N_e_target is not None:
        # N_e = dn_el / (T gb + Gamma_b T); both dn_el and Gamma_b*T scale
        # with alpha^2 at fixed total delta_nb, so solve the linear system.
        # dn_el = delta - gb n_m T and N_e (T gb + c alpha^2) = dn_el.
        if N_e_target <= 0.0:
            raise InfeasiblePlanError("N_e target must be positive")
        # Let a = alpha^2.  dn_el = k a; delta = k a + gb n_m T;
        # N_e (gb T + c a) = k a  =>  T = (k a - N_e c a) / (N_e gb)
        # and delta = k a + n_m (k - N_e c) a / N_e.
        k = dn_el_per_photon
        c = gbT_per_photon
        denom = k + n_m * (k - N_e_target * c) / N_e_target
        if denom <= 0.0 or k <= N_e_target * c:
            raise InfeasiblePlanError(
                "requested N_e exceeds what the drive-induced reservoir "
                "can sustain (Gamma_b too large)"
            )
        alpha_sq = delta_nb_target / denom
        T = (k - N_e_target * c) * alpha_sq / (N_e_target * gb)
        dn_el = k * alpha_sq
        n_e_eff = N_e_target
    else:  # N_e and T given
        T = T_target
        k = dn_el_per_photon
        c = gbT_per_photon
        if k <= N_e_target * c:
            raise InfeasiblePlanError("requested N_e unreachable at any power")
        alpha_sq = N_e_target * gb * T / (k - N_e_target * c)
        dn_el = k * alpha_sq
        n_e_eff = N_e_target

    if T <= 0.0:
        raise InfeasiblePlanError(f"solved measurement time T={T:g} s is not positive")
    flux = alpha_sq / T
    drive = DriveSpec(measurement_time_T=T, photon_number_alpha_sq=alpha_sq)
    parts = DeltaNb(electrical=dn_el, mechanical=gb * n_m * T)
    fam = lambda_family(circuit, couplings, membrane, rates)
    gamma_big = gbT_per_photon * alpha_sq / T
    if parts.total > 0.0:
        renorm = lambda_prime_and_occupation(
            fam.lambda_total, parts, membrane, drive, Gamma_b=gamma_big
        )
        lam_p, n_eff = renorm.lambda_prime, renorm.N_eff
    else:
        lam_p, n_eff = fam.lambda_total, 0.0
    return ExperimentPlan(
        alpha_sq_total=alpha_sq,
        flux=flux,
        T=T,
        P_in=HBAR * rates.omega_s * flux,
        intracavity_photons=flux / rates.gamma_t,
        N_e=n_e_eff,
        lambda_total=fam.lambda_total,
        lambda_prime=lam_p,
        N_eff=n_eff,
        delta_nb_electrical=dn_el,
        delta_nb_mechanical=gb * n_m * T,
        delta_nb_total=parts.total,
        D_sq=snr_squared(drive, circuit, couplings, rates) if alpha_sq > 0 else 0.0,
        g1=couplings.g1,
        gamma_t=rates.gamma_t,
        strong_coupling=couplings.g1 >= rates.gamma_t,
        n_bar_m=n_m,
        no_qnd=alpha_sq == 0.0,
    )


def strong_coupling_boundary(g1_bare: float, gamma_t: float) -> float:
    """Largest C_s/C0 keeping the diluted g1 at or above gamma_t."""
    if g1_bare <= gamma_t:
        return 0.0
    return g1_bare / gamma_t - 1.0


@dataclass(frozen=True)
class SweepRow:
    value: float
    columns: dict
    error: str | None = None


def sweep(axis: str, grid, evaluate) -> list[SweepRow]:
    """Evaluate a metric/plan closure over a monotone grid, never dropping rows."""
    values = list(grid)
    if len(values) == 0:
        raise ConfigurationError("sweep grid must be nonempty")
    diffs = np.diff(values)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigurationError("sweep grid must be monotone")
    rows = []
    for v in values:
        try:
            rows.append(SweepRow(value=float(v), columns=evaluate(v)))
        except Exception as exc:  # per-point failures recorded in-row
            rows.append(SweepRow(value=float(v), columns={}, error=str(exc)))
    return rows
