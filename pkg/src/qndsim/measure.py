"""Measurement statistics: outcome PDF, quantum-jump Monte Carlo, visibility.

Outcomes are expressed in units of the homodyne noise sigma, so the peak
for n_b = k sits at k*D with D = d/sigma = sqrt(lambda' * delta_nb).
The analytic model allows at most one jump per window with a uniformly
distributed jump time; the Monte Carlo divides each window into segments
and allows arbitrarily many jumps with the standard thermal-oscillator
rates, up: (i+1) delta_nb / T and down: i (1 + 1/n) delta_nb / T, whose
window-integrated no-jump weights are exp[-(i+1) delta_nb] and
exp[-i delta_nb (1/n + 1)].
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .params import ConfigurationError


@dataclass(frozen=True)
class MeasurementConfig:
    """Window statistics: quality lambda', equilibrium occupation, heating.

    n_bar_m is the thermal occupation of the probed equilibrium (the
    effective occupation under continuous probing and cooling); snr_d, when
    given, must satisfy D^2 = lambda' * delta_nb.
    """

    lambda_prime: float
    n_bar_m: float
    delta_nb: float
    snr_d: float | None = None
    segments_per_window: int = 64
    n_windows: int = 100_000
    hilbert_cutoff: int = 12
    rng_seed: int = 0

    def __post_init__(self):
        if self.lambda_prime <= 0.0 or self.delta_nb <= 0.0:
            raise ConfigurationError("lambda_prime and delta_nb must be positive")
        if self.n_bar_m < 0.0:
            raise ConfigurationError("n_bar_m must be nonnegative")
        if self.hilbert_cutoff < 2:
            raise ConfigurationError("hilbert_cutoff must be >= 2")
        if self.segments_per_window < 1:
            raise ConfigurationError("segments_per_window must be >= 1")
        if self.snr_d is not None:
            implied = math.sqrt(self.lambda_prime * self.delta_nb)
            if not math.isclose(self.snr_d, implied, rel_tol=1e-9):
                raise ConfigurationError(
                    f"snr_d={self.snr_d:g} inconsistent with "
                    f"sqrt(lambda' delta_nb)={implied:g}"
                )
        if self.segments_per_window < 8:
            warnings.warn("fewer than 8 segments per window; multi-jump "
                          "statistics will be coarse", stacklevel=2)

    @property
    def D(self) -> float:
        return math.sqrt(self.lambda_prime * self.delta_nb)


def thermal_weights(n_bar: float, n_states: int) -> np.ndarray:
    """p_i = n^i / (1+n)^(i+1) for i = 0..n_states."""
    i = np.arange(n_states + 1)
    if n_bar == 0.0:
        p = np.zeros(n_states + 1)
        p[0] = 1.0
        return p
    return n_bar**i / (1.0 + n_bar) ** (i + 1)


def _jump_exponents(cfg: MeasurementConfig, n_states: int):
    """Window-integrated up/down exponents u_i, d_i for states 0..n_states."""
    i = np.arange(n_states + 1, dtype=float)
    up = (i + 1.0) * cfg.delta_nb
    if cfg.n_bar_m > 0.0:
        down = i * cfg.delta_nb * (1.0 / cfg.n_bar_m + 1.0)
    else:
        down = np.where(i > 0, np.inf, 0.0)
    return up, down


def _down_fraction(up: np.ndarray, down: np.ndarray) -> np.ndarray:
    """Share of single-jump events going down: 1/(1+e^{-(u-d)}), 0 for i=0."""
    with np.errstate(over="ignore"):
        frac = 1.0 / (1.0 + np.exp(-(up - down)))
    frac[0] = 0.0
    return frac


def _gauss(v: np.ndarray, center: float) -> np.ndarray:
    return np.exp(-0.5 * (v - center) ** 2) / math.sqrt(2.0 * math.pi)


def _bridge(v: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Gaussian-smeared uniform plateau between two peak positions."""
    return (erf((v - lo) / math.sqrt(2.0)) - erf((v - hi) / math.sqrt(2.0))) / (
        2.0 * (hi - lo)
    )


def _bridge_cdf(v: np.ndarray, lo: float, hi: float) -> np.ndarray:
    def antideriv(x):
        return x * erf(x / math.sqrt(2.0)) + math.sqrt(2.0 / math.pi) * np.exp(
            -0.5 * x**2
        )

    return (antideriv(v - lo) - antideriv(v - hi)) / (2.0 * (hi - lo)) + 0.5


def single_jump_pdf(v, cfg: MeasurementConfig):
    """Two-peak outcome density with the single in-window-jump bridge.

    Peaks at 0 and D weighted by the thermal no-jump probabilities, plus the
    error-function plateau from windows in which the state jumped once at a
    uniformly distributed time.  Higher Fock states are dropped, so for
    n_bar_m > 0 the density integrates to less than one; outcome_pdf keeps
    the whole ladder.
    """
    v = np.asarray(v, dtype=float)
    n = cfg.n_bar_m
    dn = cfg.delta_nb
    D = cfg.D
    peak0 = math.exp(-dn) / (1.0 + n) * _gauss(v, 0.0)
    if n > 0.0:
        stay1 = math.exp(-dn * (3.0 + 1.0 / n))
        peak1 = stay1 * n / (1.0 + n) ** 2 * _gauss(v, D)
        bridge_w = (1.0 + n) * (-math.expm1(-dn)) + n * (-math.expm1(
            -dn * (3.0 + 1.0 / n)
        )) / (1.0 + math.exp(-dn * (1.0 - 1.0 / n)))
    else:
        peak1 = 0.0
        bridge_w = -math.expm1(-dn)
    bridge = bridge_w / (1.0 + n) ** 2 * _bridge(v, 0.0, D)
    return peak0 + peak1 + bridge


def _ladder_weights(cfg: MeasurementConfig, n_states: int):
    """Peak and bridge weights of the full single-jump ladder.

    Generalizes the two-peak formula: state i keeps weight p_i e^{-(u+d)},
    jumps split between the adjacent bridges with the logistic share
    1/(1+e^{-(u-d)}) going down.  Summed over the ladder the weights add to
    the retained thermal mass, so the density is normalized up to the
    thermal tail beyond n_states.
    """
    p = thermal_weights(cfg.n_bar_m, n_states)
    up, down = _jump_exponents(cfg, n_states)
    with np.errstate(invalid="ignore"):
        stay = np.exp(-(up + down))
    jump = -np.expm1(-(up + down))
    down_frac = _down_fraction(up, down)
    peak_w = p * stay
    bridge_up_w = p * jump * (1.0 - down_frac)  # bridge (i, i+1)
    bridge_down_w = p * jump * down_frac  # bridge (i-1, i)
    return peak_w, bridge_up_w, bridge_down_w


def outcome_pdf(v, cfg: MeasurementConfig, n_states: int | None = None):
    """Full single-jump outcome density over the thermal ladder."""
    v = np.asarray(v, dtype=float)
    if n_states is None:
        n_states = cfg.hilbert_cutoff
    D = cfg.D
    peak_w, up_w, down_w = _ladder_weights(cfg, n_states)
    out = np.zeros_like(v)
    for i in range(n_states + 1):
        out += peak_w[i] * _gauss(v, i * D)
        if up_w[i] > 0.0:
            out += up_w[i] * _bridge(v, i * D, (i + 1) * D)
        if down_w[i] > 0.0:
            out += down_w[i] * _bridge(v, (i - 1) * D, i * D)
    return out


def outcome_cdf(v, cfg: MeasurementConfig, n_states: int | None = None):
    """Closed-form CDF of outcome_pdf, for KS comparisons."""
    v = np.asarray(v, dtype=float)
    if n_states is None:
        n_states = cfg.hilbert_cutoff
    D = cfg.D
    peak_w, up_w, down_w = _ladder_weights(cfg, n_states)
    out = np.zeros_like(v)
    for i in range(n_states + 1):
        out += peak_w[i] * 0.5 * (1.0 + erf((v - i * D) / math.sqrt(2.0)))
        if up_w[i] > 0.0:
            out += up_w[i] * _bridge_cdf(v, i * D, (i + 1) * D)
        if down_w[i] > 0.0:
            out += down_w[i] * _bridge_cdf(v, (i - 1) * D, i * D)
    return out


@dataclass(frozen=True)
class OutcomeHistogram:
    """Binned V_M outcomes in sigma units, with raw samples retained."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    cutoff_exceeded: int
    samples: np.ndarray | None = None

    @property
    def density(self) -> np.ndarray:
        width = np.diff(self.bin_edges)
        return self.counts / (self.total * width)

    @property
    def poisson_err(self) -> np.ndarray:
        width = np.diff(self.bin_edges)
        return np.sqrt(np.maximum(self.counts, 1.0)) / (self.total * width)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


BIN_WIDTH_SIGMA = 0.125  # sigma / 8


def _window_generators(seed: int, n_windows: int):
    """Counter-based per-window substreams: Philox(key=seed) jumped by index."""
    root = np.random.Philox(key=seed)
    return [np.random.Generator(root.jumped(w)) for w in range(n_windows)]


def _histogram(samples: np.ndarray, cfg: MeasurementConfig,
               cutoff_exceeded: int) -> OutcomeHistogram:
    hi = cfg.hilbert_cutoff * cfg.D + 3.0
    edges = np.arange(-3.0, hi + BIN_WIDTH_SIGMA, BIN_WIDTH_SIGMA)
    counts, edges = np.histogram(np.clip(samples, -3.0 + 1e-9, hi - 1e-9), bins=edges)
    return OutcomeHistogram(
        bin_edges=edges,
        counts=counts,
        total=len(samples),
        cutoff_exceeded=cutoff_exceeded,
        samples=samples,
    )


def mc_sample_outcomes(
    cfg: MeasurementConfig, single_jump: bool = False
) -> OutcomeHistogram:
    """Quantum-jump Monte Carlo over n_windows measurement windows.

    Each window draws its own Philox substream (seed, window index), so the
    histogram is bitwise reproducible and independent of execution order.
    single_jump=True forces the analytic model's sampling (at most one jump,
    uniform jump time) for convergence tests against the ladder PDF.
    """
    n_w = cfg.n_windows
    n_seg = cfg.segments_per_window
    gens = _window_generators(cfg.rng_seed, n_w)
    if single_jump or cfg.segments_per_window == 1:
        uniforms = np.empty((n_w, 3))
        normals = np.empty(n_w)
        for w, g in enumerate(gens):
            uniforms[w] = g.random(3)
            normals[w] = g.standard_normal()
        return _mc_single_jump(cfg, uniforms, normals)

    seg_u = np.empty((n_w, n_seg))
    init_u = np.empty(n_w)
    normals = np.empty(n_w)
    for w, g in enumerate(gens):
        init_u[w] = g.random()
        seg_u[w] = g.random(n_seg)
        normals[w] = g.standard_normal()

    states = _sample_thermal(cfg, init_u)
    cutoff_exceeded = 0
    occupancy = np.zeros(n_w)
    dn_seg = cfg.delta_nb / n_seg
    # n_bar_m -> 0 makes the down rate diverge (excitations decay within a
    # segment); a large finite factor implements that limit without inf*0
    inv_n = 1.0 / cfg.n_bar_m if cfg.n_bar_m > 0.0 else 1e12
    for s in range(n_seg):
        occupancy += states
        up_rate = (states + 1.0) * dn_seg
        down_rate = np.where(states > 0, states * dn_seg * (inv_n + 1.0), 0.0)
        total = up_rate + down_rate
        p_jump = -np.expm1(-total)
        u = seg_u[:, s]
        jumped = u < p_jump
        frac_down = np.where(total > 0.0, down_rate / np.maximum(total, 1e-300), 0.0)
        go_down = jumped & (u < p_jump * frac_down)
        go_up = jumped & ~go_down
        at_cutoff = go_up & (states >= cfg.hilbert_cutoff)
        cutoff_exceeded += int(at_cutoff.sum())
        states = states + go_up - go_down
        states = np.minimum(states, cfg.hilbert_cutoff)
    samples = occupancy / n_seg * cfg.D + normals
    return _histogram(samples, cfg, cutoff_exceeded)


def _sample_thermal(cfg: MeasurementConfig, u: np.ndarray) -> np.ndarray:
    if cfg.n_bar_m == 0.0:
        return np.zeros_like(u)
    ratio = cfg.n_bar_m / (1.0 + cfg.n_bar_m)
    states = np.floor(np.log1p(-u) / math.log(ratio))
    return np.minimum(states, cfg.hilbert_cutoff)


def _mc_single_jump(cfg: MeasurementConfig, uniforms: np.ndarray,
                    normals: np.ndarray) -> OutcomeHistogram:
    states = _sample_thermal(cfg, uniforms[:, 0])
    n_states = cfg.hilbert_cutoff
    up, down = _jump_exponents(cfg, n_states)
    stay = np.exp(-np.where(np.isinf(down), np.inf, up + down))
    stay = np.where(np.isinf(down), 0.0, stay)
    stay[0] = math.exp(-up[0])
    down_frac = _down_fraction(up, down)
    idx = states.astype(int)
    u_jump = uniforms[:, 1]
    jumped = u_jump > stay[idx]
    jump_prob = 1.0 - stay[idx]
    cond = np.where(jumped, (u_jump - stay[idx]) / np.maximum(jump_prob, 1e-300), 0.0)
    go_down = jumped & (cond < down_frac[idx])
    final = idx + jumped * np.where(go_down, -1, +1)
    cutoff_exceeded = int((final > n_states).sum())
    final = np.minimum(final, n_states)
    x = uniforms[:, 2]  # fraction of the window before the jump
    occupancy = np.where(jumped, idx * x + final * (1.0 - x), idx)
    samples = occupancy * cfg.D + normals
    return _histogram(samples, cfg, cutoff_exceeded)


def ks_distance(samples: np.ndarray, cdf) -> float:
    """Exact Kolmogorov-Smirnov statistic of samples against a model CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    f = np.asarray(cdf(x), dtype=float)
    lo = np.abs(f - np.arange(n) / n)
    hi = np.abs(np.arange(1, n + 1) / n - f)
    return float(np.maximum(lo, hi).max())


@dataclass(frozen=True)
class VisibilityResult:
    I0: float
    I1: float
    I_R: float
    xi: float
    xi_uncertainty: float = 0.0
    at_optimum: bool = False
    degenerate_valley: bool = False  # no interior minimum between the peaks


class DegenerateValleyError(RuntimeError):
    """No local minimum exists between the two peaks."""


def _xi_from_levels(I0: float, I1: float, I_R: float) -> float:
    s = 0.5 * (I0 + I1)
    return (s - I_R) / (s + I_R)


def visibility_from_model(
    cfg: MeasurementConfig, pdf=None, n_valley: int = 801,
    at_optimum: bool = False, strict: bool = True,
) -> VisibilityResult:
    """Peak/valley contrast of an analytic outcome density.

    I0 and I1 are the density at the two peak locations (0 and D); I_R the
    minimum in between, found by dense scan plus parabolic refinement.
    At small lambda' the density can fall monotonically between the peaks;
    with strict=True that raises, otherwise the boundary minimum is used
    and the result is flagged degenerate.
    """
    if pdf is None:
        pdf = lambda v: single_jump_pdf(v, cfg)
    D = cfg.D
    I0 = float(pdf(0.0))
    I1 = float(pdf(D))
    vs = np.linspace(0.0, D, n_valley)
    dens = pdf(vs)
    k = int(np.argmin(dens[1:-1])) + 1
    a, b, c = dens[k - 1], dens[k], dens[k + 1]
    denom = a - 2.0 * b + c
    I_R = float(b)
    if denom > 0.0:
        shift = 0.5 * (a - c) / denom
        if abs(shift) <= 1.0:  # refine only inside the bracketing bins
            I_R = float(max(b - 0.25 * (a - c) * shift, 0.0))
    degenerate = I_R >= min(I0, I1)
    if degenerate and strict:
        raise DegenerateValleyError(
            f"no valley between peaks: I0={I0:g}, I1={I1:g}, I_R={I_R:g}"
        )
    return VisibilityResult(I0=I0, I1=I1, I_R=I_R,
                            xi=_xi_from_levels(I0, I1, I_R),
                            at_optimum=at_optimum,
                            degenerate_valley=degenerate)


def _smoothed(density: np.ndarray) -> np.ndarray:
    """Three-bin local average, suppressing shot noise before extraction."""
    padded = np.pad(density, 1, mode="edge")
    return (padded[:-2] + padded[1:-1] + padded[2:]) / 3.0


def visibility_from_histogram(
    hist: OutcomeHistogram, cfg: MeasurementConfig, strict: bool = True
) -> VisibilityResult:
    """Visibility of a sampled histogram, with Poisson error propagation."""
    D = cfg.D
    centers = hist.centers
    dens = _smoothed(hist.density)
    var = _smoothed(hist.poisson_err**2) / 3.0  # variance of a 3-bin mean

    def peak(center: float) -> tuple[float, float, float]:
        mask = np.abs(centers - center) <= 0.5
        k = np.argmax(np.where(mask, dens, -np.inf))
        return float(dens[k]), float(var[k]), float(centers[k])

    I0, var0, p0 = peak(0.0)
    I1, var1, p1 = peak(D)
    between = (centers > p0) & (centers < p1)
    if not between.any():
        raise DegenerateValleyError("peaks are not separated by any bins")
    k = np.argmin(np.where(between, dens, np.inf))
    I_R, varR = float(dens[k]), float(var[k])
    degenerate = I_R >= min(I0, I1)
    if degenerate and strict:
        raise DegenerateValleyError(
            f"no valley between histogram peaks: I0={I0:g}, I1={I1:g}, I_R={I_R:g}"
        )
    s = 0.5 * (I0 + I1)
    xi = _xi_from_levels(I0, I1, I_R)
    d_s = 2.0 * I_R / (s + I_R) ** 2
    d_r = -2.0 * s / (s + I_R) ** 2
    var_xi = d_s**2 * (var0 + var1) / 4.0 + d_r**2 * varR
    return VisibilityResult(I0=I0, I1=I1, I_R=I_R, xi=xi,
                            xi_uncertainty=math.sqrt(var_xi),
                            degenerate_valley=degenerate)


def asymptotic_visibility(lambda_prime: float, n_eff: float) -> float:
    """Large-lambda' visibility 1 - 8 (3+5N)/(1+2N) sqrt(pi ln lambda')/lambda'."""
    if lambda_prime <= 1.0:
        raise ValueError("asymptotic visibility needs lambda_prime > 1")
    return 1.0 - 8.0 * (3.0 + 5.0 * n_eff) / (1.0 + 2.0 * n_eff) * math.sqrt(
        math.pi * math.log(lambda_prime)
    ) / lambda_prime
