"""Common result container for the dynamics solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator


@dataclass(frozen=True)
class DynamicsSolution:
    """Phonon-number trajectory with the derived summary quantities.

    T_half solves n_b(T_half) = n_b_steady / 2 by monotone cubic
    interpolation (first crossing); heating_rate is the early-time slope
    d n_b / dt after the electrical transient.
    """

    t_grid: np.ndarray
    n_b: np.ndarray
    n_b_steady: float
    T_half: float
    heating_rate: float
    warnings: tuple[str, ...] = field(default_factory=tuple)
    residual: float | None = None  # linear-solve residual, Fourier solvers only

    def with_warning(self, message: str) -> "DynamicsSolution":
        return DynamicsSolution(
            t_grid=self.t_grid,
            n_b=self.n_b,
            n_b_steady=self.n_b_steady,
            T_half=self.T_half,
            heating_rate=self.heating_rate,
            warnings=self.warnings + (message,),
            residual=self.residual,
        )


def half_time(t: np.ndarray, n_b: np.ndarray, n_steady: float) -> float:
    """First time at which the interpolated trajectory crosses n_steady/2."""
    if not math.isfinite(n_steady):
        return math.nan
    target = 0.5 * n_steady
    interp = PchipInterpolator(t, n_b, extrapolate=False)
    above = n_b >= target
    if not above.any():
        return math.nan
    k = int(np.argmax(above))
    if k == 0:
        return float(t[0])
    lo, hi = t[k - 1], t[k]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if interp(mid) < target:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def early_slope(t: np.ndarray, n_b: np.ndarray, t_lo: float, t_hi: float) -> float:
    """Least-squares slope of n_b(t) over [t_lo, t_hi]."""
    mask = (t >= t_lo) & (t <= t_hi)
    if mask.sum() < 2:
        mask = slice(0, max(2, len(t) // 20))
    tt, yy = t[mask], n_b[mask]
    coeffs = np.polyfit(tt, yy, 1)
    return float(coeffs[0])


def exponential_rate(
    t: np.ndarray, n_b: np.ndarray, n_steady: float, n_b0: float, gamma_guess: float
) -> float:
    """Initial heating rate from the saturating-exponential shape.

    For n_b(t) = n_inf + (n_0 - n_inf) e^{-g t} the initial slope is
    g (n_inf - n_0); g comes from a linear fit of log(n_inf - n_b) over the
    early window, falling back to the direct slope when the trajectory is
    not strictly below its steady state.
    """
    window = (t - t[0]) <= 1.5 / max(gamma_guess, 1e-300)
    if window.sum() < 4:
        window = np.ones_like(t, dtype=bool)
    tt, yy = t[window], n_b[window]
    gap = n_steady - yy
    if math.isfinite(n_steady) and np.all(gap > 0.0):
        slope = np.polyfit(tt, np.log(gap), 1)[0]
        if -slope > 0.0:
            return float(-slope * (n_steady - n_b0))
    return early_slope(t, n_b, t[0], t[0] + 0.05 * (t[-1] - t[0]))


def summarize(
    t: np.ndarray,
    n_b: np.ndarray,
    n_steady: float,
    transient_time: float = 0.0,
    residual: float | None = None,
    n_b0: float | None = None,
    gamma_guess: float | None = None,
) -> DynamicsSolution:
    """Package a trajectory, extracting T_half and the initial heating rate."""
    if n_b0 is not None and gamma_guess is not None:
        rate = exponential_rate(t, n_b, n_steady, n_b0, gamma_guess)
    else:
        span = t[-1] - t[0]
        t_lo = t[0] + max(transient_time, 0.0)
        t_hi = min(t_lo + 0.05 * span, t[-1])
        rate = early_slope(t, n_b, t_lo, t_hi)
    return DynamicsSolution(
        t_grid=t,
        n_b=n_b,
        n_b_steady=n_steady,
        T_half=half_time(t, n_b, n_steady),
        heating_rate=rate,
        residual=residual,
    )
