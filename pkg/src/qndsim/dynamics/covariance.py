"""Exact second-moment propagation for linear noisy dynamics.

For dC/dt = A C + C A^T + D with constant A and D the solution is::

    C(t) = C_inf + e^{At} (C0 - C_inf) e^{A^T t}

whenever A is strictly stable (C_inf from the algebraic Lyapunov equation),
which handles the >7 decades of rate separation here without any step-size
constraint.  A scaling-and-squaring accumulation of the noise integral
covers marginally stable drifts (gamma_b = 0), Schur-free and overflow-free.
An adaptive implicit ODE path is kept for cross-checking.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm, solve_sylvester

from .linear_model import LinearModel
from .solution import DynamicsSolution, summarize


class DivergenceError(RuntimeError):
    """The drift matrix has an eigenvalue with positive real part."""

    def __init__(self, eigenvalue: complex):
        super().__init__(f"unstable drift: eigenvalue {eigenvalue:g} has Re > 0")
        self.eigenvalue = eigenvalue


def _check_stability(A: np.ndarray, tol: float = 0.0) -> np.ndarray:
    w = np.linalg.eigvals(A)
    worst = w[np.argmax(w.real)]
    if worst.real > tol:
        raise DivergenceError(worst)
    return w


def lyapunov_steady_state(model: LinearModel) -> np.ndarray:
    """Algebraic steady state of A C + C A^T + D = 0."""
    _check_stability(model.drift)
    return solve_sylvester(model.drift, model.drift.T, -model.diffusion())


def _noise_integral(A: np.ndarray, D: np.ndarray, dt: float):
    """(e^{A dt}, W(dt)) with W = int_0^dt e^{As} D e^{A^T s} ds.

    Built by repeated doubling W(2h) = W(h) + Phi(h) W(h) Phi(h)^T from a
    base step short enough for a Taylor expansion; every factor decays, so
    the construction never overflows regardless of stiffness.
    """
    norm = np.abs(A).max()
    doublings = max(0, int(np.ceil(np.log2(max(norm * dt, 1e-30) / 0.05))))
    h = dt / (1 << doublings)
    Ah = A * h
    At = Ah.T
    # 4th-order Taylor of the base integral in powers of (A h)
    W = D * h
    W += (Ah @ D + D @ At) * (h / 2.0)
    W += (Ah @ Ah @ D + 2.0 * Ah @ D @ At + D @ At @ At) * (h / 6.0)
    W += (
        Ah @ Ah @ Ah @ D
        + 3.0 * Ah @ Ah @ D @ At
        + 3.0 * Ah @ D @ At @ At
        + D @ At @ At @ At
    ) * (h / 24.0)
    Phi = expm(Ah)
    for _ in range(doublings):
        W = W + Phi @ W @ Phi.T
        Phi = Phi @ Phi
    return Phi, W


def propagate_covariance(
    model: LinearModel, t_grid: np.ndarray, method: str = "exact",
    rtol: float = 1e-8, atol: float = 1e-12,
) -> np.ndarray:
    """Second moments C(t) on t_grid, shape (len(t), D, D)."""
    A = model.drift
    D = model.diffusion()
    C0 = model.initial_cov.astype(complex)
    t = np.asarray(t_grid, dtype=float)
    stability_tol = 1e-12 * float(np.abs(A).max())
    _check_stability(A, tol=stability_tol)
    d = A.shape[0]

    if method == "ivp":
        def rhs(_, y):
            C = y.reshape(d, d)
            dC = A @ C + C @ A.T + D
            return dC.ravel()

        sol = solve_ivp(
            rhs, (t[0], t[-1]), C0.ravel(), t_eval=t,
            method="BDF", rtol=rtol, atol=atol,
        )
        if not sol.success:
            raise RuntimeError(f"covariance integration failed: {sol.message}")
        return sol.y.T.reshape(len(t), d, d)

    if method != "exact":
        raise ValueError(f"unknown method {method!r}")

    # strictly stable drift: exact steady-state split
    try:
        C_inf = solve_sylvester(A, A.T, -D)
        resid = np.abs(A @ C_inf + C_inf @ A.T + D).max()
        scale = max(np.abs(D).max(), np.abs(C_inf).max() * np.abs(A).max(), 1e-300)
        stable = resid / scale < 1e-8 and np.linalg.eigvals(A).real.max() < 0.0
    except np.linalg.LinAlgError:
        stable = False

    out = np.empty((len(t), d, d), dtype=complex)
    if stable:
        X0 = C0 - C_inf
        for k, tk in enumerate(t):
            Phi = expm(A * tk)
            out[k] = C_inf + Phi @ X0 @ Phi.T
        return out

    # marginally stable: accumulate the noise integral interval by interval
    C = C0.copy()
    prev = 0.0
    for k, tk in enumerate(t):
        dt = tk - prev
        if dt > 0.0:
            Phi, W = _noise_integral(A, D, dt)
            C = Phi @ C @ Phi.T + W
        out[k] = C
        prev = tk
    return out


def covariance_evolve(
    model: LinearModel,
    t_grid,
    mode: str = "b",
    method: str = "exact",
    rtol: float = 1e-8,
    atol: float = 1e-12,
) -> DynamicsSolution:
    """Phonon-number trajectory <b† b>(t) of a linear model.

    The steady state comes from the algebraic Lyapunov equation; the
    trajectory from the exact propagator (method "exact") or an adaptive
    implicit integrator (method "ivp").
    """
    t = np.asarray(t_grid, dtype=float)
    Ct = propagate_covariance(model, t, method=method, rtol=rtol, atol=atol)
    i_dag = model.index(mode + "_dag")
    i_op = model.index(mode)
    n_b = np.maximum(Ct[:, i_dag, i_op].real, 0.0)
    eigs = np.linalg.eigvals(model.drift)
    if eigs.real.max() < -1e-12 * np.abs(model.drift).max():
        c_inf = lyapunov_steady_state(model)
        n_steady = float(c_inf[i_dag, i_op].real)
    else:
        n_steady = float("inf")
    decay = -eigs.real
    transient = 3.0 / decay.max() if decay.max() > 0 else 0.0
    return summarize(
        t, n_b, n_steady, transient_time=transient,
        n_b0=float(model.initial_cov[i_dag, i_op].real),
        gamma_guess=2.0 * decay.min() if decay.min() > 0 else None,
    )


def commutator_drift(model: LinearModel, t_grid) -> float:
    """Max deviation of C - C^T from its canonical value over the grid."""
    Ct = propagate_covariance(model, np.asarray(t_grid, dtype=float))
    target = model.commutator
    dev = Ct - np.transpose(Ct, (0, 2, 1)) - target[None, :, :]
    return float(np.abs(dev).max())
