"""Linear (Gaussian) models of the noisy electromechanical dynamics.

A LinearModel is the drift matrix of a vector of mode operators arranged in
(op, dagger) pairs, plus delta-correlated noise channels.  Each channel
enters the equations of motion as dx += (u xi + v xi†) dt with
<xi xi†> = rate (n+1) delta and <xi† xi> = rate n delta, so the diffusion
matrix is D = rate [(n+1) u v^T + n v u^T].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..metrics import DriveSpec
from ..params import CircuitSpec, Couplings, MembraneSpec, Topology, derive_rates


@dataclass(frozen=True)
class NoiseChannel:
    coupling_op: np.ndarray  # column multiplying xi(t)
    coupling_dag: np.ndarray  # column multiplying xi†(t)
    occupation: float
    rate: float

    def diffusion(self) -> np.ndarray:
        u, v = self.coupling_op, self.coupling_dag
        n = self.occupation
        return self.rate * ((n + 1.0) * np.outer(u, v) + n * np.outer(v, u))


@dataclass(frozen=True)
class LinearModel:
    labels: tuple[str, ...]
    drift: np.ndarray  # complex (D, D)
    channels: tuple[NoiseChannel, ...]
    initial_cov: np.ndarray  # <x_i(0) x_j(0)>
    commutator: np.ndarray = field(default=None)  # canonical C - C^T, for checks

    def __post_init__(self):
        d = len(self.labels)
        if self.drift.shape != (d, d):
            raise ValueError("drift matrix shape does not match mode count")
        if self.initial_cov.shape != (d, d):
            raise ValueError("initial covariance shape does not match mode count")
        for ch in self.channels:
            if ch.rate < 0.0:
                raise ValueError("noise rates must be nonnegative")
        if self.commutator is None:
            object.__setattr__(
                self, "commutator", self.initial_cov - self.initial_cov.T
            )

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def diffusion(self) -> np.ndarray:
        d = len(self.labels)
        total = np.zeros((d, d), dtype=complex)
        for ch in self.channels:
            total += ch.diffusion()
        return total

    def scaled_noise(self, factor: float) -> "LinearModel":
        """Same model with every channel occupation n+1/2 scaled by factor."""
        channels = tuple(
            NoiseChannel(
                coupling_op=ch.coupling_op,
                coupling_dag=ch.coupling_dag,
                occupation=factor * (ch.occupation + 0.5) - 0.5,
                rate=ch.rate,
            )
            for ch in self.channels
        )
        return LinearModel(
            labels=self.labels,
            drift=self.drift,
            channels=channels,
            initial_cov=self.initial_cov,
            commutator=self.commutator,
        )


def pair_initial_cov(occupations: list[float]) -> np.ndarray:
    """Uncorrelated thermal initial second moments for (op, dagger) pairs."""
    d = 2 * len(occupations)
    cov = np.zeros((d, d), dtype=complex)
    for k, n in enumerate(occupations):
        cov[2 * k, 2 * k + 1] = n + 1.0  # <a a†>
        cov[2 * k + 1, 2 * k] = n  # <a† a>
    return cov


def build_rlc_linear_model(
    circuit: CircuitSpec,
    couplings: Couplings,
    drive: DriveSpec,
    membrane: MembraneSpec,
    n_b0: float = 0.0,
) -> LinearModel:
    """Linearized single-arm model in the frame rotating at omega_s.

    State (da, da†, b, b†); the drive enters only through the enhanced
    coupling G = g1 sqrt(flux gamma_t) / kappa between the electrical
    fluctuations and the mechanical quadrature (b + b†).
    """
    if circuit.topology is not Topology.SINGLE_ARM:
        raise ValueError("RLC model needs a single-arm circuit")
    r = derive_rates(circuit)
    kappa = r.kappa
    gb = membrane.damping_rate()
    wm = membrane.omega_m
    G = couplings.g1 * np.sqrt(drive.flux * r.gamma_t) / kappa
    A = np.array(
        [
            [-kappa / 2.0, 0.0, G, G],
            [0.0, -kappa / 2.0, G, G],
            [-G, G, -1j * wm - gb / 2.0, 0.0],
            [G, -G, 0.0, 1j * wm - gb / 2.0],
        ],
        dtype=complex,
    )
    n_e = circuit.electrical_occupation(r.omega_s)
    e = np.eye(4, dtype=complex)
    channels = (
        NoiseChannel(coupling_op=e[0], coupling_dag=e[1], occupation=n_e, rate=kappa),
        NoiseChannel(
            coupling_op=e[2], coupling_dag=e[3], occupation=membrane.occupation(),
            rate=gb,
        ),
    )
    return LinearModel(
        labels=("a", "a_dag", "b", "b_dag"),
        drift=A,
        channels=channels,
        initial_cov=pair_initial_cov([n_e, n_b0]),
    )
