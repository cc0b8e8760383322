"""Physical constants and thermal-occupation helpers.

All frequencies and rates inside the package are angular (rad/s).
Configuration files quote plain frequencies in Hz; conversion happens at
load time, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi

# CODATA 2018 values, SI units.
HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J / K


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed fundamental constants used throughout the model."""

    hbar: float = HBAR
    k_boltzmann: float = K_BOLTZMANN

    def __post_init__(self):
        if self.hbar <= 0.0 or self.k_boltzmann <= 0.0:
            raise ValueError("physical constants must be strictly positive")


CONSTANTS = PhysicalConstants()


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation 1/(exp(hbar*omega/kT) - 1) at angular frequency omega."""
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if temperature < 0.0:
        raise ValueError("temperature must be nonnegative")
    if temperature == 0.0:
        return 0.0
    x = HBAR * omega / (K_BOLTZMANN * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)
