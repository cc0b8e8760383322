"""Simulation and experiment planning for QND phonon-number readout."""

from . import dynamics, measure, metrics, params, plan
from .constants import CONSTANTS, PhysicalConstants, thermal_occupation
from .params import (
    CircuitSpec,
    Couplings,
    DerivedRates,
    MembraneSpec,
    Topology,
    apply_stray_capacitance,
    couplings_from_geometry,
    derive_rates,
    double_arm_from_rates,
    residual_coupling,
    single_arm_from_rates,
    zero_point_motion,
)
from .metrics import DriveSpec, MeritReport, merit_report

__version__ = "0.1.0"
