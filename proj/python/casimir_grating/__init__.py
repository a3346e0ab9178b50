"""Casimir and electrostatic forces between flat and corrugated surfaces.

All quantities are SI: metres, rad/s, volts, pascals, newtons.
"""

from ._core import (
    DomainError,
    FitError,
    GratingProfile,
    NumericalError,
    ParseError,
    RangeError,
    capacitor_energy,
    corrugated_sphere_gradient,
    epsilon,
    find_residual_voltage,
    fit_calibration,
    grating_pressure,
    ideal_pressure,
    pfa_corrugated,
    pfa_share_topbottom,
    planar_pressure,
    rho_ratio,
    run_pipeline,
    sphere_plane_force,
    sphere_plane_gradient,
    synthesize_sweep,
)

__all__ = [
    "DomainError",
    "FitError",
    "GratingProfile",
    "NumericalError",
    "ParseError",
    "RangeError",
    "capacitor_energy",
    "corrugated_sphere_gradient",
    "epsilon",
    "find_residual_voltage",
    "fit_calibration",
    "grating_pressure",
    "ideal_pressure",
    "pfa_corrugated",
    "pfa_share_topbottom",
    "planar_pressure",
    "rho_ratio",
    "run_pipeline",
    "sphere_plane_force",
    "sphere_plane_gradient",
    "synthesize_sweep",
]
