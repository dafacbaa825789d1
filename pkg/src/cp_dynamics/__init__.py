"""Time-dependent atom-mirror Casimir-Polder energies and forces.

A two-level atom near a perfectly conducting plate is prepared in a bare or
partially dressed state at ``t = 0``; the package evaluates the resulting
second-order energy shift and force, checks them against independent
quadrature and discrete cavity-mode oracles, and drives parameter sweeps
from the command line.
"""

from ._backend import NAME as BACKEND
from .params import (
    PRESETS,
    DimensionlessPoint,
    DomainError,
    PhysicalParams,
    derived_geometry,
    energy_unit,
    nondimensionalize,
    restore,
)
from .scenarios import (
    EnergySample,
    ForceSample,
    ForceSign,
    ScenarioKind,
    asymptote_check,
    bare_energy,
    dressed1_energy,
    dressed2_energy,
    echo_times,
    energy,
    energy_quadrature,
    force,
    sign_changes,
    static_energy,
)
from .specfun import aux_f, aux_fg, aux_g, cosine_integral, sine_integral, window_F

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "PRESETS",
    "DimensionlessPoint",
    "DomainError",
    "PhysicalParams",
    "derived_geometry",
    "energy_unit",
    "nondimensionalize",
    "restore",
    "EnergySample",
    "ForceSample",
    "ForceSign",
    "ScenarioKind",
    "asymptote_check",
    "bare_energy",
    "dressed1_energy",
    "dressed2_energy",
    "echo_times",
    "energy",
    "energy_quadrature",
    "force",
    "sign_changes",
    "static_energy",
    "aux_f",
    "aux_fg",
    "aux_g",
    "cosine_integral",
    "sine_integral",
    "window_F",
]
