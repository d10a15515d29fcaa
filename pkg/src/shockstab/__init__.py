"""Numerical toolkit for weighted relative-entropy shock stability.

Provides closed-form shock curves for a scalar cubic law and the 2x2
system of nonlinear elastodynamics, dissipation functionals, numerical
certification of the contraction weight, stability-region maps, and a
finite-volume simulator with a shifted interface.
"""

from shockstab.models import (
    ScalarCubic,
    Elastodynamics,
    ReflectedModel,
    EntropySpec,
    parse_model,
    reflect,
    rel_entropy,
    rel_entropy_flux,
)
from shockstab.wave_curves import shock_point, critical_params, lax_admissible
from shockstab.dissipation import ShockSetup, d_cont, d_rh, estimate_constants
from shockstab.certify import (
    compute_epsilon,
    certify_weight,
    build_scalar_entropy,
    region_map,
)
from shockstab.sim import SimConfig, run_simulation

__all__ = [
    "ScalarCubic",
    "Elastodynamics",
    "ReflectedModel",
    "EntropySpec",
    "parse_model",
    "reflect",
    "rel_entropy",
    "rel_entropy_flux",
    "shock_point",
    "critical_params",
    "lax_admissible",
    "ShockSetup",
    "d_cont",
    "d_rh",
    "estimate_constants",
    "compute_epsilon",
    "certify_weight",
    "build_scalar_entropy",
    "region_map",
    "SimConfig",
    "run_simulation",
]

__version__ = "0.1.0"
