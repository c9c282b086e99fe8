"""Pseudospectral simulation and verification lab for the (2+1)-dimensional
Maxwell-Chern-Simons-Higgs system in Lorenz gauge."""

from .spectral import (
    GridSpec,
    SpectralField,
    apply_bessel_multiplier,
    dealiased_product,
    riesz,
    sobolev_norm,
    spatial_derivative,
)
from .state import (
    HalfWaveState,
    PhysicalParams,
    SystemState,
    from_halfwave,
    load_state,
    random_hs_field,
    save_state,
    to_halfwave,
)
from .datagen import DataRecipe, make_compatible_data, verify_constraints
from .dynamics import BlowUpError, DiagnosticsRecord, evolve, modified_rhs, step

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "SpectralField",
    "PhysicalParams",
    "SystemState",
    "HalfWaveState",
    "DataRecipe",
    "DiagnosticsRecord",
    "BlowUpError",
    "apply_bessel_multiplier",
    "riesz",
    "spatial_derivative",
    "dealiased_product",
    "sobolev_norm",
    "to_halfwave",
    "from_halfwave",
    "random_hs_field",
    "save_state",
    "load_state",
    "make_compatible_data",
    "verify_constraints",
    "modified_rhs",
    "step",
    "evolve",
    "__version__",
]
