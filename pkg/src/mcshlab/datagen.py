"""Construction of initial data satisfying both constraints at the discrete level.

The temporal gauge condition fixes d_t A_0 from the divergence of the drawn
spatial potential.  The charge constraint is then solved exactly on the
retained modes in two moves: a gauge-covariant shift phi_1 -> phi_1 + i c
phi_0 with the unique real c that zeroes the spatial mean of the residual
(a torus-only compatibility step with no whole-plane counterpart), and a
Poisson solve that corrects only the gradient part of (d_t A_1, d_t A_2).
Solving for the gradient part is always possible on zero-mean data, unlike
the alternative elliptic solve for A_0 whose operator can be singular on
the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gauge import ConstraintResiduals, gauss_residual, l2_norm, lorenz_residual
from .spectral import (
    GridSpec,
    SpectralField,
    conj_field,
    dealiased_product,
    imag_part,
    inverse_laplacian_zero_mean,
    spatial_derivative,
)
from .state import PhysicalParams, SystemState, random_hs_field

__all__ = ["DataRecipe", "make_compatible_data", "verify_constraints"]

_REDRAW_BUDGET = 8


@dataclass(frozen=True)
class DataRecipe:
    """Seeded recipe: regularity exponents and amplitudes per field."""

    seed: int = 0
    s_phi: float = 0.55
    s_a: float = 0.35
    s_n: float = 0.5
    amp_phi: float = 1.0
    amp_a: float = 1.0
    amp_n: float = 1.0
    grid: GridSpec = GridSpec()
    params: PhysicalParams = PhysicalParams()
    band_limit: float | None = None

    def __post_init__(self) -> None:
        for name in ("amp_phi", "amp_a", "amp_n"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        for name in ("s_phi", "s_a", "s_n"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def _draw(r: DataRecipe, idx: int, s: float, amp: float,
          kind: str) -> SpectralField:
    return random_hs_field(r.grid, s, amp, r.seed * 64 + idx, kind=kind,
                           band_limit=r.band_limit)


def make_compatible_data(r: DataRecipe) -> SystemState:
    """Draw seeded random fields and enforce both constraints exactly.

    Deterministic given the recipe; the residuals of the returned state sit
    at roundoff relative to the size of their constituent terms.
    """
    p = r.params
    e = p.e

    phi0 = _draw(r, 0, r.s_phi, r.amp_phi, "complex")
    if r.amp_phi > 0:
        for attempt in range(_REDRAW_BUDGET):
            if l2_norm(phi0) > 0:
                break
            phi0 = random_hs_field(r.grid, r.s_phi, r.amp_phi,
                                   r.seed * 64 + 63 - attempt, kind="complex",
                                   band_limit=r.band_limit)
        else:
            raise RuntimeError("could not draw a scalar field with mass")
    phi1 = _draw(r, 1, r.s_phi - 1.0, r.amp_phi, "complex")
    n0 = _draw(r, 2, r.s_n, r.amp_n, "real")
    n1 = _draw(r, 3, r.s_n - 1.0, r.amp_n, "real")
    a00 = _draw(r, 4, r.s_a, r.amp_a, "real")
    a10 = _draw(r, 5, r.s_a, r.amp_a, "real")
    a20 = _draw(r, 6, r.s_a, r.amp_a, "real")
    a11 = _draw(r, 7, r.s_a - 1.0, r.amp_a, "real")
    a21 = _draw(r, 8, r.s_a - 1.0, r.amp_a, "real")

    # temporal gauge condition fixes d_t A_0
    a01 = spatial_derivative(a10, 1) + spatial_derivative(a20, 2)

    # zero the residual mean with phi_1 -> phi_1 + i c phi_0, which shifts
    # Im(phi_0 conj(phi_1)) by -c |phi_0|^2 and touches nothing else
    phi0_bar = conj_field(phi0)
    mass = dealiased_product([phi0, phi0_bar]).mean().real
    if e != 0.0 and mass > 0.0:
        current_mean = imag_part(
            dealiased_product([phi0, conj_field(phi1)])).mean().real
        charge_mean = dealiased_product([a00, phi0, phi0_bar]).mean().real
        c = (current_mean + e * charge_mean) / mass
        phi1 = phi1 + (1j * c) * phi0

    # exact solve for the gradient part of (d_t A_1, d_t A_2):
    # residual = -Lap a00 + div(a_j1) + kappa F12 + 2e Im(phi0 conj phi1)
    #            + 2e^2 a00 |phi0|^2 must vanish; put a_j1 += d_j chi
    partial = SystemState(
        a0=a00, a1=a10, a2=a20, da0=a01, da1=a11, da2=a21,
        phi=phi0, dphi=phi1, n=n0, dn=n1, t=0.0)
    residual = gauss_residual(partial, p)
    rhs = -1.0 * residual
    chi = inverse_laplacian_zero_mean(rhs)
    a11 = a11 + spatial_derivative(chi, 1)
    a21 = a21 + spatial_derivative(chi, 2)

    return SystemState(a0=a00, a1=a10, a2=a20, da0=a01, da1=a11, da2=a21,
                       phi=phi0, dphi=phi1, n=n0, dn=n1, t=0.0)


def verify_constraints(s: SystemState, p: PhysicalParams) -> ConstraintResiduals:
    gauss = gauss_residual(s, p)
    return ConstraintResiduals(
        lorenz_l2=l2_norm(lorenz_residual(s)),
        gauss_l2=l2_norm(gauss),
        v_l2=l2_norm(gauss),
        t=s.t)
