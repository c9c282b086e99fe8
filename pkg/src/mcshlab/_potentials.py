"""Pointwise scalar-potential terms shared by dynamics and diagnostics.

All helpers act on plain arrays of physical-space samples.  The potential is
the vacuum-shifted one: with c0 = e*v^2/kappa,

    U(|phi|^2, N) = 1/2 (e|phi|^2 + kappa N)^2 + e^2 (N + c0)^2 |phi|^2.

``mode`` selects the force pair: "literal" keeps the conventional form in
which the leading term of the phi force carries no charge factor, while
"consistent" applies the exact gradients of U; the two coincide for e = 1,
and the N gradient is identical in both modes.
"""

from __future__ import annotations

import numpy as np

from .state import PhysicalParams

MODES = ("consistent", "literal")


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown potential mode {mode!r}; expected one of {MODES}")
    return mode


def u_density(absphi2: np.ndarray, n: np.ndarray, p: PhysicalParams) -> np.ndarray:
    c0 = p.vacuum_shift
    q = p.e * absphi2 + p.kappa * n
    return 0.5 * q * q + p.e**2 * (n + c0) ** 2 * absphi2


def u_phibar_factor(absphi2: np.ndarray, n: np.ndarray, p: PhysicalParams,
                    mode: str) -> np.ndarray:
    """Scalar factor g with U_phibar = g * phi."""
    check_mode(mode)
    c0 = p.vacuum_shift
    lead = p.e * absphi2 + p.kappa * n
    if mode == "consistent":
        lead = p.e * lead
    return lead + p.e**2 * (n + c0) ** 2


def u_n_value(absphi2: np.ndarray, n: np.ndarray, p: PhysicalParams) -> np.ndarray:
    c0 = p.vacuum_shift
    return p.kappa * (p.e * absphi2 + p.kappa * n) + 2.0 * p.e**2 * (n + c0) * absphi2
