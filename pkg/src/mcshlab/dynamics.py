"""Right-hand sides of the modified field equations and the time integrator.

The evolved system is the mass-shifted second-order form

    (Box + 1) A_0  = -kappa F_12 - 2 e Im(phi conj(D_0 phi)) + A_0
    (Box + 1) A_j  = -kappa eps^{jk} F_{0k} - 2 e Im(phi conj(D_j phi)) + A_j
    (Box + 1) phi  = 2ie A_0 d_t phi - 2ie sum_j A_j d_j phi
                     + e^2 (A_0^2 - A_1^2 - A_2^2) phi - U_phibar + phi
    (Box + 1) N    = -U_N + N

with eps^{12} = 1.  The spatial couplings in the phi equation are the plain
Euclidean sums; this is the expansion of D_mu D^mu phi under the Lorenz
condition, and it is the form under which the gauge constraints propagate
and the energy is conserved (both are verified numerically in the tests).

Time stepping uses the half-wave variables u_pm, which obey

    d_t u_pm = +/- i <D> u_pm  -/+  (i/2) <D>^-1 G[u],

with G the second-order right-hand side above.  The diagonal linear part is
integrated exactly by its phase factor; the interaction-picture nonlinearity
is advanced with classical fourth-order Runge-Kutta (Lawson's method), so
there is no stiffness restriction from the dispersion relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gauge
from ._potentials import check_mode, u_n_value, u_phibar_factor
from .spectral import (
    GridSpec,
    SpectralField,
    apply_bessel_multiplier,
    conj_field,
    dealiased_product,
    imag_part,
    l2_norm,
    pad_coefficients,
    real_part,
    sobolev_norm,
    spatial_derivative,
    truncate_coefficients,
)
from .state import HalfWaveState, PhysicalParams, SystemState, from_halfwave

__all__ = [
    "ForceTerms",
    "DiagnosticsRecord",
    "EvolveResult",
    "BlowUpError",
    "curvature",
    "covariant_derivative",
    "potential_gradients",
    "modified_rhs",
    "halfwave_rhs",
    "step",
    "evolve",
]

FIELD_ORDER = ("a0", "a1", "a2", "phi", "n")


class BlowUpError(RuntimeError):
    """Raised when the trajectory leaves the range of finite floats."""

    def __init__(self, t: float):
        super().__init__(f"non-finite field values at t = {t:.6g}")
        self.t = t


# -- modular operations --------------------------------------------------------


def curvature(s: SystemState) -> tuple[SpectralField, SpectralField, SpectralField]:
    """Curvature components (F_01, F_02, F_12); all linear in the state."""
    f01 = s.da1 - spatial_derivative(s.a0, 1)
    f02 = s.da2 - spatial_derivative(s.a0, 2)
    f12 = spatial_derivative(s.a2, 1) - spatial_derivative(s.a1, 2)
    return f01, f02, f12


def covariant_derivative(s: SystemState, mu: int,
                         p: PhysicalParams) -> SpectralField:
    """D_mu phi = d_mu phi - i e A_mu phi, with the product dealiased."""
    if mu == 0:
        plain, a = s.dphi, s.a0
    elif mu == 1:
        plain, a = spatial_derivative(s.phi, 1), s.a1
    elif mu == 2:
        plain, a = spatial_derivative(s.phi, 2), s.a2
    else:
        raise ValueError(f"index must be 0, 1 or 2, got {mu}")
    if p.e == 0.0:
        return plain
    return plain + (-1j * p.e) * dealiased_product([a, s.phi])


def potential_gradients(phi: SpectralField, n: SpectralField, p: PhysicalParams,
                        mode: str = "consistent"
                        ) -> tuple[SpectralField, SpectralField]:
    """Potential force terms (U_phibar, U_N) of the shifted potential.

    "consistent" applies the exact gradients of the potential
    U = (e|phi|^2 + kappa N)^2/2 + e^2 (N + c0)^2 |phi|^2, under which the
    energy is an invariant; "literal" drops the charge factor from the first
    term of the phi force.  The two coincide for e = 1.
    """
    check_mode(mode)
    e, kappa = p.e, p.kappa
    c0 = p.vacuum_shift
    phibar = conj_field(phi)
    absphi2 = dealiased_product([phi, phibar])

    cubic = dealiased_product([phi, phibar, phi])
    n_phi = dealiased_product([n, phi])
    lead = e * cubic + kappa * n_phi
    if mode == "consistent":
        lead = e * lead
    sq = (dealiased_product([n, n, phi]) + (2.0 * c0) * n_phi
          + (c0 * c0) * phi)
    u_phibar = lead + (e * e) * sq

    u_n = (kappa * e) * real_part(absphi2) + (kappa * kappa) * n \
        + (2.0 * e * e) * (real_part(dealiased_product([n, phi, phibar]))
                           + c0 * real_part(absphi2))
    return u_phibar, u_n


@dataclass(frozen=True)
class ForceTerms:
    """Curvature, covariant derivatives, currents and potential forces."""

    f01: SpectralField
    f02: SpectralField
    f12: SpectralField
    d0phi: SpectralField
    d1phi: SpectralField
    d2phi: SpectralField
    j0: SpectralField
    j1: SpectralField
    j2: SpectralField
    u_phibar: SpectralField
    u_n: SpectralField


def force_terms(s: SystemState, p: PhysicalParams,
                mode: str = "consistent") -> ForceTerms:
    f01, f02, f12 = curvature(s)
    d_phi = [covariant_derivative(s, mu, p) for mu in (0, 1, 2)]
    currents = [imag_part(dealiased_product([s.phi, conj_field(d)]))
                for d in d_phi]
    u_phibar, u_n = potential_gradients(s.phi, s.n, p, mode)
    return ForceTerms(f01, f02, f12, *d_phi, *currents, u_phibar, u_n)


def modified_rhs(s: SystemState, p: PhysicalParams, mode: str = "consistent",
                 include_shift: bool = True) -> dict[str, SpectralField]:
    """Second-order right-hand sides, assembled from the modular operations.

    The integrator uses a fused physical-space evaluation of the same
    formulas; the two paths are cross-checked against each other in tests.
    """
    terms = force_terms(s, p, mode)
    e = p.e
    rhs = {
        "a0": (-p.kappa) * terms.f12 + (-2.0 * e) * terms.j0,
        "a1": (-p.kappa) * terms.f02 + (-2.0 * e) * terms.j1,
        "a2": p.kappa * terms.f01 + (-2.0 * e) * terms.j2,
        "n": -terms.u_n,
    }
    phi_rhs = (2j * e) * dealiased_product([s.a0, s.dphi]) \
        + (-2j * e) * (dealiased_product([s.a1, spatial_derivative(s.phi, 1)])
                       + dealiased_product([s.a2, spatial_derivative(s.phi, 2)])) \
        + (e * e) * (dealiased_product([s.a0, s.a0, s.phi])
                     - dealiased_product([s.a1, s.a1, s.phi])
                     - dealiased_product([s.a2, s.a2, s.phi])) \
        - terms.u_phibar
    rhs["phi"] = phi_rhs
    if include_shift:
        for name, u in (("a0", s.a0), ("a1", s.a1), ("a2", s.a2),
                        ("phi", s.phi), ("n", s.n)):
            rhs[name] = rhs[name] + u
    return rhs


def halfwave_rhs(h: HalfWaveState, p: PhysicalParams, mode: str = "consistent",
                 include_shift: bool = True) -> dict[str, SpectralField]:
    """Right-hand sides of the first-order system: +/- <D>^-1 G / 2 per slot."""
    s = from_halfwave(h)
    g = modified_rhs(s, p, mode, include_shift)
    out = {}
    for name in FIELD_ORDER:
        smoothed = apply_bessel_multiplier(g[name], -1.0)
        out[f"{name}_plus"] = 0.5 * smoothed
        out[f"{name}_minus"] = (-0.5) * smoothed
    return out


# -- fused spectral-stack machinery ---------------------------------------------


def _stack_from_halfwave(h: HalfWaveState) -> np.ndarray:
    n = h.grid.n
    stack = np.empty((5, 2, n, n), dtype=np.complex128)
    for i, name in enumerate(FIELD_ORDER):
        stack[i, 0] = getattr(h, f"{name}_plus").coefficients
        stack[i, 1] = getattr(h, f"{name}_minus").coefficients
    return stack


def _halfwave_from_stack(stack: np.ndarray, grid: GridSpec,
                         t: float) -> HalfWaveState:
    fields = {}
    for i, name in enumerate(FIELD_ORDER):
        fields[f"{name}_plus"] = SpectralField.from_coefficients(
            grid, stack[i, 0], reality=False)
        fields[f"{name}_minus"] = SpectralField.from_coefficients(
            grid, stack[i, 1], reality=False)
    return HalfWaveState(t=t, **fields)


class _RhsWorkspace:
    """Fused evaluation of the second-order right-hand sides on raw arrays.

    One call costs eight forward fine-grid transforms (field views) and five
    inverse ones (one per equation); everything else is pointwise.
    """

    def __init__(self, grid: GridSpec, p: PhysicalParams, mode: str,
                 include_shift: bool):
        check_mode(mode)
        self.grid = grid
        self.p = p
        self.mode = mode
        self.include_shift = include_shift
        w = grid.waves()
        self.k1 = w.k1
        self.k2 = w.k2
        self.bessel = w.bessel
        self.inv_bessel = 1.0 / w.bessel
        self.keep = w.keep
        self.m = grid.n * grid.dealias_factor
        self.fine_scale = float(self.m * self.m)

    def _fine(self, c: np.ndarray) -> np.ndarray:
        return np.fft.ifft2(pad_coefficients(c, self.grid.n, self.m)) \
            * self.fine_scale

    def _back(self, values: np.ndarray) -> np.ndarray:
        c = np.fft.fft2(values) / self.fine_scale
        return truncate_coefficients(c, self.grid.n) * self.keep

    def second_order_rhs(self, u: np.ndarray, du: np.ndarray) -> np.ndarray:
        """G per field from coefficient arrays u[5], du[5] (du only for a, phi)."""
        p = self.p
        e, kappa = p.e, p.kappa
        a0h, a1h, a2h, phih, nh = u
        dphih = du[3]

        phi = self._fine(phih)
        dphi = self._fine(dphih)
        d1phi = self._fine(1j * self.k1 * phih)
        d2phi = self._fine(1j * self.k2 * phih)
        a0 = self._fine(a0h).real
        a1 = self._fine(a1h).real
        a2 = self._fine(a2h).real
        nf = self._fine(nh).real

        absphi2 = phi.real**2 + phi.imag**2
        nl_a0 = -2.0 * e * (phi * np.conj(dphi)).imag - 2.0 * e * e * a0 * absphi2
        nl_a1 = -2.0 * e * (phi * np.conj(d1phi)).imag - 2.0 * e * e * a1 * absphi2
        nl_a2 = -2.0 * e * (phi * np.conj(d2phi)).imag - 2.0 * e * e * a2 * absphi2
        factor = u_phibar_factor(absphi2, nf, p, self.mode)
        nl_phi = (2j * e) * (a0 * dphi - a1 * d1phi - a2 * d2phi) \
            + (e * e) * (a0**2 - a1**2 - a2**2) * phi - factor * phi
        nl_n = -u_n_value(absphi2, nf, p)

        f01 = du[1] - 1j * self.k1 * a0h
        f02 = du[2] - 1j * self.k2 * a0h
        f12 = 1j * self.k1 * a2h - 1j * self.k2 * a1h

        g = np.empty_like(u)
        g[0] = -kappa * f12 + self._back(nl_a0)
        g[1] = -kappa * f02 + self._back(nl_a1)
        g[2] = kappa * f01 + self._back(nl_a2)
        g[3] = self._back(nl_phi)
        g[4] = self._back(nl_n)
        if self.include_shift:
            g += u
        return g

    def nonlinear(self, stack: np.ndarray) -> np.ndarray:
        """Stack-shaped nonlinearity of the first-order system."""
        u = stack[:, 0] + stack[:, 1]
        du = 1j * self.bessel * (stack[:, 0] - stack[:, 1])
        g = self.second_order_rhs(u, du)
        out = np.empty_like(stack)
        smoothed = (0.5j * self.inv_bessel) * g
        out[:, 0] = -smoothed
        out[:, 1] = smoothed
        return out


def _lawson_step(stack: np.ndarray, dt: float, ws: _RhsWorkspace,
                 e_half: np.ndarray, e_full: np.ndarray) -> np.ndarray:
    """One integrating-factor RK4 step; exact on the diagonal linear part."""
    k1 = ws.nonlinear(stack)
    k2 = ws.nonlinear(e_half * (stack + (0.5 * dt) * k1))
    k3 = ws.nonlinear(e_half * stack + (0.5 * dt) * k2)
    k4 = ws.nonlinear(e_full * stack + dt * (e_half * k3))
    return e_full * stack + (dt / 6.0) * (
        e_full * k1 + 2.0 * (e_half * (k2 + k3)) + k4)


def _phase_factors(grid: GridSpec, dt: float) -> tuple[np.ndarray, np.ndarray]:
    b = grid.waves().bessel
    half = np.stack([np.exp(0.5j * dt * b), np.exp(-0.5j * dt * b)])
    full = half * half
    return half[None, :, :, :], full[None, :, :, :]


def step(h: HalfWaveState, dt: float, p: PhysicalParams,
         mode: str = "consistent", include_shift: bool = True) -> HalfWaveState:
    """Advance the half-wave state by one time step of size dt."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    ws = _RhsWorkspace(h.grid, p, mode, include_shift)
    e_half, e_full = _phase_factors(h.grid, dt)
    stack = _lawson_step(_stack_from_halfwave(h), dt, ws, e_half, e_full)
    if not _finite(stack):
        raise BlowUpError(h.t + dt)
    return _halfwave_from_stack(stack, h.grid, h.t + dt)


def _finite(stack: np.ndarray) -> bool:
    total = stack.sum()
    return bool(np.isfinite(total.real) and np.isfinite(total.imag))


# -- trajectory driver -----------------------------------------------------------


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One row of the per-sample diagnostics table."""

    t: float
    energy: float
    energy_drift_rel: float
    lorenz_l2: float
    gauss_l2: float
    v_l2: float
    hs_norm_phi: float
    hs_norm_a: float
    hs_norm_n: float
    max_field_abs: float

    COLUMNS = ("t", "energy", "energy_drift_rel", "lorenz_l2", "gauss_l2",
               "v_l2", "hs_norm_phi", "hs_norm_a", "hs_norm_n",
               "max_field_abs")

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in self.COLUMNS)


@dataclass
class EvolveResult:
    records: list[DiagnosticsRecord]
    final: HalfWaveState
    states: list[SystemState] | None = None


def _sample_record(s: SystemState, p: PhysicalParams, mode: str,
                   e0: float | None, hs_exponents: tuple[float, float, float]
                   ) -> DiagnosticsRecord:
    en = gauge.energy(s, p, mode)
    drift = 0.0 if e0 is None else abs(en - e0) / max(abs(e0), 1e-300)
    lor = gauge.lorenz_residual(s)
    gau = gauge.gauss_residual(s, p)
    s_phi, s_a, s_n = hs_exponents
    hs_a = float(np.sqrt(sobolev_norm(s.a0, s_a)**2 + sobolev_norm(s.a1, s_a)**2
                         + sobolev_norm(s.a2, s_a)**2))
    max_abs = max(getattr(s, name).max_abs() for name in s.field_names())
    gau_l2 = l2_norm(gau)
    return DiagnosticsRecord(
        t=s.t, energy=en, energy_drift_rel=drift, lorenz_l2=l2_norm(lor),
        gauss_l2=gau_l2, v_l2=gau_l2,
        hs_norm_phi=sobolev_norm(s.phi, s_phi), hs_norm_a=hs_a,
        hs_norm_n=sobolev_norm(s.n, s_n), max_field_abs=max_abs)


def evolve(h0: HalfWaveState, t_final: float, dt: float, p: PhysicalParams,
           sample_every: int = 1, mode: str = "consistent",
           include_shift: bool = True,
           hs_exponents: tuple[float, float, float] = (1.0, 1.0, 1.0),
           collect_states: bool = False,
           on_sample: Callable[[DiagnosticsRecord], None] | None = None
           ) -> EvolveResult:
    """Advance to t_final, sampling diagnostics every ``sample_every`` steps.

    The t = 0 state is always sampled, as is the final one.  Raises
    BlowUpError (with partial results attached) when the fields stop being
    finite.
    """
    if t_final <= 0 or dt <= 0:
        raise ValueError("t_final and dt must be positive")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    n_steps = round(t_final / dt)
    if abs(n_steps * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ValueError("t_final must be an integer multiple of dt")

    ws = _RhsWorkspace(h0.grid, p, mode, include_shift)
    e_half, e_full = _phase_factors(h0.grid, dt)
    stack = _stack_from_halfwave(h0)
    grid = h0.grid

    records: list[DiagnosticsRecord] = []
    states: list[SystemState] | None = [] if collect_states else None
    e0: float | None = None

    def sample(i: int) -> None:
        nonlocal e0
        t = h0.t + i * dt
        s = from_halfwave(_halfwave_from_stack(stack, grid, t))
        rec = _sample_record(s, p, mode, e0, hs_exponents)
        if e0 is None:
            e0 = rec.energy
            rec = DiagnosticsRecord(**{**rec.__dict__, "energy_drift_rel": 0.0})
        records.append(rec)
        if states is not None:
            states.append(s)
        if on_sample is not None:
            on_sample(rec)

    sample(0)
    for i in range(1, n_steps + 1):
        stack = _lawson_step(stack, dt, ws, e_half, e_full)
        if not _finite(stack):
            err = BlowUpError(h0.t + i * dt)
            err.partial_records = records  # type: ignore[attr-defined]
            raise err
        if i % sample_every == 0 or i == n_steps:
            sample(i)

    return EvolveResult(records=records,
                        final=_halfwave_from_stack(stack, grid,
                                                   h0.t + n_steps * dt),
                        states=states)
