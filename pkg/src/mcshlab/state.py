"""State containers, half-wave conversions, random data, snapshot files."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import BinaryIO

import numpy as np

from .spectral import (
    GridSpec,
    SpectralField,
    apply_bessel_multiplier,
    _reverse_index,
)

__all__ = [
    "PhysicalParams",
    "SystemState",
    "HalfWaveState",
    "to_halfwave",
    "from_halfwave",
    "random_hs_field",
    "save_state",
    "load_state",
]

# Spectral decay margin used by random_hs_field: in 2D the coefficient decay
# <k>^-(s+1+delta) puts the field in H^sigma exactly for sigma < s + delta.
HS_DECAY_MARGIN = 0.01


@dataclass(frozen=True)
class PhysicalParams:
    """Couplings: charge e, Chern-Simons constant kappa, potential constant v."""

    e: float = 1.0
    kappa: float = 1.0
    v: float = 1.0

    def __post_init__(self) -> None:
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        if self.kappa == 0.0 and self.e != 0.0:
            raise ValueError("kappa = 0 with e != 0 makes the vacuum shift singular")

    @property
    def vacuum_shift(self) -> float:
        """The constant e*v^2/kappa subtracted from N by the field shift."""
        if self.kappa == 0.0:
            return 0.0
        return self.e * self.v**2 / self.kappa


_REAL_FIELDS = ("a0", "a1", "a2", "da0", "da1", "da2", "n", "dn")
_COMPLEX_FIELDS = ("phi", "dphi")


@dataclass(frozen=True)
class SystemState:
    """Gauge potentials, scalar fields and their time derivatives at time t."""

    a0: SpectralField
    a1: SpectralField
    a2: SpectralField
    da0: SpectralField
    da1: SpectralField
    da2: SpectralField
    phi: SpectralField
    dphi: SpectralField
    n: SpectralField
    dn: SpectralField
    t: float = 0.0

    def __post_init__(self) -> None:
        grid = self.a0.grid
        for name in _REAL_FIELDS + _COMPLEX_FIELDS:
            f: SpectralField = getattr(self, name)
            if f.grid != grid:
                raise ValueError("state fields live on different grids")
        for name in _REAL_FIELDS:
            if not getattr(self, name).reality:
                raise ValueError(f"field {name} must carry the reality flag")

    @property
    def grid(self) -> GridSpec:
        return self.a0.grid

    @classmethod
    def zero(cls, grid: GridSpec, t: float = 0.0) -> "SystemState":
        r = SpectralField.zero(grid, reality=True)
        c = SpectralField.zero(grid, reality=False)
        return cls(a0=r, a1=r, a2=r, da0=r, da1=r, da2=r,
                   phi=c, dphi=c, n=r, dn=r, t=t)

    def field_names(self) -> tuple[str, ...]:
        return _REAL_FIELDS + _COMPLEX_FIELDS


_HALFWAVE_FIELDS = (
    "a0_plus", "a0_minus", "a1_plus", "a1_minus", "a2_plus", "a2_minus",
    "phi_plus", "phi_minus", "n_plus", "n_minus",
)


@dataclass(frozen=True)
class HalfWaveState:
    """First-order image of a SystemState: u_pm = (u -/+ i <D>^-1 du) / 2."""

    a0_plus: SpectralField
    a0_minus: SpectralField
    a1_plus: SpectralField
    a1_minus: SpectralField
    a2_plus: SpectralField
    a2_minus: SpectralField
    phi_plus: SpectralField
    phi_minus: SpectralField
    n_plus: SpectralField
    n_minus: SpectralField
    t: float = 0.0

    @property
    def grid(self) -> GridSpec:
        return self.a0_plus.grid


def _split(u: SpectralField, du: SpectralField) -> tuple[SpectralField, SpectralField]:
    smoothed = apply_bessel_multiplier(du, -1.0)
    plus = 0.5 * u + (-0.5j) * smoothed
    minus = 0.5 * u + (0.5j) * smoothed
    return plus, minus


def _merge(plus: SpectralField, minus: SpectralField) -> tuple[SpectralField, SpectralField]:
    u = plus + minus
    du = apply_bessel_multiplier(1j * (plus - minus), 1.0)
    return u, du


def to_halfwave(s: SystemState) -> HalfWaveState:
    parts = {}
    for base, (uname, duname) in {
        "a0": ("a0", "da0"), "a1": ("a1", "da1"), "a2": ("a2", "da2"),
        "phi": ("phi", "dphi"), "n": ("n", "dn"),
    }.items():
        plus, minus = _split(getattr(s, uname), getattr(s, duname))
        parts[f"{base}_plus"] = plus
        parts[f"{base}_minus"] = minus
    return HalfWaveState(t=s.t, **parts)


def _hermitian_project(f: SpectralField, tol: float) -> SpectralField:
    defect = f.reality_defect()
    if defect > tol:
        raise ValueError(
            f"reality invariant violated (defect {defect:.3e} > {tol:.1e}); "
            "the trajectory has blown up or the state is inconsistent")
    ri = _reverse_index(f.grid.n)
    mirrored = np.conj(f.coefficients[np.ix_(ri, ri)])
    return SpectralField(f.grid, 0.5 * (f.coefficients + mirrored), True)


def from_halfwave(h: HalfWaveState, reality_tol: float = 1e-8) -> SystemState:
    out = {}
    for base, (uname, duname) in {
        "a0": ("a0", "da0"), "a1": ("a1", "da1"), "a2": ("a2", "da2"),
        "phi": ("phi", "dphi"), "n": ("n", "dn"),
    }.items():
        u, du = _merge(getattr(h, f"{base}_plus"), getattr(h, f"{base}_minus"))
        if base != "phi":
            u = _hermitian_project(u, reality_tol)
            du = _hermitian_project(du, reality_tol)
        out[uname] = u
        out[duname] = du
    return SystemState(t=h.t, **out)


# -- random data of prescribed regularity --------------------------------------


@lru_cache(maxsize=8)
def _mode_order(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid-stable ordering of retained modes: by square shell, then lexicographic.

    For n' > n the ordering over the first (n-1)^2 modes is identical, so a
    fixed seed reproduces the same low-mode draws on every finer grid.
    """
    h = n // 2
    m = np.arange(-h + 1, h)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    m1 = m1.ravel()
    m2 = m2.ravel()
    shell = np.maximum(np.abs(m1), np.abs(m2))
    order = np.lexsort((m2, m1, shell))
    return m1[order], m2[order]


def random_hs_field(grid: GridSpec, s: float, amplitude: float, seed: int,
                    kind: str = "real", band_limit: float | None = None) -> SpectralField:
    """Seeded Gaussian field with coefficients amplitude * <k>^-(s+1+delta) * g_k.

    The H^sigma norm is finite exactly for sigma < s + HS_DECAY_MARGIN as the
    resolution grows.  ``kind`` is "real" (Hermitian-symmetrized) or "complex".
    ``band_limit`` optionally zeroes all modes with |k| above the cutoff.
    """
    if kind not in ("real", "complex"):
        raise ValueError("kind must be 'real' or 'complex'")
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if amplitude == 0.0:
        return SpectralField.zero(grid, reality=(kind == "real"))

    n = grid.n
    m1, m2 = _mode_order(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.standard_normal((m1.size, 2))
    g = (draws[:, 0] + 1j * draws[:, 1]) / np.sqrt(2.0)

    scale = grid.k_fundamental
    k2 = (scale * m1) ** 2 + (scale * m2) ** 2
    weight = amplitude * (1.0 + k2) ** (-(s + 1.0 + HS_DECAY_MARGIN) / 2.0)
    if band_limit is not None:
        weight = np.where(np.sqrt(k2) <= band_limit, weight, 0.0)

    c = np.zeros(grid.shape, dtype=np.complex128)
    c[m1 % n, m2 % n] = weight * g
    if kind == "real":
        ri = _reverse_index(n)
        c = 0.5 * (c + np.conj(c[np.ix_(ri, ri)]))
    return SpectralField.from_coefficients(grid, c, reality=(kind == "real"))


# -- snapshot files -------------------------------------------------------------

_MAGIC = b"MCSHSNAP1\n"


def save_state(path: str, s: SystemState, params: PhysicalParams,
               seed: int | None = None) -> None:
    """Write a byte-deterministic snapshot: magic, JSON header, raw coefficients."""
    header = {
        "grid_n": s.grid.n,
        "grid_length": s.grid.length,
        "dealias_factor": s.grid.dealias_factor,
        "t": s.t,
        "params": {"e": params.e, "kappa": params.kappa, "v": params.v},
        "seed": seed,
        "fields": list(s.field_names()),
        "dtype": "complex128-le",
    }
    blob = json.dumps(header, sort_keys=True).encode() + b"\n"
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for name in s.field_names():
            arr = np.ascontiguousarray(getattr(s, name).coefficients,
                                       dtype="<c16")
            fh.write(arr.tobytes())


def _read_exact(fh: BinaryIO, count: int) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise ValueError("truncated snapshot file")
    return data


def load_state(path: str) -> tuple[SystemState, PhysicalParams, int | None]:
    with open(path, "rb") as fh:
        if _read_exact(fh, len(_MAGIC)) != _MAGIC:
            raise ValueError("not a state snapshot file")
        (hlen,) = struct.unpack("<Q", _read_exact(fh, 8))
        header = json.loads(_read_exact(fh, hlen).decode())
        grid = GridSpec(header["grid_n"], header["grid_length"],
                        header["dealias_factor"])
        nbytes = 16 * grid.n * grid.n
        fields = {}
        for name in header["fields"]:
            arr = np.frombuffer(_read_exact(fh, nbytes), dtype="<c16")
            arr = arr.reshape(grid.shape).astype(np.complex128)
            reality = name in _REAL_FIELDS
            fields[name] = SpectralField(grid, arr, reality)
    params = PhysicalParams(**header["params"])
    state = SystemState(t=header["t"], **fields)
    return state, params, header["seed"]
