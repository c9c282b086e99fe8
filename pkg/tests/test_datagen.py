import numpy as np
import pytest

from mcshlab.spectral import (
    GridSpec,
    SpectralField,
    conj_field,
    constant_field,
    dealiased_product,
    imag_part,
    l2_norm,
    sobolev_norm,
)
from mcshlab.state import PhysicalParams, SystemState, random_hs_field
from mcshlab.datagen import DataRecipe, make_compatible_data, verify_constraints
from mcshlab.gauge import constraint_scales, df_cf_decompose

GRID = GridSpec(n=32)
P = PhysicalParams()


def recipe(seed=42, grid=GRID, **kw):
    defaults = dict(seed=seed, grid=grid, params=P, s_phi=0.55, s_a=0.35,
                    s_n=0.5, amp_phi=1.0, amp_a=1.0, amp_n=1.0)
    defaults.update(kw)
    return DataRecipe(**defaults)


class TestMakeCompatibleData:
    def test_zero_amplitudes_give_vacuum(self):
        s = make_compatible_data(recipe(amp_phi=0.0, amp_a=0.0, amp_n=0.0))
        res = verify_constraints(s, P)
        assert res.lorenz_l2 == 0.0
        assert res.gauss_l2 == 0.0
        for name in s.field_names():
            assert l2_norm(getattr(s, name)) == 0.0

    def test_residuals_at_roundoff(self):
        s = make_compatible_data(recipe())
        res = verify_constraints(s, P)
        lorenz_scale, gauss_scale = constraint_scales(s, P)
        assert res.lorenz_l2 <= 1e-12 * lorenz_scale
        assert res.gauss_l2 <= 1e-12 * gauss_scale

    def test_determinism(self):
        a = make_compatible_data(recipe())
        b = make_compatible_data(recipe())
        for name in a.field_names():
            assert np.array_equal(getattr(a, name).coefficients,
                                  getattr(b, name).coefficients)

    def test_nontrivial_parameters(self):
        p = PhysicalParams(e=1.7, kappa=0.4, v=1.3)
        s = make_compatible_data(recipe(params=p, seed=7))
        res = verify_constraints(s, p)
        _, gauss_scale = constraint_scales(s, p)
        assert res.gauss_l2 <= 1e-12 * gauss_scale

    def test_uncharged_limit(self):
        p = PhysicalParams(e=0.0, kappa=1.0, v=0.0)
        s = make_compatible_data(recipe(params=p, seed=9))
        res = verify_constraints(s, p)
        _, gauss_scale = constraint_scales(s, p)
        assert res.gauss_l2 <= 1e-12 * max(gauss_scale, 1.0)

    def test_residuals_stable_under_grid_doubling(self):
        coarse = verify_constraints(make_compatible_data(recipe()), P)
        fine = verify_constraints(
            make_compatible_data(recipe(grid=GridSpec(n=64))), P)
        # absolute residuals sit at roundoff on both grids; their size is
        # set by the field scale, which the shared low modes dominate
        assert fine.gauss_l2 <= 2.0 * max(coarse.gauss_l2, 1e-13)
        assert fine.lorenz_l2 <= 2.0 * max(coarse.lorenz_l2, 1e-13)

    def test_phi1_adjustment_is_affine_and_small(self):
        # the mean of the charge residual is affine in the shift parameter
        r = recipe(seed=11)
        phi0 = random_hs_field(r.grid, r.s_phi, r.amp_phi, r.seed * 64 + 0,
                               kind="complex")
        phi1 = random_hs_field(r.grid, r.s_phi - 1.0, r.amp_phi,
                               r.seed * 64 + 1, kind="complex")
        a00 = random_hs_field(r.grid, r.s_a, r.amp_a, r.seed * 64 + 4,
                              kind="real")

        def residual_mean(c):
            shifted = phi1 + (1j * c) * phi0
            cur = imag_part(dealiased_product([phi0, conj_field(shifted)]))
            chg = dealiased_product([a00, phi0, conj_field(phi0)])
            return (2 * P.e * cur.mean() + 2 * P.e**2 * chg.mean()).real

        m0, m1, m2 = residual_mean(0.0), residual_mean(1.0), residual_mean(2.0)
        assert abs((m2 - m1) - (m1 - m0)) < 1e-12 * max(abs(m0), 1.0)
        # the produced state realizes the root of that affine function
        s = make_compatible_data(r)
        mass = dealiased_product([phi0, conj_field(phi0)]).mean().real
        c_star = (m0 / (2 * P.e)) / mass
        moved = l2_norm(s.dphi - phi1)
        assert abs(moved - abs(c_star) * l2_norm(phi0)) < 1e-10 * max(moved, 1.0)
        # and the adjustment respects the regularity class
        assert sobolev_norm(s.dphi - phi1, r.s_phi - 1.0) <= \
            abs(c_star) * sobolev_norm(phi0, r.s_phi - 1.0) + 1e-12

    def test_divergence_free_part_untouched(self):
        r = recipe(seed=13)
        raw_a11 = random_hs_field(r.grid, r.s_a - 1.0, r.amp_a, r.seed * 64 + 7,
                                  kind="real")
        raw_a21 = random_hs_field(r.grid, r.s_a - 1.0, r.amp_a, r.seed * 64 + 8,
                                  kind="real")
        s = make_compatible_data(r)
        df_raw, _, _ = df_cf_decompose(raw_a11, raw_a21)
        df_out, _, _ = df_cf_decompose(s.da1, s.da2)
        for got, want in zip(df_out, df_raw):
            assert l2_norm(got - want) < 1e-12 * max(l2_norm(want), 1.0)

    def test_band_limit_respected(self):
        s = make_compatible_data(recipe(band_limit=4.0, seed=17))
        w = GRID.waves()
        # the elliptic correction only reshuffles content inside the
        # quadratically enlarged band of the drawn fields
        assert np.all(np.abs(s.phi.coefficients[w.k_abs > 4.0]) == 0.0)
        assert np.all(np.abs(s.a1.coefficients[w.k_abs > 4.0]) == 0.0)


class TestVerifyConstraints:
    def test_vacuum_zeros(self):
        s = make_compatible_data(recipe(amp_phi=0.0, amp_a=0.0, amp_n=0.0))
        res = verify_constraints(s, P)
        assert (res.lorenz_l2, res.gauss_l2, res.v_l2) == (0.0, 0.0, 0.0)
        assert res.w_wave_residual_l2 is None

    def test_constant_violation_norm(self):
        # da0 = 1, everything else zero: the residual is the constant one,
        # whose norm under the mean-square normalization is exactly one
        fields = {name: SpectralField.zero(GRID, reality=True)
                  for name in ("a0", "a1", "a2", "da0", "da1", "da2",
                               "n", "dn")}
        fields["phi"] = SpectralField.zero(GRID, reality=False)
        fields["dphi"] = SpectralField.zero(GRID, reality=False)
        fields["da0"] = constant_field(GRID, 1.0)
        s = SystemState(t=0.0, **fields)
        res = verify_constraints(s, P)
        assert abs(res.lorenz_l2 - 1.0) < 1e-15
        assert res.gauss_l2 == 0.0

    def test_recipe_validation(self):
        with pytest.raises(ValueError):
            recipe(amp_phi=-1.0)
        with pytest.raises(ValueError):
            recipe(s_phi=float("nan"))
