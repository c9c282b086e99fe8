import numpy as np
import pytest

from mcshlab.spectral import (
    GridSpec,
    SpectralField,
    apply_bessel_multiplier,
    conj_field,
    constant_field,
    dealiased_product,
    imag_part,
    l2_norm,
    laplacian,
    inverse_laplacian_zero_mean,
    real_part,
    resample,
    riesz,
    sobolev_norm,
    spatial_derivative,
)

GRID = GridSpec(n=32)


def mode_field(grid, m1, m2, amp=1.0):
    c = np.zeros(grid.shape, dtype=np.complex128)
    c[m1 % grid.n, m2 % grid.n] = amp
    return SpectralField.from_coefficients(grid, c, reality=False)


def rand_field(grid, seed, reality=True, kmax=None):
    rng = np.random.default_rng(seed)
    vals = rng.standard_normal(grid.shape)
    if not reality:
        vals = vals + 1j * rng.standard_normal(grid.shape)
    f = SpectralField.from_physical(grid, vals)
    if kmax is not None:
        w = grid.waves()
        mask = w.k_abs <= kmax
        f = SpectralField.from_coefficients(grid, f.coefficients * mask, f.reality)
    return f


def rel_err(f, g):
    num = np.max(np.abs(f.coefficients - g.coefficients))
    den = max(np.max(np.abs(g.coefficients)), 1e-300)
    return num / den


class TestGridSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(n=4)
        with pytest.raises(ValueError):
            GridSpec(n=24)
        with pytest.raises(ValueError):
            GridSpec(n=16, length=-1.0)

    def test_wave_table_invariants(self):
        w = GRID.waves()
        assert np.all(w.bessel >= 1.0)
        assert np.all(w.bessel >= w.k_abs)


class TestRoundTrip:
    @pytest.mark.parametrize("n", [8, 16, 64, 128])
    def test_physical_spectral_round_trip(self, n):
        grid = GridSpec(n=n)
        rng = np.random.default_rng(n)
        vals = rng.standard_normal(grid.shape)
        # zero the Nyquist content by construction: band-limit the input
        f = SpectralField.from_physical(grid, vals)
        back = SpectralField.from_physical(grid, f.physical())
        assert rel_err(back, f) < 1e-13

    def test_reality_flag_and_symmetry(self):
        f = rand_field(GRID, 3)
        assert f.reality
        assert f.reality_defect() < 1e-12
        assert np.max(np.abs(f.physical().imag)) < 1e-12 * f.max_abs()


class TestBesselMultiplier:
    def test_single_mode(self):
        f = mode_field(GRID, 3, 4)
        g = apply_bessel_multiplier(f, -1.0)
        expect = 1.0 / np.sqrt(26.0)
        assert abs(g.coefficients[3, 4] - expect) < 1e-14

    def test_identity_at_zero_power(self):
        f = rand_field(GRID, 5)
        assert rel_err(apply_bessel_multiplier(f, 0.0), f) < 1e-15

    def test_inverse_pair(self):
        f = rand_field(GRID, 7)
        g = apply_bessel_multiplier(apply_bessel_multiplier(f, 1.7), -1.7)
        assert rel_err(g, f) < 1e-13

    def test_composition_across_powers(self):
        f = rand_field(GRID, 11)
        one = apply_bessel_multiplier(f, 0.9 + 0.6)
        two = apply_bessel_multiplier(apply_bessel_multiplier(f, 0.9), 0.6)
        assert rel_err(one, two) < 1e-13


class TestRiesz:
    def test_single_mode(self):
        f = mode_field(GRID, 3, 4)
        g = riesz(f, 1)
        assert abs(g.coefficients[3, 4] - 3j / np.sqrt(26.0)) < 1e-14

    def test_constant_maps_to_zero(self):
        f = constant_field(GRID, 2.5)
        assert l2_norm(riesz(f, 2)) == 0.0

    def test_symbol_identity(self):
        # applying R_j twice gives symbol (i k_j)^2/<k>^2 = -k_j^2/<k>^2, so
        # <D>^-2 - R1^2 - R2^2 = identity since (1 + |k|^2)/<k>^2 = 1
        f = rand_field(GRID, 13)
        total = (apply_bessel_multiplier(f, -2.0)
                 - riesz(riesz(f, 1), 1) - riesz(riesz(f, 2), 2))
        assert rel_err(total, f) < 1e-13

    def test_preserves_reality(self):
        f = rand_field(GRID, 17)
        g = riesz(f, 1)
        assert g.reality and g.reality_defect() < 1e-12

    def test_invalid_axis(self):
        with pytest.raises(ValueError):
            riesz(rand_field(GRID, 1), 3)


class TestDerivative:
    def test_sine_mode(self):
        grid = GRID
        x = np.arange(grid.n) * grid.length / grid.n
        xx = x[:, None] + 0.0 * x[None, :]
        f = SpectralField.from_physical(grid, np.sin(3 * xx))
        g = spatial_derivative(f, 1)
        expect = 3 * np.cos(3 * xx)
        assert np.max(np.abs(g.physical().real - expect)) < 1e-12

    def test_constant(self):
        assert l2_norm(spatial_derivative(constant_field(GRID, 1.0), 1)) == 0.0

    def test_mixed_partials_commute(self):
        f = rand_field(GRID, 19)
        a = spatial_derivative(spatial_derivative(f, 1), 2)
        b = spatial_derivative(spatial_derivative(f, 2), 1)
        assert rel_err(a, b) < 1e-15

    def test_laplacian_matches_derivatives(self):
        f = rand_field(GRID, 23)
        lhs = laplacian(f)
        rhs = (spatial_derivative(spatial_derivative(f, 1), 1)
               + spatial_derivative(spatial_derivative(f, 2), 2))
        assert rel_err(lhs, rhs) < 1e-13

    def test_poisson_solve(self):
        f = rand_field(GRID, 29)
        f = f - constant_field(GRID, f.mean())
        u = inverse_laplacian_zero_mean(f)
        assert rel_err(laplacian(u), f) < 1e-12
        assert abs(u.mean()) == 0.0


class TestDealiasedProduct:
    def test_mode_addition(self):
        f = mode_field(GRID, 1, 0)
        g = mode_field(GRID, 2, 0)
        p = dealiased_product([f, g])
        assert abs(p.coefficients[3, 0] - 1.0) < 1e-13
        other = p.coefficients.copy()
        other[3, 0] = 0.0
        assert np.max(np.abs(other)) < 1e-15

    def test_identity_factor(self):
        f = rand_field(GRID, 31)
        ones = constant_field(GRID, 1.0)
        assert rel_err(dealiased_product([f, ones]), f) < 1e-13

    def test_against_brute_force_convolution(self):
        # oracle: direct coefficient convolution on a small grid
        grid = GridSpec(n=16)
        f = rand_field(grid, 37, reality=False, kmax=5)
        g = rand_field(grid, 41, reality=False, kmax=5)
        n = grid.n
        conv = np.zeros((n, n), dtype=np.complex128)
        idx = np.fft.fftfreq(n, 1.0 / n).astype(int)
        cf, cg = f.coefficients, g.coefficients
        for i1, m1 in enumerate(idx):
            for j1, m2 in enumerate(idx):
                if cf[i1, j1] == 0:
                    continue
                for i2, q1 in enumerate(idx):
                    for j2, q2 in enumerate(idx):
                        if cg[i2, j2] == 0:
                            continue
                        r1, r2 = m1 + q1, m2 + q2
                        if abs(r1) < n // 2 and abs(r2) < n // 2:
                            conv[r1 % n, r2 % n] += cf[i1, j1] * cg[i2, j2]
                        # modes beyond the retained band are truncated
        p = dealiased_product([f, g])
        assert np.max(np.abs(p.coefficients - conv)) < 1e-12

    def test_triple_product_exact(self):
        # cubic products are alias-free on the retained band at factor 2
        grid = GridSpec(n=16)
        f = rand_field(grid, 43, kmax=4)
        g = rand_field(grid, 47, kmax=4)
        h = rand_field(grid, 53, kmax=4)
        p3 = dealiased_product([f, g, h])
        fine = GridSpec(n=64)
        q3 = dealiased_product([resample(f, fine), resample(g, fine),
                                resample(h, fine)])
        assert np.max(np.abs(p3.coefficients
                             - resample(q3, grid).coefficients)) < 1e-12

    def test_symmetry(self):
        f = rand_field(GRID, 59)
        g = rand_field(GRID, 61)
        a = dealiased_product([f, g])
        b = dealiased_product([g, f])
        assert rel_err(a, b) < 1e-14

    def test_grid_mismatch(self):
        with pytest.raises(ValueError):
            dealiased_product([rand_field(GRID, 1), rand_field(GridSpec(n=64), 1)])

    def test_conj_and_parts(self):
        f = rand_field(GRID, 67, reality=False)
        c = conj_field(f)
        assert np.max(np.abs(c.physical() - np.conj(f.physical()))) < 1e-12
        re = real_part(f)
        im = imag_part(f)
        assert re.reality and im.reality
        assert np.max(np.abs(re.physical().real - f.physical().real)) < 1e-12
        assert np.max(np.abs(im.physical().real - f.physical().imag)) < 1e-12


class TestSobolevNorm:
    def test_single_mode(self):
        f = mode_field(GRID, 3, 4, amp=0.7)
        assert abs(sobolev_norm(f, 1.0) - 0.7 * np.sqrt(26.0)) < 1e-13

    def test_parseval_at_zero(self):
        f = rand_field(GRID, 71)
        grid_ms = np.sqrt(np.mean(np.abs(f.physical()) ** 2))
        assert abs(sobolev_norm(f, 0.0) - grid_ms) < 1e-12

    def test_multiplier_composition(self):
        f = rand_field(GRID, 73)
        lhs = sobolev_norm(apply_bessel_multiplier(f, 0.8), 0.9)
        rhs = sobolev_norm(f, 1.7)
        assert abs(lhs - rhs) < 1e-12 * max(rhs, 1.0)


class TestResample:
    def test_embed_then_restrict(self):
        f = rand_field(GRID, 79)
        fine = resample(f, GridSpec(n=128))
        back = resample(fine, GRID)
        assert rel_err(back, f) < 1e-14

    def test_norms_preserved_under_embedding(self):
        f = rand_field(GRID, 83)
        fine = resample(f, GridSpec(n=64))
        assert abs(sobolev_norm(fine, 1.3) - sobolev_norm(f, 1.3)) < 1e-12
