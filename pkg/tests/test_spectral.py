"""Spectral-density models, memory kernels, and the rescaled kernel g(x)."""

import math

import numpy as np
import pytest

from zenoscope import (
    KernelMode,
    MemoryKernel,
    Shape,
    SpectralDensity,
    kernel_value,
    load_tabulated_profile,
    scaled_kernel_g,
    sdf_value,
)

GAMMA = 1.3
LAM = 2.7
D0 = GAMMA / (2 * math.pi)

ALL_NAMED = (Shape.LORENTZIAN, Shape.GAUSSIAN, Shape.RECTANGULAR, Shape.DOUBLE_LORENTZIAN)


def named_density(shape, lam=LAM, gamma=GAMMA, **kw):
    return SpectralDensity(shape, gamma=gamma, lam=lam, **kw)


class TestSpectralDensity:
    def test_lorentzian_peak_height(self):
        d = SpectralDensity.lorentzian(GAMMA, LAM, omega0=1.5)
        assert sdf_value(d, 1.5) == pytest.approx(D0, rel=1e-14)

    def test_lorentzian_half_height_at_width(self):
        d = SpectralDensity.lorentzian(GAMMA, LAM)
        assert sdf_value(d, LAM) == pytest.approx(D0 / 2, rel=1e-14)

    def test_rectangular_support(self):
        d = SpectralDensity.rectangular(GAMMA, LAM, omega0=0.4)
        assert sdf_value(d, 0.4 + 0.6 * LAM) == 0.0
        assert sdf_value(d, 0.4 - 0.6 * LAM) == 0.0
        assert sdf_value(d, 0.4 + 0.4 * LAM) == pytest.approx(D0, rel=1e-14)

    def test_gaussian_one_sigma(self):
        d = SpectralDensity.gaussian(GAMMA, LAM)
        for sign in (+1, -1):
            assert sdf_value(d, sign * LAM) == pytest.approx(D0 * math.exp(-0.5), rel=1e-14)

    def test_double_lorentzian_peak_positions(self):
        b = 1.5
        d = SpectralDensity.double_lorentzian(GAMMA, LAM, b=b)
        on_peak = sdf_value(d, b * LAM)
        expected = D0 * (1.0 + 1.0 / (1.0 + 4.0 * b * b))
        assert on_peak == pytest.approx(expected, rel=1e-14)

    def test_nonnegative_everywhere(self):
        omega = np.linspace(-40, 40, 1001)
        for shape in ALL_NAMED:
            assert np.all(sdf_value(named_density(shape), omega) >= 0)

    def test_width_deformation_is_pure_rescaling(self):
        d = SpectralDensity.gaussian(GAMMA, LAM, omega0=0.7)
        wide = d.with_width(4 * LAM)
        w = 0.83
        assert sdf_value(wide, 0.7 + w * wide.lam) == pytest.approx(
            sdf_value(d, 0.7 + w * d.lam), rel=1e-14)

    @pytest.mark.parametrize("kwargs", [
        dict(gamma=0.0, lam=1.0),
        dict(gamma=-1.0, lam=1.0),
        dict(gamma=1.0, lam=0.0),
        dict(gamma=1.0, lam=-2.0),
        dict(gamma=1.0, lam=1.0, b=-0.1),
    ])
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SpectralDensity(Shape.LORENTZIAN, **kwargs)

    def test_table_only_for_tabulated(self):
        with pytest.raises(ValueError, match="tabulated"):
            SpectralDensity(Shape.GAUSSIAN, gamma=1, lam=1, table=[[0, 1], [1, 0]])
        with pytest.raises(ValueError, match="table"):
            SpectralDensity(Shape.TABULATED, gamma=1, lam=1)


class TestTabulated:
    def profile(self):
        w = np.linspace(-3, 3, 61)
        return np.column_stack([w, np.exp(-0.5 * w ** 2)])

    def test_interpolation_inside_and_zero_outside(self):
        d = SpectralDensity.tabulated(GAMMA, LAM, self.profile())
        assert sdf_value(d, 0.0) == pytest.approx(D0, rel=1e-12)
        # midway between samples: linear interpolation
        w = np.asarray(self.profile())
        mid = 0.5 * (w[30, 0] + w[31, 0])
        expected = D0 * 0.5 * (w[30, 1] + w[31, 1])
        assert sdf_value(d, mid * LAM) == pytest.approx(expected, rel=1e-12)
        assert sdf_value(d, 3.5 * LAM) == 0.0
        assert sdf_value(d, -3.5 * LAM) == 0.0

    def test_rejects_bad_tables(self):
        with pytest.raises(ValueError, match="increasing"):
            SpectralDensity.tabulated(1, 1, [[0, 1], [0, 2]])
        with pytest.raises(ValueError, match="nonnegative"):
            SpectralDensity.tabulated(1, 1, [[0, 1], [1, -0.5]])
        with pytest.raises(ValueError):
            SpectralDensity.tabulated(1, 1, [[0, 1]])

    def test_load_profile_roundtrip(self, tmp_path):
        path = tmp_path / "profile.csv"
        rows = self.profile()
        with open(path, "w") as fh:
            fh.write("omega_tilde,d_tilde\n")
            for w, v in rows:
                fh.write(f"{w},{v}\n")
        table = load_tabulated_profile(path)
        np.testing.assert_allclose(table, rows)

    def test_load_profile_rejects_bad_header(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("omega,d\n0,1\n1,0\n")
        with pytest.raises(ValueError, match="header"):
            load_tabulated_profile(path)

    def test_load_profile_rejects_bad_row(self, tmp_path):
        path = tmp_path / "profile.csv"
        path.write_text("omega_tilde,d_tilde\n0,1,7\n")
        with pytest.raises(ValueError, match="two comma-separated"):
            load_tabulated_profile(path)

    def test_tabulated_matches_analytic_lorentzian(self):
        # finely sampled Lorentzian profile reproduces the closed-form kernel
        # up to the tail mass missing beyond the table edge,
        # 2*D0*lam*(pi/2 - arctan 60) ~ 0.033*D0*lam
        w = np.linspace(-60, 60, 24001)
        d = SpectralDensity.tabulated(GAMMA, LAM, np.column_stack([w, 1 / (1 + w ** 2)]))
        ref = MemoryKernel(SpectralDensity.lorentzian(GAMMA, LAM))
        u = np.linspace(0, 3 / LAM, 16)
        dev = np.max(np.abs(kernel_value(MemoryKernel(d), u) - kernel_value(ref, u)))
        assert dev < 1.05 * 2 * (math.pi / 2 - math.atan(60)) * D0 * LAM
        assert dev > 0  # truncation is real; this is not an identity check

    def test_tabulated_has_no_analytic_mode(self):
        d = SpectralDensity.tabulated(GAMMA, LAM, self.profile())
        with pytest.raises(ValueError, match="analytic"):
            MemoryKernel(d, mode=KernelMode.ANALYTIC)
        assert MemoryKernel(d).mode is KernelMode.QUADRATURE


class TestKernelValue:
    def test_lorentzian_at_zero(self):
        k = MemoryKernel(named_density(Shape.LORENTZIAN))
        assert kernel_value(k, 0.0) == pytest.approx(-0.5j * GAMMA * LAM, rel=1e-14)

    def test_gaussian_at_zero(self):
        k = MemoryKernel(named_density(Shape.GAUSSIAN))
        assert kernel_value(k, 0.0) == pytest.approx(
            -1j * GAMMA * LAM / math.sqrt(2 * math.pi), rel=1e-14)

    def test_rectangular_small_time_limit(self):
        k = MemoryKernel(named_density(Shape.RECTANGULAR))
        limit = -1j * GAMMA * LAM / (2 * math.pi)
        assert kernel_value(k, 0.0) == pytest.approx(limit, rel=1e-14)
        assert kernel_value(k, 1e-9 / LAM) == pytest.approx(limit, rel=1e-6)

    def test_lorentzian_decay_and_phase(self):
        d = SpectralDensity.lorentzian(GAMMA, LAM, c=0.4)
        k = MemoryKernel(d)
        u = 0.9
        expected = -0.5j * GAMMA * LAM * np.exp(1j * 0.4 * LAM * u) * np.exp(-LAM * u)
        assert kernel_value(k, u) == pytest.approx(expected, rel=1e-13)

    def test_negative_time_rejected(self):
        k = MemoryKernel(named_density(Shape.GAUSSIAN))
        with pytest.raises(ValueError):
            kernel_value(k, -0.1)
        with pytest.raises(ValueError):
            scaled_kernel_g(k, -1.0)

    def test_magnitude_bounds(self):
        u = np.linspace(0, 20 / LAM, 200)
        for shape in (Shape.LORENTZIAN, Shape.GAUSSIAN):
            k = MemoryKernel(named_density(shape))
            mags = np.abs(kernel_value(k, u))
            assert np.all(mags <= abs(kernel_value(k, 0.0)) * (1 + 1e-12))
        for shape in (Shape.RECTANGULAR, Shape.DOUBLE_LORENTZIAN):
            k = MemoryKernel(named_density(shape))
            assert np.all(np.abs(kernel_value(k, u)) <= GAMMA * LAM)

    @pytest.mark.parametrize("shape", ALL_NAMED)
    @pytest.mark.parametrize("c", [0.0, 0.3])
    def test_quadrature_agrees_with_analytic(self, shape, c):
        d = named_density(shape, c=c, **({"b": 1.4} if shape is Shape.DOUBLE_LORENTZIAN else {}))
        analytic = MemoryKernel(d)
        quadrature = MemoryKernel(d, mode=KernelMode.QUADRATURE)
        u = np.linspace(0, 12 / LAM, 49)
        dev = np.max(np.abs(kernel_value(analytic, u) - kernel_value(quadrature, u)))
        assert dev < 1e-6 * GAMMA * LAM


class TestScaledKernel:
    def test_lorentzian_g_at_zero(self):
        k = MemoryKernel(named_density(Shape.LORENTZIAN))
        assert scaled_kernel_g(k, 0.0) == pytest.approx(-0.5j * GAMMA, rel=1e-14)

    def test_double_lorentzian_closed_form(self):
        k = MemoryKernel(SpectralDensity.double_lorentzian(GAMMA, LAM, b=1.0))
        x = np.linspace(0, 8, 33)
        expected = -1j * GAMMA * np.exp(-x) * np.cos(x)
        np.testing.assert_allclose(scaled_kernel_g(k, x), expected, atol=1e-14 * GAMMA)

    @pytest.mark.parametrize("shape", ALL_NAMED)
    def test_width_independence(self, shape):
        x = np.linspace(0, 20, 101)
        g_narrow = scaled_kernel_g(MemoryKernel(named_density(shape, lam=5 * GAMMA)), x)
        g_wide = scaled_kernel_g(MemoryKernel(named_density(shape, lam=100 * GAMMA)), x)
        assert np.max(np.abs(g_narrow - g_wide)) < 1e-12 * GAMMA

    def test_width_independence_quadrature(self):
        x = np.array([0.0, 0.3, 2.0, 11.0])
        for lam_a, lam_b in [(5 * GAMMA, 100 * GAMMA)]:
            ga = scaled_kernel_g(
                MemoryKernel(named_density(Shape.LORENTZIAN, lam=lam_a), mode="quadrature"), x)
            gb = scaled_kernel_g(
                MemoryKernel(named_density(Shape.LORENTZIAN, lam=lam_b), mode="quadrature"), x)
            assert np.max(np.abs(ga - gb)) < 1e-12 * GAMMA

    def test_scalar_matches_array(self):
        k = MemoryKernel(named_density(Shape.GAUSSIAN, c=0.2))
        xs = np.array([0.0, 0.7, 3.0])
        arr = scaled_kernel_g(k, xs)
        for i, x in enumerate(xs):
            assert scaled_kernel_g(k, float(x)) == arr[i]
