"""Fractional Laplacian algebra and the full-data reconstruction formula."""

import numpy as np
import pytest

import roitomo as rt
from roitomo.errors import ExponentError
from roitomo.fraclap import mass_from_sinogram, reconstruct_raw_scalar

from util import random_field, zero_mean


@pytest.fixture(scope="module")
def grid():
    return rt.Grid(2, 64, 1.0)


def test_single_mode_multiplier(grid):
    # flagged integer exponent on a pure cosine mode: multiply by |xi0|^2
    xi0 = grid.freq_axis(0)[3]
    x = grid.coords()[0]
    f = rt.ScalarField(grid, np.cos(xi0 * x))
    out = rt.fractional_laplacian(f, 1.0, allow_integer=True)
    assert np.abs(out.values - xi0**2 * f.values).max() < 1e-10 * xi0**2


def test_integer_exponent_rejected(grid):
    f = random_field(grid)
    with pytest.raises(ExponentError):
        rt.fractional_laplacian(f, 1.0)
    with pytest.raises(ExponentError):
        rt.fractional_laplacian(f, -1.2)  # below -n/2


def test_inverse_pair(grid):
    f = zero_mean(random_field(grid, 1))
    back = rt.fractional_laplacian(rt.fractional_laplacian(f, 0.35), -0.35)
    assert (back - f).norm() / f.norm() < 1e-10


def test_semigroup(grid):
    f = zero_mean(random_field(grid, 2))
    a = rt.fractional_laplacian(rt.fractional_laplacian(f, 0.3), 0.4)
    b = rt.fractional_laplacian(f, 0.7)
    assert (a - b).norm() / b.norm() < 1e-10


def test_realness(grid):
    f = random_field(grid, 3)
    _, residue = rt.fractional_laplacian(f, 0.5, return_imag_residue=True)
    assert residue < 1e-12


def test_mean_projected_out(grid):
    f = random_field(grid, 4)
    out = rt.fractional_laplacian(f, -0.5)
    assert abs(out.values.mean()) < 1e-12 * np.abs(out.values).max()


def test_constants_validation():
    with pytest.raises(ValueError):
        rt.ReconstructionConstants(-1.0, 1.0, "analytic", 1.0, 1.0)
    consts = rt.analytic_constants(2)
    assert consts.c0 == pytest.approx(1.0 / (4.0 * np.pi))
    assert consts.c1 == pytest.approx(1.0 / (4.0 * np.pi))
    assert rt.analytic_c1(3) == pytest.approx(2.0 * rt.analytic_c0(3))


def test_mass_from_sinogram():
    g = rt.Grid(2, 128, 1.0)
    ls = rt.make_lineset(g, 90, 192)
    sigma = 0.15
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=sigma), g)
    mass = mass_from_sinogram(rt.xray_forward(f, ls), 2)
    assert mass == pytest.approx(2.0 * np.pi * sigma**2, rel=1e-3)


@pytest.fixture(scope="module")
def recon_setup():
    g = rt.Grid(2, 128, 1.0)
    ls = rt.make_lineset(g, 180, 192)
    consts = rt.calibrate_constants(g, ls)
    return g, ls, consts


def test_calibrated_c0_matches_analytic(recon_setup):
    _, _, consts = recon_setup
    assert abs(consts.c0 - consts.analytic_c0) / consts.analytic_c0 < 0.03
    assert abs(consts.c1 - consts.analytic_c1) / consts.analytic_c1 < 0.03
    assert consts.provenance == "calibrated"


def test_calibration_phantom_independence(recon_setup):
    g, ls, consts = recon_setup
    other = rt.calibrate_constants(g, ls, sigma=0.2)
    assert abs(other.c0 - consts.c0) / consts.c0 < 0.01


def test_calibration_residual(recon_setup):
    g, ls, consts = recon_setup
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.15), g)
    raw = reconstruct_raw_scalar(rt.xray_forward(f, ls), g)
    residual = (consts.c0 * raw - f).norm() / f.norm()
    assert residual < 0.02


def test_reconstruct_zero(recon_setup):
    g, ls, consts = recon_setup
    zero = rt.ScalarField(g, np.zeros(g.shape))
    rec = rt.reconstruct_full_scalar(rt.xray_forward(zero, ls), g, consts)
    assert np.abs(rec.values).max() == 0.0


def test_reconstruct_gaussian_roundtrip(recon_setup):
    g, ls, consts = recon_setup
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.15), g)
    rec = rt.reconstruct_full_scalar(rt.xray_forward(f, ls), g, consts)
    assert (rec - f).norm() / f.norm() < 0.02


def test_reconstruct_disk_plateau(recon_setup):
    g, ls, consts = recon_setup
    f = rt.sample_phantom(rt.PhantomSpec.disk_indicator(radius=0.5), g)
    rec = rt.reconstruct_full_scalar(rt.xray_forward(f, ls), g, consts)
    r = np.sqrt(g.radius_sq())
    inner = r < 0.5 - 4.0 * g.h
    assert np.abs(rec.values[inner] - 1.0).max() < 0.05


def test_reconstruct_linear_in_data(recon_setup):
    g, ls, consts = recon_setup
    f1 = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.15), g)
    f2 = rt.sample_phantom(rt.PhantomSpec.gaussian(center=(0.3, -0.2), sigma=0.12), g)
    s1 = rt.xray_forward(f1, ls)
    s2 = rt.xray_forward(f2, ls)
    combo = rt.Sinogram(ls, 2.0 * s1.values - 0.5 * s2.values)
    lhs = rt.reconstruct_full_scalar(combo, g, consts)
    rhs = 2.0 * rt.reconstruct_full_scalar(s1, g, consts) - 0.5 * rt.reconstruct_full_scalar(s2, g, consts)
    assert (lhs - rhs).norm() < 1e-10 * rhs.norm()


def test_reconstruct_warns_on_filtered_lineset(recon_setup):
    g, ls, consts = recon_setup
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.15), g)
    roi = rt.disk_mask(g, (0.0, 0.0), 0.4)
    kept = rt.filter_roi(ls, roi)
    sino = rt.xray_forward(f, kept)
    with pytest.warns(UserWarning):
        with pytest.raises(ValueError):
            rt.reconstruct_full_scalar(sino, g, consts)
