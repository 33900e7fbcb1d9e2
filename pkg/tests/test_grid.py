"""Grid geometry, fields, phantoms, and the spectral transform."""

import numpy as np
import pytest

import roitomo as rt
from roitomo import diffops
from roitomo.grid import from_spectrum_complex

from util import random_field, rel_l2


@pytest.fixture(scope="module")
def grid():
    return rt.Grid(2, 64, 1.0)


def test_grid_invariants():
    g = rt.Grid(2, 128, 1.0)
    assert g.h == pytest.approx(2.0 / 128)
    assert g.axis(0)[64] == pytest.approx(0.0)  # origin is a node
    with pytest.raises(ValueError):
        rt.Grid(2, 6, 1.0)
    with pytest.raises(ValueError):
        rt.Grid(2, (64, 32), (1.0, 1.0))  # unequal spacing
    with pytest.raises(ValueError):
        rt.Grid(2, 64, 1.0, pad_factor=0)


def test_field_validation(grid):
    with pytest.raises(rt.GridMismatchError):
        rt.ScalarField(grid, np.zeros((4, 4)))
    with pytest.raises(ValueError):
        rt.ScalarField(grid, np.full(grid.shape, np.nan))


def test_gaussian_peak_at_origin(grid):
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(center=(0, 0), sigma=0.15), grid)
    assert f.values[grid.size[0] // 2, grid.size[1] // 2] == 1.0


def test_quadratic_patch_third_differences_vanish(grid):
    spec = rt.PhantomSpec.patch(rule="polynomial", degree=2, plateau_radius=0.45,
                                support_radius=0.7, v_radius=0.25)
    f = rt.sample_phantom(spec, grid)
    region = spec.region(grid)
    for axis in (0, 1):
        op = diffops.partial_op(2, axis, 3)
        action = diffops.apply_fd(op, f, region)
        assert np.abs(action).max() <= 1e-10 * spec.amplitude


def test_disk_indicator_node_fraction():
    # area-counting oracle: node fraction approximates disk area / box area
    g = rt.Grid(2, 256, 1.0)
    f = rt.sample_phantom(rt.PhantomSpec.disk_indicator(radius=0.5), g)
    frac = f.values.mean()
    expected = np.pi * 0.25 / 4.0
    assert abs(frac - expected) / expected < 0.02


def test_phantom_geometry_error(grid):
    with pytest.raises(rt.GeometryError):
        rt.sample_phantom(rt.PhantomSpec.gaussian(center=(0.9, 0.0), sigma=0.2), grid)
    with pytest.raises(rt.GeometryError):
        rt.sample_phantom(rt.PhantomSpec.disk_indicator(radius=0.95), grid)


def test_inner_product_basics(grid):
    zero = rt.ScalarField(grid, np.zeros(grid.shape))
    f = random_field(grid, 1)
    assert rt.inner_product(f, zero) == 0.0
    one = rt.ScalarField(grid, np.ones(grid.shape))
    assert rt.inner_product(one, one) == pytest.approx(4.0, abs=1e-12)


def test_inner_product_refined_quadrature_oracle():
    # oracle: the same integrand sampled on a 512 grid
    coarse = rt.Grid(2, 128, 1.0)
    fine = rt.Grid(2, 512, 1.0)
    spec = rt.PhantomSpec.gaussian(sigma=0.15)
    fc = rt.sample_phantom(spec, coarse)
    ff = rt.sample_phantom(spec, fine)
    oracle = rt.inner_product(ff, ff)
    value = rt.inner_product(fc, fc)
    assert abs(value - oracle) / oracle < 0.005


def test_inner_product_grid_mismatch(grid):
    other = rt.Grid(2, 128, 1.0)
    with pytest.raises(rt.GridMismatchError):
        rt.inner_product(random_field(grid), random_field(other))


def test_spectral_roundtrip(grid):
    f = random_field(grid, 2)
    back = rt.from_spectrum(rt.to_spectrum(f), grid)
    assert rel_l2(back.values, f.values) < 1e-12


def test_spectrum_of_constant_is_dc_only(grid):
    one = rt.ScalarField(grid, np.ones(grid.shape))
    spec = rt.to_spectrum(one)
    dc = spec[0, 0]
    spec[0, 0] = 0.0
    # the box is constant but the padding is not, so off-DC bins only carry
    # the pad-window; on the unpadded grid the spectrum is exactly one bin
    g1 = rt.Grid(2, 64, 1.0, pad_factor=1)
    spec1 = rt.to_spectrum(rt.ScalarField(g1, np.ones(g1.shape)))
    assert abs(spec1[0, 0]) == pytest.approx(4.0, rel=1e-12)
    spec1[0, 0] = 0.0
    assert np.abs(spec1).max() < 1e-12
    assert abs(dc) > 0


def test_single_bin_spectrum_is_cosine(grid):
    pg = grid.pad_grid()
    period = 2.0 * pg.extent[0]
    spec = np.zeros(pg.shape, dtype=complex)
    k = 5
    xi0 = grid.freq_axis(0, padded=True)[k]
    # Hermitian pair scaled so the inverse transform is exactly cos(xi0 x)
    spec[k, 0] = period**2 / 2.0
    spec[-k, 0] = period**2 / 2.0
    vals = from_spectrum_complex(spec, grid)
    x = grid.coords()[0]
    assert np.abs(vals.real - np.cos(xi0 * x)).max() < 1e-12
    assert np.abs(vals.imag).max() < 1e-12


def test_parseval(grid):
    f = random_field(grid, 3)
    g2 = random_field(grid, 4)
    direct = rt.inner_product(f, g2)
    spectral = rt.spectral_inner(rt.to_spectrum(f), rt.to_spectrum(g2), grid)
    assert abs(direct - spectral) / abs(direct) < 1e-10


def test_linearity_of_sampling(grid):
    f = random_field(grid, 5)
    g2 = random_field(grid, 6)
    lhs = (2.0 * f + (-3.0) * g2).values
    assert np.allclose(lhs, 2.0 * f.values - 3.0 * g2.values, atol=0, rtol=1e-15)


def test_region_mask_interior():
    g = rt.Grid(2, 64, 1.0)
    mask = rt.disk_mask(g, (0, 0), 0.5)
    inner = mask.interior(4 * g.h)
    assert inner.sum() < mask.inside.sum()
    assert not (inner & ~mask.inside).any()  # interior(mask) inside mask
    assert rt.disk_mask(g, (0, 0), 0.01).inside.sum() <= 1
    with pytest.raises(rt.RegionError):
        rt.disk_mask(g, (0, 0), 0.05).require_interior(0.2)


def test_patch_plateau_exact_rule():
    g = rt.Grid(2, 96, 1.0)
    spec = rt.PhantomSpec.patch(rule="coordinate_independent", axis=0,
                                plateau_radius=0.4, support_radius=0.7,
                                v_radius=0.2)
    f = rt.sample_phantom(spec, g)
    mesh = g.coords()
    r = np.sqrt(g.radius_sq())
    t = mesh[1]
    rule = 0.3 + 0.8 * t - 0.5 * t**2 + 0.9 * t**3
    inside = r < 0.4 - 1e-9
    assert np.abs(f.values[inside] - rule[inside]).max() < 1e-14
    outside = r > 0.72
    assert np.abs(f.values[outside]).max() == 0.0
