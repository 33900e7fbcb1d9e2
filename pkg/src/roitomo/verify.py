"""Cross-module property suite behind the ``verify`` command.

Structural identities (transposes, spectral algebra) are checked at a
moderate fixed size since they hold to round-off at any resolution; the two
resolution-dependent agreements (normal-operator routes and the curl
identity) run at the configured size with thresholds stated for the default
256-grid and relaxed proportionally on coarser grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fraclap, xray_scalar, xray_vector
from .grid import (
    Grid,
    ScalarField,
    VectorField,
    disk_mask,
    from_spectrum,
    inner_product,
    spectral_inner,
    to_spectrum,
)
from .lines import filter_roi, make_lineset
from .phantoms import PhantomSpec, sample_phantom


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool


def _random_field(grid: Grid, rng) -> ScalarField:
    return ScalarField(grid, rng.standard_normal(grid.shape))


def _adjoint_defect_scalar(grid, ls, rng, pairs=3) -> float:
    worst = 0.0
    for _ in range(pairs):
        f = _random_field(grid, rng)
        g = xray_scalar.Sinogram(ls, rng.standard_normal(len(ls)))
        lhs = xray_scalar.sino_inner(xray_scalar.xray_forward(f, ls), g)
        rhs = inner_product(f, xray_scalar.xray_backproject(g, grid))
        scale = max(xray_scalar.xray_forward(f, ls).norm() * g.norm(), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def _adjoint_defect_vector(grid, ls, rng, pairs=3) -> float:
    worst = 0.0
    for _ in range(pairs):
        F = VectorField(grid, rng.standard_normal((grid.n,) + grid.shape))
        g = xray_scalar.Sinogram(ls, rng.standard_normal(len(ls)))
        fwd = xray_vector.xray_vector_forward(F, ls)
        lhs = xray_scalar.sino_inner(fwd, g)
        back = xray_vector.xray_vector_backproject(g, grid)
        rhs = grid.h**grid.n * float(np.sum(F.values * back.values))
        scale = max(fwd.norm() * g.norm(), 1e-300)
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def run_verification(size: int = 256, angles: int = 360, offsets: int | None = None,
                     pad: int = 2, seed: int = 0):
    """Run every property check; returns a list of CheckResult."""
    rng = np.random.default_rng(seed)
    results = []

    def add(name, value, threshold):
        results.append(CheckResult(name, float(value), float(threshold), value < threshold))

    # structural checks at a fixed moderate size
    sgrid = Grid(2, min(size, 128), 1.0, pad_factor=pad)
    sls = make_lineset(sgrid, 180, 192)
    add("adjoint_scalar", _adjoint_defect_scalar(sgrid, sls, rng), 1e-12)
    add("adjoint_vector", _adjoint_defect_vector(sgrid, sls, rng), 1e-12)

    f = _random_field(sgrid, rng)
    round_trip = from_spectrum(to_spectrum(f), sgrid)
    add("fft_roundtrip", (round_trip - f).norm() / f.norm(), 1e-12)

    g2 = _random_field(sgrid, rng)
    pars = abs(
        inner_product(f, g2) - spectral_inner(to_spectrum(f), to_spectrum(g2), sgrid)
    ) / max(abs(inner_product(f, g2)), 1e-300)
    add("parseval", pars, 1e-10)

    z = ScalarField(sgrid, f.values - f.values.mean())
    semi = (
        fraclap.fractional_laplacian(fraclap.fractional_laplacian(z, 0.3), 0.4)
        - fraclap.fractional_laplacian(z, 0.7)
    ).norm() / max(fraclap.fractional_laplacian(z, 0.7).norm(), 1e-300)
    add("fraclap_semigroup", semi, 1e-10)
    inv = (
        fraclap.fractional_laplacian(fraclap.fractional_laplacian(z, 0.35), -0.35) - z
    ).norm() / z.norm()
    add("fraclap_inverse_pair", inv, 1e-10)

    roi = disk_mask(sgrid, (0.0, 0.0), 0.3)
    once = filter_roi(sls, roi)
    twice = filter_roi(once, roi)
    add("filter_idempotent", abs(len(once) - len(twice)), 1.0)

    # gradients are invisible up to the interpolation quadrature, which is
    # second order; the bound reflects the measured level at this resolution
    phi = sample_phantom(PhantomSpec.gaussian(sigma=0.22), sgrid)
    dphi = xray_vector.gradient(phi, method="spectral")
    gauge = xray_vector.xray_vector_forward(dphi, sls)
    scale = float(np.max(np.abs(dphi.values))) * 2.0 * sgrid.ball_radius
    add("gauge_invariance", np.max(np.abs(gauge.values)) / scale, 2e-4)

    # resolution-dependent agreements at the configured size
    relax = max(1.0, 256.0 / size)
    grid = Grid(2, size, 1.0, pad_factor=pad)
    ls = make_lineset(grid, angles, offsets)
    gauss = sample_phantom(PhantomSpec.gaussian(sigma=0.15), grid)
    comp = xray_scalar.normal_scalar(gauss, ls)
    conv = xray_scalar.normal_scalar_conv(gauss)
    add("n0_route_agreement", (comp - conv).norm() / conv.norm(), 0.05 * relax)

    psi = sample_phantom(PhantomSpec.gaussian(sigma=0.2), grid)
    mesh = grid.coords()
    vort = VectorField(
        grid,
        np.stack([psi.values * mesh[1] / 0.04, -psi.values * mesh[0] / 0.04]),
    )
    report = xray_vector.curl_normal_identity_defect(vort)
    add("curl_identity_defect", report.defect, 0.05 * relax)
    return results
