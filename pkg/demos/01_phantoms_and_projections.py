"""Phantom gallery and their line-integral data.

Samples each phantom family, takes its transform over a standard line set,
and writes field and sinogram previews.
"""

import os

import numpy as np

import roitomo as rt
from roitomo import fileio

OUT = os.path.join(os.path.dirname(__file__), "out", "01")
fileio.ensure_dir(OUT)

grid = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(grid, 180, 192)

phantoms = {
    "gaussian": rt.PhantomSpec.gaussian(sigma=0.15),
    "disk": rt.PhantomSpec.disk_indicator(radius=0.5),
    "bump": rt.PhantomSpec.bump(radius=0.4),
    "quadratic_patch": rt.PhantomSpec.patch(
        rule="polynomial", degree=2, plateau_radius=0.5, support_radius=0.75,
        v_radius=0.2, outer_center=(0.5, 0.3), outer_radius=0.22,
        outer_amplitude=0.4,
    ),
    "harmonic_patch": rt.PhantomSpec.patch(
        rule="harmonic", degree=3, plateau_radius=0.5, support_radius=0.75,
        v_radius=0.2,
    ),
    "plane_wave_patch": rt.PhantomSpec.patch(
        rule="plane_wave", xi0=(np.pi, 0.0), plateau_radius=0.5,
        support_radius=0.75, v_radius=0.2,
    ),
}

for name, spec in phantoms.items():
    field = rt.sample_phantom(spec, grid)
    sino = rt.xray_forward(field, ls)
    fileio.write_pgm(os.path.join(OUT, f"{name}.pgm"), field.values)
    fileio.write_pgm(os.path.join(OUT, f"{name}_sino.pgm"), fileio.sinogram_image(sino))
    line = f"{name:18s} max {field.values.max():8.3f}  data max {sino.values.max():8.3f}"
    op = spec.annihilator(grid.n)
    if op is not None:
        ok, residual = rt.is_admissible(field, op, spec.region(grid))
        line += f"  annihilator order {op.order}, residual {residual:.2e}"
    print(line)

print(f"previews written to {OUT}")
