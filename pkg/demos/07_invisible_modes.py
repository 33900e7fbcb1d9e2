"""Invisible features of region-limited data.

Searches for the unit-norm field supported outside the measured disk whose
data is smallest.  For region-limited lines such fields are numerically
invisible (tiny normalized Rayleigh quotient); with the full line set no
such field exists at this scale.
"""

import os

import roitomo as rt
from roitomo import fileio, solver

OUT = os.path.join(os.path.dirname(__file__), "out", "07")
fileio.ensure_dir(OUT)

grid = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(grid, 180, 192)
roi = rt.disk_mask(grid, (0.0, 0.0), 0.3)

res = solver.null_space_probe(roi, grid, iters=10, lineset=rt.filter_roi(ls, roi))
print(f"region-limited data: normalized Rayleigh quotient "
      f"{res.rayleigh:.2e} (invisible feature found)")
fileio.write_pgm(os.path.join(OUT, "invisible_mode.pgm"), res.field.values)

res_full = solver.null_space_probe(roi, grid, iters=10, lineset=ls)
print(f"full data, same probe class: normalized Rayleigh quotient "
      f"{res_full.rayleigh:.2e} (nothing hides)")
print(f"contrast: {res_full.rayleigh / max(res.rayleigh, 1e-300):.1e}x")
print(f"preview written to {OUT}")
