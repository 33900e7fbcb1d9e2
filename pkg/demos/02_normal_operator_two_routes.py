"""The normal operator by composition and by convolution.

The back-projection of the transform should match the convolution with the
radial kernel; the script reports their relative difference at two grid
sizes and checks the kernel's spectral profile against the closed form.
"""

import numpy as np

import roitomo as rt
from roitomo.xray_scalar import normal_conv_symbol

for size, angles, offsets in [(128, 180, 192), (256, 360, 384)]:
    grid = rt.Grid(2, size, 1.0)
    ls = rt.make_lineset(grid, angles, offsets)
    f = rt.sample_phantom(rt.PhantomSpec.gaussian(sigma=0.15), grid)
    comp = rt.normal_scalar(f, ls)
    conv = rt.normal_scalar_conv(f)
    diff = (comp - conv).norm() / conv.norm()
    print(f"size {size:3d}, {angles} angles: route difference {diff:.4%}")

grid = rt.Grid(2, 256, 1.0)
sym = normal_conv_symbol(grid)
xi = grid.pad_grid().freq_norm(padded=False)
band = (xi > 15) & (xi < 40)
ratio = (sym[band] * xi[band]).mean() / (4 * np.pi)
print(f"kernel symbol x |xi| / 4pi over the mid band: {ratio:.4f}")
