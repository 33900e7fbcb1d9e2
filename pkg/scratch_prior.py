import numpy as np
import roitomo as rt
from roitomo import solver
from roitomo.phantoms import _cutoff

g = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(g, 180, 192)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
kept = rt.filter_roi(ls, roi)
mesh = g.coords()
r = np.sqrt(g.radius_sq())
chi = _cutoff(r, 0.38, 0.85)
truth = rt.ScalarField(g, (0.3 + 0.4 * mesh[0] - 0.2 * mesh[1]) * chi)
data = rt.xray_forward(truth, kept)

for name, prior, lams in [
    ("lap", rt.laplacian_power(2, 1), (8.0, 64.0, 512.0)),
    ("bilap", rt.laplacian_power(2, 2), (0.5, 4.0)),
]:
    for lam in lams:
        p = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=prior,
                                      lambda_prior=lam, lambda_tikhonov=1e-10,
                                      cg_tol=1e-13, max_iter=6000)
        rec, rep = solver.solve_scalar_partial(p, g, truth=truth)
        print(f"linear dome + {name} lam {lam}: rel_err {rep.rel_error:.4f}", flush=True)
