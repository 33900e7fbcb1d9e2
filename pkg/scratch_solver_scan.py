import numpy as np
import roitomo as rt
from roitomo import solver
import roitomo.solver as S

g = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(g, 180, 192)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
spec = rt.PhantomSpec.patch(rule="polynomial", degree=2, plateau_radius=0.5,
                            support_radius=0.75, v_radius=0.2,
                            outer_center=(0.5, 0.3), outer_radius=0.22,
                            outer_amplitude=0.4)
truth = rt.sample_phantom(spec, g)
kept = rt.filter_roi(ls, roi)
data = rt.xray_forward(truth, kept)
prior = spec.annihilator(2)

orig = S._spectral_preconditioner


def data_only(grid, lineset, priors, lam_p, lam_t, region_fraction):
    return orig(grid, lineset, [], 0.0, lam_t, 0.0)


for mode, fn in [("with-prior-sym", orig), ("data-only", data_only)]:
    S._spectral_preconditioner = fn
    for lam in (1e-8, 1e-6, 1e-4, 1e-2, 1.0):
        p = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=prior,
                                      lambda_prior=lam, lambda_tikhonov=1e-6,
                                      cg_tol=1e-13, max_iter=3000)
        rec, rep = solver.solve_scalar_partial(p, g, truth=truth)
        print(f"{mode} lam {lam:.0e}: rel_err {rep.rel_error:.4f} "
              f"data_res {rep.data_residual:.2e} ({rep.wall_time:.0f}s)", flush=True)
S._spectral_preconditioner = orig
