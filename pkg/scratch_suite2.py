import numpy as np
import roitomo as rt
from roitomo import solver

g = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(g, 180, 192)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
kept = rt.filter_roi(ls, roi)

cases = [
    ("harm-d2", rt.PhantomSpec.patch(rule="harmonic", degree=2, plateau_radius=0.38,
                                     support_radius=0.85, v_radius=0.2), [0.5, 2.0]),
    ("harm-d3", rt.PhantomSpec.patch(rule="harmonic", degree=3, plateau_radius=0.38,
                                     support_radius=0.85, v_radius=0.2), [2.0, 8.0]),
    ("wave-lo", rt.PhantomSpec.patch(rule="plane_wave", xi0=(0.5 * np.pi, 0.35 * np.pi),
                                     plateau_radius=0.38, support_radius=0.85,
                                     v_radius=0.2), [0.5, 2.0]),
]

for name, spec, lams in cases:
    truth = rt.sample_phantom(spec, g)
    data = rt.xray_forward(truth, kept)
    prior = spec.annihilator(2)
    for lam in lams:
        p = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=prior,
                                      lambda_prior=lam, lambda_tikhonov=1e-10,
                                      cg_tol=1e-13, max_iter=8000)
        rec, rep = solver.solve_scalar_partial(p, g, truth=truth)
        print(f"{name} lam {lam}: rel_err {rep.rel_error:.4f} ({rep.wall_time:.0f}s)",
              flush=True)
    pu = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=None,
                                   lambda_prior=0.0, lambda_tikhonov=1e-10,
                                   cg_tol=1e-13, max_iter=2000)
    ru, repu = solver.solve_scalar_partial(pu, g, truth=truth)
    print(f"{name} unconstrained: {repu.rel_error:.4f}", flush=True)
