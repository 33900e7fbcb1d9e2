import numpy as np
import roitomo as rt
from roitomo import solver
from roitomo.diffops import compose, laplacian_power

g = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(g, 180, 192)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
kept = rt.filter_roi(ls, roi)

harm = rt.PhantomSpec.patch(rule="harmonic", degree=3, plateau_radius=0.38,
                            support_radius=0.85, v_radius=0.2)
wave = rt.PhantomSpec.patch(rule="plane_wave", xi0=(np.pi, 0.7 * np.pi),
                            plateau_radius=0.38, support_radius=0.85, v_radius=0.2)

cases = []
th = rt.sample_phantom(harm, g)
cases.append(("harmonic + lap^2", th, laplacian_power(2, 2), (0.25, 0.5, 1.0)))
tw = rt.sample_phantom(wave, g)
wave_op = wave.annihilator(2)
cases.append(("wave + lap(wave_op)", tw, compose(wave_op, laplacian_power(2, 1)),
              (0.25, 0.5, 1.0)))

for name, truth, prior, lams in cases:
    data = rt.xray_forward(truth, kept)
    for lam in lams:
        p = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=prior,
                                      lambda_prior=lam, lambda_tikhonov=1e-10,
                                      cg_tol=1e-13, max_iter=8000)
        rec, rep = solver.solve_scalar_partial(p, g, truth=truth)
        print(f"{name} lam {lam}: rel_err {rep.rel_error:.4f} ({rep.wall_time:.0f}s)",
              flush=True)
