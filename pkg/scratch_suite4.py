import numpy as np
import roitomo as rt
from roitomo import solver
from roitomo.diffops import compose, laplacian_power

g = rt.Grid(2, 128, 1.0)
ls = rt.make_lineset(g, 180, 192)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
kept = rt.filter_roi(ls, roi)


def run(name, spec, prior, lam, iters=8000):
    truth = rt.sample_phantom(spec, g)
    data = rt.xray_forward(truth, kept)
    p = solver.PartialDataProblem(roi=roi, region=V, data=data, prior=prior,
                                  lambda_prior=lam, lambda_tikhonov=1e-10,
                                  cg_tol=1e-13, max_iter=iters)
    rec, rep = solver.solve_scalar_partial(p, g, truth=truth)
    print(f"{name} lam {lam} iters {iters}: rel_err {rep.rel_error:.4f} "
          f"({rep.wall_time:.0f}s)", flush=True)


wave_thin = rt.PhantomSpec.patch(rule="plane_wave", xi0=(np.pi, 0.0),
                                 plateau_radius=0.38, support_radius=0.55,
                                 v_radius=0.2)
for lam in (0.25, 1.0):
    run("wave-thin", wave_thin, compose(wave_thin.annihilator(2), laplacian_power(2, 1)), lam)

wave_lo = rt.PhantomSpec.patch(rule="plane_wave", xi0=(0.5 * np.pi, 0.35 * np.pi),
                               plateau_radius=0.38, support_radius=0.85,
                               v_radius=0.2)
for lam in (0.25, 1.0):
    run("wave-lo-composed", wave_lo, compose(wave_lo.annihilator(2), laplacian_power(2, 1)), lam)

harm = rt.PhantomSpec.patch(rule="harmonic", degree=3, plateau_radius=0.38,
                            support_radius=0.85, v_radius=0.2)
run("harmonic-12k", harm, laplacian_power(2, 2), 0.5, iters=12000)
