import numpy as np
from scipy.linalg import cho_factor, cho_solve

import roitomo as rt
from roitomo import diffops
from roitomo.project import Projector

g = rt.Grid(2, 64, 1.0)
ls = rt.make_lineset(g, 180, 96)
roi = rt.disk_mask(g, (0, 0), 0.35)
V = rt.disk_mask(g, (0, 0), 0.2)
spec = rt.PhantomSpec.patch(rule="polynomial", degree=2, plateau_radius=0.5,
                            support_radius=0.75, v_radius=0.2,
                            outer_center=(0.5, 0.3), outer_radius=0.22,
                            outer_amplitude=0.4)
truth = rt.sample_phantom(spec, g)
kept = rt.filter_roi(ls, roi)
proj = Projector(g, kept)
w = kept.weights
t = truth.values.reshape(-1)
gdat = proj.matrix @ t
prior = spec.annihilator(2)
inner = diffops.stencil_interior(prior, V)
print("kept lines:", len(kept), "prior interior nodes:", int(inner.sum()))
hn = g.h**2
N = g.n_nodes

X = proj.matrix.toarray()
A_data = (X.T * w) @ X
b = (X.T * w) @ gdat

P = np.zeros((N, N))
for k in range(N):
    e = np.zeros((64, 64))
    e[k // 64, k % 64] = 1.0
    P[:, k] = diffops.apply_fd_normal(prior, e, inner, g.h).reshape(-1)
P = 0.5 * (P + P.T)
print("matrices built")

lam_t = 1e-6
for lam in (0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0):
    A = A_data + lam * hn * P + lam_t * hn * np.eye(N)
    f = cho_solve(cho_factor(A), b)
    err = np.linalg.norm(f - t) / np.linalg.norm(t)
    print(f"lam {lam:8.0e}: exact-minimizer rel_err {err:.4f}")
