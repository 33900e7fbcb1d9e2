import numpy as np
import roitomo as rt
from roitomo import diffops
from roitomo.project import Projector
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
proj = Projector(g, kept)
w = kept.weights
t = truth.values.reshape(-1)
gdat = proj.matrix @ t
prior = spec.annihilator(2)
inner = diffops.stencil_interior(prior, V)
print("prior interior nodes at 128:", int(inner.sum()))
hn = g.h**2


def run(lam_p, lam_t, iters=4000):
    def apply_a(vec):
        out = proj.matrix_t @ (w * (proj.matrix @ vec))
        if lam_p > 0:
            out = out + lam_p * hn * diffops.apply_fd_normal(
                prior, vec.reshape(g.shape), inner, g.h).reshape(-1)
        return out + lam_t * hn * vec

    pre = S._spectral_preconditioner(g, kept, [prior] if lam_p else [], lam_p,
                                     lam_t, inner.mean() if lam_p else 0.0)
    b = proj.matrix_t @ (w * gdat)
    x = np.zeros_like(b)
    r = b.copy()
    z = pre(r)
    p = z.copy()
    rz = float(r @ z)
    curve = []
    for k in range(1, iters + 1):
        ap = apply_a(p)
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        z = pre(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        if k % 100 == 0:
            curve.append((k, np.linalg.norm(x - t) / np.linalg.norm(t)))
    return curve


for lam_p, lam_t in [(1e-7, 1e-8), (1e-7, 1e-10), (1e-8, 1e-10), (1e-6, 1e-10)]:
    curve = run(lam_p, lam_t)
    best = min(curve, key=lambda kv: kv[1])
    tail = {k: f"{e:.3f}" for k, e in curve if k in (500, 1000, 2000, 3000, 4000)}
    print(f"lam_p {lam_p:.0e} lam_t {lam_t:.0e}: best {best[1]:.4f} @ {best[0]}  "
          f"checkpoints {tail}", flush=True)
