"""Penalized least-squares reconstruction from region-limited line data.

The partial-data problems minimize a data misfit over the retained lines plus
a soft differential-operator penalty on the prior region and a small ridge
term that keeps the discrete system positive definite (the continuum theorems
give uniqueness, not conditioning).  Solves run preconditioned conjugate
gradients on the normal equations with the exact transpose pair of the
discrete transform, zero initialization, and no randomness, so reports are
reproducible bit for bit.

The near-null-space probe searches for unit-norm fields supported outside a
region whose transform over the region's lines is as small as possible;
restricted to region-filtered data it exhibits the invisible features whose
recovery is unstable, while full data admits no such field at desk scale.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import diffops
from .errors import RegionError, SolverFailure
from .fraclap import analytic_c0
from .grid import Grid, RegionMask, ScalarField, VectorField
from .lines import LineSet, filter_roi, make_lineset
from .project import Projector
from .xray_scalar import Sinogram
from .xray_vector import _cd, _cd_adjoint, skew_pairs, solenoidal_decompose


@dataclass
class PartialDataProblem:
    """Data, geometry, prior, and solver controls for one partial solve.

    The unknown is sought in the transform's contract class, fields supported
    in the 0.9-extent ball; pass ``support`` to widen or narrow that.
    """

    roi: RegionMask
    region: RegionMask                 # prior region, inside the roi
    data: Sinogram
    prior: object = None               # PolyOp, or {(i, j): PolyOp} for vectors
    lambda_prior: float = 1.0
    lambda_tikhonov: float = 1e-6
    cg_tol: float = 1e-8
    max_iter: int = 2000
    support: RegionMask | None = None

    def __post_init__(self):
        if self.lambda_prior < 0 or self.lambda_tikhonov < 0:
            raise ValueError("penalty weights must be non-negative")
        if np.any(self.region.inside & ~self.roi.inside):
            raise ValueError("prior region must lie inside the roi")

    def support_flags(self, grid: Grid) -> np.ndarray | None:
        if self.support is None:
            return None
        return self.support.inside.reshape(-1)


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    data_residual: float
    prior_residual: float
    objective: float
    wall_time: float
    rel_error: float | None = None
    objective_history: list = field(default_factory=list)
    notes: str = ""

    def to_text(self) -> str:
        rows = [
            ("iterations", self.iterations),
            ("converged", int(self.converged)),
            ("data_residual", f"{self.data_residual:.17g}"),
            ("prior_residual", f"{self.prior_residual:.17g}"),
            ("objective", f"{self.objective:.17g}"),
            ("wall_time_s", f"{self.wall_time:.3f}"),
        ]
        if self.rel_error is not None:
            rows.append(("rel_error", f"{self.rel_error:.17g}"))
        if self.notes:
            rows.append(("notes", self.notes))
        return "".join(f"{k}={v}\n" for k, v in rows)


def _pcg(apply_a, b, tol, max_iter, precond=None, checkpoint=25):
    """Preconditioned CG on an SPD system with monotone-objective checks.

    The quadratic ``q(x) = x.Ax/2 - b.x`` is sampled at checkpoints; an
    increase across checkpoints flags divergence.
    """
    x = np.zeros_like(b)
    r = b.copy()
    z = precond(r) if precond else r
    p = z.copy()
    rz = float(r @ z)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return x, {"iterations": 0, "converged": True, "objective_history": [0.0]}
    history = []
    last_q = np.inf
    it = 0
    converged = False
    while it < max_iter:
        ap = apply_a(p)
        denom = float(p @ ap)
        if denom <= 0.0:
            raise SolverFailure("operator lost positive definiteness", None)
        alpha = rz / denom
        x += alpha * p
        r -= alpha * ap
        it += 1
        if np.linalg.norm(r) <= tol * b_norm:
            converged = True
            break
        if it % checkpoint == 0:
            q = 0.5 * float(x @ apply_a(x)) - float(b @ x)
            history.append(q)
            if q > last_q + 1e-12 * abs(last_q):
                raise SolverFailure(
                    f"objective increased at iteration {it}", None
                )
            last_q = q
        z = precond(r) if precond else r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    q = 0.5 * float(x @ apply_a(x)) - float(b @ x)
    history.append(q)
    return x, {"iterations": it, "converged": converged, "objective_history": history}


def _spectral_preconditioner(grid, lineset, priors, lam_p, lam_t, region_fraction):
    """Positive spectral multiplier approximating the normal-equation symbol.

    The data term behaves like the normal-operator symbol (decaying with
    frequency, scaled by the retained-line fraction); the prior contributes
    its squared symbol weighted by the region's volume fraction.  Any SPD
    multiplier is admissible; this one just clusters the spectrum.
    """
    hn = grid.h**grid.n
    xi = grid.freq_norm(padded=False)
    floor = np.pi / (2.0 * max(grid.extent))
    coverage = len(lineset) / max(
        1, lineset.n_angles * lineset.n_offsets ** (grid.n - 1)
    )
    data_sym = hn * (1.0 / analytic_c0(grid.n)) * coverage / (xi + floor)
    sym = data_sym.copy()
    if priors and lam_p > 0:
        mesh = np.meshgrid(*[grid.freq_axis(i) for i in range(grid.n)], indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
        psym = np.zeros(pts.shape[0])
        for op in priors:
            psym += np.abs(diffops.symbol_eval(op, pts)) ** 2
        psym /= len(priors)
        sym = sym + lam_p * hn * region_fraction * psym.reshape(xi.shape)
    # cap the boost in directions the data barely sees: equalize the visible
    # band without inflating near-null search directions
    floor_gain = 0.01 * float(data_sym.max())
    mult = 1.0 / (sym + lam_t * hn + floor_gain)

    def precond(vec):
        arr = vec.reshape((-1,) + grid.shape)
        out = np.empty_like(arr)
        for k in range(arr.shape[0]):
            out[k] = np.fft.ifftn(mult * np.fft.fftn(arr[k])).real
        return out.reshape(vec.shape)

    return precond


def _report_from_info(info, data_rel, prior_norm, objective, wall, rel_error):
    return SolveReport(
        iterations=info["iterations"],
        converged=info["converged"],
        data_residual=data_rel,
        prior_residual=prior_norm,
        objective=objective,
        wall_time=wall,
        rel_error=rel_error,
        objective_history=info["objective_history"],
    )


def solve_scalar_partial(
    problem: PartialDataProblem, grid: Grid, truth: ScalarField | None = None
):
    """Minimize data misfit + prior penalty + ridge by preconditioned CG."""
    t0 = time.perf_counter()
    ls = problem.data.lineset
    proj = Projector(grid, ls)
    w = ls.weights
    g = problem.data.values
    hn = grid.h**grid.n
    lam_p, lam_t = problem.lambda_prior, problem.lambda_tikhonov

    prior = problem.prior
    if prior is not None and lam_p > 0:
        inner = diffops.stencil_interior(prior, problem.region)
        if not inner.any():
            raise RegionError("prior region interior is empty")
        priors = [prior]
        region_fraction = inner.mean()
        # dimensionless-difference normalization: an order-m penalty scales
        # as h^m so that unit weight means unit-size stencil residuals
        lam_p = lam_p * grid.h**prior.order
    else:
        inner = None
        priors = []
        region_fraction = 0.0

    flags = problem.support_flags(grid)

    def _mask(vec):
        return vec if flags is None else np.where(flags, vec, 0.0)

    def apply_a(vec):
        vec = _mask(vec)
        out = proj.matrix_t @ (w * (proj.matrix @ vec))
        if inner is not None:
            shaped = vec.reshape(grid.shape)
            out = out + lam_p * hn * diffops.apply_fd_normal(
                prior, shaped, inner, grid.h
            ).reshape(-1)
        out += lam_t * hn * vec
        return _mask(out)

    b = _mask(proj.matrix_t @ (w * g))
    base_precond = _spectral_preconditioner(grid, ls, priors, lam_p, lam_t, region_fraction)

    def precond(vec):
        return _mask(base_precond(_mask(vec)))
    try:
        x, info = _pcg(apply_a, b, problem.cg_tol, problem.max_iter, precond)
    except SolverFailure as exc:
        exc.report = SolveReport(
            0, False, np.nan, np.nan, np.nan, time.perf_counter() - t0,
            notes=str(exc),
        )
        raise

    f = ScalarField(grid, x.reshape(grid.shape))
    resid = proj.matrix @ x - g
    data_rel = float(
        np.sqrt(np.sum(w * resid**2)) / max(np.sqrt(np.sum(w * g**2)), 1e-300)
    )
    if inner is not None:
        action = diffops.apply_fd(prior, f, problem.region)
        prior_norm = float(np.sqrt(hn * np.sum(np.abs(action) ** 2)))
    else:
        prior_norm = 0.0
    rel_error = None
    if truth is not None:
        rel_error = float((f - truth).norm() / max(truth.norm(), 1e-300))
    report = _report_from_info(
        info, data_rel, prior_norm, info["objective_history"][-1],
        time.perf_counter() - t0, rel_error,
    )
    return f, report


def _vector_priors(problem: PartialDataProblem, n: int) -> dict:
    prior = problem.prior
    if prior is None or problem.lambda_prior == 0:
        return {}
    if isinstance(prior, diffops.PolyOp):
        return {pair: prior for pair in skew_pairs(n)}
    return dict(prior)


def solve_vector_partial(
    problem: PartialDataProblem, grid: Grid, truth: VectorField | None = None
):
    """Vector analogue; the penalty sits on the curl components.

    Gradient directions are invisible to the data and barely touched by the
    penalty, so success is judged on the solenoidal part (compare the
    Helmholtz splits of the result and the ground truth).
    """
    t0 = time.perf_counter()
    ls = problem.data.lineset
    n = grid.n
    proj = Projector(grid, ls)
    w = ls.weights
    g = problem.data.values
    hn = grid.h**grid.n
    lam_p, lam_t = problem.lambda_prior, problem.lambda_tikhonov
    theta = [ls.thetas[:, i] for i in range(n)]

    priors = _vector_priors(problem, n)
    inners = {}
    scales = {}
    for pair, op in priors.items():
        inner = diffops.stencil_interior(op, problem.region)
        if not inner.any():
            raise RegionError("prior region interior is empty")
        inners[pair] = inner
        scales[pair] = grid.h**op.order
    region_fraction = (
        float(np.mean([m.mean() for m in inners.values()])) if inners else 0.0
    )

    shape = (n,) + grid.shape
    sflags = problem.support_flags(grid)
    flags = None if sflags is None else np.tile(sflags, n)

    def _mask(vec):
        return vec if flags is None else np.where(flags, vec, 0.0)

    def apply_a(vec):
        vec = _mask(vec)
        comps = vec.reshape(shape)
        sino = np.zeros(len(ls))
        for i in range(n):
            sino += theta[i] * (proj.matrix @ comps[i].reshape(-1))
        sino *= w
        out = np.empty(shape)
        for i in range(n):
            out[i] = (proj.matrix_t @ (theta[i] * sino)).reshape(grid.shape)
        if priors:
            for (i, j), op in priors.items():
                curl = _cd(comps[j], i, grid.h) - _cd(comps[i], j, grid.h)
                z = diffops.apply_fd_normal(op, curl, inners[(i, j)], grid.h)
                out[j] += lam_p * scales[(i, j)] * hn * _cd_adjoint(z, i, grid.h)
                out[i] -= lam_p * scales[(i, j)] * hn * _cd_adjoint(z, j, grid.h)
        out += lam_t * hn * comps
        return _mask(out.reshape(-1))

    b = np.empty(shape)
    for i in range(n):
        b[i] = (proj.matrix_t @ (theta[i] * (w * g))).reshape(grid.shape)
    b = _mask(b.reshape(-1))

    mean_scale = float(np.mean(list(scales.values()))) if scales else 0.0
    base_precond = _spectral_preconditioner(
        grid, ls, list(priors.values()), lam_p * mean_scale, lam_t, region_fraction
    )

    def precond(vec):
        return _mask(base_precond(_mask(vec)))
    try:
        x, info = _pcg(apply_a, b, problem.cg_tol, problem.max_iter, precond)
    except SolverFailure as exc:
        exc.report = SolveReport(
            0, False, np.nan, np.nan, np.nan, time.perf_counter() - t0,
            notes=str(exc),
        )
        raise

    F = VectorField(grid, x.reshape(shape))
    sino = np.zeros(len(ls))
    for i in range(n):
        sino += theta[i] * (proj.matrix @ F.values[i].reshape(-1))
    resid = sino - g
    data_rel = float(
        np.sqrt(np.sum(w * resid**2)) / max(np.sqrt(np.sum(w * g**2)), 1e-300)
    )
    prior_norm = 0.0
    for (i, j), op in priors.items():
        curl = _cd(F.values[j], i, grid.h) - _cd(F.values[i], j, grid.h)
        action = diffops._apply_terms(op, curl, grid.h)
        action[~inners[(i, j)]] = 0.0
        prior_norm += hn * float(np.sum(np.abs(action) ** 2))
    prior_norm = float(np.sqrt(prior_norm))
    rel_error = None
    if truth is not None:
        sol_rec, _ = solenoidal_decompose(F)
        sol_true, _ = solenoidal_decompose(truth)
        rel_error = float(
            (sol_rec - sol_true).norm() / max(sol_true.norm(), 1e-300)
        )
    report = _report_from_info(
        info, data_rel, prior_norm, info["objective_history"][-1],
        time.perf_counter() - t0, rel_error,
    )
    return F, report


# ---------------------------------------------------------------------------
# near-null-space probe


@dataclass
class ProbeResult:
    field: ScalarField
    rayleigh: float          # smallest found quotient over the largest one
    rayleigh_min: float
    rayleigh_max: float
    iterations: int
    support_violation: int


def null_space_probe(
    roi: RegionMask,
    grid: Grid,
    iters: int = 12,
    lineset: LineSet | None = None,
    probe_mask: RegionMask | None = None,
    inner_iters: int = 60,
    band_fraction: float = 1.0 / 3.0,
    seed: int = 0,
) -> ProbeResult:
    """Search for the least-visible unit field supported outside the region.

    The probe lives in the artifact's field class: supported in the standard
    0.9-extent ball but outside the region, and band-limited to resolved
    scales (``band_fraction`` of the grid bandwidth) so grid-scale lattice
    artifacts do not masquerade as invisible features.  Runs shifted inverse
    power iteration on the support-restricted normal operator of the given
    line set (default: the region's lines); the returned quotient is
    normalized by a power-iteration estimate of the largest quotient over the
    same class.
    """
    from .grid import disk_mask

    if probe_mask is not None:
        support = probe_mask.inside.reshape(-1)
    else:
        ball = disk_mask(grid, (0.0,) * grid.n, 0.9 * min(grid.extent))
        support = (ball.inside & ~roi.inside).reshape(-1)
    if not support.any():
        raise RegionError("probe support outside the region is empty")
    if lineset is None:
        lineset = filter_roi(make_lineset(grid), roi)
    proj = Projector(grid, lineset)
    w = lineset.weights
    band = (grid.freq_norm() <= band_fraction * np.pi / grid.h).astype(float)

    def smooth_project(vec):
        low = np.fft.ifftn(band * np.fft.fftn(vec.reshape(grid.shape))).real
        return np.where(support, low.reshape(-1), 0.0)

    def apply_b(vec):
        u = np.where(support, vec, 0.0)
        out = proj.matrix_t @ (w * (proj.matrix @ u))
        return np.where(support, out, 0.0)

    rng = np.random.default_rng(seed)
    v = smooth_project(rng.standard_normal(grid.n_nodes))
    v /= np.linalg.norm(v)
    lam_max = 0.0
    for _ in range(40):
        bv = apply_b(v)
        lam_max = max(lam_max, float(v @ bv))
        v = smooth_project(bv)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            break
        v /= nrm

    mu = 1e-6 * max(lam_max, 1e-300)

    def apply_shifted(vec):
        return apply_b(vec) + mu * vec

    u = smooth_project(rng.standard_normal(grid.n_nodes))
    u /= np.linalg.norm(u)
    best_rq = float(u @ apply_b(u))
    best_u = u.copy()
    for _ in range(iters):
        u, _ = _pcg(apply_shifted, u, tol=1e-4, max_iter=inner_iters, checkpoint=10**9)
        u = smooth_project(u)
        nrm = np.linalg.norm(u)
        if nrm == 0.0:
            break
        u /= nrm
        rq = float(u @ apply_b(u))
        if rq < best_rq:
            best_rq = rq
            best_u = u.copy()
    violation = int(np.count_nonzero(best_u[~support]))
    return ProbeResult(
        field=ScalarField(grid, best_u.reshape(grid.shape)),
        rayleigh=best_rq / max(lam_max, 1e-300),
        rayleigh_min=best_rq,
        rayleigh_max=lam_max,
        iterations=iters,
        support_violation=violation,
    )
