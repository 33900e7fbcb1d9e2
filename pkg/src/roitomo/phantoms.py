"""Phantom generators, including patches annihilated by a known operator.

Plain phantoms (gaussian, disk indicator, smooth bump) exercise the
transforms.  Patch phantoms realize fields that satisfy a homogeneous
constant-coefficient equation on a prescribed disk: a closed-form inner rule
holds exactly on a plateau containing the disk, is blended to zero with a
smooth cutoff well inside the box, and may carry an extra off-center bump
supported away from the disk.  Each patch reports the operator that
annihilates it there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import diffops
from .errors import GeometryError
from .grid import Grid, RegionMask, ScalarField, disk_mask

# phantoms must fit inside this fraction of the box half-width so line
# integrals and padded convolutions never see support truncation
SUPPORT_FRACTION = 0.9

PATCH_RULES = (
    "polynomial",
    "harmonic",
    "polyharmonic",
    "plane_wave",
    "coordinate_independent",
    "wave",
)


@dataclass
class PhantomSpec:
    """Parameters of one phantom; use the classmethod constructors."""

    kind: str
    amplitude: float = 1.0
    center: tuple = (0.0, 0.0)
    sigma: float | None = None
    radius: float | None = None
    # admissible-patch fields
    rule: str | None = None
    degree: int = 2
    xi0: tuple | None = None
    phase: float = 0.0
    axis: int = 0
    plateau_radius: float | None = None
    support_radius: float | None = None
    v_radius: float | None = None
    outer_center: tuple | None = None
    outer_radius: float | None = None
    outer_amplitude: float = 0.0
    coeffs: dict | None = None

    @classmethod
    def gaussian(cls, center=(0.0, 0.0), sigma=0.15, amplitude=1.0):
        return cls("gaussian", amplitude, tuple(center), sigma=float(sigma))

    @classmethod
    def disk_indicator(cls, center=(0.0, 0.0), radius=0.5, amplitude=1.0):
        return cls("disk_indicator", amplitude, tuple(center), radius=float(radius))

    @classmethod
    def bump(cls, center=(0.0, 0.0), radius=0.4, amplitude=1.0):
        return cls("bump", amplitude, tuple(center), radius=float(radius))

    @classmethod
    def patch(
        cls,
        rule="polynomial",
        center=(0.0, 0.0),
        amplitude=1.0,
        degree=2,
        xi0=None,
        phase=0.0,
        axis=0,
        plateau_radius=0.5,
        support_radius=0.75,
        v_radius=0.2,
        outer_center=None,
        outer_radius=None,
        outer_amplitude=0.0,
        coeffs=None,
    ):
        if rule not in PATCH_RULES:
            raise ValueError(f"unknown patch rule {rule!r}")
        return cls(
            "admissible_patch",
            amplitude,
            tuple(center),
            rule=rule,
            degree=int(degree),
            xi0=tuple(xi0) if xi0 is not None else None,
            phase=float(phase),
            axis=int(axis),
            plateau_radius=float(plateau_radius),
            support_radius=float(support_radius),
            v_radius=float(v_radius),
            outer_center=tuple(outer_center) if outer_center is not None else None,
            outer_radius=outer_radius,
            outer_amplitude=float(outer_amplitude),
            coeffs=coeffs,
        )

    def annihilator(self, n: int = 2) -> diffops.PolyOp | None:
        """Operator with vanishing action on the patch region, if any."""
        if self.kind != "admissible_patch":
            return None
        if self.rule == "polynomial":
            return diffops.laplacian_power(n, self.degree // 2 + 1)
        if self.rule == "harmonic":
            return diffops.laplacian_power(n, 1)
        if self.rule == "polyharmonic":
            return diffops.laplacian_power(n, 2)
        if self.rule == "plane_wave":
            return diffops.directional_wave_op(n, self._xi0_array(n))
        if self.rule == "coordinate_independent":
            return diffops.partial_op(n, self.axis)
        if self.rule == "wave":
            # symbol xi_1^2 - xi_2^2: kills g(x1 - x2) + h(x1 + x2)
            terms = {(2,) + (0,) * (n - 1): 1.0}
            terms[(0, 2) + (0,) * (n - 2)] = -1.0
            return diffops.PolyOp(n, terms)
        raise ValueError(f"unknown patch rule {self.rule!r}")

    def region(self, grid: Grid) -> RegionMask:
        """The disk on which the annihilator provably holds."""
        if self.kind != "admissible_patch":
            raise ValueError("only patch phantoms carry a region")
        return disk_mask(grid, self.center, self.v_radius)

    def _xi0_array(self, n: int) -> np.ndarray:
        if self.xi0 is None:
            xi = np.zeros(n)
            xi[0] = np.pi
            return xi
        return np.asarray(self.xi0, dtype=complex)

    def _support_radius(self) -> float:
        if self.kind == "gaussian":
            return 4.0 * self.sigma
        if self.kind in ("disk_indicator", "bump"):
            return self.radius
        r = self.support_radius
        if self.outer_center is not None:
            oc = np.asarray(self.outer_center) - np.asarray(self.center)
            r = max(r, float(np.linalg.norm(oc)) + self.outer_radius)
        return r


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity transition: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        g = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        gm = np.where(t < 1, np.exp(-1.0 / np.maximum(1.0 - t, 1e-300)), 0.0)
    return g / (g + gm)


def _cutoff(r: np.ndarray, r_one: float, r_zero: float) -> np.ndarray:
    """1 on r <= r_one, 0 on r >= r_zero, smooth monotone between."""
    return _smoothstep((r_zero - r) / (r_zero - r_one))


def _default_poly_coeffs(n: int, degree: int) -> dict:
    # fixed, mildly anisotropic coefficients chosen to stay O(1) on the patch
    if n == 2:
        base = {
            (0, 0): 0.50,
            (1, 0): 0.40,
            (0, 1): -0.30,
            (2, 0): 0.60,
            (1, 1): 0.50,
            (0, 2): -0.35,
            (3, 0): 0.25,
            (2, 1): -0.40,
            (1, 2): 0.30,
            (0, 3): -0.20,
        }
    else:
        base = {
            (0, 0, 0): 0.50,
            (1, 0, 0): 0.40,
            (0, 1, 0): -0.30,
            (0, 0, 1): 0.25,
            (2, 0, 0): 0.60,
            (0, 2, 0): -0.35,
            (0, 0, 2): 0.30,
            (1, 1, 0): 0.50,
            (1, 0, 1): -0.25,
            (0, 1, 1): 0.20,
        }
    return {a: c for a, c in base.items() if sum(a) <= degree}


def _rule_values(spec: PhantomSpec, grid: Grid, rel: list) -> np.ndarray:
    n = grid.n
    if spec.rule == "polynomial":
        coeffs = spec.coeffs or _default_poly_coeffs(n, spec.degree)
        out = np.zeros(grid.shape)
        for alpha, c in coeffs.items():
            term = np.full(grid.shape, float(c))
            for j, k in enumerate(alpha):
                if k:
                    term = term * rel[j] ** k
            out += term
        return out
    if spec.rule == "harmonic":
        if n == 2:
            w = rel[0] + 1j * rel[1]
            scale = max(spec.support_radius, 1e-9) ** spec.degree
            return np.real(w**spec.degree) / scale + 0.4 * rel[0] - 0.2 * rel[1] + 0.3
        return rel[0] * rel[1] * rel[2] / max(spec.support_radius, 1e-9) ** 3 + 0.3
    if spec.rule == "polyharmonic":
        r2 = sum(x * x for x in rel)
        if n == 2:
            harm = np.real((rel[0] + 1j * rel[1]) ** 2)
        else:
            harm = rel[0] * rel[1]
        scale = max(spec.support_radius, 1e-9) ** 4
        return (r2 * harm) / scale + 0.25
    if spec.rule == "plane_wave":
        xi0 = spec._xi0_array(n)
        phase = sum(x * xi for x, xi in zip(rel, xi0))
        return np.real(np.exp(1j * (phase + spec.phase)))
    if spec.rule == "coordinate_independent":
        t = rel[(spec.axis + 1) % n]
        return 0.3 + 0.8 * t - 0.5 * t**2 + 0.9 * t**3
    if spec.rule == "wave":
        u = rel[0] - rel[1]
        v = rel[0] + rel[1]
        return (u**3 - 0.6 * u) + (0.5 * v**2 + 0.4 * v)
    raise ValueError(f"unknown patch rule {spec.rule!r}")


def sample_phantom(spec: PhantomSpec, grid: Grid) -> ScalarField:
    """Sample a phantom on the grid; geometry must fit the support ball."""
    center = np.asarray(spec.center, dtype=float)
    if center.shape != (grid.n,):
        raise GeometryError(f"center {spec.center} does not match dimension {grid.n}")
    limit = SUPPORT_FRACTION * min(grid.extent)
    reach = float(np.linalg.norm(center)) + spec._support_radius()
    if reach > limit + 1e-12:
        raise GeometryError(
            f"phantom reaches radius {reach:.3f}, limit is {limit:.3f}"
        )

    mesh = grid.coords()
    rel = [m - c for m, c in zip(mesh, center)]
    r = np.sqrt(sum(x * x for x in rel))

    if spec.kind == "gaussian":
        vals = spec.amplitude * np.exp(-(r**2) / (2.0 * spec.sigma**2))
    elif spec.kind == "disk_indicator":
        vals = spec.amplitude * (r < spec.radius).astype(float)
    elif spec.kind == "bump":
        vals = np.zeros(grid.shape)
        inside = r < spec.radius
        q = (r[inside] / spec.radius) ** 2
        vals[inside] = spec.amplitude * np.exp(1.0 - 1.0 / (1.0 - q))
    elif spec.kind == "admissible_patch":
        if spec.v_radius > spec.plateau_radius + 1e-12:
            raise GeometryError("patch region must sit inside the exact plateau")
        vals = spec.amplitude * _rule_values(spec, grid, rel)
        vals = vals * _cutoff(r, spec.plateau_radius, spec.support_radius)
        if spec.outer_center is not None:
            oc = np.asarray(spec.outer_center, dtype=float)
            ro = np.sqrt(sum((m - c) ** 2 for m, c in zip(mesh, oc)))
            if (
                float(np.linalg.norm(oc - center)) - spec.outer_radius
                < spec.v_radius + 1e-12
            ):
                raise GeometryError("outer bump must vanish on the patch region")
            inside = ro < spec.outer_radius
            out = np.zeros(grid.shape)
            q = (ro[inside] / spec.outer_radius) ** 2
            out[inside] = spec.outer_amplitude * np.exp(1.0 - 1.0 / (1.0 - q))
            vals = vals + out
    else:
        raise ValueError(f"unknown phantom kind {spec.kind!r}")
    return ScalarField(grid, vals)
