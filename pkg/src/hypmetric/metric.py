"""Metric-agnostic operations on densities: length, curvature, gluing."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .density import OUTSIDE, Density, Grid
from .domains import Annulus, DiskMinusHoles, Disk, DomainSpec, PuncturedDisk
from .errors import DomainError, GluingWarning, ParameterError


@dataclass(frozen=True)
class PathPolyline:
    """Piecewise-linear path through ``vertices`` (at least two, consecutive ones distinct)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).ravel()
        if v.size < 2:
            raise ParameterError("a polyline needs at least two vertices")
        if np.any(v[1:] == v[:-1]):
            raise ParameterError("consecutive vertices must be distinct")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def segment(cls, a: complex, b: complex) -> "PathPolyline":
        return cls(np.array([a, b], dtype=complex))

    def euclidean_length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.vertices))))

    def resampled(self, per_segment: int) -> "PathPolyline":
        """Same trace with ``per_segment - 1`` extra vertices inserted in every segment."""
        v = self.vertices
        t = np.arange(per_segment) / per_segment
        pts = (v[:-1, None] + t[None, :] * (v[1:] - v[:-1])[:, None]).ravel()
        return PathPolyline(np.append(pts, v[-1]))

    def to_json(self) -> str:
        return json.dumps([[z.real, z.imag] for z in self.vertices])

    @classmethod
    def from_json(cls, text: str) -> "PathPolyline":
        pairs = json.loads(text)
        return cls(np.array([complex(x, y) for x, y in pairs]))

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "PathPolyline":
        return cls.from_json(Path(path).read_text())


def _simpson(d: Density, a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Composite Simpson with ``n`` (even) panels on each segment ``[a_k, b_k]``."""
    t = np.linspace(0.0, 1.0, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    pts = a[:, None] + t[None, :] * (b - a)[:, None]
    vals = d(pts)
    return np.abs(b - a) * (vals @ w) / (3.0 * n)


def path_length(d: Density, p: PathPolyline, rtol: float = 1e-10, max_panels: int = 2**20) -> float:
    """``lambda``-length of a polyline by per-segment Simpson refinement.

    Each segment's panel count doubles until two successive estimates agree
    to ``rtol`` relative.
    """
    v = p.vertices
    if not np.all(d.domain.contains(v, d.margin)):
        raise DomainError("path-exits-domain: a vertex lies outside the domain")
    a, b = v[:-1], v[1:]
    n = 8
    try:
        prev = _simpson(d, a, b, n)
    except DomainError as exc:
        raise DomainError(f"path-exits-domain: {exc}") from None
    out = np.empty_like(prev)
    pending = np.arange(a.size)
    while pending.size:
        n *= 2
        if n > max_panels:
            raise DomainError("path-exits-domain: quadrature does not settle (singular integrand?)")
        try:
            cur = _simpson(d, a[pending], b[pending], n)
        except DomainError as exc:
            raise DomainError(f"path-exits-domain: {exc}") from None
        done = np.abs(cur - prev) <= rtol * np.abs(cur)
        out[pending[done]] = cur[done]
        pending, prev = pending[~done], cur[~done]
    return float(np.sum(out))


def default_stencil(d: Density, z) -> np.ndarray:
    dist = d.domain.distance_to_boundary(np.asarray(z, dtype=complex))
    return np.where(np.isfinite(dist), 1e-3 * dist, 1e-3)


def curvature_estimate(d: Density, z, h: Optional[float] = None):
    """Five-point estimate of ``-Laplace(log lambda) / lambda^2`` (``O(h^2)``).

    ``h`` defaults to ``1e-3`` times the distance to the boundary.
    """
    z = np.asarray(z, dtype=complex)
    h = default_stencil(d, z) if h is None else np.broadcast_to(np.asarray(h, float), z.shape)
    stencil = np.stack([z, z + h, z - h, z + 1j * h, z - 1j * h])
    if not np.all(d.domain.contains(stencil, d.margin)):
        raise DomainError("stencil-outside-domain")
    vals = d(stencil)
    if np.any(vals[0] <= 0):
        raise DomainError("zero-density-at-node: curvature undefined where lambda vanishes")
    logs = np.log(vals)
    lap = (logs[1] + logs[2] + logs[3] + logs[4] - 4 * logs[0]) / h**2
    out = -lap / vals[0] ** 2
    return float(out) if out.ndim == 0 else out


def grid_curvature(grid: Grid, step_cells: int = 1) -> np.ndarray:
    """Curvature ``-Laplace(log lambda) / lambda^2`` at the nodes of a grid.

    Uses the five-point stencil with arm ``step_cells`` cells on the nodal
    values themselves, so no interpolation enters.  Nodes whose stencil
    touches an inactive node get ``nan``.
    """
    if step_cells < 1:
        raise ParameterError("step_cells must be a positive integer")
    u = grid.values if grid.quantity == "log_density" else np.log(np.where(grid.values > 0, grid.values, np.nan))
    act = grid.mask != OUTSIDE
    k = int(step_cells)
    out = np.full(u.shape, np.nan)
    c = (slice(k, -k), slice(k, -k))
    arms = [(slice(k, -k), slice(2 * k, None)), (slice(k, -k), slice(None, -2 * k)),
            (slice(2 * k, None), slice(k, -k)), (slice(None, -2 * k), slice(k, -k))]
    ok = act[c].copy()
    lap = -4 * u[c]
    for a in arms:
        ok &= act[a]
        lap = lap + u[a]
    lap = lap / (k * grid.spacing) ** 2
    with np.errstate(invalid="ignore", over="ignore"):
        kappa = -lap / np.exp(2 * u[c])
    out[c] = np.where(ok, kappa, np.nan)
    return out


def boundary_points(domain: DomainSpec, n: int) -> np.ndarray:
    """``n`` points per boundary circle (punctures are listed once)."""
    t = np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
    if isinstance(domain, Disk):
        return domain.center + domain.radius * t
    if isinstance(domain, PuncturedDisk):
        return np.append(domain.center + domain.radius * t, domain.center)
    if isinstance(domain, Annulus):
        return np.concatenate([domain.center + domain.outer * t, domain.center + domain.inner * t])
    if isinstance(domain, DiskMinusHoles):
        parts = [domain.outer.center + domain.outer.radius * t]
        parts += [h.center + h.radius * t for h in domain.holes]
        return np.concatenate(parts)
    raise ParameterError(f"no boundary sampler for {type(domain).__name__}")


def _inward(domain: DomainSpec, xi: np.ndarray, step: float) -> np.ndarray:
    """Push boundary samples a small step into the domain (finite-difference normal)."""
    e = 1e-7 * max(1.0, step)
    d0 = domain.distance_to_boundary(xi)
    gx = (domain.distance_to_boundary(xi + e) - d0) / e
    gy = (domain.distance_to_boundary(xi + 1j * e) - d0) / e
    g = gx + 1j * gy
    g = np.where(np.abs(g) > 0, g / np.where(np.abs(g) > 0, np.abs(g), 1), 0)
    return xi + step * g


def glue_max(base: Density, patch: Density, n_check: int = 256, rtol: float = 1e-6) -> Density:
    """``max(base, patch)`` on the patch's domain ``U``, ``base`` elsewhere.

    The gluing condition ``limsup patch <= base`` on ``dU ∩ G`` is checked at
    ``n_check`` samples per boundary circle, evaluated just inside ``U``;
    a :class:`GluingWarning` is issued when it fails.
    """
    U = patch.domain
    try:
        xi = boundary_points(U, n_check)
    except ParameterError:
        xi = np.empty(0, dtype=complex)
    if xi.size:
        bbox = U.bbox()
        scale = max(bbox[1] - bbox[0], bbox[3] - bbox[2]) if bbox else 1.0
        pts = _inward(U, xi, 1e-7 * scale)
        ok = U.contains(pts, 0.0) & base.domain.contains(pts, base.margin)
        pts = pts[ok]
        if pts.size:
            mu, lam = patch.unchecked(pts), base.unchecked(pts)
            bad = mu > lam * (1 + rtol) + 1e-12
            if np.any(bad):
                warnings.warn(
                    f"gluing condition violated at {int(bad.sum())} of {pts.size} boundary samples "
                    f"(max ratio {np.max(mu[bad] / lam[bad]):.6g})",
                    GluingWarning,
                    stacklevel=2,
                )

    def rule(z):
        out = base.rule(z)
        inU = U.contains(z, patch.margin)
        if np.any(inU):
            out = np.array(out, dtype=float, copy=True)
            zz = z[inU] if np.ndim(z) else z
            if np.ndim(z):
                out[inU] = np.maximum(out[inU], patch.rule(zz))
            else:
                out = np.maximum(out, patch.rule(z))
        return out

    return Density(rule, base.domain, base.kind, f"max({base.name}, {patch.name})", base.margin)
