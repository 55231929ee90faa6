"""Hyperbolic metric of bounded multiply connected domains by disk modifications.

Starting from a subsolution (an SK-metric below ``lambda_G``), every
modification replaces ``log lambda`` on a disk ``K`` compactly inside ``G``
by the solution of the Dirichlet problem ``Laplace u = exp(2u)`` on ``K``
with the current boundary values, and keeps the pointwise max.  Cyclic
sweeps over a cover of the grid produce a nondecreasing sequence that
converges to the hyperbolic metric.

Implementation notes
--------------------
* Each disk problem is pulled back to the unit disk by ``z = c + rho*zeta``;
  the boundary data become ``log lambda(c + rho e^{it}) + log rho``.
* Values are transported between the domain grid and the unit-disk grid as
  ``log(lambda / seed)``: the seed carries the boundary blow-up exactly, so
  the remainder is smooth and bilinear interpolation stays accurate close to
  the boundary.
* Disks that are further apart than two grid cells never read or write each
  other's nodes, so the disks of one color class of the overlap graph are
  solved as one batch.  The result is identical to processing them one
  after the other.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .closed_forms import hyperbolic_disk, hyperbolic_exterior
from .density import BOUNDARY, INTERIOR, OUTSIDE, Density, Grid, GridDensity
from .domains import Annulus, Disk, DiskMinusHoles, DomainSpec, annulus_as_disk_minus_holes
from .errors import DomainError, ParameterError
from .green import GreenOperator, SolveReport, green_operator, solve_on_operator

N_CIRCLE = 2048


# ---------------------------------------------------------------------------
# seed


def _as_disk_minus_holes(G: DomainSpec) -> DiskMinusHoles:
    if isinstance(G, DiskMinusHoles):
        return G
    if isinstance(G, Annulus):
        return annulus_as_disk_minus_holes(G)
    if isinstance(G, Disk):
        return DiskMinusHoles(G, ())
    raise ParameterError(f"unsupported-domain: {type(G).__name__} (need Disk, Annulus or DiskMinusHoles)")


def seed_sk_metric(G: DomainSpec, include_holes: bool = True) -> Density:
    """Curvature -1 lower bound for ``lambda_G`` built from superdomains of ``G``.

    The outer disk ``D`` and, for every hole ``B``, the exterior of ``B`` contain
    ``G``, so their hyperbolic densities are below ``lambda_G``.  The pointwise
    max of these is an SK-metric on ``G`` (gluing) that is asymptotically exact
    at every boundary circle.  ``include_holes=False`` returns the outer-disk
    density alone.
    """
    dmh = _as_disk_minus_holes(G)
    outer = hyperbolic_disk(dmh.outer.radius, dmh.outer.center)
    parts = [outer] + ([hyperbolic_exterior(h.radius, h.center) for h in dmh.holes] if include_holes else [])

    def rule(z):
        out = parts[0].rule(z)
        for p in parts[1:]:
            out = np.maximum(out, p.rule(z))
        return out

    return Density(rule, G, name="seed")


# ---------------------------------------------------------------------------
# covers


@dataclass
class DiskCover:
    """Disks ``|z - centers[k]| < radii[k]``, each compactly inside the domain.

    ``reach`` is the fraction of each radius on which a modification writes
    back to grid nodes; a node counts as covered when it lies within
    ``reach * radius`` of some center.
    """

    centers: np.ndarray
    radii: np.ndarray
    reach: float = 0.92

    def __post_init__(self):
        self.centers = np.asarray(self.centers, dtype=complex).ravel()
        self.radii = np.asarray(self.radii, dtype=float).ravel()
        if self.centers.shape != self.radii.shape:
            raise ParameterError("centers and radii must have the same length")
        if np.any(self.radii <= 0):
            raise ParameterError("disk radii must be positive")
        if not 0 < self.reach <= 1:
            raise ParameterError("reach must lie in (0, 1]")

    def __len__(self):
        return self.centers.size

    @classmethod
    def single(cls, center: complex, radius: float, reach: float = 0.92) -> "DiskCover":
        return cls(np.array([center]), np.array([radius]), reach)

    @classmethod
    def greedy(
        cls,
        G: DomainSpec,
        grid: Grid,
        factor: float = 0.4,
        collar: float = 2.5,
        reach: float = 0.92,
    ) -> "DiskCover":
        """Greedy cover of the grid nodes at distance ``>= collar`` cells from the boundary.

        Uncovered nodes are visited by decreasing distance to the boundary;
        each one becomes the center of a disk of radius ``factor`` times its
        distance to the boundary.
        """
        if not 0 < factor < 1:
            raise ParameterError("factor must lie in (0, 1)")
        z = grid.nodes()[grid.active()]
        dist = G.distance_to_boundary(z)
        cand = np.flatnonzero(dist >= collar * grid.spacing)
        order = cand[np.lexsort((np.arange(cand.size), -dist[cand]))]
        tree = cKDTree(np.column_stack([z.real, z.imag]))
        covered = np.zeros(z.size, dtype=bool)
        centers, radii = [], []
        for k in order:
            if covered[k]:
                continue
            rho = factor * dist[k]
            centers.append(z[k])
            radii.append(rho)
            covered[tree.query_ball_point([z[k].real, z[k].imag], reach * rho)] = True
            covered[k] = True
        return cls(np.array(centers), np.array(radii), reach)

    def validate(self, G: DomainSpec, margin: float = 0.0) -> None:
        """Raise when a closed disk is not inside ``G``."""
        clearance = G.distance_to_boundary(self.centers) - self.radii
        if np.any(clearance <= margin):
            k = int(np.argmin(clearance))
            raise DomainError(
                f"disk-not-compactly-contained: disk {k} (center {self.centers[k]}, "
                f"radius {self.radii[k]}) reaches the boundary"
            )

    def overlap_pairs(self, gap: float = 0.0) -> np.ndarray:
        """Index pairs ``(i, j)``, ``i < j``, of disks closer than ``gap``."""
        if len(self) < 2:
            return np.empty((0, 2), dtype=int)
        tree = cKDTree(np.column_stack([self.centers.real, self.centers.imag]))
        rmax = float(self.radii.max())
        pairs = tree.query_pairs(2 * rmax + gap, output_type="ndarray")
        if pairs.size == 0:
            return pairs.reshape(0, 2)
        d = np.abs(self.centers[pairs[:, 0]] - self.centers[pairs[:, 1]])
        keep = d < self.radii[pairs[:, 0]] + self.radii[pairs[:, 1]] + gap
        return pairs[keep]

    def is_connected(self) -> bool:
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        pairs = self.overlap_pairs()
        n = len(self)
        if n <= 1:
            return True
        A = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        return connected_components(A, directed=False)[0] == 1

    def colors(self, gap: float = 0.0) -> np.ndarray:
        """Greedy coloring (in cover order) such that same-colored disks are ``gap`` apart."""
        n = len(self)
        nbrs = [[] for _ in range(n)]
        for i, j in self.overlap_pairs(gap):
            nbrs[i].append(j)
            nbrs[j].append(i)
        color = np.full(n, -1, dtype=int)
        for k in range(n):
            used = {color[j] for j in nbrs[k] if color[j] >= 0}
            c = 0
            while c in used:
                c += 1
            color[k] = c
        return color

    def to_dict(self) -> dict:
        return {
            "centers": [[c.real, c.imag] for c in self.centers],
            "radii": self.radii.tolist(),
            "reach": self.reach,
        }


# ---------------------------------------------------------------------------
# state


@dataclass
class PerronState:
    """Current ``log lambda`` grid and per-sweep diagnostics."""

    current: Grid
    sweep_count: int = 0
    max_increase: list = field(default_factory=list)
    min_increase: list = field(default_factory=list)
    converged: bool = False
    n_disks: int = 0
    n_colors: int = 0
    seconds: float = 0.0
    local_iterations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sweep_count": self.sweep_count,
            "max_increase": list(self.max_increase),
            "min_increase": list(self.min_increase),
            "converged": self.converged,
            "n_disks": self.n_disks,
            "n_colors": self.n_colors,
            "local_iterations": list(self.local_iterations),
            "grid": self.current.header(),
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# modification machinery


def _bilinear(values: np.ndarray, x0: float, y0: float, s: float, z: np.ndarray) -> np.ndarray:
    ny, nx = values.shape
    fx = (z.real - x0) / s
    fy = (z.imag - y0) / s
    j = np.clip(np.floor(fx).astype(np.int64), 0, nx - 2)
    i = np.clip(np.floor(fy).astype(np.int64), 0, ny - 2)
    tx, ty = fx - j, fy - i
    return (
        (1 - tx) * (1 - ty) * values[i, j] + tx * (1 - ty) * values[i, j + 1]
        + (1 - tx) * ty * values[i + 1, j] + tx * ty * values[i + 1, j + 1]
    )


class _Modifier:
    """Batched disk modifications on one domain grid.

    ``log_ref`` is the log of a reference density (the seed, or zero) used to
    transport smooth remainders between grids.
    """

    def __init__(
        self,
        grid: Grid,
        log_ref: Optional[Callable] = None,
        local_spacing: float = 1 / 24,
        local_tol: float = 1e-8,
        local_max_iter: int = 200,
        omega="auto",
    ):
        self.grid = grid
        self.log_ref = log_ref if log_ref is not None else (lambda z: np.zeros(np.shape(z)))
        self.op: GreenOperator = green_operator(float(local_spacing), 1e-13)
        self.local_tol = local_tol
        self.local_max_iter = local_max_iter
        self.omega = omega
        self.t = np.exp(2j * np.pi * np.arange(N_CIRCLE) / N_CIRCLE)
        self.active = grid.active()
        self.nodes = grid.nodes()
        self.node_ref = np.zeros(grid.shape)
        self.node_ref[self.active] = self.log_ref(self.nodes[self.active])
        self.flat_active = np.flatnonzero(self.active.ravel())
        z_act = self.nodes.ravel()[self.flat_active]
        self.tree = cKDTree(np.column_stack([z_act.real, z_act.imag]))
        self.unit_reach = 1 - 2.5 * self.op.spacing
        self.unit_x0 = -self.op.m * self.op.spacing

    def targets(self, c: complex, rho: float, reach: float) -> np.ndarray:
        r = min(reach, self.unit_reach) * rho
        idx = self.tree.query_ball_point([c.real, c.imag], r)
        return self.flat_active[np.sort(np.asarray(idx, dtype=np.int64))]

    def batch(self, U: np.ndarray, centers, radii, reach: float, initial: bool = True):
        """Modify ``U`` (log lambda, full 2-D array) in place on the given disjoint disks.

        Returns the per-disk max increase and the local solver report.
        """
        g = self.grid
        op = self.op
        B = len(centers)
        W = U - self.node_ref
        c = np.asarray(centers, dtype=complex)[:, None]
        rho = np.asarray(radii, dtype=float)[:, None]
        circ = c + rho * self.t[None, :]
        psi = _bilinear(W, g.x0, g.y0, g.spacing, circ) + self.log_ref(circ) + np.log(rho)
        h = op.harmonic(psi)
        unit_pts = c + rho * op.nodes[None, :]
        ref_unit = self.log_ref(unit_pts) + np.log(rho)
        init = None
        if initial:
            init = _bilinear(W, g.x0, g.y0, g.spacing, unit_pts) + ref_unit
        u, report = solve_on_operator(
            op, h, tol=self.local_tol, max_iter=self.local_max_iter,
            omega=self.omega, track_bracket=False, initial=init,
        )
        rem = op.to_square(u - ref_unit)
        flat = U.reshape(-1)
        inc = np.zeros(B)
        for k in range(B):
            idx = self.targets(complex(c[k, 0]), float(rho[k, 0]), reach)
            if idx.size == 0:
                continue
            zk = self.nodes.reshape(-1)[idx]
            zeta = (zk - c[k, 0]) / rho[k, 0]
            val = _bilinear(rem[k], self.unit_x0, self.unit_x0, op.spacing, zeta) + self.node_ref.reshape(-1)[idx]
            old = flat[idx]
            new = np.maximum(old, val)
            flat[idx] = new
            inc[k] = float(np.max(new - old))
        return inc, report


def modify_on_disk(
    lam: Grid,
    center: complex,
    radius: float,
    G: Optional[DomainSpec] = None,
    reference: Optional[Density] = None,
    local_spacing: float = 1 / 24,
    local_tol: float = 1e-8,
    reach: float = 0.92,
) -> Grid:
    """One modification ``M_K`` on the disk ``K = {|z - center| < radius}``.

    ``lam`` holds ``log lambda`` on the domain grid.  The result agrees with
    ``lam`` outside ``K`` and is ``>= lam`` everywhere.  When ``G`` is given the
    closed disk must lie inside it; ``reference`` (a density comparable to
    ``lambda`` near the boundary) only affects interpolation accuracy.
    """
    if lam.quantity != "log_density":
        raise ParameterError("modify_on_disk expects a log_density grid")
    if G is not None:
        DiskCover.single(center, radius).validate(G)
    x0, x1, y0, y1 = lam.bbox
    s = lam.spacing
    c = complex(center)
    if c.real - radius < x0 + s or c.real + radius > x1 - s or c.imag - radius < y0 + s or c.imag + radius > y1 - s:
        raise DomainError("disk-not-compactly-contained: disk leaves the grid")
    circle = c + radius * np.exp(2j * np.pi * np.arange(64) / 64)
    try:
        lam.interpolate(circle)
    except DomainError:
        raise DomainError("disk-not-compactly-contained: disk boundary leaves the active grid") from None
    log_ref = None
    if reference is not None:
        log_ref = lambda z: np.log(reference.unchecked(z))  # noqa: E731
    mod = _Modifier(lam, log_ref, local_spacing, local_tol)
    U = lam.values.copy()
    mod.batch(U, [c], [radius], reach)
    return lam.with_values(U)


def perron_solve(
    G: DomainSpec,
    cover: Optional[DiskCover] = None,
    tol: float = 1e-4,
    max_sweeps: int = 60,
    spacing: float = 1 / 64,
    seed: Optional[Density] = None,
    local_spacing: float = 1 / 24,
    local_tol: float = 1e-7,
    omega="auto",
    batch_size: int = 256,
    snapshot: Optional[Callable[[int, Grid], None]] = None,
    progress: Optional[Callable[[int, float], None]] = None,
):
    """Perron iteration for the hyperbolic metric of ``G``.

    Parameters
    ----------
    G : Disk, Annulus or DiskMinusHoles
    cover : DiskCover, optional
        Defaults to :meth:`DiskCover.greedy` on the domain grid.
    tol : float
        Stop once a full sweep raises ``log lambda`` by at most ``tol`` anywhere.
    max_sweeps : int
        When exhausted the current iterate is returned with ``converged=False``.
    spacing : float
        Domain grid spacing.
    seed : Density, optional
        Initial SK-metric, defaults to :func:`seed_sk_metric`.
    local_spacing, local_tol : float
        Unit-disk grid spacing and residual tolerance of each disk solve.
    snapshot : callable, optional
        Called as ``snapshot(sweep, grid)`` after every sweep.

    Returns
    -------
    density : GridDensity
        Interpolates ``log(lambda / seed)`` and multiplies by the seed.
    state : PerronState
    """
    t_start = time.perf_counter()
    seed = seed or seed_sk_metric(G)
    # nodes at round-off distance from the boundary cannot carry the seed
    grid = Grid.for_domain(G, spacing, margin=seed.margin)
    act = grid.active()
    U = np.zeros(grid.shape)
    U[act] = np.log(seed(grid.nodes()[act]))
    if cover is None:
        cover = DiskCover.greedy(G, grid)
    cover.validate(G)
    log_ref = lambda z: np.log(seed.unchecked(z))  # noqa: E731
    mod = _Modifier(grid, log_ref, local_spacing, local_tol, omega=omega)
    colors = cover.colors(gap=2.5 * spacing)
    groups = []
    for col in range(int(colors.max()) + 1 if len(cover) else 0):
        members = np.flatnonzero(colors == col)
        for start in range(0, members.size, batch_size):
            groups.append(members[start:start + batch_size])
    state = PerronState(grid.with_values(U, "log_density"), n_disks=len(cover), n_colors=len(set(colors.tolist())))
    for sweep in range(1, max_sweeps + 1):
        before = U.copy()
        its = 0
        for members in groups:
            _, rep = mod.batch(U, cover.centers[members], cover.radii[members], cover.reach)
            its = max(its, rep.iterations)
        diff = (U - before)[act]
        state.sweep_count = sweep
        state.max_increase.append(float(diff.max()) if diff.size else 0.0)
        state.min_increase.append(float(diff.min()) if diff.size else 0.0)
        state.local_iterations.append(its)
        state.current = grid.with_values(U.copy(), "log_density")
        if snapshot is not None:
            snapshot(sweep, state.current)
        if progress is not None:
            progress(sweep, state.max_increase[-1])
        if state.max_increase[-1] <= tol:
            state.converged = True
            break
    state.seconds = time.perf_counter() - t_start
    density = GridDensity(state.current, G, name="perron", reference=seed)
    return density, state
