"""Conformal densities: closed-form rules and grid-sampled fields.

A :class:`Density` wraps a vectorized rule ``z -> lambda(z)`` together with
the domain on which it is defined.  Evaluation outside the domain raises
:class:`~hypmetric.errors.DomainError`; callers are expected to mask points
near boundaries and punctures rather than clamp.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .domains import BOUNDARY_EPS, DomainSpec, Plane
from .errors import DomainError, GridMismatchError, ParameterError
from .maps import HolomorphicMap

CLOSED_FORM = "closed-form"
GRID_SAMPLED = "grid-sampled"

OUTSIDE, BOUNDARY, INTERIOR = 0, 1, 2


@dataclass(frozen=True)
class Density:
    """A conformal density ``lambda(z)|dz|`` on ``domain``.

    ``rule`` must accept a complex ndarray and return a real ndarray of the
    same shape.  It is only ever called on points that lie in the domain.
    """

    rule: Callable[[np.ndarray], np.ndarray]
    domain: DomainSpec = field(default_factory=Plane)
    kind: str = CLOSED_FORM
    name: str = ""
    margin: float = BOUNDARY_EPS

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        inside = self.domain.contains(z, self.margin)
        if not np.all(inside):
            bad = np.atleast_1d(z)[~np.atleast_1d(inside)][0]
            raise DomainError(f"{self.name or 'density'}: point {bad} is outside the domain")
        return np.asarray(self.rule(z), dtype=float)

    def unchecked(self, z):
        """Evaluate the rule without the domain test."""
        return np.asarray(self.rule(np.asarray(z, dtype=complex)), dtype=float)


def eval_density(d: Density, z):
    """``lambda(z)``; returns a float for scalar input."""
    out = d(z)
    return float(out) if np.ndim(out) == 0 else out


def constant_density(c: float, domain: Optional[DomainSpec] = None) -> Density:
    if c < 0:
        raise ParameterError("densities are nonnegative")
    return Density(lambda z: np.full(np.shape(z), float(c)), domain or Plane(), name=f"const({c})")


def pullback(
    d: Density,
    f: HolomorphicMap,
    source_domain: DomainSpec,
    name: str = "",
) -> Density:
    """Pullback ``z -> lambda(f(z)) |f'(z)|`` of ``d`` under ``f``."""

    def rule(z):
        w = f(z)
        if not np.all(d.domain.contains(w, d.margin)):
            raise DomainError("image-escapes-domain: f(z) leaves the domain of the density")
        return d.rule(w) * np.abs(f.derivative(z))

    return Density(rule, source_domain, d.kind, name or f"pullback({d.name})")


# ---------------------------------------------------------------------------
# grids


@dataclass
class Grid:
    """Cartesian nodes ``x0 + j*h``, ``y0 + i*h`` with a mask and per-node values.

    ``values[i, j]`` belongs to the node ``x0 + j*h + 1j*(y0 + i*h)``.
    """

    x0: float
    y0: float
    spacing: float
    mask: np.ndarray
    values: np.ndarray
    quantity: str = "density"

    def __post_init__(self):
        if not self.spacing > 0:
            raise ParameterError("grid spacing must be positive")
        self.mask = np.asarray(self.mask, dtype=np.int8)
        self.values = np.asarray(self.values, dtype=float)
        if self.mask.shape != self.values.shape:
            raise GridMismatchError("mask and values must have the same shape")

    @property
    def shape(self):
        return self.mask.shape

    @property
    def bbox(self):
        ny, nx = self.shape
        h = self.spacing
        return (self.x0, self.x0 + (nx - 1) * h, self.y0, self.y0 + (ny - 1) * h)

    def nodes(self) -> np.ndarray:
        ny, nx = self.shape
        x = self.x0 + self.spacing * np.arange(nx)
        y = self.y0 + self.spacing * np.arange(ny)
        return x[None, :] + 1j * y[:, None]

    def active(self) -> np.ndarray:
        return self.mask != OUTSIDE

    def same_layout(self, other: "Grid") -> bool:
        return (
            self.shape == other.shape
            and np.isclose(self.x0, other.x0)
            and np.isclose(self.y0, other.y0)
            and np.isclose(self.spacing, other.spacing)
            and np.array_equal(self.mask, other.mask)
        )

    def with_values(self, values, quantity: Optional[str] = None) -> "Grid":
        return Grid(self.x0, self.y0, self.spacing, self.mask.copy(), np.array(values, float),
                    quantity or self.quantity)

    @classmethod
    def for_domain(
        cls,
        domain: DomainSpec,
        spacing: float,
        bbox: Optional[tuple] = None,
        margin: Optional[float] = None,
    ) -> "Grid":
        """Grid covering ``bbox`` (default: the domain's) with nodes inside tagged.

        Nodes within one spacing of a puncture, or closer than ``margin`` to
        the boundary, are outside.  In-domain nodes
        with a 4-neighbour outside are tagged boundary, the rest interior.
        """
        bbox = bbox or domain.bbox()
        if bbox is None:
            raise ParameterError("unbounded domain: an explicit bounding box is required")
        xmin, xmax, ymin, ymax = bbox
        # snap to a lattice through the origin so grids of equal spacing align
        j0, j1 = int(np.floor(xmin / spacing + 1e-9)), int(np.ceil(xmax / spacing - 1e-9))
        i0, i1 = int(np.floor(ymin / spacing + 1e-9)), int(np.ceil(ymax / spacing - 1e-9))
        x = spacing * np.arange(j0, j1 + 1)
        y = spacing * np.arange(i0, i1 + 1)
        z = x[None, :] + 1j * y[:, None]
        inside = domain.contains(z, margin or 0.0)
        for p in domain.punctures:
            inside &= np.abs(z - p) > spacing
        mask = np.where(inside, INTERIOR, OUTSIDE).astype(np.int8)
        pad = np.pad(inside, 1, constant_values=False)
        all_nbrs = pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
        mask[inside & ~all_nbrs] = BOUNDARY
        return cls(float(x[0]), float(y[0]), spacing, mask, np.zeros(mask.shape))

    def sample(self, d: Density, quantity: str = "density") -> "Grid":
        """Fill active nodes with ``d`` (or ``log d`` for ``quantity='log_density'``)."""
        values = np.zeros(self.shape)
        act = self.active()
        v = d(self.nodes()[act])
        values[act] = np.log(v) if quantity == "log_density" else v
        return self.with_values(values, quantity)

    # -- bilinear interpolation -------------------------------------------------
    def interpolate(self, z, require_active: bool = True) -> np.ndarray:
        """Bilinear interpolation of ``values`` from the four surrounding nodes."""
        z = np.asarray(z, dtype=complex)
        ny, nx = self.shape
        fx = (z.real - self.x0) / self.spacing
        fy = (z.imag - self.y0) / self.spacing
        j = np.clip(np.floor(fx).astype(int), 0, nx - 2)
        i = np.clip(np.floor(fy).astype(int), 0, ny - 2)
        tx, ty = fx - j, fy - i
        outside_box = (tx < -1e-9) | (tx > 1 + 1e-9) | (ty < -1e-9) | (ty > 1 + 1e-9)
        corners = [(i, j, (1 - tx) * (1 - ty)), (i, j + 1, tx * (1 - ty)),
                   (i + 1, j, (1 - tx) * ty), (i + 1, j + 1, tx * ty)]
        if require_active:
            # corners with zero weight (points on grid lines) need not be active
            ok = np.ones(z.shape, dtype=bool)
            for ii, jj, w in corners:
                ok &= (self.mask[ii, jj] != OUTSIDE) | (w == 0)
            if np.any(outside_box | ~ok):
                raise DomainError("point-outside-domain: no four active grid nodes around the point")
        v = self.values
        out = np.zeros(z.shape)
        for ii, jj, w in corners:
            out = out + np.where(w == 0, 0.0, w * v[ii, jj])
        return out

    # -- serialization ----------------------------------------------------------
    def header(self) -> dict:
        flat = self.mask.ravel()
        change = np.flatnonzero(np.diff(flat)) + 1
        starts = np.concatenate([[0], change])
        ends = np.concatenate([change, [flat.size]])
        rle = [[int(flat[s]), int(e - s)] for s, e in zip(starts, ends)]
        xmin, xmax, ymin, ymax = self.bbox
        return {
            "bbox": [xmin, xmax, ymin, ymax],
            "spacing": self.spacing,
            "shape": list(self.shape),
            "quantity": self.quantity,
            "mask_rle": rle,
            "mask_codes": {"outside": OUTSIDE, "boundary": BOUNDARY, "interior": INTERIOR},
        }

    def to_csv(self, path) -> None:
        nodes = self.nodes()
        act = self.active()
        z, v = nodes[act], self.values[act]
        with open(path, "w") as fh:
            fh.write("x,y,value\n")
            for zz, vv in zip(z, v):
                fh.write(f"{zz.real:.17g},{zz.imag:.17g},{vv:.17g}\n")

    def save(self, csv_path, header_path=None) -> None:
        csv_path = Path(csv_path)
        header_path = Path(header_path) if header_path else csv_path.with_suffix(".json")
        self.to_csv(csv_path)
        header_path.write_text(json.dumps(self.header(), indent=2) + "\n")

    @classmethod
    def load(cls, csv_path, header_path=None) -> "Grid":
        csv_path = Path(csv_path)
        header_path = Path(header_path) if header_path else csv_path.with_suffix(".json")
        head = json.loads(header_path.read_text())
        ny, nx = head["shape"]
        mask = np.concatenate([np.full(n, code, np.int8) for code, n in head["mask_rle"]])
        mask = mask.reshape(ny, nx)
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
        values = np.zeros((ny, nx))
        values[mask != OUTSIDE] = data[:, 2]
        xmin, _, ymin, _ = head["bbox"]
        return cls(xmin, ymin, head["spacing"], mask, values, head.get("quantity", "density"))


class GridDensity(Density):
    """Density backed by a :class:`Grid`; bilinear in ``lambda`` or in ``log lambda``.

    With a ``reference`` density (log grids only) the smooth remainder
    ``log(lambda / reference)`` is interpolated and multiplied back by the
    reference, which keeps interpolation accurate where ``lambda`` blows up.
    """

    def __init__(
        self,
        grid: Grid,
        domain: Optional[DomainSpec] = None,
        name: str = "grid",
        reference: Optional[Density] = None,
    ):
        self_grid = grid

        if reference is not None:
            if grid.quantity != "log_density":
                raise ParameterError("a reference density needs a log_density grid")
            act = grid.active()
            rem = np.zeros(grid.shape)
            rem[act] = grid.values[act] - np.log(reference.unchecked(grid.nodes()[act]))
            rem_grid = grid.with_values(rem)

            def rule(z):
                return np.exp(rem_grid.interpolate(z)) * reference.unchecked(z)
        elif grid.quantity == "log_density":
            def rule(z):
                return np.exp(self_grid.interpolate(z))
        else:
            def rule(z):
                return self_grid.interpolate(z)

        super().__init__(rule, domain or Plane(), GRID_SAMPLED, name)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "reference", reference)
