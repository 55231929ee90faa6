"""Geometric descriptions of planar domains.

Every domain answers three vectorized questions: does it contain a point
(optionally with a safety margin), how far is a point from the boundary,
and what is its bounding box (``None`` when unbounded).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError

#: Points closer than this to a boundary or puncture are treated as outside.
BOUNDARY_EPS = 1e-12


def _as_complex(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


class DomainSpec:
    """Base class; concrete variants are frozen dataclasses below."""

    bounded: bool = True

    @property
    def punctures(self) -> tuple:
        """Isolated finite boundary points."""
        return ()

    def distance_to_boundary(self, z) -> np.ndarray:
        raise NotImplementedError

    def contains(self, z, margin: float = 0.0) -> np.ndarray:
        d = self.distance_to_boundary(z)
        return d > max(margin, 0.0)

    def bbox(self) -> Optional[tuple[float, float, float, float]]:
        return None


@dataclass(frozen=True)
class Plane(DomainSpec):
    """The whole complex plane (euclidean comparison densities live here)."""

    bounded = False

    def distance_to_boundary(self, z):
        return np.full(np.shape(z), np.inf)


@dataclass(frozen=True)
class Disk(DomainSpec):
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"disk radius must be positive, got {self.radius}")

    def distance_to_boundary(self, z):
        return self.radius - np.abs(_as_complex(z) - self.center)

    def bbox(self):
        c, r = complex(self.center), self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class PuncturedDisk(DomainSpec):
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"disk radius must be positive, got {self.radius}")

    def distance_to_boundary(self, z):
        rho = np.abs(_as_complex(z) - self.center)
        return np.minimum(self.radius - rho, rho)

    @property
    def punctures(self):
        return (complex(self.center),)

    def bbox(self):
        return Disk(self.center, self.radius).bbox()


@dataclass(frozen=True)
class Annulus(DomainSpec):
    center: complex = 0j
    inner: float = 0.5
    outer: float = 1.0

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ParameterError(
                f"annulus needs 0 < r < R, got r={self.inner}, R={self.outer}"
            )

    def distance_to_boundary(self, z):
        rho = np.abs(_as_complex(z) - self.center)
        return np.minimum(self.outer - rho, rho - self.inner)

    def bbox(self):
        return Disk(self.center, self.outer).bbox()


@dataclass(frozen=True)
class ExteriorDisk(DomainSpec):
    """``{|z - center| > radius}``; the point at infinity is a puncture."""

    center: complex = 0j
    radius: float = 1.0
    bounded = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"radius must be positive, got {self.radius}")

    def distance_to_boundary(self, z):
        return np.abs(_as_complex(z) - self.center) - self.radius


@dataclass(frozen=True)
class PuncturedPlaneSet(DomainSpec):
    """The plane with finitely many points removed."""

    points: tuple = ()
    bounded = False

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise ParameterError("puncture points must be distinct")

    @property
    def punctures(self):
        return self.points

    def distance_to_boundary(self, z):
        z = _as_complex(z)
        if not self.points:
            return np.full(z.shape, np.inf)
        return np.min([np.abs(z - p) for p in self.points], axis=0)


@dataclass(frozen=True)
class TwicePuncturedPlane(PuncturedPlaneSet):
    """``C \\ {0, 1}``."""

    points: tuple = (0j, 1 + 0j)


@dataclass(frozen=True)
class DiskMinusHoles(DomainSpec):
    """An open disk with finitely many closed, pairwise disjoint round holes."""

    outer: Disk = field(default_factory=Disk)
    holes: tuple = ()

    def __post_init__(self):
        holes = tuple(self.holes)
        object.__setattr__(self, "holes", holes)
        for k, hole in enumerate(holes):
            if not isinstance(hole, Disk):
                raise ParameterError("holes must be Disk instances")
            gap = self.outer.radius - abs(hole.center - self.outer.center) - hole.radius
            if gap <= 0:
                raise ParameterError(f"hole {k} is not strictly inside the outer disk")
            for other in holes[:k]:
                if abs(hole.center - other.center) <= hole.radius + other.radius:
                    raise ParameterError("holes must be pairwise disjoint")

    def distance_to_boundary(self, z):
        z = _as_complex(z)
        d = self.outer.distance_to_boundary(z)
        for hole in self.holes:
            d = np.minimum(d, np.abs(z - hole.center) - hole.radius)
        return d

    def bbox(self):
        return self.outer.bbox()


def annulus_as_disk_minus_holes(a: Annulus) -> DiskMinusHoles:
    return DiskMinusHoles(Disk(a.center, a.outer), (Disk(a.center, a.inner),))


def require_hyperbolic(points: Sequence[complex]) -> None:
    if len(points) < 2:
        raise ParameterError("a punctured plane needs at least two punctures to be hyperbolic")
