"""Closed-form densities of constant curvature -1 and comparison metrics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import Density
from .domains import (
    Annulus,
    Disk,
    ExteriorDisk,
    PuncturedDisk,
    PuncturedPlaneSet,
    TwicePuncturedPlane,
)
from .errors import ParameterError

RADIAL_VARIANTS = (
    "disk",
    "punctured-disk-log",
    "punctured-disk-alpha",
    "annulus",
    "exterior-log",
    "exterior-alpha",
)


@dataclass(frozen=True)
class RadialMetricFamily:
    """Parameters of a radially symmetric curvature -1 metric.

    ``variant`` is one of :data:`RADIAL_VARIANTS`; ``R`` is the outer (or, for
    the exterior variants, inner) radius, ``r`` the inner annulus radius and
    ``alpha`` the exponent of the two alpha families.
    """

    variant: str
    R: float = 1.0
    r: float = 0.0
    alpha: float = 0.0
    center: complex = 0j

    def __post_init__(self):
        if self.variant not in RADIAL_VARIANTS:
            raise ParameterError(f"unknown radial family {self.variant!r}")
        if not self.R > 0:
            raise ParameterError("R must be positive")
        if self.variant == "annulus" and not 0 < self.r < self.R:
            raise ParameterError("annulus needs 0 < r < R")
        if self.variant == "punctured-disk-alpha" and not (self.alpha > 0 and self.alpha != 1):
            raise ParameterError("punctured-disk-alpha needs alpha in (0, inf) minus {1}")
        if self.variant == "exterior-alpha" and not self.alpha > 0:
            raise ParameterError("exterior-alpha needs alpha > 0")

    def domain(self):
        c = self.center
        return {
            "disk": lambda: Disk(c, self.R),
            "punctured-disk-log": lambda: PuncturedDisk(c, self.R),
            "punctured-disk-alpha": lambda: PuncturedDisk(c, self.R),
            "annulus": lambda: Annulus(c, self.r, self.R),
            "exterior-log": lambda: ExteriorDisk(c, self.R),
            "exterior-alpha": lambda: ExteriorDisk(c, self.R),
        }[self.variant]()


def _radial_rule(fam: RadialMetricFamily):
    R, r, a, c = fam.R, fam.r, fam.alpha, fam.center
    if fam.variant == "disk":
        return lambda z: 2 * R / (R**2 - np.abs(z - c) ** 2)
    if fam.variant == "punctured-disk-log":
        def rule(z):
            rho = np.abs(z - c)
            return 1.0 / (rho * np.log(R / rho))
        return rule
    if fam.variant == "punctured-disk-alpha":
        def rule(z):
            rho = np.abs(z - c)
            return 2 * a * R**a * rho ** (a - 1) / (R ** (2 * a) - rho ** (2 * a))
        return rule
    if fam.variant == "annulus":
        L = np.log(R / r)

        def rule(z):
            rho = np.abs(z - c)
            return (np.pi / L) / (rho * np.sin(np.pi * np.log(R / rho) / L))
        return rule
    if fam.variant == "exterior-log":
        def rule(z):
            rho = np.abs(z - c)
            return 1.0 / (rho * np.log(rho / R))
        return rule

    def rule(z):
        rho = np.abs(z - c)
        return 2 * a * R**a * rho ** (a - 1) / (rho ** (2 * a) - R ** (2 * a))
    return rule


def radial_density(fam: RadialMetricFamily) -> Density:
    """The radially symmetric curvature -1 density of the given family."""
    return Density(_radial_rule(fam), fam.domain(), name=fam.variant)


def hyperbolic_disk(R: float = 1.0, center: complex = 0j) -> Density:
    return radial_density(RadialMetricFamily("disk", R=R, center=center))


def hyperbolic_punctured_disk(R: float = 1.0, center: complex = 0j) -> Density:
    return radial_density(RadialMetricFamily("punctured-disk-log", R=R, center=center))


def hyperbolic_annulus(r: float, R: float = 1.0, center: complex = 0j) -> Density:
    return radial_density(RadialMetricFamily("annulus", R=R, r=r, center=center))


def hyperbolic_exterior(R: float = 1.0, center: complex = 0j) -> Density:
    return radial_density(RadialMetricFamily("exterior-log", R=R, center=center))


def lambda_alpha(alpha: float) -> Density:
    """Upper bound ``2(1-a)|z|^-a / (1 - |z|^(2(1-a)))`` on the punctured unit disk, ``a < 1``."""
    if not alpha < 1:
        raise ParameterError("alpha must be < 1")
    b = 1 - alpha

    def rule(z):
        rho = np.abs(z)
        return 2 * b * rho ** (-alpha) / (1 - rho ** (2 * b))

    return Density(rule, PuncturedDisk(0j, 1.0), name=f"lambda_alpha({alpha})")


# ---------------------------------------------------------------------------
# Minda-Schober metric on C \ {0, 1}


def minda_schober_density(eps: float) -> Density:
    """``eps * sqrt(1+|z|^(1/3)) / |z|^(5/6) * sqrt(1+|z-1|^(1/3)) / |z-1|^(5/6)``."""
    if not eps > 0:
        raise ParameterError("eps must be positive")

    def rule(z):
        a, b = np.abs(z), np.abs(z - 1)
        return eps * np.sqrt(1 + np.cbrt(a)) / a ** (5 / 6) * np.sqrt(1 + np.cbrt(b)) / b ** (5 / 6)

    return Density(rule, TwicePuncturedPlane(), name=f"minda-schober({eps})")


def minda_schober_curvature(z, eps: float) -> np.ndarray:
    """Exact curvature of :func:`minda_schober_density`."""
    z = np.asarray(z, dtype=complex)
    a, b = np.abs(z), np.abs(z - 1)
    ca, cb = 1 + np.cbrt(a), 1 + np.cbrt(b)
    bracket = b ** (5 / 3) / (ca**3 * cb) + a ** (5 / 3) / (ca * cb**3)
    return -bracket / (18 * eps**2)


def curvature_bound_ok(eps: float, samples=None, seed: int = 0) -> bool:
    """True when the Minda-Schober curvature is <= -1 at every sample point.

    The default sample mixes points near both punctures with a broad random
    cloud; pass ``samples`` to check specific points.
    """
    if samples is None:
        rng = np.random.default_rng(seed)
        radii = 10 ** rng.uniform(-6, 3, 2000)
        phases = np.exp(2j * np.pi * rng.random(2000))
        samples = np.concatenate([radii * phases, 1 + radii * phases])
    return bool(np.all(minda_schober_curvature(samples, eps) <= -1.0))


# ---------------------------------------------------------------------------
# conical singularities and Robinson's metric


@dataclass(frozen=True)
class ConicalParams:
    """Finite punctures ``z_1..z_{n-1}``, orders ``alpha_1..alpha_n`` (last one at infinity)."""

    punctures: tuple
    orders: tuple
    delta: float
    eps: float = 1.0

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.punctures)
        orders = tuple(float(a) for a in self.orders)
        object.__setattr__(self, "punctures", pts)
        object.__setattr__(self, "orders", orders)
        if len(orders) != len(pts) + 1:
            raise ParameterError("need one order per finite puncture plus one for infinity")
        if len(orders) < 3:
            raise ParameterError("need at least three singular points")
        if any(a > 1 for a in orders):
            raise ParameterError("orders must be <= 1")
        if not sum(orders) > 2:
            raise ParameterError("orders must sum to more than 2")
        if not (self.delta > 0 and self.eps > 0):
            raise ParameterError("delta and eps must be positive")
        for k, p in enumerate(pts):
            if abs(p) >= 1 / self.delta:
                raise ParameterError("punctures must satisfy |z_j| < 1/delta")
            for q in pts[:k]:
                if abs(p - q) <= self.delta:
                    raise ParameterError("punctures must be more than delta apart")


def _conical_finite(zj: complex, a: float, delta: float) -> Density:
    if a < 1:
        b = 1 - a

        def rule(z):
            rho = np.abs(z - zj)
            return 2 * b * delta**b * rho ** (-a) / (delta ** (2 * b) - rho ** (2 * b))
    else:
        def rule(z):
            rho = np.abs(z - zj)
            return 1.0 / (rho * np.log(delta / rho))
    return Density(rule, PuncturedDisk(zj, delta), name=f"conical({zj}, {a})")


def _conical_infinity(a: float, delta: float) -> Density:
    if a < 1:
        b = 1 - a

        def rule(z):
            rho = np.abs(z)
            return 2 * b * delta**b * rho ** (-a) / (delta ** (2 * b) * rho ** (2 * b) - 1)
    else:
        def rule(z):
            rho = np.abs(z)
            return 1.0 / (rho * np.log(delta * rho))
    return Density(rule, ExteriorDisk(0j, 1 / delta), name=f"conical(inf, {a})")


def conical_densities(p: ConicalParams) -> list[Density]:
    """Comparison densities ``lambda_1..lambda_n`` for prescribed conical singularities."""
    out = [_conical_finite(zj, a, p.delta) for zj, a in zip(p.punctures, p.orders[:-1])]
    out.append(_conical_infinity(p.orders[-1], p.delta))
    return out


def robinson_density(
    punctures: Sequence[complex], orders: Sequence[float], eps: float, delta: float
) -> Density:
    """Robinson's metric with curvature <= -1 (for small ``eps``, ``delta``).

    ``orders`` has one entry per finite puncture plus the order at infinity.
    """
    pts = [complex(p) for p in punctures]
    orders = [float(a) for a in orders]
    if len(orders) != len(pts) + 1:
        raise ParameterError("need one order per finite puncture plus one for infinity")
    if any(a >= 1 for a in orders):
        raise ParameterError("Robinson's metric needs all orders < 1")
    s = sum(orders)
    if not s > 2:
        raise ParameterError(f"orders must sum to more than 2 (got {s})")
    if not (eps > 0 and delta > 0):
        raise ParameterError("eps and delta must be positive")
    n1 = len(pts)
    expo = (s - 2) / (n1 * delta)

    def rule(z):
        out = np.full(np.shape(z), float(eps))
        for zj, a in zip(pts, orders):
            rho = np.abs(z - zj)
            out = out * (1 + rho**delta) ** expo / rho**a
        return out

    return Density(rule, PuncturedPlaneSet(tuple(pts)), name="robinson")


def robinson_local_factors(d: Density, punctures, orders, radii) -> np.ndarray:
    """``|z-z_j|^alpha_j tau(z)`` at ``z_j + r`` for each puncture (rows) and radius (columns)."""
    radii = np.asarray(radii, dtype=float)
    rows = []
    for zj, a in zip(punctures, orders):
        rows.append(radii**a * d(complex(zj) + radii))
    return np.array(rows)


def robinson_infinity_factor(d: Density, alpha_inf: float, radii) -> np.ndarray:
    """``|z|^(2-alpha_n) tau(z)`` along the positive real axis at the given radii."""
    radii = np.asarray(radii, dtype=float)
    return radii ** (2 - alpha_inf) * d(radii.astype(complex))
