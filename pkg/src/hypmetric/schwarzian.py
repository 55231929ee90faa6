"""Schwarzian derivatives of metrics and maps, and developing-map reconstruction.

For a density ``lambda = exp(u)`` the metric Schwarzian is

    S_lambda = 2 (u_zz - u_z^2),

which is holomorphic when the curvature is constant.  For a locally
univalent map ``S_f = (f''/f')' - (f''/f')^2 / 2``.  When
``lambda = 2|f'| / (1 - |f|^2)`` the two agree, and ``f`` is recovered from
``S_lambda`` as the quotient of two solutions of ``w'' + (S/2) w = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .density import Density, pullback
from .domains import DomainSpec, Plane
from .errors import DomainError, ParameterError, ReconstructionError
from .maps import HolomorphicMap
from .metric import PathPolyline

CLOSED_FORM = "closed-form"
FINITE_DIFFERENCE = "finite-difference-of-density"

# fourth-order central differences on the offsets -2..2
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


def default_fd_step(d: Density, z) -> np.ndarray:
    """``2e-2`` times the distance to the boundary, capped at ``1e-2``."""
    dist = np.asarray(d.domain.distance_to_boundary(np.asarray(z, dtype=complex)), dtype=float)
    return np.minimum(1e-2, 2e-2 * np.where(np.isfinite(dist), dist, 1.0))


def _log_density_derivatives(d: Density, z, h):
    """``u``, ``u_z`` and ``u_zz`` of ``u = log lambda`` from a 5x5 stencil."""
    z = np.asarray(z, dtype=complex)
    h = np.broadcast_to(np.asarray(h, dtype=float), z.shape)
    ox, oy = np.meshgrid(_OFFSETS, _OFFSETS, indexing="xy")
    pts = z[..., None, None] + h[..., None, None] * (ox + 1j * oy)
    if not np.all(d.domain.contains(pts, d.margin)):
        raise DomainError("stencil-outside-domain: the 5x5 stencil leaves the domain")
    u = np.log(d(pts))  # (..., 5, 5), axis -2 is y, axis -1 is x
    hh = h
    ux = np.einsum("...k,k->...", u[..., 2, :], _D1) / hh
    uy = np.einsum("...k,k->...", u[..., :, 2], _D1) / hh
    uxx = np.einsum("...k,k->...", u[..., 2, :], _D2) / hh**2
    uyy = np.einsum("...k,k->...", u[..., :, 2], _D2) / hh**2
    uxy = np.einsum("...jk,j,k->...", u, _D1, _D1) / hh**2
    uz = 0.5 * (ux - 1j * uy)
    uzz = 0.25 * (uxx - uyy - 2j * uxy)
    return u[..., 2, 2], uz, uzz


def metric_schwarzian_fd(d: Density, z, h=None):
    """``2 (u_zz - u_z^2)`` by fourth-order central differences of ``log lambda``."""
    z = np.asarray(z, dtype=complex)
    h = default_fd_step(d, z) if h is None else h
    _, uz, uzz = _log_density_derivatives(d, z, h)
    out = 2 * (uzz - uz**2)
    return complex(out) if out.ndim == 0 else out


def density_dz(d: Density, z, h=None):
    """Wirtinger derivative ``d lambda / dz = lambda u_z``."""
    z = np.asarray(z, dtype=complex)
    h = default_fd_step(d, z) if h is None else h
    u, uz, _ = _log_density_derivatives(d, z, h)
    out = np.exp(u) * uz
    return complex(out) if out.ndim == 0 else out


def map_schwarzian(f: HolomorphicMap, z):
    """``(f''/f')' - (f''/f')^2/2 = f'''/f' - (3/2)(f''/f')^2``."""
    z = np.asarray(z, dtype=complex)
    d1 = np.asarray(f.derivative(z, 1), dtype=complex)
    if np.any(d1 == 0):
        raise DomainError("critical-point: f' vanishes")
    d2 = np.asarray(f.derivative(z, 2), dtype=complex)
    d3 = np.asarray(f.derivative(z, 3), dtype=complex)
    out = d3 / d1 - 1.5 * (d2 / d1) ** 2
    return complex(out) if out.ndim == 0 else out


def check_transformation_law(
    d: Density,
    f: HolomorphicMap,
    z,
    source_domain: Optional[DomainSpec] = None,
    h=None,
):
    """``|S_{f*lambda}(z) - S_f(z) - S_lambda(f(z)) f'(z)^2|`` with each term computed separately.

    The pullback's Schwarzian uses a stencil of step ``h`` around ``z``
    (default: the target step at ``f(z)`` divided by ``|f'(z)|``).
    """
    z = np.asarray(z, dtype=complex)
    fz = f(z)
    d1 = np.asarray(f.derivative(z, 1), dtype=complex)
    if h is None:
        h = default_fd_step(d, fz) / np.maximum(np.abs(d1), 1e-300)
        h = np.minimum(h, 1e-2)
    pb = pullback(d, f, source_domain or Plane())
    lhs = metric_schwarzian_fd(pb, z, h)
    rhs = map_schwarzian(f, z) + metric_schwarzian_fd(d, fz) * d1**2
    out = np.abs(lhs - rhs)
    return float(out) if np.ndim(out) == 0 else out


def cpp_schwarzian_closed_form(z):
    """Schwarzian of the hyperbolic metric of ``C \\ {0, 1}``: ``(1/z^2 + 1/(z-1)^2 + 1/(z(1-z)))/2``."""
    z = np.asarray(z, dtype=complex)
    if np.any((z == 0) | (z == 1)):
        raise DomainError("pole: the Schwarzian has double poles at 0 and 1")
    out = 0.5 * (1 / z**2 + 1 / (z - 1) ** 2 + 1 / (z * (1 - z)))
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SchwarzianField:
    """A holomorphic quadratic-differential coefficient ``S(z)`` on ``domain``."""

    rule: Callable
    provenance: str = CLOSED_FORM
    domain: DomainSpec = Plane()
    name: str = ""

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.asarray(self.rule(z), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    @classmethod
    def from_density(cls, d: Density, h=None) -> "SchwarzianField":
        return cls(lambda z: metric_schwarzian_fd(d, z, h), FINITE_DIFFERENCE, d.domain, f"S[{d.name}]")

    @classmethod
    def twice_punctured_plane(cls) -> "SchwarzianField":
        from .domains import TwicePuncturedPlane

        return cls(cpp_schwarzian_closed_form, CLOSED_FORM, TwicePuncturedPlane(), "S[C'']")

    @classmethod
    def constant(cls, c: complex = 0.0) -> "SchwarzianField":
        return cls(lambda z: np.full(np.shape(z), complex(c)), CLOSED_FORM, Plane(), f"const({c})")

    def cr_residual(self, z, h: float = 1e-3):
        """Discrete ``|dS/dzbar|`` by central differences; near zero for holomorphic ``S``."""
        z = np.asarray(z, dtype=complex)
        sx = (self(z + h) - self(z - h)) / (2 * h)
        sy = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        out = 0.5 * np.abs(sx + 1j * sy)
        return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# developing map reconstruction


@dataclass
class DevelopingMapSamples:
    """Values of the reconstructed ``f`` and ``f'`` at the path vertices."""

    points: np.ndarray
    f: np.ndarray
    fprime: np.ndarray

    def density(self) -> np.ndarray:
        """``2|f'| / (1 - |f|^2)``; ``nan`` where ``|f| >= 1``."""
        den = 1 - np.abs(self.f) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(den > 0, 2 * np.abs(self.fprime) / den, np.nan)

    def to_dict(self) -> dict:
        return {
            "points": [[p.real, p.imag] for p in self.points],
            "f": [[v.real, v.imag] for v in self.f],
            "fprime": [[v.real, v.imag] for v in self.fprime],
            "density": [float(x) for x in self.density()],
        }


def reconstruct_developing_map(
    S: SchwarzianField,
    z0: complex,
    lambda0: float,
    lambda_z0: complex,
    path: PathPolyline,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    rotation: complex = 1.0,
    method: str = "RK45",
) -> DevelopingMapSamples:
    """Continue the developing map along ``path`` starting at ``z0`` (its first vertex).

    Solves ``w'' + (S/2) w = 0`` along each segment for ``w1`` (``w1(z0)=0``,
    ``w1'(z0)=lambda0/2``) and ``w2`` (``w2(z0)=1``,
    ``w2'(z0)=-lambda_z0/lambda0``); then ``f = rotation * w1/w2`` satisfies
    ``f(z0)=0``, ``f'(z0)=rotation*lambda0/2`` and ``f''(z0)=rotation*lambda_z0``.
    A unimodular ``rotation`` selects among the developing maps that differ
    by a rotation of the disk.

    Raises
    ------
    ReconstructionError
        ``denominator-vanishes`` when ``w2`` passes through zero, or
        ``step-failure`` when the integrator stops.
    """
    if not lambda0 > 0:
        raise ParameterError("lambda0 must be positive")
    if abs(abs(rotation) - 1) > 1e-12:
        raise ParameterError("rotation must be unimodular")
    v = path.vertices
    if v[0] != complex(z0):
        raise ParameterError("the path must start at z0")
    a = 0.5 * lambda0
    state = np.array([0.0, a, 1.0, -lambda_z0 / lambda0], dtype=complex)

    def rhs_factory(p, q):
        dz = q - p

        def rhs(s, y):
            Y = y[:4] + 1j * y[4:]
            Sz = complex(S(p + s * dz))
            dY = np.array([Y[1], -0.5 * Sz * Y[0], Y[3], -0.5 * Sz * Y[2]]) * dz
            return np.concatenate([dY.real, dY.imag])

        return rhs

    states = [state]
    for p, q in zip(v[:-1], v[1:]):
        y0 = np.concatenate([state.real, state.imag])
        sol = solve_ivp(rhs_factory(p, q), (0.0, 1.0), y0, method=method, rtol=rtol, atol=atol)
        if not sol.success:
            raise ReconstructionError(f"step-failure: {sol.message}")
        y = sol.y[:, -1]
        state = y[:4] + 1j * y[4:]
        w2_path = sol.y[2] + 1j * sol.y[6]
        if np.min(np.abs(w2_path)) < 1e-12:
            raise ReconstructionError("denominator-vanishes: w2 reaches zero along the path")
        states.append(state)
    st = np.array(states)
    w1, w2 = st[:, 0], st[:, 2]
    f = rotation * w1 / w2
    fp = rotation * a / w2**2
    return DevelopingMapSamples(v.copy(), f, fp)
