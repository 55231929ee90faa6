"""Hyperbolic metric of the twice-punctured plane ``C \\ {0, 1}``.

Agard's formula

    lambda(z) = 1 / (pi |z| |1 - z| Re[K(z) K(1 - conj z)])

with the normalized complete elliptic integral
``K(z) = (2/pi) int_0^{pi/2} (1 - z sin^2 t)^{-1/2} dt``.

Before evaluation a point is moved into the lens ``{|w| <= 1, |1 - w| <= 1}``
by one of the symmetries ``z -> 1/z`` or ``z -> 1/(1 - z)`` of the punctured
plane, chosen according to which of ``|z|``, ``|1 - z|``, ``1`` is largest.
Inside the lens both elliptic integrals have arguments of modulus at most
one and stay off the cut ``[1, inf)``.  Each branch also carries ``1 - w`` in
a cancellation-free form, so the formula stays accurate at the punctures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .density import Density
from .domains import TwicePuncturedPlane
from .errors import DomainError, ParameterError

PUNCTURE_TOL = 1e-10

GAMMA_3_4 = math.gamma(0.75)
#: ``lambda(-1) = Gamma(3/4)^4 / pi^2``, the minimum of the density on the unit circle
LAMBDA_AT_MINUS_ONE = GAMMA_3_4**4 / math.pi**2
#: Hempel's constant ``log R = 1 / lambda(-1)``
LOG_R_HEMPEL = math.pi**2 / GAMMA_3_4**4


# ---------------------------------------------------------------------------
# complete elliptic integral


def _agm(a, b, max_iter: int = 60):
    """Arithmetic-geometric mean with the "right" square-root choice at every step."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for _ in range(max_iter):
        a1 = 0.5 * (a + b)
        b1 = np.sqrt(a * b)
        flip = np.abs(a1 - b1) > np.abs(a1 + b1)
        b1 = np.where(flip, -b1, b1)
        done = np.all(np.abs(a1 - b1) <= 1e-16 * np.abs(a1))
        a, b = a1, b1
        if done:
            break
    return 0.5 * (a + b)


def _K_from_complement(c):
    """``K(1 - c)`` computed as ``1 / agm(1, sqrt(c))``."""
    return 1.0 / _agm(1.0, np.sqrt(np.asarray(c, dtype=complex)))


def _on_cut(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real >= 1)


def elliptic_K_quad(z: complex, rtol: float = 1e-12) -> complex:
    """Adaptive Gauss-Kronrod quadrature of the theta-form of ``K(z)``."""
    z = complex(z)
    if _on_cut(z):
        raise DomainError(f"argument-on-cut: K is not defined at real z = {z.real} >= 1")
    val, _ = integrate.quad(
        lambda t: 1.0 / np.sqrt(1 - z * np.sin(t) ** 2),
        0.0, np.pi / 2, epsabs=0.0, epsrel=rtol, limit=200, complex_func=True,
    )
    return 2.0 / np.pi * val


def elliptic_K(z, method: str = "agm"):
    """Normalized complete elliptic integral ``K(z)``, ``K(0) = 1``, on ``C \\ [1, inf)``.

    ``method="agm"`` (default) uses ``K(z) = 1 / agm(1, sqrt(1 - z))`` and is
    vectorized; ``method="quad"`` integrates the defining integral
    (scalars only).  Both agree to about ``1e-13`` relative.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(_on_cut(zz)):
        raise DomainError("argument-on-cut: K is not defined on the real ray [1, inf)")
    if method == "quad":
        if zz.ndim:
            return np.vectorize(elliptic_K_quad, otypes=[complex])(zz)
        return elliptic_K_quad(complex(zz))
    if method != "agm":
        raise ParameterError(f"unknown method {method!r}")
    out = _K_from_complement(1 - zz)
    return complex(out) if out.ndim == 0 else out


def elliptic_K_series(z) -> complex:
    """``2F1(1/2, 1/2; 1; z)``, the power series of ``K`` (meant for ``|z| <= 1/2``)."""
    return complex(special.hyp2f1(0.5, 0.5, 1.0, complex(z)))


# ---------------------------------------------------------------------------
# density


def _check_punctures(z: np.ndarray) -> None:
    bad = (np.abs(z) < PUNCTURE_TOL) | (np.abs(z - 1) < PUNCTURE_TOL)
    if np.any(bad):
        p = np.atleast_1d(z)[np.atleast_1d(bad)][0]
        raise DomainError(f"puncture-point: {p} is within {PUNCTURE_TOL} of 0 or 1")


def _reduce(z: np.ndarray):
    """Lens representative ``w``, ``1 - w`` and the factor ``|dw/dz|``."""
    a, b = np.abs(z), np.abs(1 - z)
    w = z.copy()
    w1 = 1 - z
    jac = np.ones(z.shape)
    inv = (a >= b) & (a > 1)
    flip = (b > a) & (b > 1)
    zi, zf = z[inv], z[flip]
    w[inv], w1[inv], jac[inv] = 1 / zi, (zi - 1) / zi, 1 / a[inv] ** 2
    w[flip], w1[flip], jac[flip] = 1 / (1 - zf), -zf / (1 - zf), 1 / b[flip] ** 2
    return w, w1, jac


def _lens_density(w: np.ndarray, w1: np.ndarray) -> np.ndarray:
    # K(w) = 1/agm(1, sqrt(1 - w)) and K(1 - conj w) = 1/agm(1, sqrt(conj w))
    Kw = _K_from_complement(w1)
    Kc = _K_from_complement(np.conj(w))
    return 1.0 / (np.pi * np.abs(w) * np.abs(w1) * np.real(Kw * Kc))


def agard_rule(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    w, w1, jac = _reduce(np.atleast_1d(z))
    out = _lens_density(w, w1) * jac
    return out.reshape(z.shape)


def agard_density(z):
    """``lambda(z)`` of the hyperbolic metric of ``C \\ {0, 1}`` (vectorized)."""
    z = np.asarray(z, dtype=complex)
    _check_punctures(z)
    out = agard_rule(z)
    return float(out) if out.ndim == 0 else out


def agard_direct(z):
    """The formula evaluated without reduction (valid off the real rays outside ``(0, 1)``)."""
    z = np.asarray(z, dtype=complex)
    _check_punctures(z)
    bad = (z.imag == 0) & ((z.real <= 0) | (z.real >= 1))
    if np.any(bad):
        raise DomainError("argument-on-cut: direct evaluation needs z off (-inf, 0] and [1, inf)")
    K1 = _K_from_complement(1 - z)
    K2 = _K_from_complement(np.conj(z))
    out = 1.0 / (np.pi * np.abs(z) * np.abs(1 - z) * np.real(K1 * K2))
    return float(out) if out.ndim == 0 else out


class _AgardDensity(Density):
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        _check_punctures(z)
        return agard_rule(z)


def agard_metric() -> Density:
    """:class:`Density` wrapper of :func:`agard_density` on ``C \\ {0, 1}``."""
    return _AgardDensity(agard_rule, TwicePuncturedPlane(), name="agard", margin=PUNCTURE_TOL)


# ---------------------------------------------------------------------------
# developing map


def _require_slit_plane(z: np.ndarray) -> None:
    bad = (z.imag == 0) & ((z.real <= 0) | (z.real >= 1))
    if np.any(bad):
        raise DomainError(
            "outside-principal-region: the developing map is evaluated on "
            "C minus (-inf, 0] and [1, inf)"
        )


def developing_map(z):
    """``F(z) = (K(1-z) - K(z)) / (K(1-z) + K(z))``, a universal covering onto the unit disk."""
    z = np.asarray(z, dtype=complex)
    _require_slit_plane(z)
    Kz = _K_from_complement(1 - z)
    K1z = _K_from_complement(z)
    out = (K1z - Kz) / (K1z + Kz)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Hempel bound and the minimum on the unit circle


@dataclass(frozen=True)
class HempelConstant:
    """``log R = 1 / min_{|z|=1} lambda(z)``."""

    logR: float = LOG_R_HEMPEL

    def __post_init__(self):
        if not self.logR > 0:
            raise ParameterError("log R must be positive")

    @classmethod
    def from_minimum(cls) -> "HempelConstant":
        """Compute ``log R`` from a numerical minimization on the unit circle."""
        _, value = min_on_unit_circle()
        return cls(1.0 / value)


def hempel_bound(z, c: HempelConstant = HempelConstant()):
    """Lower bound ``1 / (|z| (log R + |log |z||))`` for ``lambda(z)``."""
    z = np.asarray(z, dtype=complex)
    _check_punctures(z)
    r = np.abs(z)
    out = 1.0 / (r * (c.logR + np.abs(np.log(r))))
    return float(out) if out.ndim == 0 else out


def min_on_unit_circle(tol: float = 1e-12):
    """Golden-section search of ``theta -> lambda(e^{i theta})`` on ``(0, 2 pi)``.

    Returns ``(theta, value)``; the minimum sits at ``theta = pi``.
    """
    f = lambda t: float(agard_rule(np.exp(1j * t)))  # noqa: E731
    res = optimize.minimize_scalar(f, bracket=(0.5, 3.0, 2 * np.pi - 0.5), method="golden", tol=tol)
    return float(res.x), float(res.fun)


def puncture_asymptotics_check(radii, c: HempelConstant = HempelConstant()) -> list[dict]:
    """``(|z| log(1/|z|)) lambda(z)`` at ``z = -r`` with its sandwich bounds.

    Each row holds ``r``, the scaled value, the lower bound
    ``log(1/r) / (log R + log(1/r))`` and the upper bound ``1``.
    """
    rows = []
    for r in np.asarray(radii, dtype=float):
        if not 0 < r < 1:
            raise ParameterError("radii must lie in (0, 1)")
        L = math.log(1 / r)
        value = r * L * agard_density(complex(-r))
        rows.append({"r": float(r), "value": float(value), "lower": L / (c.logR + L), "upper": 1.0})
    return rows
