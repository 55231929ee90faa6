"""Dirichlet problem ``Laplace u = exp(2u)`` on the unit disk.

The solution is the fixed point of

    T[u](z) = h(z) - (1/2pi) * integral g(z, zeta) exp(2u(zeta)) dm(zeta)

where ``h`` is the harmonic extension of the boundary data and ``g`` the
Green's function of the disk.  ``T`` is antitone, so the solver damps the
Picard step and, optionally, tracks the monotone even/odd envelopes that
bracket the solution.

Quadrature of the area integral on a uniform grid of spacing ``s`` (nodes
with ``|z| <= 1 - s/2``, one cell of area ``s^2`` per node):

* the free-space part ``log(1/|z - zeta|)`` is a discrete convolution,
  done by FFT; on the 3x3 cells around the evaluation node the kernel is
  replaced by its exact cell integral, which removes the log singularity;
* the image part ``log|1 - conj(zeta) z|`` is smooth inside the disk and is
  summed through its power series, truncated per radial ring of nodes.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np
from scipy import fft as sfft

from .density import INTERIOR, BOUNDARY, OUTSIDE, Grid
from .errors import DomainError, GridMismatchError, ParameterError

N_BOUNDARY_SAMPLES = 2048
#: FFT worker threads; results do not depend on this setting
THREADS_ENV = "HYPMETRIC_THREADS"


def fft_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1
_SERIES_TOL = 1e-15


def green_function(z, zeta):
    """``g(z, zeta) = log(|1 - conj(zeta) z| / |z - zeta|)`` for the unit disk."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(zeta) >= 1):
        raise DomainError("green_function needs points inside the unit disk")
    if np.any(z == zeta):
        raise DomainError("coincident-points: the Green's function is singular at z = zeta")
    out = np.log(np.abs(1 - np.conj(zeta) * z) / np.abs(z - zeta))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# boundary data and harmonic extension


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values ``psi(t)`` of ``u = log lambda`` on the unit circle.

    Stored as ``N_BOUNDARY_SAMPLES`` uniform samples ``psi(2 pi k / n)``;
    values between samples come from trigonometric interpolation.
    """

    samples: np.ndarray
    rule: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float).ravel()
        if not np.all(np.isfinite(s)):
            raise ParameterError("boundary data must be finite")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_rule(cls, psi: Callable, n: int = N_BOUNDARY_SAMPLES) -> "BoundaryData":
        t = 2 * np.pi * np.arange(n) / n
        return cls(np.asarray(psi(t), dtype=float) * np.ones(n), psi)

    @classmethod
    def constant(cls, c: float, n: int = N_BOUNDARY_SAMPLES) -> "BoundaryData":
        return cls(np.full(n, float(c)), lambda t: np.full(np.shape(t), float(c)))

    @property
    def coefficients(self) -> np.ndarray:
        """Complex Fourier coefficients ``c_0..c_{n/2}`` (Nyquist term halved)."""
        c = np.fft.rfft(self.samples) / self.samples.size
        if self.samples.size % 2 == 0:
            c[-1] *= 0.5
        return c

    def __call__(self, t):
        if self.rule is not None:
            return self.rule(np.asarray(t, dtype=float))
        c = self.coefficients
        k = np.arange(c.size)
        t = np.asarray(t, dtype=float)
        e = np.exp(1j * np.multiply.outer(t, k))
        return c[0].real + 2 * np.real(e[..., 1:] @ c[1:])


def _trimmed(c: np.ndarray, tol: float = 1e-17) -> np.ndarray:
    scale = max(np.max(np.abs(c)), 1e-300)
    big = np.flatnonzero(np.abs(c) > tol * scale)
    return c[: (big[-1] + 1 if big.size else 1)]


def harmonic_extension(psi: BoundaryData, z):
    """Poisson integral of ``psi`` at ``z`` (``|z| < 1``).

    Evaluated exactly for the trigonometric interpolant of the samples,
    i.e. ``c_0 + 2 Re sum_k c_k z^k``, which is the spectral limit of the
    trapezoid rule applied to the Poisson kernel.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("harmonic_extension needs |z| < 1")
    c = _trimmed(psi.coefficients)
    acc = np.zeros(z.shape, dtype=complex)
    for ck in c[:0:-1]:
        acc = (acc + ck) * z
    out = c[0].real + 2 * acc.real
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# discrete Green operator


def _log_rect_antiderivative(x, y):
    """``F`` with ``d2F/dxdy = log(x^2 + y^2)``."""
    r2 = x * x + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(r2 > 0, x * y * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        t2 = np.where(x != 0, x * x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
        t3 = np.where(y != 0, y * y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
    return t1 - 3 * x * y + t2 + t3


def cell_log_integral(cx, cy, s):
    """Exact ``integral of log|xi|`` over the square of side ``s`` centred at ``(cx, cy)``."""
    x1, x2 = cx - s / 2, cx + s / 2
    y1, y2 = cy - s / 2, cy + s / 2
    F = _log_rect_antiderivative
    return 0.5 * (F(x2, y2) - F(x1, y2) - F(x2, y1) + F(x1, y1))


class GreenOperator:
    """Precomputed quadrature for ``P[f](z) = (1/2pi) sum g(z, zeta) f(zeta) dm``.

    Works on the interior nodes of a unit-disk grid of spacing ``spacing``;
    arrays of node values have shape ``(..., n_nodes)`` so that several
    problems can be processed at once.
    """

    def __init__(self, spacing: float, series_tol: float = _SERIES_TOL):
        if not 0 < spacing <= 0.25:
            raise ParameterError("unit-disk grid spacing must be in (0, 0.25]")
        s = float(spacing)
        self.spacing = s
        m = int(math.floor(1.0 / s + 1e-9))
        self.m = m
        k = np.arange(-m, m + 1)
        X, Y = np.meshgrid(s * k, s * k)
        Z = X + 1j * Y
        self.rmax = 1.0 - s / 2
        inside = np.abs(Z) <= self.rmax + 1e-12
        self.inside = inside
        self.rows, self.cols = np.nonzero(inside)
        self.nodes = Z[inside]
        self.n = self.nodes.size

        # free-space kernel on offsets -2m..2m, exact cell integrals on the 3x3 patch,
        # stored circularly so that an FFT of length >= 2*width - 1 has no wraparound
        self.width = 2 * m + 1
        n_fft = sfft.next_fast_len(2 * self.width - 1, real=True)
        self.fft_shape = (n_fft, n_fft)
        off = np.arange(-2 * m, 2 * m + 1)
        OX, OY = np.meshgrid(off, off)
        dist = s * np.hypot(OX, OY)
        with np.errstate(divide="ignore"):
            kern = -(s * s) * np.log(dist)
        near = (np.abs(OX) <= 1) & (np.abs(OY) <= 1)
        kern[near] = -cell_log_integral(s * OX[near], s * OY[near], s)
        kern /= 2 * np.pi
        self.self_weight = kern[2 * m, 2 * m]
        circ = np.zeros(self.fft_shape)
        circ[np.ix_(off % n_fft, off % n_fft)] = kern
        self.kernel_hat = sfft.rfft2(circ)

        # image part: rings of nodes with a common series truncation
        radius = np.abs(self.nodes)
        edges = [self.rmax + 1e-12]
        w = s / 2
        while edges[-1] - w > 0.5:
            edges.append(edges[-1] - w)
            w *= 1.5
        edges.append(-1.0)
        self.rings = []
        for hi, lo in zip(edges[:-1], edges[1:]):
            idx = np.flatnonzero((radius <= hi) & (radius > lo))
            if idx.size == 0:
                continue
            rho = min(radius[idx].max(), self.rmax) * self.rmax
            nterms = max(1, int(math.ceil(math.log(series_tol) / math.log(max(rho, 1e-3)))))
            self.rings.append((idx, nterms))
        self.nterms = max(nt for _, nt in self.rings)
        self.series_weight = (s * s) / (2 * np.pi) / np.arange(1, self.nterms + 1)
        # small grids keep their power tables; large ones rebuild them per call
        size = sum(idx.size * nt for idx, nt in self.rings)
        self._poisson = {}
        self._power_cache = [self._powers(i, nt) for i, nt in self.rings] if size <= 4_000_000 else None

    # -- helpers -------------------------------------------------------------
    def to_square(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        out = np.zeros(values.shape[:-1] + (self.width, self.width), dtype=values.dtype)
        out[..., self.rows, self.cols] = values
        return out

    def _powers(self, idx, nterms):
        zc = np.conj(self.nodes[idx])
        return np.cumprod(np.broadcast_to(zc[:, None], (idx.size, nterms)), axis=1)

    def free_part(self, f: np.ndarray) -> np.ndarray:
        sq = self.to_square(f)
        w = fft_workers()
        conv = sfft.irfft2(sfft.rfft2(sq, self.fft_shape, workers=w) * self.kernel_hat, self.fft_shape, workers=w)
        return conv[..., self.rows, self.cols]

    def image_part(self, f: np.ndarray) -> np.ndarray:
        """``(1/2pi) sum_zeta log|1 - conj(zeta) z| f(zeta) s^2`` at every node."""
        f = np.asarray(f, dtype=float)
        batch = f.shape[:-1]
        moments = np.zeros(batch + (self.nterms,), dtype=complex)
        cache = []
        for k, (idx, nt) in enumerate(self.rings):
            V = self._power_cache[k] if self._power_cache is not None else self._powers(idx, nt)
            moments[..., :nt] += f[..., idx] @ V
            cache.append(V)
        coef = moments * self.series_weight
        out = np.empty(batch + (self.n,))
        for (idx, nt), V in zip(self.rings, cache):
            out[..., idx] = -np.real(coef[..., :nt] @ np.conj(V).T)
        return out

    def potential(self, f: np.ndarray) -> np.ndarray:
        """``(1/2pi) * integral g(z, zeta) f(zeta) dm(zeta)`` at every interior node."""
        return self.free_part(f) + self.image_part(f)

    def apply(self, u: np.ndarray, h: np.ndarray) -> np.ndarray:
        """``T[u] = h - potential(exp(2u))``."""
        return h - self.potential(np.exp(2 * np.asarray(u)))

    def poisson_matrix(self, n_samples: int) -> Optional[np.ndarray]:
        """Matrix taking ``n_samples`` boundary samples to the harmonic extension at the nodes.

        Row ``j`` is the trigonometric interpolant's extension evaluated at node
        ``j``; ``None`` when the matrix would be too large to keep.
        """
        if self.n * n_samples > 8_000_000:
            return None
        key = int(n_samples)
        if key not in self._poisson:
            t = 2 * np.pi * np.arange(key) / key
            q = self.nodes[:, None] * np.exp(-1j * t)[None, :]
            M = key // 2
            qM = q**M
            geom = q * (1 - qM) / (1 - q)
            if key % 2 == 0:
                geom = geom - 0.5 * qM
            self._poisson[key] = (1.0 + 2.0 * geom.real) / key
        return self._poisson[key]

    def harmonic(self, psi: Union[BoundaryData, np.ndarray]) -> np.ndarray:
        """Harmonic extension at the nodes; ``psi`` may be a batch of sample arrays."""
        if isinstance(psi, BoundaryData):
            return harmonic_extension(psi, self.nodes)
        samples = np.asarray(psi, dtype=float)
        P = self.poisson_matrix(samples.shape[-1])
        if P is not None:
            return samples @ P.T
        c = np.fft.rfft(samples, axis=-1) / samples.shape[-1]
        if samples.shape[-1] % 2 == 0:
            c[..., -1] *= 0.5
        scale = max(np.max(np.abs(c)), 1e-300)
        big = np.flatnonzero(np.max(np.abs(c.reshape(-1, c.shape[-1])), axis=0) > 1e-17 * scale)
        c = c[..., : (big[-1] + 1 if big.size else 1)]
        acc = np.zeros(samples.shape[:-1] + (self.n,), dtype=complex)
        z = self.nodes
        for k in range(c.shape[-1] - 1, 0, -1):
            acc = (acc + c[..., k, None]) * z
        return c[..., 0, None].real + 2 * acc.real

    def grid(self, values=None, quantity: str = "log_density") -> Grid:
        """Wrap node values into a :class:`Grid` over ``[-1, 1]^2``."""
        mask = np.where(self.inside, INTERIOR, OUTSIDE).astype(np.int8)
        pad = np.pad(self.inside, 1, constant_values=False)
        nbrs = pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
        mask[self.inside & ~nbrs] = BOUNDARY
        vals = np.zeros(self.inside.shape)
        if values is not None:
            vals[self.inside] = values
        x0 = -self.m * self.spacing
        return Grid(x0, x0, self.spacing, mask, vals, quantity)

    def values_of(self, grid: Grid) -> np.ndarray:
        if not self.matches(grid):
            raise GridMismatchError("grid does not match the unit-disk layout of this operator")
        return grid.values[self.inside]

    def matches(self, grid: Grid) -> bool:
        return (
            grid.shape == self.inside.shape
            and np.isclose(grid.spacing, self.spacing)
            and np.isclose(grid.x0, -self.m * self.spacing)
            and np.array_equal(grid.mask != OUTSIDE, self.inside)
        )


@lru_cache(maxsize=8)
def green_operator(spacing: float, series_tol: float = _SERIES_TOL) -> GreenOperator:
    return GreenOperator(spacing, series_tol)


def apply_T(u: Grid, h: Grid) -> Grid:
    """One application of the fixed-point operator on unit-disk grids."""
    if not u.same_layout(h):
        raise GridMismatchError("u and h must live on the same grid")
    op = green_operator(u.spacing)
    out = op.apply(op.values_of(u), op.values_of(h))
    return op.grid(out, quantity=u.quantity)


# ---------------------------------------------------------------------------
# fixed-point solver


@dataclass
class SolveReport:
    iterations: int
    final_residual: float
    bracket_width: float
    converged: bool
    omega: float = 0.5
    residual_history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "bracket_width": self.bracket_width,
            "converged": self.converged,
            "omega": self.omega,
            "residual_history": list(self.residual_history),
        }


def auto_omega(h_values: np.ndarray) -> float:
    """Damping that balances the extreme eigenvalues of the linearized iteration.

    Uses ``u <= h`` and the first Dirichlet eigenvalue ``j01^2`` of the unit disk
    to bound the linearization of ``-T`` by ``mu = 2 max exp(2h) / j01^2``.
    """
    j01 = 2.404825557695773
    mu = 2 * float(np.exp(2 * np.max(h_values))) / j01**2
    return 2.0 / (2.0 + mu)


def solve_on_operator(
    op: GreenOperator,
    h: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 500,
    omega: Union[float, str] = 0.5,
    track_bracket: bool = True,
    initial: Optional[np.ndarray] = None,
):
    """Damped fixed-point iteration on precomputed harmonic values ``h``.

    ``h`` (and ``initial``) may carry leading batch axes; the residual is the
    max-norm over everything.  Returns ``(u, report)``.
    """
    h = np.asarray(h, dtype=float)
    w = auto_omega(h) if omega == "auto" else float(omega)
    if not 0 < w <= 1:
        raise ParameterError("omega must lie in (0, 1]")
    Th = op.apply(h, h)
    if initial is None:
        u = h.copy()
    else:
        u = np.clip(np.asarray(initial, dtype=float), Th, h)
    lo, hi = Th, h
    width = float(np.max(hi - lo)) if h.size else 0.0
    history = []
    converged = False
    it = 0
    best_u, best_res = u, np.inf
    for it in range(1, max_iter + 1):
        Tu = op.apply(u, h)
        res = float(np.max(np.abs(u - Tu))) if u.size else 0.0
        history.append(res)
        if res < best_res:
            best_u, best_res = u, res
        if res <= tol:
            converged = True
            break
        u = (1 - w) * u + w * Tu
        if track_bracket:
            hi, lo = np.minimum(hi, op.apply(lo, h)), np.maximum(lo, op.apply(hi, h))
            width = float(np.max(hi - lo))
    if not converged:
        u = best_u
    report = SolveReport(it, best_res if not converged else history[-1], width, converged, w, history)
    return u, report


def solve_liouville_disk(
    psi: BoundaryData,
    spacing: float = 1 / 64,
    tol: float = 1e-8,
    max_iter: int = 500,
    omega: Union[float, str] = 0.5,
    track_bracket: bool = True,
):
    """Solve ``Laplace u = exp(2u)`` in the unit disk with ``u = psi`` on the circle.

    Returns the solution as a ``log_density`` :class:`Grid` and a
    :class:`SolveReport`.  When ``max_iter`` is exhausted the best iterate is
    returned with ``converged=False``.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    op = green_operator(float(spacing))
    h = op.harmonic(psi)
    u, report = solve_on_operator(op, h, tol, max_iter, omega, track_bracket)
    return op.grid(u), report


def disk_harmonic_grid(psi: BoundaryData, spacing: float) -> Grid:
    op = green_operator(float(spacing))
    return op.grid(op.harmonic(psi))
