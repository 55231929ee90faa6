"""Holomorphic maps with (optionally supplied) derivatives."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

# five-point central-difference weights for derivatives 1..3 (fourth order for 1, 2)
_FD_STEP = 1e-3


@dataclass(frozen=True)
class HolomorphicMap:
    """A holomorphic map given by its values and, optionally, its derivatives.

    Missing derivatives are approximated by central differences along the
    real direction with step ``step`` (relative to ``max(1, |z|)``).
    """

    f: Callable
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    d3f: Optional[Callable] = None
    name: str = ""
    step: float = _FD_STEP

    def __call__(self, z):
        return self.f(np.asarray(z, dtype=complex))

    def derivative(self, z, order: int = 1):
        z = np.asarray(z, dtype=complex)
        supplied = {1: self.df, 2: self.d2f, 3: self.d3f}.get(order)
        if supplied is not None:
            return supplied(z)
        if order == 0:
            return self.f(z)
        h = self.step * np.maximum(1.0, np.abs(z))
        f = self.f
        if order == 1:
            return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h)
        if order == 2:
            return (
                -f(z + 2 * h) + 16 * f(z + h) - 30 * f(z) + 16 * f(z - h) - f(z - 2 * h)
            ) / (12 * h**2)
        if order == 3:
            return (
                -f(z + 3 * h) + 8 * f(z + 2 * h) - 13 * f(z + h)
                + 13 * f(z - h) - 8 * f(z - 2 * h) + f(z - 3 * h)
            ) / (8 * h**3)
        raise ValueError(f"unsupported derivative order {order}")

    def compose(self, inner: "HolomorphicMap") -> "HolomorphicMap":
        """``self ∘ inner`` with the first derivative by the chain rule."""
        outer = self

        def f(z):
            return outer(inner(z))

        def df(z):
            return outer.derivative(inner(z)) * inner.derivative(z)

        return HolomorphicMap(f, df, name=f"{outer.name}∘{inner.name}")


def mobius(a: complex, b: complex, c: complex, d: complex) -> HolomorphicMap:
    """``z ↦ (a z + b)/(c z + d)`` with exact derivatives."""
    det = a * d - b * c
    if det == 0:
        raise ValueError("degenerate Möbius transformation")
    return HolomorphicMap(
        lambda z: (a * z + b) / (c * z + d),
        lambda z: det / (c * z + d) ** 2,
        lambda z: -2 * c * det / (c * z + d) ** 3,
        lambda z: 6 * c**2 * det / (c * z + d) ** 4,
        name="mobius",
    )


def disk_automorphism(a: complex, rotation: complex = 1.0) -> HolomorphicMap:
    """``z ↦ η (z − a)/(1 − ā z)`` with ``|a| < 1`` and ``|η| = 1``."""
    a = complex(a)
    if abs(a) >= 1:
        raise ValueError("automorphism parameter must lie in the unit disk")
    eta = complex(rotation)
    return mobius(eta, -eta * a, -a.conjugate(), 1.0)


def power_map(n: int) -> HolomorphicMap:
    return HolomorphicMap(
        lambda z: z**n,
        lambda z: n * z ** (n - 1),
        lambda z: n * (n - 1) * z ** (n - 2),
        lambda z: n * (n - 1) * (n - 2) * z ** (n - 3),
        name=f"z^{n}",
    )


def blaschke_product(zeros: Sequence[complex], rotation: complex = 1.0) -> HolomorphicMap:
    """Finite Blaschke product with its derivative by the product rule."""
    zeros = [complex(a) for a in zeros]
    eta = complex(rotation)

    def f(z):
        out = np.full(np.shape(z), eta, dtype=complex)
        for a in zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out

    def df(z):
        factors = [(z - a) / (1 - np.conj(a) * z) for a in zeros]
        out = np.zeros(np.shape(z), dtype=complex)
        for k, a in enumerate(zeros):
            term = eta * (1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2
            for j, phi in enumerate(factors):
                if j != k:
                    term = term * phi
            out = out + term
        return out

    return HolomorphicMap(f, df, name="blaschke")
