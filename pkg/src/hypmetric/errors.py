"""Exception types shared across the package."""


class HypMetricError(Exception):
    """Base class for all errors raised by :mod:`hypmetric`."""


class DomainError(HypMetricError, ValueError):
    """A point (or stencil, path, disk) lies outside the domain it must live in."""


class ParameterError(HypMetricError, ValueError):
    """Invalid numeric parameters for a constructor or operation."""


class GridMismatchError(HypMetricError, ValueError):
    """Two grids that must share a layout do not."""


class NotConnectedError(HypMetricError):
    """Two points are not joined by the discretized domain at the chosen resolution."""


class ReconstructionError(HypMetricError):
    """The developing-map ODE could not be continued along the requested path."""


class GluingWarning(UserWarning):
    """The gluing condition (patch below base along the patch boundary) fails on sampled points."""
