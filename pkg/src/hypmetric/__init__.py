"""Conformal metrics of constant curvature -1 in the plane."""
from .agard import (
    HempelConstant,
    agard_metric,
    agard_density,
    developing_map,
    elliptic_K,
    hempel_bound,
    min_on_unit_circle,
    puncture_asymptotics_check,
)
from .closed_forms import (
    ConicalParams,
    RadialMetricFamily,
    conical_densities,
    curvature_bound_ok,
    hyperbolic_annulus,
    hyperbolic_disk,
    hyperbolic_exterior,
    hyperbolic_punctured_disk,
    lambda_alpha,
    minda_schober_curvature,
    minda_schober_density,
    radial_density,
    robinson_density,
)
from .density import Density, Grid, GridDensity, constant_density, eval_density, pullback
from .domains import (
    Annulus,
    Disk,
    DiskMinusHoles,
    ExteriorDisk,
    Plane,
    PuncturedDisk,
    PuncturedPlaneSet,
    TwicePuncturedPlane,
)
from .errors import (
    DomainError,
    GluingWarning,
    GridMismatchError,
    HypMetricError,
    NotConnectedError,
    ParameterError,
    ReconstructionError,
)
from .geodesic import geodesic_distance, geodesic_path
from .green import BoundaryData, SolveReport, apply_T, green_function, harmonic_extension, solve_liouville_disk
from .maps import HolomorphicMap, blaschke_product, disk_automorphism, mobius, power_map
from .metric import PathPolyline, curvature_estimate, glue_max, grid_curvature, path_length
from .perron import DiskCover, PerronState, modify_on_disk, perron_solve, seed_sk_metric
from .schwarzian import (
    SchwarzianField,
    check_transformation_law,
    cpp_schwarzian_closed_form,
    map_schwarzian,
    metric_schwarzian_fd,
    reconstruct_developing_map,
)

__version__ = "0.1.0"
