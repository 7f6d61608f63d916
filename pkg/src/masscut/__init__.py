"""Mass partition cuts of finite weighted point clouds, with re-checkable certificates."""
from .errors import (DimensionError, InputError, MassCutError, NoConvergence, NotConcentrated,
                     NotNicelySeparated, NotSeparated, PartitionFailure, PreconditionError,
                     SheetCollision, VerticalTangent)
from .geometry import (Annulus, Disk, HalfSpace, Hyperplane, PolyRegion, SineWave, Slab,
                       StripeWave, Wedge)
from .hamsandwich import ham_sandwich_2d, ham_sandwich_3d
from .lifted import circle_solver, sine_solver, wedge_solver
from .measure import FractionVector, Measure, SolveReport, fraction_in, jitter
from .oracle import brute_hs2, brute_slab_2d, verify
from .polyhedral import nface_solver, nvertex_solver
from .quantile import (midpoint_hyperplane, quantile_hyperplane, strong_parallel_partition,
                       verify_parallel_partition)
from .separated import (bhj_solver, check_concentrated, check_nicely_separated,
                        check_spheres_separated, check_well_separated, common_tangents)
from .slab import annulus_solver, slab_solver

__version__ = "0.1.0"

__all__ = [
    "Annulus", "Disk", "DimensionError", "FractionVector", "HalfSpace", "Hyperplane",
    "InputError", "MassCutError", "Measure", "NoConvergence", "NotConcentrated",
    "NotNicelySeparated", "NotSeparated", "PartitionFailure", "PolyRegion", "PreconditionError",
    "SheetCollision", "SineWave", "Slab", "SolveReport", "StripeWave", "VerticalTangent", "Wedge",
    "annulus_solver", "bhj_solver", "brute_hs2", "brute_slab_2d", "check_concentrated",
    "check_nicely_separated", "check_spheres_separated", "check_well_separated", "circle_solver",
    "common_tangents", "fraction_in", "ham_sandwich_2d", "ham_sandwich_3d", "jitter",
    "midpoint_hyperplane", "nface_solver", "nvertex_solver", "quantile_hyperplane",
    "sine_solver", "slab_solver", "strong_parallel_partition", "verify",
    "verify_parallel_partition", "wedge_solver",
]
