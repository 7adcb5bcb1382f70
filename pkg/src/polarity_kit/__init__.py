"""Polar transforms of functions, bipolar sets and bipolar functions.

Exact (rational) polyhedral geometry in low dimension, grid-sampled and
closed-form function representations, and checkable identities between them.
"""

__version__ = "0.1.0"

from .extarith import INF, NEG_INF, lower_mul, upper_mul, lower_add, upper_add, ext_inverse
from .geometry import (
    ConvexBody,
    NotBipolarError,
    bipolar_set,
    cross_polytope,
    is_bipolar_set,
    polar_cone,
    polar_set,
    set_join,
    set_meet,
    square,
    support_eval,
    minkowski_eval,
)
from .funcrep import (
    GenIndicator,
    Grid,
    Indicator,
    MaxAffine,
    MinkowskiOf,
    Pointwise,
    Sampled,
    SupportOf,
    Valley,
    level_set,
    sample,
)
from .transforms import (
    bipolar_transform,
    fenchel_conjugate_exact,
    fenchel_conjugate_grid,
    polar_exact,
    polar_general_inf_grid,
    polar_nonneg_sup,
    verify_table_row,
)
from .bipolar_lattice import BipolarFunction, iso_phi, iso_theta, func_meet, func_join
from .subdiff import (
    lower_polar_subdiff,
    middle_polar_subdiff,
    upper_polar_subdiff,
    is_aligned,
    alignment_equivalence_report,
)
from .approx import best_convex_minorant, best_homogeneous_convex_minorant, linear_minorant_sup_oracle
from .report import Report
