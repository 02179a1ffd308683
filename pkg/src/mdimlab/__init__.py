"""mdimlab: numerical estimation of metric mean dimension for interval maps
and subshifts of compact type.

Upper estimates come from spectral radii of sparse occupancy matrices on
eps-grids; lower estimates from separated sets built out of full branches,
inverse-branch cylinders, or delayed-shift structure.
"""

from .geometry import (PointSet, CutOutSet, covering_number, separated_count,
                       cutout_dim_bounds, box_dimension_fit, reciprocal_points,
                       exp_points, reciprocal_cutout, exp_cutout, cantor_cutout,
                       uniform_cutout)
from .dynamics import (Branch, PiecewiseMap, Cylinder, BudgetExceededError,
                       make_gauss, make_mp_induced, make_boxes_map, make_sin_inv,
                       make_affine_full, make_identity, bowen_distance,
                       enumerate_cylinders)
from .transition import (TransitionSet, GridMatrix, grid_matrix, graph_of,
                         delayed_transitions, friedland_set, full_square,
                         box_set, point_cloud)
from .spectral import SpectralResult, power_iteration, gershgorin_bound, norm_root
from .entropy import (EntropyRecord, MdimEstimate, eps_entropy_upper,
                      eps_entropy_lower_branches, eps_entropy_lower_cylinders,
                      mdim_sandwich, iterate_count_check, geometric_ladder,
                      bowen_separated_count)
from .semigroup import (RandomWalk, SemigroupSpec, make_zero_entropy_pair,
                        walk_entropy, friedland_upper)

__version__ = "0.1.0"
