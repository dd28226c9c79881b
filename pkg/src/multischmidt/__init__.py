"""Schmidt decomposability of multipartite pure states."""

from .bipartite import schmidt_bipartite, schmidt_number_bipartition
from .density import (
    DensityMatrix,
    check_rank_inequality,
    grouped_product_state,
    reduced_density,
    schmidt_number,
    tensor_product_grouping,
    valid_groupings,
)
from .errors import *  # noqa: F401,F403
from .linalg import hermitian_eig, joint_diagonalize, svd
from .multipartite import (
    DecomposabilityVerdict,
    Reason,
    check_positively_commuting,
    decompose,
    decompose_multipartite,
    decompose_quadripartite,
    decompose_tripartite,
    scaled_unitary_factor,
    unit_decompose,
)
from .partition import Bipartition, PartitionInstance, max_schmidt_partition, solve_partition, witness_state
from .purification import classify_purification, link_purifications, purify
from .serialize import load_decomposition, load_density, load_state
from .state import (
    SchmidtDecomposition,
    StateTensor,
    apply_local,
    build_matrix_family,
    canonicalize,
    matrix_set_quadripartite,
    matrix_set_tripartite,
    random_decomposable,
    reconstruct,
    residual,
)

__version__ = "0.1.0"
