"""Bipartite Schmidt decomposition and Schmidt numbers across cuts."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import WrongArity
from .linalg import DEFAULT_TOL, singular_values, svd
from .state import RANK_TOL, SchmidtDecomposition, StateTensor, bipartition_matrix, canonicalize


def numerical_rank(sigma: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    """Count singular values above ``rank_tol * sigma_max``."""
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma.max() <= 0:
        return 0
    return int(np.count_nonzero(sigma > rank_tol * sigma.max()))


def schmidt_bipartite(psi: StateTensor, tol: float = DEFAULT_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition of a two-party state from the SVD of its coefficient matrix."""
    if psi.n != 2:
        raise WrongArity(f"bipartite decomposition needs 2 subsystems, got {psi.n}")
    p, sigma, q = svd(psi.amps, tol)
    r = numerical_rank(sigma)
    return canonicalize(SchmidtDecomposition(sigma[:r], (p[:, :r], q[:r, :].T)))


def schmidt_number_bipartition(psi: StateTensor, left: Iterable[int], tol: float = DEFAULT_TOL) -> int:
    return numerical_rank(singular_values(bipartition_matrix(psi, left), tol))
