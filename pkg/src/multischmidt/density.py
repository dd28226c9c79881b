"""Reduced density matrices, Schmidt numbers and tensor-product grouping."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadGrouping, ShapeMismatch
from .linalg import DEFAULT_TOL, hermitian_eig
from .state import RANK_TOL, SchmidtDecomposition, StateTensor, _check_partition, bipartition_matrix, canonicalize


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RankInequalityReport:
    sch_psi: int
    sch_phi: int
    sch_gamma: int
    holds: bool


def reduced_density(psi: StateTensor, keep: Iterable[int], tol: float = DEFAULT_TOL) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; computed as M M^H of the flattened amplitudes."""
    keep, _ = _check_partition(psi.n, keep)
    m = bipartition_matrix(psi, keep)
    return DensityMatrix(m @ m.conj().T, tuple(psi.dims[i] for i in keep))


def schmidt_number(psi: StateTensor, keep: Iterable[int], tol: float = DEFAULT_TOL) -> int:
    """Numerical rank of the reduced density matrix on ``keep``.

    The rank is taken on whichever side of the cut is smaller; both reduced
    densities share their nonzero spectrum.
    """
    keep, _ = _check_partition(psi.n, keep)
    m = bipartition_matrix(psi, keep)
    gram = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
    values = hermitian_eig(gram, tol).values
    top = values[0] if values.size else 0.0
    if top <= 0:
        return 0
    return int(np.count_nonzero(values > RANK_TOL * top))


def check_rank_inequality(phi: StateTensor, gamma: StateTensor, alpha: complex, beta: complex,
                          keep: Iterable[int], tol: float = DEFAULT_TOL) -> RankInequalityReport:
    """Check Sch(psi) >= |Sch(phi) - Sch(gamma)| for psi = alpha phi + beta gamma across ``keep``."""
    if phi.dims != gamma.dims:
        raise ShapeMismatch(f"dims differ: {phi.dims} vs {gamma.dims}")
    keep = tuple(keep)
    vec = alpha * phi.vector + beta * gamma.vector
    norm = np.linalg.norm(vec)
    if norm <= tol:
        raise ValueError("alpha*phi + beta*gamma vanishes")
    if abs(norm - 1.0) > tol:
        warnings.warn(f"combination has norm {norm:.6g}; renormalizing", stacklevel=2)
    psi = StateTensor(phi.dims, vec / norm)
    s_psi, s_phi, s_gamma = (schmidt_number(s, keep, tol) for s in (psi, phi, gamma))
    return RankInequalityReport(s_psi, s_phi, s_gamma, s_psi >= abs(s_phi - s_gamma))


def valid_groupings(m: int, n: int) -> list[tuple[int, ...]]:
    """All size vectors (x_1..x_n), x_i >= 1, summing to m."""
    if n < 1 or m < n:
        return []
    out = []
    for cuts in itertools.combinations(range(1, m), n - 1):
        bounds = (0,) + cuts + (m,)
        out.append(tuple(b - a for a, b in zip(bounds, bounds[1:])))
    return out


def _check_sizes(m: int, n: int, sizes: Sequence[int]) -> tuple[int, ...]:
    sizes = tuple(int(x) for x in sizes)
    if len(sizes) != n or sum(sizes) != m or any(x < 1 for x in sizes):
        raise BadGrouping(f"sizes {sizes} do not split {m} parts into {n} nonempty groups")
    return sizes


def _blocks(sizes):
    start = 0
    for x in sizes:
        yield list(range(start, start + x))
        start += x


def tensor_product_grouping(dpsi: SchmidtDecomposition, dphi: SchmidtDecomposition,
                            sizes: Sequence[int]) -> SchmidtDecomposition:
    """Schmidt decomposition of |psi>|phi> as an n-partite state.

    The m parts of psi are cut into consecutive groups of the given sizes
    and group g is joined with part g of phi. Coefficients are all
    products of a psi coefficient with a phi coefficient.
    """
    m, n = len(dpsi.vectors), len(dphi.vectors)
    if m < n:
        raise BadGrouping(f"first state has {m} parts, fewer than the second's {n}")
    sizes = _check_sizes(m, n, sizes)
    kpsi, kphi = dpsi.rank, dphi.rank
    coeffs = np.outer(dpsi.coeffs, dphi.coeffs).ravel()
    vectors = []
    for g, block in enumerate(_blocks(sizes)):
        cols = []
        for i in range(kpsi):
            head = np.ones(1, dtype=complex)
            for part in block:
                head = np.kron(head, dpsi.vectors[part][:, i])
            for j in range(kphi):
                cols.append(np.kron(head, dphi.vectors[g][:, j]))
        vectors.append(np.array(cols).T)
    out = SchmidtDecomposition(coeffs, tuple(vectors))
    out.validate()
    return canonicalize(out)


def grouped_product_state(psi: StateTensor, phi: StateTensor, sizes: Sequence[int]) -> StateTensor:
    """|psi>|phi> with subsystems regrouped as in :func:`tensor_product_grouping`."""
    m, n = psi.n, phi.n
    sizes = _check_sizes(m, n, sizes)
    prod = np.multiply.outer(psi.amps, phi.amps)
    order, dims = [], []
    for g, block in enumerate(_blocks(sizes)):
        order += block + [m + g]
        dims.append(int(np.prod([psi.dims[i] for i in block])) * phi.dims[g])
    return StateTensor(tuple(dims), np.transpose(prod, order).reshape(dims))
