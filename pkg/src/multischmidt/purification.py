"""Purification of density matrices and the unitary freedom between purifications."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .density import DensityMatrix, reduced_density
from .errors import AncillaTooSmall, NotDensity, NotSamePurification, ShapeMismatch
from .linalg import DEFAULT_TOL, NORM_FLOOR, hermitian_eig, svd
from .multipartite import ACCEPT_TOL, DecomposabilityVerdict, decompose_multipartite
from .state import RANK_TOL, StateTensor


def _matrix(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityMatrix) else rho
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotDensity(f"density matrix must be square, got shape {m.shape}")
    return m


def density_spectrum(rho, tol: float = DEFAULT_TOL):
    """Validate ``rho`` and return its eigen-decomposition with tiny negatives clipped."""
    m = _matrix(rho)
    if np.linalg.norm(m - m.conj().T) > tol * max(np.linalg.norm(m), NORM_FLOOR):
        raise NotDensity("density matrix is not Hermitian")
    if abs(np.trace(m).real - 1.0) > 10 * tol:
        raise NotDensity(f"trace is {np.trace(m).real:.12g}, expected 1")
    values, basis = hermitian_eig(m, tol)
    if values[-1] < -10 * tol:
        raise NotDensity(f"negative eigenvalue {values[-1]:.3e}")
    return np.clip(values, 0.0, None), basis


def purify(rho, ancilla_dim: int, tol: float = DEFAULT_TOL) -> StateTensor:
    """Pure state on (system, ancilla) whose system marginal is ``rho``.

    Built from the spectral decomposition: sum_i sqrt(p_i) |i>|i_R> with
    the ancilla in its computational basis.
    """
    values, basis = density_spectrum(rho, tol)
    r = int(np.count_nonzero(values > RANK_TOL * max(values[0], NORM_FLOOR)))
    if ancilla_dim < r:
        raise AncillaTooSmall(f"ancilla dimension {ancilla_dim} below rank {r}")
    amps = np.zeros((basis.shape[0], ancilla_dim), dtype=complex)
    amps[:, :r] = basis[:, :r] * np.sqrt(values[:r])
    return StateTensor((basis.shape[0], ancilla_dim), amps)


def link_purifications(ar1: StateTensor, ar2: StateTensor, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unitary U on the ancilla with (I (x) U)|AR_2> = |AR_1>.

    U is the polar factor of the overlap between the two coefficient
    matrices (orthogonal Procrustes), which also settles degenerate
    spectral blocks.
    """
    if ar1.n != 2 or ar2.n != 2 or ar1.dims != ar2.dims:
        raise ShapeMismatch(f"need two bipartite states of equal dims, got {ar1.dims} and {ar2.dims}")
    rho1 = reduced_density(ar1, [0]).matrix
    rho2 = reduced_density(ar2, [0]).matrix
    if np.linalg.norm(rho1 - rho2) > 10 * tol:
        raise NotSamePurification(f"reduced states differ by {np.linalg.norm(rho1 - rho2):.3e}")
    m1, m2 = ar1.amps, ar2.amps
    w, _, zh = svd(m2.conj().T @ m1, tol)
    return (w @ zh).T


def classify_purification(rho, dims: Sequence[int], tol: float = DEFAULT_TOL,
                          accept_tol: float = ACCEPT_TOL, ancilla_unitary=None,
                          seed: int = 0) -> DecomposabilityVerdict:
    """Decomposability of a purification of an n-partite density matrix.

    The ancilla has dimension rank(rho) and is appended as the last
    subsystem; ``ancilla_unitary`` selects a different purification. A
    rank-one rho needs no ancilla, so the pure state itself is tested.
    """
    dims = tuple(int(d) for d in dims)
    m = _matrix(rho)
    if m.shape[0] != int(np.prod(dims)):
        raise ShapeMismatch(f"density of size {m.shape[0]} does not match dims {dims}")
    values, _ = density_spectrum(m, tol)
    r = int(np.count_nonzero(values > RANK_TOL * max(values[0], NORM_FLOOR)))
    ar = purify(m, r, tol)
    amps = ar.amps
    if ancilla_unitary is not None:
        amps = amps @ np.asarray(ancilla_unitary).T
    if r == 1:
        state = StateTensor(dims, amps[:, 0])
    else:
        state = StateTensor(dims + (r,), amps)
    return decompose_multipartite(state, tol, accept_tol, seed)
