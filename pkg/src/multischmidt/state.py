"""Multipartite pure states, their Schmidt form, and slicing into matrix sets.

Multi-indices are row-major: subsystem 0 is the slowest-varying index.
Subsystems are numbered from 0 throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BadPartition, BadRank, DimensionMismatch, NotNormalized, ShapeMismatch, WrongArity
from .linalg import DEFAULT_TOL

RANK_TOL = 1e-10
SEPARATION = 0.05


@dataclass(frozen=True)
class StateTensor:
    """Dense amplitude tensor of an n-partite pure state."""

    dims: tuple[int, ...]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2:
            raise WrongArity("a state needs at least two subsystems")
        if any(d < 1 for d in dims):
            raise DimensionMismatch(f"subsystem dimensions must be positive, got {dims}")
        amps = np.asarray(self.amps, dtype=complex)
        if amps.size != int(np.prod(dims)):
            raise DimensionMismatch(f"{amps.size} amplitudes for dims {dims} (need {int(np.prod(dims))})")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps = amps.reshape(dims).copy()
        amps.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_vector(cls, dims: Sequence[int], vec, normalize: bool = False, tol: float = DEFAULT_TOL) -> "StateTensor":
        vec = np.asarray(vec, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if normalize:
            if norm == 0:
                raise NotNormalized("cannot normalize the zero vector")
            vec = vec / norm
        elif abs(norm - 1.0) > tol:
            raise NotNormalized(f"state norm is {norm:.12g}, expected 1")
        return cls(tuple(dims), vec)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def vector(self) -> np.ndarray:
        return self.amps.ravel()

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Coefficients plus one matrix of Schmidt vectors (as columns) per subsystem."""

    coeffs: np.ndarray
    vectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float).ravel()
        vectors = tuple(np.atleast_2d(np.asarray(v, dtype=complex).T).T for v in self.vectors)
        for v in vectors:
            if v.shape[1] != coeffs.size:
                raise ShapeMismatch(f"{v.shape[1]} vectors for {coeffs.size} coefficients")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "vectors", vectors)

    @property
    def rank(self) -> int:
        return int(self.coeffs.size)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.shape[0] for v in self.vectors)

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        """Check positivity, normalization and per-subsystem orthonormality."""
        if np.any(self.coeffs <= 0):
            raise ValueError("Schmidt coefficients must be positive")
        if abs(np.sum(self.coeffs**2) - 1.0) > 10 * tol:
            raise NotNormalized("squared Schmidt coefficients do not sum to 1")
        r = self.rank
        for k, v in enumerate(self.vectors):
            if np.linalg.norm(v.conj().T @ v - np.eye(r)) > 10 * tol * max(r, 1):
                raise ValueError(f"Schmidt vectors of subsystem {k} are not orthonormal")


@dataclass(frozen=True)
class MatrixSet:
    """Matrix slices of a state; ``labels[i]`` holds the fixed indices of ``matrices[i]``."""

    labels: tuple[tuple[int, ...], ...]
    matrices: np.ndarray

    def __len__(self):
        return len(self.matrices)


@dataclass(frozen=True)
class MatrixFamily:
    """One MatrixSet per subsystem k < n-1, sliced over the index pair (k, n-1)."""

    sets: tuple[MatrixSet, ...]


@dataclass(frozen=True)
class DiagonalizingPair:
    P: np.ndarray
    Q: np.ndarray


def matrix_set_tripartite(psi: StateTensor) -> MatrixSet:
    if psi.n != 3:
        raise WrongArity(f"tripartite matrix set needs 3 subsystems, got {psi.n}")
    labels = tuple((i,) for i in range(psi.dims[0]))
    return MatrixSet(labels, psi.amps.copy())


def matrix_set_quadripartite(psi: StateTensor) -> MatrixSet:
    if psi.n != 4:
        raise WrongArity(f"quadripartite matrix set needs 4 subsystems, got {psi.n}")
    d1, d2, d3, d4 = psi.dims
    labels = tuple((l, m) for l in range(d1) for m in range(d2))
    return MatrixSet(labels, psi.amps.reshape(d1 * d2, d3, d4).copy())


def _slices(amps: np.ndarray, k: int, last: int) -> MatrixSet:
    n = amps.ndim
    rest = [j for j in range(n) if j not in (k, last)]
    moved = np.transpose(amps, rest + [k, last])
    rest_dims = [amps.shape[j] for j in rest]
    labels = tuple(tuple(int(x) for x in idx) for idx in np.ndindex(*rest_dims))
    mats = moved.reshape(-1, amps.shape[k], amps.shape[last]).copy()
    return MatrixSet(labels, mats)


def build_matrix_family(psi: StateTensor) -> MatrixFamily:
    """Slices over (i_k, i_n) for every k < n, all other indices fixed."""
    if psi.n < 3:
        raise WrongArity(f"matrix family needs at least 3 subsystems, got {psi.n}")
    last = psi.n - 1
    return MatrixFamily(tuple(_slices(psi.amps, k, last) for k in range(last)))


def _check_partition(n: int, left: Iterable[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    left = tuple(sorted(set(int(i) for i in left)))
    if not left or len(left) >= n or left[0] < 0 or left[-1] >= n:
        raise BadPartition(f"{left} is not a nonempty proper subset of range({n})")
    right = tuple(i for i in range(n) if i not in left)
    return left, right


def bipartition_matrix(psi: StateTensor, left: Iterable[int]) -> np.ndarray:
    """Flatten the amplitudes into a (left group) x (right group) matrix."""
    left, right = _check_partition(psi.n, left)
    rows = int(np.prod([psi.dims[i] for i in left]))
    return np.transpose(psi.amps, left + right).reshape(rows, -1).copy()


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _separated_coeffs(rank: int, rng: np.random.Generator) -> np.ndarray:
    if rank == 1:
        return np.ones(1)
    while True:
        lam = np.sqrt(rng.dirichlet(np.ones(rank)))
        lam = np.sort(lam)[::-1]
        if lam[-1] >= SEPARATION and np.all(-np.diff(lam) >= SEPARATION):
            return lam


def random_decomposable(dims: Sequence[int], rank: int, seed: int) -> tuple[StateTensor, SchmidtDecomposition]:
    """Planted Schmidt-decomposable state and its decomposition.

    Coefficients come from a Dirichlet draw on the squared simplex, redrawn
    until every coefficient and every gap is at least 0.05. One Haar
    unitary per subsystem supplies the Schmidt vectors.
    """
    dims = tuple(int(d) for d in dims)
    if rank < 1 or rank > min(dims):
        raise BadRank(f"rank {rank} outside 1..{min(dims)}")
    rng = np.random.default_rng(seed)
    coeffs = _separated_coeffs(rank, rng)
    vectors = tuple(haar_unitary(d, rng)[:, :rank] for d in dims)
    decomp = SchmidtDecomposition(coeffs, vectors)
    return reconstruct(decomp, dims), decomp


def assemble(coeffs, vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Sum of scaled outer products; no orthonormality requirement."""
    coeffs = np.asarray(coeffs, dtype=complex)
    acc = coeffs.reshape(-1, 1)
    for v in vectors:
        acc = (acc[:, :, None] * v.T[:, None, :]).reshape(coeffs.size, -1)
    return acc.sum(axis=0)


def reconstruct(decomp: SchmidtDecomposition, dims: Sequence[int] | None = None) -> StateTensor:
    if dims is not None and tuple(dims) != decomp.dims:
        raise ShapeMismatch(f"decomposition dims {decomp.dims} do not match {tuple(dims)}")
    return StateTensor(decomp.dims, assemble(decomp.coeffs, decomp.vectors))


def residual(psi: StateTensor, decomp: SchmidtDecomposition) -> float:
    return float(np.linalg.norm(psi.vector - assemble(decomp.coeffs, decomp.vectors)))


def apply_local(psi: StateTensor, unitaries: Sequence[np.ndarray]) -> StateTensor:
    """Apply ``U_1 (x) ... (x) U_n``; ``None`` entries act as identity."""
    t = psi.amps
    for k, u in enumerate(unitaries):
        if u is None:
            continue
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return StateTensor(tuple(t.shape), t)


def _pivot(v: np.ndarray) -> int:
    mags = np.abs(v)
    return int(np.argmax(mags >= mags.max() * (1 - 1e-6)))


def canonicalize(decomp: SchmidtDecomposition) -> SchmidtDecomposition:
    """Canonical representative modulo phases and ordering.

    Coefficients descend (ties ordered by the first subsystem's vectors);
    every vector except the last subsystem's gets a real positive pivot
    entry (the first entry within 1e-6 of the largest magnitude), and the
    compensating phase lands on the last subsystem.
    """
    vecs = [v.copy() for v in decomp.vectors]
    comp = np.ones(decomp.rank, dtype=complex)
    for v in vecs[:-1]:
        for j in range(decomp.rank):
            i = _pivot(v[:, j])
            ph = v[i, j] / abs(v[i, j])
            v[:, j] *= np.conj(ph)
            comp[j] *= ph
    vecs[-1] = vecs[-1] * comp

    def key(j):
        first = vecs[0][:, j]
        tie = tuple(x for z in first for x in (-round(z.real, 8), -round(z.imag, 8)))
        return (-round(decomp.coeffs[j], 9),) + tie

    order = sorted(range(decomp.rank), key=key)
    return SchmidtDecomposition(decomp.coeffs[order], tuple(v[:, order] for v in vecs))
