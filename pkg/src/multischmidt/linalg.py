"""Dense complex linear algebra built on Jacobi rotations.

Everything here works on plain ``numpy`` arrays. Tolerances are relative to
Frobenius norms, with an absolute floor so that zero matrices behave.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotCommuting, NotHermitian, ShapeMismatch

DEFAULT_TOL = 1e-9
NORM_FLOOR = 1e-14
MAX_SWEEPS = 100
MAX_RETRIES = 5

# rotations below this fraction of the matrix norm are roundoff
_ROTATION_EPS = 1e-15
# eigenvalues closer than this (relative) are resolved as one cluster
_CLUSTER_GAP = 1e-5


class EigenSystem(NamedTuple):
    values: np.ndarray
    basis: np.ndarray


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> np.ndarray:
    """2x2 unitary J with J^H [[app, apq], [apq*, aqq]] J diagonal."""
    mag = abs(apq)
    phase = apq / mag
    tau = (aqq - app) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    pc = np.conj(phase)
    return np.array([[c, s], [-s * pc, c * pc]])


def hermitian_eig(m, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps continue past ``tol`` down to roundoff, since later stages read
    eigenvectors to much better than ``tol``. ``NoConvergence`` is raised
    only if the off-diagonal mass still exceeds ``tol * ||M||_F`` once the
    sweep budget is spent.

    Returns
    -------
    EigenSystem
        ``values`` sorted descending, ``basis`` with matching orthonormal
        eigenvector columns.
    """
    a = _as_matrix(m).copy()
    n, k = a.shape
    if n != k:
        raise ShapeMismatch(f"matrix must be square, got {a.shape}")
    norm = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) > tol * max(norm, NORM_FLOOR):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    thresh = _ROTATION_EPS * max(norm, NORM_FLOOR)

    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                rotated = True
                j = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                v[:, idx] = v[:, idx] @ j
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        if not rotated:
            break
    else:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off > tol * max(norm, NORM_FLOOR):
            raise NoConvergence(f"Jacobi sweeps exhausted, off-diagonal mass {off:.3e}")

    values = np.diag(a).real
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values[order], v[:, order])


def _phase_fix(u: np.ndarray, q: np.ndarray) -> None:
    """Make each column of u have a real positive largest entry; compensate in rows of q."""
    for j in range(u.shape[1]):
        col = u[:, j]
        i = int(np.argmax(np.abs(col)))
        if abs(col[i]) == 0:
            continue
        ph = col[i] / abs(col[i])
        u[:, j] = col * np.conj(ph)
        if j < q.shape[0]:
            q[j, :] = q[j, :] * ph


def complete_unitary(cols: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns to a ``dim x dim`` unitary, keeping them first."""
    cols = np.asarray(cols, dtype=complex).reshape(dim, -1)
    k = cols.shape[1]
    if k == dim:
        return cols.copy()
    proj = np.eye(dim, dtype=complex) - cols @ cols.conj().T
    q, _, _ = scipy.linalg.qr(proj, pivoting=True)
    return np.hstack([cols, q[:, : dim - k]])


def _hestenes(a: np.ndarray, tol: float, max_sweeps: int):
    """Orthogonalize the columns of a tall matrix; returns ``(A V, V)``."""
    n = a.shape[1]
    g = a.copy()
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    floor = max(norm, NORM_FLOOR) * _ROTATION_EPS
    for _ in range(max_sweeps):
        rotated = False
        for p_ in range(n - 1):
            for q_ in range(p_ + 1, n):
                x, y = g[:, p_], g[:, q_]
                alpha = np.vdot(x, x).real
                beta = np.vdot(y, y).real
                gamma = np.vdot(x, y)
                if abs(gamma) <= max(_ROTATION_EPS * np.sqrt(alpha * beta), floor * floor):
                    continue
                rotated = True
                j = _jacobi_rotation(alpha, beta, gamma)
                idx = [p_, q_]
                g[:, idx] = g[:, idx] @ j
                v[:, idx] = v[:, idx] @ j
        if not rotated:
            break
    else:
        gram = g.conj().T @ g
        off = np.linalg.norm(gram - np.diag(np.diag(gram)))
        if off > tol * max(norm * norm, NORM_FLOOR):
            raise NoConvergence(f"one-sided Jacobi exhausted, residual {off:.3e}")
    return g, v


def singular_values(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Singular values only, descending; skips building the unitaries."""
    a = _as_matrix(a)
    if a.shape[1] > a.shape[0]:
        a = a.conj().T
    g, _ = _hestenes(a, tol, MAX_SWEEPS)
    return np.sort(np.linalg.norm(g, axis=0))[::-1]


def svd(a, tol: float = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS):
    """Full singular value decomposition ``A = P @ diag(sigma) @ Q``.

    One-sided (Hestenes) Jacobi: rotations orthogonalize the columns of A,
    which diagonalizes ``A^H A`` implicitly without squaring the condition
    number. The wide case is handled through ``A^H``.

    Returns
    -------
    P : (m, m) unitary
    sigma : (min(m, n),) non-negative, descending
    Q : (n, n) unitary
    """
    a = _as_matrix(a)
    m, n = a.shape
    if n > m:
        p2, s, q2 = svd(a.conj().T, tol, max_sweeps)
        p, q = q2.conj().T.copy(), p2.conj().T.copy()
        _phase_fix(p, q)
        return p, s, q

    g, v = _hestenes(a, tol, max_sweeps)

    sigma = np.linalg.norm(g, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma, g, v = sigma[order], g[:, order], v[:, order]
    live = sigma > 100 * np.finfo(float).eps * max(sigma[0] if n else 0.0, NORM_FLOOR) * m
    r = int(np.count_nonzero(live))
    u = g[:, :r] / sigma[:r]
    if r:
        # small singular columns lose orthogonality to roundoff; QR restores it
        qf, rf = np.linalg.qr(u)
        d = np.diag(rf)
        u = qf * (d / np.where(np.abs(d) > 0, np.abs(d), 1.0))
    p = complete_unitary(u, m)
    q = v.conj().T.copy()
    sigma = np.where(live, sigma, 0.0)
    _phase_fix(p, q)
    return p, sigma, q


def commutes(x, y, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``||XY - YX||_F <= tol * max(1, ||X||_F ||Y||_F)``."""
    x, y = _as_matrix(x), _as_matrix(y)
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise ShapeMismatch(f"cannot commute shapes {x.shape} and {y.shape}")
    return _commutator_norm(x, y) <= tol * max(1.0, np.linalg.norm(x) * np.linalg.norm(y))


def _commutator_norm(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.linalg.norm(x @ y - y @ x))


def first_noncommuting(ms: np.ndarray, tol: float = DEFAULT_TOL):
    """Return ``(i, j, norm)`` for the first pair failing ``commutes``, else None."""
    ms = np.asarray(ms, dtype=complex)
    norms = np.linalg.norm(ms, axis=(1, 2))
    for i in range(len(ms) - 1):
        rest = ms[i + 1 :]
        comm = np.linalg.norm(ms[i] @ rest - rest @ ms[i], axis=(1, 2))
        bound = tol * np.maximum(1.0, norms[i] * norms[i + 1 :])
        bad = np.nonzero(comm > bound)[0]
        if bad.size:
            j = i + 1 + int(bad[0])
            return i, j, float(comm[bad[0]])
    return None


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    u = _as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    dim = u.shape[0]
    return bool(np.linalg.norm(u.conj().T @ u - np.eye(dim)) <= tol * dim)


def offdiag_norm(m: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part (works on rectangular and stacked input)."""
    m = np.asarray(m)
    # mask rather than subtract the diagonal: total - diag cancels badly
    mask = ~np.eye(m.shape[-2], m.shape[-1], dtype=bool)
    return float(np.sqrt(np.sum(np.abs(m[..., mask]) ** 2)))


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i - 1] - values[i] > gap:
            groups.append(np.arange(start, i))
            start = i
    return groups


def joint_basis(ms: Sequence[np.ndarray], tol: float, rng: np.random.Generator, scale=None, depth: int = 0):
    """Common eigenbasis of commuting Hermitian matrices, without validation.

    Diagonalizes a random positive combination, then resolves every
    degenerate eigenvalue cluster by recursing on the restricted block.
    For non-commuting input this still returns a unitary (best effort).
    """
    ms = [np.asarray(m, dtype=complex) for m in ms]
    k = ms[0].shape[0]
    if k == 1:
        return np.eye(1, dtype=complex)
    ident = np.eye(k)
    shifted = [m - (np.trace(m).real / k) * ident for m in ms]
    if scale is None:
        scale = max(max(np.linalg.norm(m) for m in ms), NORM_FLOOR)
    spread = max(np.linalg.norm(m) for m in shifted)
    if spread <= tol * scale or depth > 2 * k:
        return np.eye(k, dtype=complex)

    c = rng.uniform(0.5, 1.5, len(ms))
    comb = sum(ci * m for ci, m in zip(c, shifted))
    values, w = hermitian_eig(comb, tol)
    gap = _CLUSTER_GAP * max(np.linalg.norm(comb), NORM_FLOOR)
    for idx in _clusters(values, gap):
        if len(idx) < 2:
            continue
        block = w[:, idx]
        sub = [block.conj().T @ m @ block for m in ms]
        w[:, idx] = block @ joint_basis(sub, tol, rng, scale, depth + 1)
    return w


def joint_diagonalize(ms: Sequence, tol: float = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Unitary W with ``W^H M W`` diagonal for every M in a commuting Hermitian family.

    Raises
    ------
    NotCommuting
        If any pair fails :func:`commutes`.
    NoConvergence
        If no random combination yields a common basis within
        ``MAX_RETRIES`` attempts.
    """
    mats = np.array([_as_matrix(m) for m in ms])
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ShapeMismatch("joint_diagonalize needs square matrices of one size")
    for m in mats:
        if np.linalg.norm(m - m.conj().T) > tol * max(np.linalg.norm(m), NORM_FLOOR):
            raise NotHermitian("joint_diagonalize needs Hermitian matrices")
    bad = first_noncommuting(mats, tol)
    if bad is not None:
        i, j, norm = bad
        raise NotCommuting(f"matrices {i} and {j} do not commute (||[Mi, Mj]|| = {norm:.3e})")

    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        w = joint_basis(mats, tol, rng)
        conj = w.conj().T @ mats @ w
        if all(
            offdiag_norm(c) <= 10 * tol * max(np.linalg.norm(m), NORM_FLOOR)
            for c, m in zip(conj, mats)
        ):
            return w
    raise NoConvergence("joint diagonalization failed after retries")
