"""Decomposability tests and constructive Schmidt decompositions for n >= 3 parties.

Three routes are provided. ``decompose_tripartite`` factors the diagonal
matrix S as a scaled unitary. ``decompose_quadripartite`` splits the
diagonal data into rank-one blocks. ``decompose_multipartite`` checks that
the matrix family shares one last-mode unitary, then reads the coefficients
off the transformed tensor. Every route verifies its answer by
reconstruction before declaring a state decomposable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bipartite import schmidt_bipartite
from .errors import NotPositivelyCommuting, NotScaledUnitary, NotUnitDecomposable, WrongArity
from .linalg import (
    DEFAULT_TOL,
    MAX_RETRIES,
    NORM_FLOOR,
    complete_unitary,
    first_noncommuting,
    joint_basis,
    offdiag_norm,
    singular_values,
    svd,
)
from .state import (
    RANK_TOL,
    DiagonalizingPair,
    MatrixSet,
    SchmidtDecomposition,
    StateTensor,
    apply_local,
    assemble,
    build_matrix_family,
    canonicalize,
    matrix_set_quadripartite,
    matrix_set_tripartite,
)

ACCEPT_TOL = 1e-8


class Reason(str, enum.Enum):
    NOT_POSITIVELY_COMMUTING = "NotPositivelyCommuting"
    NOT_SCALED_UNITARY = "NotScaledUnitary"
    NOT_UNIT_DECOMPOSABLE = "NotUnitDecomposable"
    NOT_CENTRAL = "NotCentral"
    RECONSTRUCTION_MISMATCH = "ReconstructionMismatch"


@dataclass(frozen=True)
class ScaledUnitaryFactorization:
    lam: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class UnitDecomposition:
    """``D_k = lambdas[k] * outer(u[:, k], v[:, k])``; columns of inactive k are zero."""

    lambdas: np.ndarray
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class DecomposabilityVerdict:
    decomposable: bool
    decomposition: Optional[SchmidtDecomposition]
    reason: Optional[Reason]
    residual: float
    detail: str = ""


def _stack(ms) -> np.ndarray:
    if isinstance(ms, MatrixSet):
        ms = ms.matrices
    mats = np.asarray(ms, dtype=complex)
    if mats.ndim != 3 or len(mats) == 0:
        raise ValueError("expected a nonempty stack of equally shaped matrices")
    return mats


def _grams(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = np.conj(np.swapaxes(mats, 1, 2))
    return mats @ h, h @ mats


def _components(weight: np.ndarray, thr: float) -> list[list[int]]:
    dr, dc = weight.shape
    parent = list(range(max(dr, dc)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in zip(*np.nonzero(weight > thr)):
        if a != b:
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for i in range(len(parent)):
        groups.setdefault(find(i), []).append(i)
    return [g for g in groups.values() if len(g) > 1]


def _align(mats, p, q, tol, scale, rng):
    """Re-pair P and Q inside degenerate blocks so that every P^H A Q^H is diagonal.

    Within a block each slice is sqrt(mu_i) times a unitary. Multiplying by
    the inverse of the largest slice leaves commuting normal matrices, whose
    common eigenbasis fixes the P side; the Q side then follows from rows of
    the reference slice.
    """
    b = np.conj(p.T) @ mats @ np.conj(q.T)
    weight = np.sqrt(np.sum(np.abs(b) ** 2, axis=0))
    for comp in _components(weight, 10 * tol * scale):
        rows = [i for i in comp if i < p.shape[1]]
        cols = [i for i in comp if i < q.shape[0]]
        if len(rows) != len(cols):
            continue
        blk = b[:, rows][:, :, cols]
        i0 = int(np.argmax(np.linalg.norm(blk, axis=(1, 2))))
        ref = blk[i0]
        sv = singular_values(ref, tol)
        if sv[-1] <= 1e-8 * sv[0]:
            continue
        normal = np.linalg.solve(ref.T, np.swapaxes(blk, 1, 2)).swapaxes(1, 2)
        parts = [(m + m.conj().T) / 2 for m in normal] + [(m - m.conj().T) / 2j for m in normal]
        x = joint_basis(parts, tol, rng)
        r = x.conj().T @ ref
        y = r / np.linalg.norm(r, axis=1, keepdims=True)
        p[:, rows] = p[:, rows] @ x
        q[cols, :] = y @ q[cols, :]
    return p, q


def _pair(mats: np.ndarray, tol: float, seed: int):
    """Best-effort diagonalizing pair; returns ``(P, Q, offdiag mass of P^H A Q^H)``."""
    left, right = _grams(mats)
    scale = max(float(np.linalg.norm(mats)), NORM_FLOOR)
    best = None
    for attempt in range(MAX_RETRIES):
        # identical coefficient draws on both sides keep the spectra aligned
        p = joint_basis(left, tol, np.random.default_rng([seed, attempt]))
        q = joint_basis(right, tol, np.random.default_rng([seed, attempt])).conj().T
        p, q = _align(mats, p, q, tol, scale, np.random.default_rng([seed, attempt, 1]))
        off = offdiag_norm(np.conj(p.T) @ mats @ np.conj(q.T))
        if best is None or off < best[2]:
            best = (p, q, off)
        if off <= 10 * tol * scale:
            break
    return best


def check_positively_commuting(ms, tol: float = DEFAULT_TOL, seed: int = 0) -> DiagonalizingPair:
    """Verify positive commutation and return a diagonalizing pair (P, Q).

    P and Q^H are common eigenbases of the A A^H and A^H A families,
    re-paired inside degenerate blocks so that P^H A_i Q^H is as close to
    diagonal as possible. Commuting Grams do not guarantee a common pair
    (the W state is the standard example), so callers must still check
    the off-diagonal mass.

    Raises
    ------
    NotPositivelyCommuting
        If two Gram matrices of either family fail to commute; the pair of
        slice indices and the commutator norm are attached.
    """
    mats = _stack(ms)
    left, right = _grams(mats)
    for name, fam in (("A^H A", right), ("A A^H", left)):
        bad = first_noncommuting(fam, tol)
        if bad is not None:
            i, j, norm = bad
            raise NotPositivelyCommuting(
                f"{name} Grams of slices {i} and {j} do not commute (norm {norm:.3e})", (i, j), norm
            )
    p, q, _ = _pair(mats, tol, seed)
    return DiagonalizingPair(p, q)


def _factor_rows(s: np.ndarray, tol: float):
    rows, cols = s.shape
    dim = max(rows, cols)
    padded = np.zeros((dim, dim), dtype=complex)
    padded[:rows, :cols] = s
    lam = np.linalg.norm(padded, axis=1)
    lmax = lam.max()
    active = lam > RANK_TOL * lmax if lmax > NORM_FLOOR else np.zeros(dim, bool)
    v = np.zeros((dim, dim), dtype=complex)
    v[active] = padded[active] / lam[active, None]
    va = v[active]
    unit_err = float(np.linalg.norm(va @ va.conj().T - np.eye(len(va))))
    trace_err = abs(float(np.sum(lam**2)) - 1.0)
    return lam, v, active, unit_err, trace_err


def scaled_unitary_factor(s, tol: float = DEFAULT_TOL) -> ScaledUnitaryFactorization:
    """Factor S = diag(lam) @ V with V unitary and sum(lam**2) = 1.

    Rectangular S is zero-padded to square; rows with vanishing norm are
    completed to an orthonormal basis.
    """
    s = np.asarray(s, dtype=complex)
    lam, v, active, unit_err, trace_err = _factor_rows(s, tol)
    dim = len(lam)
    if unit_err > tol * dim:
        raise NotScaledUnitary(f"normalized rows are not orthonormal (error {unit_err:.3e})")
    if trace_err > 10 * tol:
        raise NotScaledUnitary(f"sum of squared row norms is off by {trace_err:.3e}")
    full = complete_unitary(v[active].conj().T, dim).conj().T
    v = v.copy()
    v[~active] = full[int(active.sum()) :]
    return ScaledUnitaryFactorization(lam, v)


def _unit_parts(ds: np.ndarray, tol: float):
    lams, us, vs, second = [], [], [], []
    for d in ds:
        p, sigma, q = svd(d, tol)
        lams.append(sigma[0] if sigma.size else 0.0)
        second.append(sigma[1] if sigma.size > 1 else 0.0)
        us.append(p[:, 0])
        vs.append(q[0, :])
    lams = np.array(lams)
    lmax = lams.max()
    active = lams > RANK_TOL * lmax if lmax > NORM_FLOOR else np.zeros(len(lams), bool)
    u = np.array(us).T * active
    v = np.array(vs).T * active
    return lams * active, u, v, active, float(max(second)), float(lmax)


def unit_decompose(ds: Sequence, tol: float = DEFAULT_TOL) -> UnitDecomposition:
    """Split each D_k into lambda_k u_k v_k^T with [u_k] and [v_k] orthonormal.

    Raises
    ------
    NotUnitDecomposable
        If some D_k has a second singular value above ``tol * max(lambda)``
        or the collected u or v vectors are not orthonormal.
    """
    ds = _stack(ds)
    lams, u, v, active, second, lmax = _unit_parts(ds, tol)
    if second > tol * max(lmax, NORM_FLOOR):
        raise NotUnitDecomposable(f"a slice has rank above one (second singular value {second:.3e})")
    r = int(active.sum())
    for name, w in (("u", u[:, active]), ("v", v[:, active])):
        if r > w.shape[0] or np.linalg.norm(w.conj().T @ w - np.eye(r)) > tol * max(w.shape[0], 1):
            raise NotUnitDecomposable(f"assembled {name} vectors are not orthonormal")
    return UnitDecomposition(lams, u, v)


def _verdict(psi, coeffs, vectors, reason, detail, accept_tol) -> DecomposabilityVerdict:
    res = float(np.linalg.norm(psi.vector - assemble(coeffs, vectors)))
    if reason is None and res > accept_tol:
        reason, detail = Reason.RECONSTRUCTION_MISMATCH, f"reconstruction residual {res:.3e}"
    if reason is not None:
        return DecomposabilityVerdict(False, None, reason, res, detail)
    decomp = canonicalize(SchmidtDecomposition(coeffs, vectors))
    return DecomposabilityVerdict(True, decomp, None, res)


def _pair_or_reason(mats, tol, seed):
    try:
        pair = check_positively_commuting(mats, tol, seed)
    except NotPositivelyCommuting as exc:
        p, q, _ = _pair(mats, tol, seed)
        return p, q, Reason.NOT_POSITIVELY_COMMUTING, str(exc)
    off = offdiag_norm(np.conj(pair.P.T) @ mats @ np.conj(pair.Q.T))
    if off > 10 * tol * max(float(np.linalg.norm(mats)), NORM_FLOOR):
        return pair.P, pair.Q, Reason.RECONSTRUCTION_MISMATCH, f"no common diagonalizing pair (off-diagonal mass {off:.3e})"
    return pair.P, pair.Q, None, ""


def decompose_tripartite(
    psi: StateTensor, tol: float = DEFAULT_TOL, accept_tol: float = ACCEPT_TOL, seed: int = 0
) -> DecomposabilityVerdict:
    """Decide and construct a three-party Schmidt decomposition.

    The slices A_i are brought to diagonal form by a common pair (P, Q);
    their diagonals form the columns of S, whose factorization
    S = diag(lam) V yields the coefficients and the first subsystem's
    vectors. Failures are reported in the verdict, never raised.
    """
    mats = matrix_set_tripartite(psi).matrices
    d1, d2, d3 = psi.dims
    p, q, reason, detail = _pair_or_reason(mats, tol, seed)
    diag = np.diagonal(np.conj(p.T) @ mats @ np.conj(q.T), axis1=1, axis2=2)
    s = diag[:, : min(d2, d3)].T

    lam, v, active, unit_err, trace_err = _factor_rows(s, tol)
    if reason is None and (unit_err > tol * len(lam) or trace_err > 10 * tol):
        reason = Reason.NOT_SCALED_UNITARY
        detail = f"S is not a scaled unitary (row error {unit_err:.3e}, trace error {trace_err:.3e})"
    idx = np.nonzero(active)[0]
    vectors = (v[idx, :d1].T, p[:, idx], q[idx, :].T)
    return _verdict(psi, lam[idx], vectors, reason, detail, accept_tol)


def decompose_quadripartite(
    psi: StateTensor, tol: float = DEFAULT_TOL, accept_tol: float = ACCEPT_TOL, seed: int = 0
) -> DecomposabilityVerdict:
    """Decide and construct a four-party Schmidt decomposition.

    After diagonalizing the slices A^{lm}, the k-th diagonal entries form a
    d1 x d2 matrix D_k which must be rank one; its factors give the first
    two subsystems' vectors.
    """
    mats = matrix_set_quadripartite(psi).matrices
    d1, d2, d3, d4 = psi.dims
    p, q, reason, detail = _pair_or_reason(mats, tol, seed)
    diag = np.diagonal(np.conj(p.T) @ mats @ np.conj(q.T), axis1=1, axis2=2)[:, : min(d3, d4)]
    ds = np.moveaxis(diag.reshape(d1, d2, -1), 2, 0)

    if reason is None:
        try:
            unit_decompose(ds, tol)
        except NotUnitDecomposable as exc:
            reason, detail = Reason.NOT_UNIT_DECOMPOSABLE, str(exc)
    lams, u, v, active, _, _ = _unit_parts(ds, tol)
    idx = np.nonzero(active)[0]
    coeffs = lams[idx]
    if coeffs.size:
        coeffs = coeffs / np.linalg.norm(coeffs)
    vectors = (u[:, idx], v[:, idx], p[:, idx], q[idx, :].T)
    return _verdict(psi, coeffs, vectors, reason, detail, accept_tol)


def _active_rows(mats, p, q) -> np.ndarray:
    diag = np.diagonal(np.conj(p.T) @ mats @ np.conj(q.T), axis1=1, axis2=2)
    w = np.sqrt(np.sum(np.abs(diag) ** 2, axis=0))
    if w.size == 0 or w.max() <= NORM_FLOOR:
        return np.zeros(0, dtype=int)
    return np.nonzero(w > RANK_TOL * w.max())[0]


def _match_rows(q_ref, act_ref, q_k, act_k, tol):
    """Greedy maximum-overlap matching of active rows; returns {k-row: ref-row} or None."""
    if len(act_ref) != len(act_k):
        return None
    overlap = np.abs(q_ref[act_ref].conj() @ q_k[act_k].T)
    pairs = sorted(
        ((overlap[a, b], a, b) for a in range(len(act_ref)) for b in range(len(act_k))), reverse=True
    )
    used_a, used_b, match = set(), set(), {}
    for ov, a, b in pairs:
        if a in used_a or b in used_b or ov < 1 - 10 * tol:
            continue
        used_a.add(a)
        used_b.add(b)
        match[int(act_k[b])] = int(act_ref[a])
    return match if len(match) == len(act_ref) else None


def _permute_columns(p: np.ndarray, match: dict[int, int]) -> np.ndarray:
    out = np.empty_like(p)
    free_cols = [j for j in range(p.shape[1]) if j not in match]
    free_slots = [j for j in range(p.shape[1]) if j not in match.values()]
    for src, dst in match.items():
        out[:, dst] = p[:, src]
    for src, dst in zip(free_cols, free_slots):
        out[:, dst] = p[:, src]
    return out


def decompose_multipartite(
    psi: StateTensor, tol: float = DEFAULT_TOL, accept_tol: float = ACCEPT_TOL, seed: int = 0
) -> DecomposabilityVerdict:
    """Decide and construct an n-party Schmidt decomposition (n >= 2).

    Each slice set over (i_k, i_n) must positively commute, and all sets
    must share one last-mode unitary up to row phases and order. The
    candidate local unitaries are then undone on the state; what remains
    must sit on the diagonal i_1 = ... = i_n, where the entries are the
    coefficients (phases moved into the last subsystem).
    """
    if psi.n == 2:
        decomp = schmidt_bipartite(psi, tol)
        return _verdict(psi, decomp.coeffs, decomp.vectors, None, "", accept_tol)
    if psi.n < 2:
        raise WrongArity("need at least two subsystems")

    family = build_matrix_family(psi)
    reason, detail = None, ""
    pairs = []
    for mset in family.sets:
        p, q, why, msg = _pair_or_reason(mset.matrices, tol, seed)
        if why is not None and reason is None:
            reason, detail = why, msg
        pairs.append((p, q, _active_rows(mset.matrices, p, q)))

    q_ref, act_ref = pairs[0][1], pairs[0][2]
    unitaries = [pairs[0][0]]
    for k, (p, q, act) in enumerate(pairs[1:], start=1):
        match = _match_rows(q_ref, act_ref, q, act, tol)
        if match is None:
            if reason is None:
                reason, detail = Reason.NOT_CENTRAL, f"slice set {k} does not share the last-mode unitary"
            unitaries.append(p)
        else:
            unitaries.append(_permute_columns(p, match))
    last = q_ref.T.copy()
    unitaries.append(last)

    core = apply_local(psi, [u.conj().T for u in unitaries]).amps
    r = min(psi.dims)
    diag = tuple(np.arange(r) for _ in range(psi.n))
    z = core[diag]
    rest = np.abs(core) ** 2
    rest[diag] = 0.0
    off = float(np.sqrt(np.sum(rest)))
    if reason is None and off > 10 * tol * max(psi.norm(), NORM_FLOOR):
        reason = Reason.RECONSTRUCTION_MISMATCH
        detail = f"transformed state is not diagonal (off-diagonal mass {off:.3e})"
    lam = np.abs(z)
    keep = np.nonzero(lam > RANK_TOL * max(lam.max(), NORM_FLOOR))[0]
    last[:, keep] = last[:, keep] * (z[keep] / lam[keep])
    vectors = tuple(u[:, keep] for u in unitaries)
    return _verdict(psi, lam[keep], vectors, reason, detail, accept_tol)


def decompose(
    psi: StateTensor, tol: float = DEFAULT_TOL, accept_tol: float = ACCEPT_TOL, seed: int = 0
) -> DecomposabilityVerdict:
    """Dispatch on the number of subsystems."""
    if psi.n == 3:
        return decompose_tripartite(psi, tol, accept_tol, seed)
    if psi.n == 4:
        return decompose_quadripartite(psi, tol, accept_tol, seed)
    return decompose_multipartite(psi, tol, accept_tol, seed)
