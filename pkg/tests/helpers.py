"""Shared test fixtures and independent oracles."""

import itertools

import numpy as np

from multischmidt.state import StateTensor


def ghz(n, d=2):
    amps = np.zeros((d,) * n, dtype=complex)
    for l in range(d):
        amps[(l,) * n] = 1 / np.sqrt(d)
    return StateTensor((d,) * n, amps)


def w_state(n=3):
    amps = np.zeros((2,) * n, dtype=complex)
    for k in range(n):
        idx = [0] * n
        idx[k] = 1
        amps[tuple(idx)] = 1 / np.sqrt(n)
    return StateTensor((2,) * n, amps)


def basis_state(dims, index):
    amps = np.zeros(dims, dtype=complex)
    amps[tuple(index)] = 1
    return StateTensor(tuple(dims), amps)


def random_state(dims, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(int(np.prod(dims))) + 1j * rng.standard_normal(int(np.prod(dims)))
    return StateTensor(tuple(dims), v / np.linalg.norm(v))


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_density(dim, rank, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def partial_trace_oracle(psi, keep):
    """Direct double sum over the traced-out multi-index; no reshapes."""
    keep = sorted(keep)
    out_axes = [i for i in range(psi.n) if i not in keep]
    kdims = [psi.dims[i] for i in keep]
    odims = [psi.dims[i] for i in out_axes]
    size = int(np.prod(kdims))
    rho = np.zeros((size, size), dtype=complex)
    for r, rk in enumerate(itertools.product(*map(range, kdims))):
        for c, ck in enumerate(itertools.product(*map(range, kdims))):
            acc = 0j
            for ot in itertools.product(*map(range, odims)):
                ia, ib = [0] * psi.n, [0] * psi.n
                for a, v in zip(keep, rk):
                    ia[a] = v
                for a, v in zip(keep, ck):
                    ib[a] = v
                for a, v in zip(out_axes, ot):
                    ia[a] = ib[a] = v
                acc += psi.amps[tuple(ia)] * np.conj(psi.amps[tuple(ib)])
            rho[r, c] = acc
    return rho


def flat_index(dims, idx):
    """Row-major flattening written out by hand."""
    out = 0
    for d, i in zip(dims, idx):
        out = out * d + i
    return out
