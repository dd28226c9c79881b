import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multischmidt.bipartite import schmidt_bipartite, schmidt_number_bipartition
from multischmidt.errors import BadPartition, WrongArity
from multischmidt.state import StateTensor, bipartition_matrix, residual

from helpers import basis_state, ghz, random_state, w_state

s2 = 1 / np.sqrt(2)


def test_bell():
    d = schmidt_bipartite(StateTensor((2, 2), [s2, 0, 0, s2]))
    assert np.allclose(d.coeffs, [s2, s2])


def test_product():
    d = schmidt_bipartite(basis_state((2, 2), (0, 1)))
    assert d.rank == 1 and np.isclose(d.coeffs[0], 1)


def test_random_matches_numpy():
    psi = random_state((3, 4), 0)
    d = schmidt_bipartite(psi)
    assert np.allclose(d.coeffs, np.linalg.svd(psi.amps, compute_uv=False), atol=1e-12)
    assert residual(psi, d) < 1e-10
    d.validate()


def test_arity():
    with pytest.raises(WrongArity):
        schmidt_bipartite(ghz(3))


def test_number_ghz():
    assert schmidt_number_bipartition(ghz(3), [0]) == 2


def test_number_product():
    assert schmidt_number_bipartition(basis_state((2, 3, 2), (1, 2, 0)), [0, 2]) == 1


def test_number_w():
    m = bipartition_matrix(w_state(), [0])
    assert schmidt_number_bipartition(w_state(), [0]) == np.linalg.matrix_rank(m) == 2


def test_number_bad_partition():
    with pytest.raises(BadPartition):
        schmidt_number_bipartition(ghz(3), [0, 1, 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_low_rank_property(m, n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    a = (rng.standard_normal((m, r)) + 1j * rng.standard_normal((m, r))) @ (
        rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n)))
    psi = StateTensor((m, n), a / np.linalg.norm(a))
    d = schmidt_bipartite(psi)
    assert d.rank == r
    assert residual(psi, d) < 1e-10
    assert schmidt_number_bipartition(psi, [0]) == r
