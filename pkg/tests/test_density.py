import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multischmidt.bipartite import schmidt_bipartite, schmidt_number_bipartition
from multischmidt.density import (
    check_rank_inequality,
    grouped_product_state,
    reduced_density,
    schmidt_number,
    tensor_product_grouping,
    valid_groupings,
)
from multischmidt.errors import BadGrouping, BadPartition, ShapeMismatch
from multischmidt.multipartite import decompose_multipartite
from multischmidt.state import SchmidtDecomposition, StateTensor, random_decomposable, reconstruct

from helpers import basis_state, ghz, partial_trace_oracle, random_state, w_state

s2 = 1 / np.sqrt(2)


def test_reduced_bell():
    bell = StateTensor((2, 2), [s2, 0, 0, s2])
    assert np.allclose(reduced_density(bell, [1]).matrix, np.eye(2) / 2)


def test_reduced_basis():
    rho = reduced_density(basis_state((2, 2, 2), (0, 0, 0)), [1, 2]).matrix
    ref = np.zeros((4, 4))
    ref[0, 0] = 1
    assert np.allclose(rho, ref)


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2]])
def test_reduced_w_oracle(keep):
    psi = w_state()
    assert np.allclose(reduced_density(psi, keep).matrix, partial_trace_oracle(psi, keep))


def test_reduced_w_values():
    rho = reduced_density(w_state(), [1]).matrix
    assert np.allclose(rho, np.diag([2 / 3, 1 / 3]))


def test_reduced_bad_partition():
    with pytest.raises(BadPartition):
        reduced_density(ghz(3), [])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=2, max_size=4), st.integers(0, 10**6), st.data())
def test_reduced_oracle_property(dims, seed, data):
    psi = random_state(dims, seed)
    keep = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1, max_size=len(dims) - 1))
    rho = reduced_density(psi, keep).matrix
    assert np.allclose(rho, partial_trace_oracle(psi, keep), atol=1e-12)
    assert abs(np.trace(rho) - 1) < 1e-9
    # complementary marginals share their nonzero spectrum
    comp = [i for i in range(len(dims)) if i not in keep]
    ev1 = np.sort(np.linalg.eigvalsh(rho))[::-1]
    ev2 = np.sort(np.linalg.eigvalsh(reduced_density(psi, comp).matrix))[::-1]
    k = min(len(ev1), len(ev2))
    assert np.allclose(ev1[:k], ev2[:k], atol=1e-9)
    assert np.all(np.abs(ev1[k:]) < 1e-9) and np.all(np.abs(ev2[k:]) < 1e-9)
    assert schmidt_number(psi, keep) == schmidt_number_bipartition(psi, keep)


def test_schmidt_number_examples():
    assert schmidt_number(ghz(3), [1]) == 2
    assert schmidt_number(basis_state((2, 3, 2), (0, 1, 1)), [0, 1]) == 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(2, 4), min_size=2, max_size=4), st.integers(0, 10**6), st.data())
def test_schmidt_number_planted(dims, seed, data):
    rank = data.draw(st.integers(1, min(dims)))
    psi, d = random_decomposable(dims, rank, seed)
    for k in range(len(dims)):
        assert schmidt_number(psi, [k]) == rank
        ev = np.sort(np.linalg.eigvalsh(reduced_density(psi, [k]).matrix))[::-1][:rank]
        assert np.allclose(ev, d.coeffs**2, atol=1e-9)


def test_rank_inequality_equal():
    psi = ghz(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = check_rank_inequality(psi, psi, 0.5, 0.5, [0])
    assert rep.sch_psi == rep.sch_phi == 2 and rep.holds


def test_rank_inequality_ghz():
    rep = check_rank_inequality(basis_state((2,) * 3, (0, 0, 0)), basis_state((2,) * 3, (1, 1, 1)), s2, s2, [0])
    assert (rep.sch_psi, rep.sch_phi, rep.sch_gamma, rep.holds) == (2, 1, 1, True)


def test_rank_inequality_warns():
    with pytest.warns(UserWarning):
        check_rank_inequality(ghz(3), w_state(), 1.0, 1.0, [0])


def test_rank_inequality_shape():
    with pytest.raises(ShapeMismatch):
        check_rank_inequality(ghz(3), ghz(4), s2, s2, [0])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_rank_inequality_property(seed):
    rng = np.random.default_rng(seed)
    dims = (3, 3, 2)
    phi, _ = random_decomposable(dims, int(rng.integers(1, 3)), seed)
    gamma, _ = random_decomposable(dims, int(rng.integers(1, 3)), seed + 1)
    alpha, beta = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert check_rank_inequality(phi, gamma, alpha, beta, [0, 2]).holds


def test_valid_groupings_count():
    assert valid_groupings(3, 2) == [(1, 2), (2, 1)]
    for m in range(1, 7):
        for n in range(1, m + 1):
            assert len(valid_groupings(m, n)) == math.comb(m - 1, n - 1)


def test_grouping_two_bells():
    bell = SchmidtDecomposition([s2, s2], [np.eye(2), np.eye(2)])
    d = tensor_product_grouping(bell, bell, (1, 1))
    assert d.rank == 4 and np.allclose(d.coeffs, [0.5] * 4)


@pytest.mark.parametrize("sizes", [(1, 1), (2, 0), (1, 1, 1)])
def test_grouping_bad_sizes(sizes):
    _, d3 = random_decomposable((2, 2, 2), 2, 0)
    _, d2 = random_decomposable((2, 2), 2, 0)
    with pytest.raises(BadGrouping):
        tensor_product_grouping(d3, d2, sizes)


def test_grouping_round_trip():
    psi, dpsi = random_decomposable((2, 3, 2), 2, 1)
    phi, dphi = random_decomposable((2, 2), 2, 2)
    for sizes in valid_groupings(3, 2):
        d = tensor_product_grouping(dpsi, dphi, sizes)
        target = grouped_product_state(psi, phi, sizes)
        assert np.linalg.norm(reconstruct(d).vector - target.vector) <= 1e-10
        v = decompose_multipartite(target)
        assert v.decomposable and np.allclose(v.decomposition.coeffs, d.coeffs, atol=1e-8)


def test_grouped_product_state_index_oracle():
    psi = random_state((2, 3), 0)
    phi = random_state((2, 2), 1)
    g = grouped_product_state(psi, phi, (1, 1))
    for i in range(2):
        for j in range(3):
            for a in range(2):
                for b in range(2):
                    assert np.isclose(g.amps[i * 2 + a, j * 2 + b], psi.amps[i, j] * phi.amps[a, b], rtol=0, atol=1e-15)
