import numpy as np
import pytest
from hypothesis import given, strategies as st

from bayescorr import catalog, linalg
from bayescorr.correlation import Correlation, Solution, canonicalize, is_belief_invariant
from bayescorr.game import BayesianGame
from bayescorr.quantum import (DensityMatrix, InvalidQuantumSolution, Povm, QuantumSolution,
                               embed_local, ghz_solution, induced_correlation,
                               random_quantum_solution, validate_quantum_solution)

seeds = st.integers(0, 2**32 - 1)
COMPUTATIONAL = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))


def test_ghz_solution_valid_and_pure():
    q = ghz_solution()
    assert validate_quantum_solution(q)
    rho = q.state.matrix
    assert linalg.trace(rho) == pytest.approx(1)
    vals = linalg.eigenvalues(rho)
    assert np.sum(vals > 1e-9) == 1
    for k in range(3):
        assert np.allclose(linalg.partial_trace(rho, [2, 2, 2], k), np.eye(2) / 2, atol=1e-15)


def test_invalid_states_reported():
    q = ghz_solution()
    half = QuantumSolution(DensityMatrix(q.state.matrix / 2, (2, 2, 2)), q.measurements)
    rep = validate_quantum_solution(half)
    assert not rep and any("trace" in p for p in rep.problems)
    double = Povm((np.eye(2), np.eye(2)))
    bad = QuantumSolution(q.state, ((double, q.measurements[0][1]),) + q.measurements[1:])
    rep = validate_quantum_solution(bad)
    assert not rep and any("identity" in p for p in rep.problems)
    with pytest.raises(InvalidQuantumSolution):
        induced_correlation(bad)


def test_ghz_induced_correlation_on_support():
    Q = induced_correlation(ghz_solution())
    ref = catalog.reference_correlation("ghz_binv")
    for t in catalog.GHZ_TYPES:
        assert np.max(np.abs(Q.table[t] - ref.table[t])) <= 1e-12


def test_single_qubit_uniform():
    q = QuantumSolution(DensityMatrix(np.eye(2) / 2, (2,)), ((COMPUTATIONAL,),))
    assert np.allclose(induced_correlation(q).table, [[0.5, 0.5]])


def test_embed_shared_coin():
    dist = np.array([[0.5, 0.0], [0.0, 0.5]])
    g = [np.array([[0, 1], [0, 1]])] * 2
    q = embed_local(g, dist)
    assert np.allclose(np.diag(q.state.matrix).real, [0.5, 0, 0, 0.5])
    Q = induced_correlation(q)
    assert np.allclose(Q.table, catalog.reference_correlation("chsh_shared_coin").table, atol=1e-15)


def test_embed_point_mass():
    dist = np.zeros((2, 2))
    dist[1, 0] = 1.0
    q = embed_local([np.array([[0, 1]]), np.array([[0, 1]])], dist)
    assert np.allclose(q.state.matrix, np.diag([0, 0, 1, 0]))


def test_embed_rejects_input_dependent():
    with pytest.raises(ValueError):
        embed_local([np.array([[0, 1], [0, 1]])] * 2, catalog.reference_correlation("pr_box"))


@given(seeds, st.sampled_from([(2,), (2, 2), (2, 2, 2), (3, 2)]))
def test_quantum_correlations_are_belief_invariant(seed, dims):
    rng = np.random.default_rng(seed)
    types = tuple(int(x) for x in rng.integers(1, 3, size=len(dims)))
    q = random_quantum_solution(dims, types, rng)
    assert validate_quantum_solution(q)
    Q = induced_correlation(q)
    assert is_belief_invariant(Q, 1e-8)[0]
    rows = Q.table.reshape(types + (-1,)).sum(axis=-1)
    assert np.allclose(rows, 1, atol=1e-10)


@given(seeds)
def test_threaded_matches_serial(seed):
    q = random_quantum_solution((2, 2), (2, 2), np.random.default_rng(seed))
    assert np.array_equal(induced_correlation(q).table, induced_correlation(q, threads=3).table)


@given(seeds)
def test_embed_local_matches_canonicalize(seed):
    rng = np.random.default_rng(seed)
    S, T = (2, 3), (2, 2)
    dist = rng.dirichlet(np.ones(6)).reshape(S)
    g = [rng.integers(0, 2, size=(T[i], S[i])) for i in range(2)]
    Q = induced_correlation(embed_local(g, dist, action_sizes=(2, 2)))
    device = Correlation(dist.reshape((1, 1) + S), 2)
    sol = Solution(device, tuple(np.zeros((T[i], 1), int) for i in range(2)),
                   tuple(x[:, :, None] for x in g))
    game = BayesianGame(np.full(T, 0.25), np.zeros((2,) + T + (2, 2)))
    assert np.max(np.abs(Q.table - canonicalize(sol, game).table)) <= 1e-12
