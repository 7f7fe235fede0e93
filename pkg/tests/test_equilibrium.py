import numpy as np
import pytest
from hypothesis import given, strategies as st

from bayescorr import catalog
from bayescorr.correlation import Correlation, mix
from bayescorr.equilibrium import (UnsupportedActionCount, best_classical_deviation,
                                   correlated_decomposition, deviation_operators,
                                   quantum_best_response, standard_from_profiles,
                                   standard_to_canonical, verify_binv_equilibrium,
                                   verify_comm_equilibrium, verify_correlated_standard, verify_nash,
                                   verify_quantum_equilibrium)
from bayescorr.game import BayesianGame, SocialObjective, restrict_to_type
from bayescorr.optimize import max_obj_binv, max_obj_comm, max_obj_correlated, zero_sum_value
from bayescorr.quantum import embed_local, ghz_solution, random_quantum_solution

from oracles import game_and_correlation, games, naive_comm_margin, naive_standard_margin

EPS = 0.1
ref = catalog.reference_correlation
seeds = st.integers(0, 2**32 - 1)
C0 = (0, 0)
C1 = (1, 1)


def random_objective(rng, n):
    return SocialObjective.weighted(rng.normal(size=n))


# communication and belief-invariant

def test_comm_examples():
    rep = verify_comm_equilibrium(catalog.chsh(), ref("chsh_comm"))
    assert rep.holds and np.allclose(rep.payoffs, [1, 1])
    rep = verify_comm_equilibrium(catalog.ghz_conflict(EPS), ref("ghz_comm_best", EPS))
    assert rep.holds and np.allclose(rep.payoffs, (2 + EPS) / 3)
    rep = verify_comm_equilibrium(catalog.chsh(), ref("chsh_constant"))
    assert rep.holds and np.allclose(rep.payoffs, [0.75, 0.75])
    P = catalog.LemmaParams(0.5, 0.5, 0.5, 0.0, 0.0, 0.5, EPS)
    rep = verify_comm_equilibrium(catalog.pd_coordination(EPS), catalog.lemma_correlation(P))
    assert not rep.holds
    assert min(catalog.lemma_conditions(P)[:2]) < 0


def test_binv_examples():
    rep = verify_binv_equilibrium(catalog.chsh(), ref("pr_box"))
    assert rep.holds and np.allclose(rep.payoffs, [1, 1])
    rep = verify_binv_equilibrium(catalog.ghz_conflict(EPS), ref("ghz_binv", EPS))
    assert rep.holds and np.allclose(rep.payoffs, (1 + EPS) / 2)
    rep = verify_binv_equilibrium(catalog.chsh(), ref("chsh_comm"))
    assert not rep.holds and rep.margin == pytest.approx(-1.0)
    assert not verify_binv_equilibrium(catalog.ghz_conflict(EPS), ref("ghz_comm_best", EPS)).holds


def test_best_deviation_examples():
    spec, gain = best_classical_deviation(catalog.chsh(), ref("pr_box"), 0)
    assert gain == pytest.approx(0, abs=1e-15)
    assert (spec.type, spec.report, spec.relabel) == (0, 0, (0, 1))
    P = catalog.LemmaParams(1.0, 1.0, 0.0, 0.5, 0.5, 0.0, EPS)
    gains = [best_classical_deviation(catalog.pd_coordination(EPS), catalog.lemma_correlation(P), i)[1]
             for i in range(2)]
    assert max(gains) > 0


def test_ghz_sigma_one_minus_t_has_profitable_deviation():
    # a type-1 player does better playing 1: the (1,1,1) profile then wins for them.
    # Reporting type 0 is the first deviation that achieves it (the device then suggests 1).
    g, Q = catalog.ghz_conflict(EPS), ref("ghz_corr_best", EPS)
    spec, gain = best_classical_deviation(g, Q, 0)
    assert gain == pytest.approx(EPS / 3, abs=1e-12)
    assert (spec.type, spec.report, spec.relabel) == (1, 0, (0, 1))
    assert not verify_comm_equilibrium(g, Q).holds
    assert np.allclose(verify_comm_equilibrium(g, Q).payoffs, (2 + EPS) / 6)


def test_pappa_equilibria():
    g = catalog.pappa()
    const = Correlation.deterministic((2, 2), (2, 2), lambda t: C0)
    rep = verify_nash(g, const)
    assert np.allclose(rep.payoffs, [0.75, 0.375])
    # player 2 of type 1 prefers action 1 when player 1 always plays 0
    assert not rep.holds and rep.margin == pytest.approx(-1 / 16)
    rep = verify_nash(g, ref("pappa_unfair"))
    assert rep.holds and np.allclose(rep.payoffs, [11 / 16, 7 / 16])
    rep = verify_comm_equilibrium(g, ref("pappa_fair_coin"))
    assert rep.holds and np.allclose(rep.payoffs, [9 / 16, 9 / 16])
    rep = verify_binv_equilibrium(g, ref("pr_box"))
    assert rep.holds and np.allclose(rep.payoffs, [0.75, 0.75])


def test_nash_examples():
    assert verify_nash(catalog.chsh(), ref("chsh_constant")).holds
    rep = verify_nash(catalog.chsh(), ref("chsh_shared_coin"))
    assert not rep.holds and rep.details["product_gap"] > 0.1


# standard form

def test_standard_examples():
    g = catalog.chsh()
    w = standard_from_profiles(g, {(C0, C0): 0.5, (C1, C1): 0.5})
    rep = verify_correlated_standard(g, w)
    assert rep.holds and np.allclose(rep.payoffs, [0.75, 0.75])
    g = catalog.pappa()
    w = standard_from_profiles(g, {((0, 0), (0, 1)): 0.5, ((1, 0), (1, 1)): 0.5})
    rep = verify_correlated_standard(g, w)
    assert rep.holds and np.allclose(rep.payoffs, [9 / 16, 9 / 16])
    assert np.allclose(standard_to_canonical(g, w).table, ref("pappa_fair_coin").table)
    g = catalog.pd_coordination(EPS)
    w = standard_from_profiles(g, {((0, 0), (0, 1)): 0.5, ((0, 1), (0, 0)): 0.5})
    rep = verify_correlated_standard(g, w)
    assert rep.holds and rep.payoffs.sum() == pytest.approx(2 - EPS)
    assert np.allclose(standard_to_canonical(g, w).table, ref("q_star", EPS).table)


def test_standard_shape_errors():
    with pytest.raises(ValueError):
        verify_correlated_standard(catalog.chsh(), np.ones((4, 4)))
    with pytest.raises(ValueError):
        verify_correlated_standard(catalog.chsh(), np.ones((2, 2)) / 4)


def test_pappa_shared_coin_of_constant_profiles_is_not_correlated():
    # mixing the two constant profiles inherits the profitable type-1 deviation
    g = catalog.pappa()
    w = standard_from_profiles(g, {(C0, C0): 0.5, (C1, C1): 0.5})
    assert not verify_correlated_standard(g, w).holds


def test_decomposition():
    assert correlated_decomposition(catalog.chsh(), ref("chsh_shared_coin")) is not None
    assert correlated_decomposition(catalog.chsh(), ref("pr_box")) is None
    assert correlated_decomposition(catalog.pd_coordination(EPS), ref("q_star", EPS)) is not None


# quantum

def test_quantum_ghz_conflict():
    g = catalog.ghz_conflict(EPS)
    rep = verify_quantum_equilibrium(g, ghz_solution())
    assert rep.holds
    assert np.allclose(rep.payoffs, (1 + EPS) / 2)
    for i in range(3):
        assert rep.details["best"][i, 0] == pytest.approx((1 + EPS) / 6, abs=1e-12)
        assert rep.details["best"][i, 1] == pytest.approx((1 + EPS) / 3, abs=1e-12)
    assert np.allclose(rep.details["best_total"], (1 + EPS) / 2, atol=1e-12)


def test_quantum_mermin():
    rep = verify_quantum_equilibrium(catalog.ghz_mermin(EPS), ghz_solution(), threads=4)
    assert rep.holds and np.allclose(rep.payoffs, (2 + EPS) / 3)


def test_quantum_embedded_correlated_equilibrium():
    dist = np.array([[0.5, 0.0], [0.0, 0.5]])
    q = embed_local([np.array([[0, 1], [0, 1]])] * 2, dist)
    assert verify_quantum_equilibrium(catalog.chsh(), q).holds


def test_quantum_rejects_three_actions():
    g = BayesianGame(np.ones((1, 1)), np.zeros((2, 1, 1, 3, 2)))
    with pytest.raises(UnsupportedActionCount):
        verify_quantum_equilibrium(g, ghz_solution())


@given(seeds)
def test_quantum_best_response_dominates_on_path(seed):
    rng = np.random.default_rng(seed)
    q = random_quantum_solution((2, 2), (2, 2), rng)
    g = BayesianGame(rng.dirichlet(np.ones(4)).reshape(2, 2), rng.normal(size=(2, 2, 2, 2, 2)))
    for i in range(2):
        for ti in range(2):
            K = deviation_operators(g, q, i, ti)
            on = sum(np.trace(Kb @ Mb).real for Kb, Mb in zip(K, q.measurements[i][ti].elements))
            best = quantum_best_response(K)
            assert best >= on - 1e-9
            # a random projective deviation never beats the closed form
            N = random_quantum_solution((2,), (1,), rng).measurements[0][0].elements[0]
            alt = np.trace(K[0] @ N).real + np.trace(K[1] @ (np.eye(2) - N)).real
            assert alt <= best + 1e-9


# oracles and properties

@given(game_and_correlation(n_max=3))
def test_comm_margin_matches_naive(gq):
    g, Q = gq
    rep = verify_comm_equilibrium(g, Q)
    assert rep.margin == pytest.approx(naive_comm_margin(g, Q.table), abs=1e-12)
    assert rep.holds == (rep.margin >= -1e-8)


@given(games(n_max=2), seeds)
def test_standard_margin_matches_naive(g, seed):
    rng = np.random.default_rng(seed)
    shape = tuple(a ** t for a, t in zip(g.action_sizes, g.type_sizes))
    w = rng.dirichlet(np.full(int(np.prod(shape)), 0.3)).reshape(shape)
    w[w < 0.05] = 0
    w /= w.sum()
    rep = verify_correlated_standard(g, w)
    assert rep.margin == pytest.approx(naive_standard_margin(g, w), abs=1e-12)


@given(games(n_max=2), seeds, st.sampled_from([0.0, 0.25, 0.5, 1.0]))
def test_mixture_closure(g, seed, p):
    rng = np.random.default_rng(seed)
    for opt, verify in ((max_obj_comm, verify_comm_equilibrium), (max_obj_binv, verify_binv_equilibrium)):
        Q1 = opt(g, random_objective(rng, g.n)).witness
        Q2 = opt(g, random_objective(rng, g.n)).witness
        assert verify(g, Q1, 1e-7).holds and verify(g, Q2, 1e-7).holds
        assert verify(g, mix(Q1, Q2, p), 1e-7).holds


@given(games(n_max=2), seeds)
def test_complete_information_collapse(g, seed):
    rng = np.random.default_rng(seed)
    t0 = tuple(int(rng.integers(0, k)) for k in g.type_sizes)
    r = restrict_to_type(g, t0)
    Q = max_obj_comm(r, random_objective(rng, g.n)).witness
    assert verify_comm_equilibrium(r, Q, 1e-7).holds
    dist = Q.row(t0)
    # lift Q(.|t0) to constant strategy functions
    profiles = {}
    for a in np.ndindex(dist.shape):
        if dist[a] > 0:
            prof = tuple(tuple([a[i]] * g.type_sizes[i]) for i in range(g.n))
            profiles[prof] = profiles.get(prof, 0) + dist[a]
    assert verify_correlated_standard(r, standard_from_profiles(r, profiles), 1e-7).holds


@given(games(zero_sum=True, t_max=2), seeds)
def test_constant_sum_cap(g, seed):
    rng = np.random.default_rng(seed)
    z = zero_sum_value(g)
    caps = [z.v1, z.v2]
    for _ in range(2):
        Q = max_obj_comm(g, random_objective(rng, 2)).witness
        rep = verify_comm_equilibrium(g, Q, 1e-7)
        assert rep.holds
        for i in range(2):
            assert rep.payoffs[i] <= caps[i] + 1e-8


@given(games(n_max=2), seeds)
def test_class_hierarchy(g, seed):
    rng = np.random.default_rng(seed)
    res = max_obj_correlated(g, random_objective(rng, g.n))
    assert verify_correlated_standard(g, res.standard, 1e-7).holds
    Q = res.witness
    assert verify_binv_equilibrium(g, Q, 1e-7).holds
    assert verify_comm_equilibrium(g, Q, 1e-7).holds
    # a product canonical equilibrium is also correlated
    prod = Correlation.deterministic(g.type_sizes, g.action_sizes,
                                     lambda t: tuple(int(rng.integers(0, k)) for k in g.action_sizes))
    if verify_nash(g, prod).holds:
        assert correlated_decomposition(g, prod) is not None
        assert verify_binv_equilibrium(g, prod).holds
