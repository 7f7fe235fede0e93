"""Equilibrium verification for canonical, standard-form and quantum solutions.

Every verifier returns an EquilibriumReport whose margin is the smallest
slack (on-path value minus deviation value) over all deviations checked.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg, simplex
from .correlation import Correlation, is_belief_invariant, is_product, single_player_conditionals
from .game import BayesianGame, _check_alphabets, expected_payoffs
from .quantum import (InvalidQuantumSolution, QuantumSolution, induced_correlation,
                      validate_quantum_solution)
from .simplex import LinearProgram

EQ_TOL = 1e-8
TIE_TOL = 1e-12

_L = "abcdefghijklmnopqrstuvwxyz"


class UnsupportedActionCount(ValueError):
    pass


@dataclass(frozen=True)
class DeviationSpec:
    player: int
    type: int | None = None
    report: int | None = None
    relabel: tuple[int, ...] | None = None
    sigma: tuple[int, ...] | None = None
    sigma_alt: tuple[int, ...] | None = None

    def describe(self) -> str:
        if self.sigma is not None:
            return f"player {self.player}: strategy {[int(x) for x in self.sigma]} -> {[int(x) for x in self.sigma_alt]}"
        s = f"player {self.player}, type {self.type}"
        if self.report is not None:
            s += f", reports {self.report}, relabels {[int(x) for x in self.relabel]}"
        return s


@dataclass
class EquilibriumReport:
    cls: str
    holds: bool
    margin: float
    worst: DeviationSpec | None
    payoffs: np.ndarray
    details: dict = field(default_factory=dict)


def relabelings(k: int) -> list[tuple[int, ...]]:
    """All maps A_i -> A_i, in lexicographic order of their value tuples."""
    return list(itertools.product(range(k), repeat=k))


def deviation_tensor(game: BayesianGame, Q: Correlation, i: int) -> np.ndarray:
    """D[t_i, r_i, a_i, b] = sum P(t) Q(a_i a_-i | r_i t_-i) v_i(t, b a_-i)."""
    n = game.n
    t = list(_L[:n])
    a = list(_L[n : 2 * n])
    r, b = "Y", "Z"
    q_idx = t.copy()
    q_idx[i] = r
    v_idx = a.copy()
    v_idx[i] = b
    spec = f"{''.join(t)},{''.join(q_idx)}{''.join(a)},{''.join(t)}{''.join(v_idx)}->{t[i]}{r}{a[i]}{b}"
    return np.einsum(spec, game.prior, Q.table, game.payoffs[i])


def _player_deviations(game: BayesianGame, Q: Correlation, i: int):
    """Yield (slack, t_i, r_i, alpha index) over every deviation of player i."""
    D = deviation_tensor(game, Q, i)
    k = game.action_sizes[i]
    alphas = relabelings(k)
    marg = game.type_marginal(i)
    rows = np.arange(k)
    for ti in range(game.type_sizes[i]):
        if marg[ti] <= 0:
            continue
        onpath = float(np.sum(D[ti, ti, rows, rows]))
        for ri in range(game.type_sizes[i]):
            Dr = D[ti, ri]
            for ai, alpha in enumerate(alphas):
                dev = float(np.sum(Dr[rows, list(alpha)]))
                yield onpath - dev, ti, ri, ai, alpha


def best_classical_deviation(game: BayesianGame, Q: Correlation, i: int):
    """Most profitable (t_i, r_i, alpha) for player i; ties go to the first in order."""
    _check_alphabets(game, Q)
    best, spec = None, None
    for slack, ti, ri, _, alpha in _player_deviations(game, Q, i):
        gain = -slack
        if best is None or gain > best + TIE_TOL:
            best, spec = gain, DeviationSpec(i, ti, ri, tuple(alpha))
    if best is None:
        return None, 0.0
    return spec, best


def verify_comm_equilibrium(game: BayesianGame, Q: Correlation, tol: float = EQ_TOL) -> EquilibriumReport:
    _check_alphabets(game, Q)
    margin, worst = np.inf, None
    for i in range(game.n):
        spec, gain = best_classical_deviation(game, Q, i)
        if spec is not None and -gain < margin:
            margin, worst = -gain, spec
    margin = 0.0 if margin == np.inf else float(margin)
    return EquilibriumReport("comm", margin >= -tol, margin, worst, expected_payoffs(game, Q))


def verify_binv_equilibrium(game: BayesianGame, Q: Correlation, tol: float = EQ_TOL) -> EquilibriumReport:
    rep = verify_comm_equilibrium(game, Q, tol)
    ns, viol, wit = is_belief_invariant(Q, tol)
    margin = rep.margin if ns else min(rep.margin, -viol)
    rep.cls = "binv"
    rep.margin = margin
    rep.holds = rep.holds and ns
    rep.details.update(non_signalling=ns, violation=viol, witness=wit)
    return rep


def product_gap(Q: Correlation) -> float:
    """Distance from the product of single-player conditionals (signalling if not NS)."""
    ns, viol, _ = is_belief_invariant(Q, 0.0)
    if viol > 1e-12:
        return viol
    prod = Correlation.product(single_player_conditionals(Q)).table
    return float(np.max(np.abs(prod - Q.table)))


def verify_nash(game: BayesianGame, Q: Correlation, tol: float = EQ_TOL) -> EquilibriumReport:
    rep = verify_comm_equilibrium(game, Q, tol)
    prod = is_product(Q, tol)
    gap = product_gap(Q)
    rep.cls = "nash"
    rep.holds = rep.holds and prod
    if not prod:
        rep.margin = min(rep.margin, -gap)
    rep.details.update(product=prod, product_gap=gap)
    return rep


# standard form: distributions over profiles of type -> action functions


def strategy_functions(game: BayesianGame, i: int) -> np.ndarray:
    """Row k lists sigma_k(t_i) for every type; order is lexicographic."""
    return np.array(list(itertools.product(range(game.action_sizes[i]),
                                           repeat=game.type_sizes[i])), dtype=int).reshape(
        -1, game.type_sizes[i])


def _selectors(game: BayesianGame) -> list[np.ndarray]:
    out = []
    for i in range(game.n):
        F = strategy_functions(game, i)
        S = np.zeros((F.shape[0], game.type_sizes[i], game.action_sizes[i]))
        for k, sig in enumerate(F):
            S[k, np.arange(len(sig)), sig] = 1.0
        out.append(S)
    return out


def profile_count(game: BayesianGame) -> int:
    return int(np.prod([a ** t for a, t in zip(game.action_sizes, game.type_sizes)], dtype=object))


def standard_utilities(game: BayesianGame) -> np.ndarray:
    """U[i, k_1, ..., k_n] = sum_t P(t) v_i(t, sigma_k(t))."""
    n = game.n
    t, a, k = _L[:n], _L[n : 2 * n], _L[2 * n : 3 * n]
    sel = ",".join(k[j] + t[j] + a[j] for j in range(n))
    return np.einsum(f"{t},Z{t}{a},{sel}->Z{k}", game.prior, game.payoffs, *_selectors(game))


def standard_to_canonical(game: BayesianGame, w: np.ndarray) -> Correlation:
    """Q(a|t) = sum over profiles with sigma(t) = a of w(sigma)."""
    n = game.n
    t, a, k = _L[:n], _L[n : 2 * n], _L[2 * n : 3 * n]
    sel = ",".join(k[j] + t[j] + a[j] for j in range(n))
    return Correlation(np.einsum(f"{k},{sel}->{t}{a}", w, *_selectors(game)), n)


def standard_from_profiles(game: BayesianGame, weights: dict) -> np.ndarray:
    """Dense w from ``{(sigma_1, ..., sigma_n): weight}`` with sigma_i as tuples."""
    funcs = [{tuple(f): k for k, f in enumerate(strategy_functions(game, i))} for i in range(game.n)]
    w = np.zeros(tuple(len(f) for f in funcs))
    for prof, p in weights.items():
        w[tuple(funcs[i][tuple(s)] for i, s in enumerate(prof))] += p
    return w


def verify_correlated_standard(game: BayesianGame, w, tol: float = EQ_TOL) -> EquilibriumReport:
    w = np.asarray(w, dtype=float)
    U = standard_utilities(game)
    if w.shape != U.shape[1:]:
        raise ValueError(f"distribution shape {w.shape} does not match strategy profiles {U.shape[1:]}")
    if abs(w.sum() - 1.0) > 1e-9 or w.min() < -1e-9:
        raise ValueError(f"distribution over strategy profiles has mass {w.sum():.12g}")
    margin, worst = np.inf, None
    for i in range(game.n):
        Wi = np.moveaxis(w, i, 0).reshape(w.shape[i], -1)
        Ui = np.moveaxis(U[i], i, 0).reshape(w.shape[i], -1)
        # G[k, k'] = gain from playing k' whenever k is recommended
        G = Wi @ Ui.T
        G = G - np.diag(G)[:, None]
        F = strategy_functions(game, i)
        for k in range(w.shape[i]):
            if Wi[k].sum() <= 0:
                continue
            kk = int(np.argmax(G[k]))
            if -G[k, kk] < margin:
                margin = -float(G[k, kk])
                worst = DeviationSpec(i, sigma=tuple(F[k]), sigma_alt=tuple(F[kk]))
    payoffs = U.reshape(game.n, -1) @ w.ravel()
    return EquilibriumReport("correlated", margin >= -tol, float(margin), worst, payoffs)


def correlated_deviation_rows(game: BayesianGame):
    """Linear constraints G w <= 0 describing standard-form correlated equilibria.

    One row per (player, recommended function, type, replacement action): the
    gain from replacing the recommended action at that type only.  Summing
    over types recovers every alternative function.
    """
    U_shape = tuple(a ** t for a, t in zip(game.action_sizes, game.type_sizes))
    n = game.n
    t, a, k = _L[:n], _L[n : 2 * n], _L[2 * n : 3 * n]
    sels = _selectors(game)
    rows, labels = [], []
    for i in range(n):
        F = strategy_functions(game, i)
        # V_i[t, a] weighted by the prior, contracted with the others' functions
        others = ",".join(k[j] + t[j] + a[j] for j in range(n) if j != i)
        out_k = "".join(k[j] for j in range(n) if j != i)
        C = np.einsum(f"{t},{t}{a}{',' + others if others else ''}->{t[i]}{a[i]}{out_k}",
                      game.prior, game.payoffs[i], *[sels[j] for j in range(n) if j != i])
        # C[t_i, a_i, k_-i]
        for ki, sig in enumerate(F):
            for ti in range(game.type_sizes[i]):
                for b in range(game.action_sizes[i]):
                    if b == sig[ti]:
                        continue
                    gain = C[ti, b] - C[ti, sig[ti]]
                    row = np.zeros(U_shape)
                    idx = [slice(None)] * n
                    idx[i] = ki
                    row[tuple(idx)] = gain
                    rows.append(row.ravel())
                    labels.append(f"ce_p{i}_f{ki}_t{ti}_b{b}")
    if not rows:
        return np.zeros((0, int(np.prod(U_shape)))), []
    return np.array(rows), labels


def correlated_decomposition(game: BayesianGame, Q: Correlation, tol: float = 1e-8):
    """Standard-form correlated equilibrium inducing Q on every type profile, or None."""
    _check_alphabets(game, Q)
    sels = _selectors(game)
    n = game.n
    shape = tuple(s.shape[0] for s in sels)
    m = int(np.prod(shape))
    t, a, k = _L[:n], _L[n : 2 * n], _L[2 * n : 3 * n]
    sel = ",".join(k[j] + t[j] + a[j] for j in range(n))
    # induced[t, a, k] = [sigma_k(t) = a]
    induced = np.einsum(f"{sel}->{t}{a}{k}", *sels).reshape(-1, m)
    A_eq = np.vstack([induced, np.ones((1, m))])
    b_eq = np.concatenate([Q.table.ravel(), [1.0]])
    G, _ = correlated_deviation_rows(game)
    lp = LinearProgram(np.zeros(m), A_ub=G, b_ub=np.zeros(G.shape[0]), A_eq=A_eq, b_eq=b_eq)
    ok, x = simplex.feasibility(lp)
    if not ok:
        return None
    w = np.clip(x, 0.0, None).reshape(shape)
    w = w / w.sum()
    if np.max(np.abs(standard_to_canonical(game, w).table - Q.table)) > tol:
        return None
    return w


# quantum correlated equilibria


def _local_ops(q: QuantumSolution, i: int, t: tuple, a: tuple) -> list[np.ndarray]:
    ops = []
    for j in range(q.n):
        if j == i:
            ops.append(np.eye(q.state.dims[i], dtype=complex))
        else:
            ops.append(q.measurements[j][t[j]].elements[a[j]])
    return ops


def deviation_operators(game: BayesianGame, q: QuantumSolution, i: int, ti: int) -> list[np.ndarray]:
    """K_b = sum P(t) v_i(t, a_-i b) Tr_{-i}[rho (M_{a_-i} (x) I_i)] over t_-i, a_-i."""
    rho, dims = q.state.matrix, q.state.dims
    k = game.action_sizes[i]
    others_t = [range(game.type_sizes[j]) if j != i else [ti] for j in range(game.n)]
    others_a = [range(game.action_sizes[j]) if j != i else [0] for j in range(game.n)]
    mixed = [np.zeros((rho.shape[0],) * 2, dtype=complex) for _ in range(k)]
    for t in itertools.product(*others_t):
        p = game.prior[t]
        if p == 0:
            continue
        for a in itertools.product(*others_a):
            X = linalg.tensor_all(_local_ops(q, i, t, a))
            for b in range(k):
                ab = list(a)
                ab[i] = b
                v = game.payoffs[(i,) + t + tuple(ab)]
                if v != 0:
                    mixed[b] += p * v * X
    K = []
    for M in mixed:
        Kb = linalg.partial_trace(rho @ M, dims, i)
        K.append(0.5 * (Kb + Kb.conj().T))
    return K


def quantum_best_response(K: list[np.ndarray]) -> float:
    """max tr(K_0 N) + tr(K_1 (I - N)) over 0 <= N <= I."""
    if len(K) == 1:
        return float(np.trace(K[0]).real)
    return float(np.trace(K[1]).real) + linalg.positive_part_sum(K[0] - K[1])


def verify_quantum_equilibrium(game: BayesianGame, q: QuantumSolution, tol: float = EQ_TOL,
                               threads: int | None = None) -> EquilibriumReport:
    if any(k > 2 for k in game.action_sizes):
        raise UnsupportedActionCount(
            f"quantum deviations are implemented for at most 2 actions, got {list(game.action_sizes)}"
        )
    rep = validate_quantum_solution(q)
    if not rep:
        raise InvalidQuantumSolution("; ".join(rep.problems))
    if q.type_sizes != tuple(game.type_sizes) or q.action_sizes != tuple(game.action_sizes):
        raise ValueError(
            f"solution types {list(q.type_sizes)} / actions {list(q.action_sizes)} do not match the game"
        )
    cells = [(i, ti) for i in range(game.n) for ti in range(game.type_sizes[i])
             if game.type_marginal(i)[ti] > 0]

    def check(cell):
        i, ti = cell
        K = deviation_operators(game, q, i, ti)
        M = q.measurements[i][ti].elements
        onpath = float(sum(np.trace(Kb @ Mb).real for Kb, Mb in zip(K, M)))
        return cell, onpath, quantum_best_response(K)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(check, cells))
    else:
        results = [check(c) for c in cells]
    margin, worst = np.inf, None
    onpath_tab, best_tab = {}, {}
    for (i, ti), on, best in results:
        onpath_tab[i, ti], best_tab[i, ti] = on, best
        if on - best < margin:
            margin, worst = on - best, DeviationSpec(i, ti)
    payoffs = expected_payoffs(game, induced_correlation(q))
    best_total = np.array([sum(best_tab.get((i, ti), 0.0) for ti in range(game.type_sizes[i]))
                           for i in range(game.n)])
    margin = 0.0 if margin == np.inf else float(margin)
    return EquilibriumReport("quantum", margin >= -tol, margin, worst, payoffs,
                             details=dict(onpath=onpath_tab, best=best_tab, best_total=best_total))
