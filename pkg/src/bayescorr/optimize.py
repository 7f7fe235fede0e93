"""Linear programs over correlation and equilibrium polytopes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .correlation import BudgetExceeded, Correlation
from .equilibrium import (correlated_deviation_rows, profile_count, relabelings,
                          standard_to_canonical, standard_utilities, strategy_functions)
from .game import BayesianGame, SocialObjective, detect_constant_sum
from .simplex import LinearProgram, LpSolution

DEFAULT_CORR_BUDGET = 10**4
DEFAULT_LOCAL_BUDGET = 10**6


class LpFailure(RuntimeError):
    pass


class NotFullCoordination(ValueError):
    pass


class NotConstantSum(ValueError):
    pass


@dataclass
class OptimizationResult:
    value: float
    witness: Correlation | None
    cls: str
    objective: SocialObjective
    standard: np.ndarray | None = None
    lp: LinearProgram | None = None
    solution: LpSolution | None = None
    details: dict = field(default_factory=dict)

    @property
    def exact_value(self):
        """The optimum as a Fraction when the rational solver produced it."""
        if self.solution is not None and not isinstance(self.solution.value, float):
            return self.solution.value
        return None


def _solve(lp: LinearProgram, exact: bool) -> LpSolution:
    sol = simplex.solve(lp, exact=exact)
    if not sol.optimal:
        raise LpFailure(f"LP ended with status {sol.status}")
    return sol


def _cell_labels(game: BayesianGame) -> list[str]:
    return [f"q_t{''.join(map(str, t))}_a{''.join(map(str, a))}"
            for t in game.type_profiles() for a in game.action_profiles()]


def _row_sum_block(game: BayesianGame):
    nT = int(np.prod(game.type_sizes))
    nA = int(np.prod(game.action_sizes))
    A = np.kron(np.eye(nT), np.ones((1, nA)))
    labels = [f"norm_t{''.join(map(str, t))}" for t in game.type_profiles()]
    return A, np.ones(nT), labels


def incentive_rows(game: BayesianGame):
    """Rows R with R q <= 0 for every (i, t_i, r_i, alpha) deviation, q = vec Q(a|t)."""
    n = game.n
    shape = tuple(game.type_sizes) + tuple(game.action_sizes)
    Pexp = game.prior.reshape(tuple(game.type_sizes) + (1,) * n)
    rows, labels = [], []
    marg = [game.type_marginal(i) for i in range(n)]
    for i in range(n):
        v = game.payoffs[i]
        onpath = Pexp * v
        k = game.action_sizes[i]
        for ai, alpha in enumerate(relabelings(k)):
            relabeled = Pexp * np.take(v, list(alpha), axis=n + i)
            for ti in range(game.type_sizes[i]):
                if marg[i][ti] <= 0:
                    continue
                dev_slice = np.take(relabeled, ti, axis=i)
                on_slice = np.take(onpath, ti, axis=i)
                for ri in range(game.type_sizes[i]):
                    C = np.zeros(shape)
                    idx_on = [slice(None)] * (2 * n)
                    idx_on[i] = ti
                    C[tuple(idx_on)] -= on_slice
                    idx_dev = [slice(None)] * (2 * n)
                    idx_dev[i] = ri
                    C[tuple(idx_dev)] += dev_slice
                    rows.append(C.ravel())
                    labels.append(f"ic_p{i}_t{ti}_r{ri}_alpha{ai}")
    return np.array(rows), labels


def non_signalling_rows(game: BayesianGame):
    """One-coordinate non-signalling equalities on vec Q(a|t)."""
    n = game.n
    T, A = tuple(game.type_sizes), tuple(game.action_sizes)
    shape = T + A
    rows, labels = [], []
    for j in range(n):
        rest_t = [range(T[k]) if k != j else [0] for k in range(n)]
        rest_a = [range(A[k]) if k != j else [0] for k in range(n)]
        for rj in range(1, T[j]):
            for t in itertools.product(*rest_t):
                for a in itertools.product(*rest_a):
                    C = np.zeros(shape)
                    t1, t0 = list(t), list(t)
                    t1[j] = rj
                    for sj in range(A[j]):
                        aa = list(a)
                        aa[j] = sj
                        C[tuple(t1) + tuple(aa)] += 1.0
                        C[tuple(t0) + tuple(aa)] -= 1.0
                    rows.append(C.ravel())
                    labels.append(f"ns_p{j}_r{rj}_t{''.join(map(str, t))}_a{''.join(map(str, a))}")
    if not rows:
        return np.zeros((0, int(np.prod(shape)))), []
    return np.array(rows), labels


def _welfare_vector(game: BayesianGame, obj: SocialObjective) -> np.ndarray:
    w = obj.weight_vector(game.n)
    n = game.n
    Pexp = game.prior.reshape(tuple(game.type_sizes) + (1,) * n)
    return (Pexp * np.tensordot(w, game.payoffs, axes=1)).ravel()


def build_comm_lp(game: BayesianGame, obj: SocialObjective, non_signalling: bool = False) -> LinearProgram:
    R, r_labels = incentive_rows(game)
    E, e, e_labels = _row_sum_block(game)
    if non_signalling:
        N, n_labels = non_signalling_rows(game)
        E = np.vstack([E, N])
        e = np.concatenate([e, np.zeros(N.shape[0])])
        e_labels = e_labels + n_labels
    return LinearProgram(_welfare_vector(game, obj), A_ub=R, b_ub=np.zeros(R.shape[0]),
                         A_eq=E, b_eq=e, var_labels=_cell_labels(game),
                         ub_labels=r_labels, eq_labels=e_labels)


def _canonical_result(game, obj, lp, sol, cls) -> OptimizationResult:
    x = np.array([float(v) for v in sol.x])
    shape = tuple(game.type_sizes) + tuple(game.action_sizes)
    Q = Correlation.from_array(x.reshape(shape), game.n, clean=True)
    return OptimizationResult(float(sol.value), Q, cls, obj, lp=lp, solution=sol)


def max_obj_comm(game: BayesianGame, obj: SocialObjective | None = None,
                 exact: bool = False) -> OptimizationResult:
    obj = obj or SocialObjective.sw()
    lp = build_comm_lp(game, obj)
    return _canonical_result(game, obj, lp, _solve(lp, exact), "comm")


def max_obj_binv(game: BayesianGame, obj: SocialObjective | None = None,
                 exact: bool = False) -> OptimizationResult:
    obj = obj or SocialObjective.sw()
    lp = build_comm_lp(game, obj, non_signalling=True)
    return _canonical_result(game, obj, lp, _solve(lp, exact), "binv")


def build_correlated_lp(game: BayesianGame, obj: SocialObjective,
                        budget: int = DEFAULT_CORR_BUDGET) -> LinearProgram:
    count = profile_count(game)
    if count > budget:
        raise BudgetExceeded(f"{count} strategy-function profiles exceed the budget of {budget}")
    U = standard_utilities(game)
    c = np.tensordot(obj.weight_vector(game.n), U, axes=1).ravel()
    G, g_labels = correlated_deviation_rows(game)
    funcs = [strategy_functions(game, i) for i in range(game.n)]
    var_labels = ["w_" + "_".join("".join(map(str, funcs[i][k])) for i, k in enumerate(prof))
                  for prof in itertools.product(*(range(len(f)) for f in funcs))]
    return LinearProgram(c, A_ub=G, b_ub=np.zeros(G.shape[0]), A_eq=np.ones((1, c.size)),
                         b_eq=np.ones(1), var_labels=var_labels, ub_labels=g_labels,
                         eq_labels=["mass"])


def max_obj_correlated(game: BayesianGame, obj: SocialObjective | None = None,
                       budget: int = DEFAULT_CORR_BUDGET, exact: bool = False) -> OptimizationResult:
    obj = obj or SocialObjective.sw()
    lp = build_correlated_lp(game, obj, budget)
    sol = _solve(lp, exact)
    shape = tuple(a ** t for a, t in zip(game.action_sizes, game.type_sizes))
    w = np.clip(np.array([float(v) for v in sol.x]), 0.0, None).reshape(shape)
    w = w / w.sum()
    Q = standard_to_canonical(game, w)
    return OptimizationResult(float(sol.value), Q, "correlated", obj, standard=w, lp=lp, solution=sol)


def _require_full_coordination(game: BayesianGame) -> None:
    if not game.is_full_coordination():
        raise NotFullCoordination(f"game {game.name or ''} does not give every player the same payoff")


def binv_value_full_coordination(game: BayesianGame, exact: bool = False) -> OptimizationResult:
    _require_full_coordination(game)
    obj = SocialObjective.single(0)
    E, e, e_labels = _row_sum_block(game)
    N, n_labels = non_signalling_rows(game)
    lp = LinearProgram(_welfare_vector(game, obj), A_eq=np.vstack([E, N]),
                       b_eq=np.concatenate([e, np.zeros(N.shape[0])]),
                       var_labels=_cell_labels(game), eq_labels=e_labels + n_labels)
    return _canonical_result(game, obj, lp, _solve(lp, exact), "binv_value")


def local_value_full_coordination(game: BayesianGame,
                                  budget: int = DEFAULT_LOCAL_BUDGET) -> OptimizationResult:
    """Best deterministic strategy profile (the maximum over the local polytope's vertices)."""
    _require_full_coordination(game)
    count = profile_count(game)
    if count > budget:
        raise BudgetExceeded(f"{count} deterministic profiles exceed the budget of {budget}")
    U = standard_utilities(game)[0]
    k = np.unravel_index(int(np.argmax(U)), U.shape)
    w = np.zeros(U.shape)
    w[k] = 1.0
    return OptimizationResult(float(U[k]), standard_to_canonical(game, w), "local_value",
                              SocialObjective.single(0), standard=w)


@dataclass
class ZeroSumValue:
    v1: float
    v2: float
    x: np.ndarray
    y: np.ndarray
    total: float


def _maximin(U: np.ndarray, exact: bool) -> tuple[float, np.ndarray]:
    """max_x min_l sum_k x_k U[k, l] over mixed x, with the value split as v+ - v-."""
    K, L = U.shape
    # variables: x (K), v_plus, v_minus
    c = np.concatenate([np.zeros(K), [1.0, -1.0]])
    A_ub = np.hstack([-U.T, np.ones((L, 1)), -np.ones((L, 1))])
    A_eq = np.concatenate([np.ones(K), [0.0, 0.0]])[None]
    sol = _solve(LinearProgram(c, A_ub=A_ub, b_ub=np.zeros(L), A_eq=A_eq, b_eq=np.ones(1)), exact)
    x = np.array([float(v) for v in sol.x[:K]])
    return float(sol.value), x


def zero_sum_value(game: BayesianGame, exact: bool = False) -> ZeroSumValue:
    if game.n != 2:
        raise NotConstantSum(f"guaranteed values need 2 players, game has {game.n}")
    s = detect_constant_sum(game)
    if s is None:
        raise NotConstantSum("payoff sums depend on the actions")
    U = standard_utilities(game)
    v1, x = _maximin(U[0], exact)
    v2, y = _maximin(U[1].T, exact)
    return ZeroSumValue(v1, v2, x, y, float(np.sum(game.prior * s)))
