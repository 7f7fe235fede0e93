"""Named games, named correlations, and analysis helpers for specific games."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .correlation import Correlation
from .game import BayesianGame

DEFAULT_EPS = 0.1

GHZ_TYPES = ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1))


def _check_eps(eps: float, lo: float, hi: float, lo_open: bool, hi_open: bool) -> float:
    eps = float(eps)
    bad = (eps < lo or (lo_open and eps == lo)) or (eps > hi or (hi_open and eps == hi))
    if bad or not np.isfinite(eps):
        lb = "(" if lo_open else "["
        rb = ")" if hi_open else "]"
        raise ValueError(f"epsilon={eps} outside {lb}{lo}, {hi}{rb}")
    return eps


def _two_player(table: Callable[[int, int, int, int], tuple[float, float]],
                name: str, actions=("0", "1")) -> BayesianGame:
    pay = np.zeros((2, 2, 2, 2, 2))
    for t1, t2, a1, a2 in itertools.product(range(2), repeat=4):
        pay[:, t1, t2, a1, a2] = table(t1, t2, a1, a2)
    return BayesianGame(np.full((2, 2), 0.25), pay, action_labels=(actions, actions), name=name)


def chsh() -> BayesianGame:
    def v(t1, t2, a1, a2):
        win = float((a1 ^ a2) == (t1 & t2))
        return win, win

    return _two_player(v, "chsh")


def pappa() -> BayesianGame:
    def v(t1, t2, a1, a2):
        if t1 & t2:
            return (0.75, 0.75) if a1 != a2 else (0.0, 0.0)
        if a1 == a2 == 0:
            return 1.0, 0.5
        if a1 == a2 == 1:
            return 0.5, 1.0
        return 0.0, 0.0

    return _two_player(v, "pappa")


def pd_coordination(eps: float = DEFAULT_EPS) -> BayesianGame:
    eps = _check_eps(eps, 0.0, 1.0, True, True)
    pd = {(0, 0): (1 - eps, 1 - eps), (0, 1): (2.0, 0.0), (1, 0): (0.0, 2.0),
          (1, 1): (2 - eps, 2 - eps)}

    def v(t1, t2, a1, a2):
        if t1 & t2:
            return (1.0, 1.0) if a1 != a2 else (0.0, 0.0)
        return pd[a1, a2]

    return _two_player(v, "pd_coordination")


def _ghz_payoffs(eps: float, all_equal: float | None) -> np.ndarray:
    """Lose unless tau = a1^a2^a3; winners playing tau get eps, others 1.

    With ``all_equal`` set, the winning profile where every action equals
    tau pays that value to everyone instead.
    """
    pay = np.zeros((3,) + (2,) * 6)
    for t in itertools.product(range(2), repeat=3):
        tau = t[0] & t[1] & t[2]
        for a in itertools.product(range(2), repeat=3):
            if a[0] ^ a[1] ^ a[2] != tau:
                continue
            if all_equal is not None and all(x == tau for x in a):
                pay[(slice(None),) + t + a] = all_equal
            else:
                pay[(slice(None),) + t + a] = [eps if x == tau else 1.0 for x in a]
    return pay


def ghz_conflict(eps: float = DEFAULT_EPS) -> BayesianGame:
    eps = _check_eps(eps, 0.0, 1.0, True, False)
    prior = np.zeros((2, 2, 2))
    for t in GHZ_TYPES[:3]:
        prior[t] = 1 / 6
    prior[1, 1, 1] = 0.5
    return BayesianGame(prior, _ghz_payoffs(eps, None), name="ghz_conflict")


def ghz_mermin(eps: float = DEFAULT_EPS) -> BayesianGame:
    eps = _check_eps(eps, 0.0, 1.0, False, False)
    prior = np.zeros((2, 2, 2))
    for t in GHZ_TYPES:
        prior[t] = 0.25
    return BayesianGame(prior, _ghz_payoffs(eps, (2 + eps) / 3), name="ghz_mermin")


def _ghz_full_coordination(win_value: float, name: str) -> BayesianGame:
    prior = np.zeros((2, 2, 2))
    for t in GHZ_TYPES:
        prior[t] = 0.25
    pay = np.zeros((3,) + (2,) * 6)
    for t in itertools.product(range(2), repeat=3):
        tau = t[0] & t[1] & t[2]
        for a in itertools.product(range(2), repeat=3):
            if a[0] ^ a[1] ^ a[2] == tau:
                pay[(slice(None),) + t + a] = win_value
    return BayesianGame(prior, pay, name=name)


def ghz_predicate() -> BayesianGame:
    """Common-interest GHZ game: everyone gets 1 iff tau = a1^a2^a3."""
    return _ghz_full_coordination(1.0, "ghz_predicate")


def mermin_objective() -> BayesianGame:
    """Common payoff 4*win, so the expected payoff equals the Mermin quantity P."""
    return _ghz_full_coordination(4.0, "mermin_objective")


# routing games

UP, DOWN = 0, 1

EDGE_COSTS: dict[str, Callable[[int], float]] = {
    "x": lambda x: float(x),
    "1": lambda x: 1.0,
    "1/x": lambda x: 1.0 / x,
}


@dataclass(frozen=True)
class RoutingNetwork:
    """Edges with load-dependent costs, and the route each (player, type, action) takes."""

    edges: dict[str, Callable[[int], float]]
    routes: dict[tuple[int, int, int], tuple[str, ...]]

    def costs(self, t: tuple[int, int], a: tuple[int, int]) -> tuple[float, float]:
        paths = [self.routes[i, t[i], a[i]] for i in range(2)]
        load: dict[str, int] = {}
        for p in paths:
            for e in p:
                load[e] = load.get(e, 0) + 1
        return tuple(sum(self.edges[e](load[e]) for e in p) for p in paths)


def _source_edges():
    # type 0 starts at s0 (constant edges), type 1 at s1 (linear edges)
    return {"s0-u": EDGE_COSTS["1"], "s0-d": EDGE_COSTS["1"],
            "s1-u": EDGE_COSTS["x"], "s1-d": EDGE_COSTS["x"]}


def chsh_network() -> RoutingNetwork:
    edges = _source_edges() | {"u-t": EDGE_COSTS["1/x"], "d-t": EDGE_COSTS["1/x"]}
    routes = {}
    for i, t in itertools.product(range(2), range(2)):
        routes[i, t, UP] = (f"s{t}-u", "u-t")
        routes[i, t, DOWN] = (f"s{t}-d", "d-t")
    return RoutingNetwork(edges, routes)


def chsh_conflict_network(eps_edge: float = DEFAULT_EPS) -> RoutingNetwork:
    """Player 1 heads to t', player 2 to t''; a constant bridge t'-t'' joins them."""
    edges = _source_edges() | {"u-t'": EDGE_COSTS["1/x"], "d-t''": EDGE_COSTS["1/x"],
                               "t'-t''": lambda x: eps_edge}
    routes = {}
    for t in range(2):
        routes[0, t, UP] = (f"s{t}-u", "u-t'")
        routes[0, t, DOWN] = (f"s{t}-d", "d-t''", "t'-t''")
        routes[1, t, UP] = (f"s{t}-u", "u-t'", "t'-t''")
        routes[1, t, DOWN] = (f"s{t}-d", "d-t''")
    return RoutingNetwork(edges, routes)


def congestion_from_network(net: RoutingNetwork, name: str) -> BayesianGame:
    return _two_player(lambda t1, t2, a1, a2: tuple(-c for c in net.costs((t1, t2), (a1, a2))),
                       name, actions=("UP", "DOWN"))


# printed cost table of the CHSH routing game; the graph above disagrees in
# the two off-diagonal cells of the t1=t2=1 block (it yields 2 there)
CONGESTION_COST_TABLE = {
    0: ((1.5, 2.0), (2.0, 1.5)),
    1: ((2.5, 1.5), (1.5, 2.5)),
}


def congestion_chsh() -> BayesianGame:
    def v(t1, t2, a1, a2):
        c = CONGESTION_COST_TABLE[t1 & t2][a1][a2]
        return -c, -c

    return _two_player(v, "congestion_chsh", actions=("UP", "DOWN"))


def congestion_chsh_graph() -> BayesianGame:
    return congestion_from_network(chsh_network(), "congestion_chsh_graph")


def congestion_chsh_conflict(eps_edge: float = DEFAULT_EPS) -> BayesianGame:
    if not eps_edge >= 0 or not np.isfinite(eps_edge):
        raise ValueError(f"bridge cost {eps_edge} must be a finite non-negative number")
    return congestion_from_network(chsh_conflict_network(eps_edge), "congestion_chsh_conflict")


GAMES: dict[str, Callable[..., BayesianGame]] = {
    "chsh": chsh,
    "pappa": pappa,
    "ghz_conflict": ghz_conflict,
    "ghz_mermin": ghz_mermin,
    "pd_coordination": pd_coordination,
    "congestion_chsh": congestion_chsh,
    "congestion_chsh_graph": congestion_chsh_graph,
    "congestion_chsh_conflict": congestion_chsh_conflict,
    "ghz_predicate": ghz_predicate,
    "mermin_objective": mermin_objective,
}
EPS_GAMES = {"ghz_conflict", "ghz_mermin", "pd_coordination", "congestion_chsh_conflict"}


def game(name: str, eps: float = DEFAULT_EPS) -> BayesianGame:
    if name not in GAMES:
        raise KeyError(f"unknown game {name!r}; known: {', '.join(GAMES)}")
    return GAMES[name](eps) if name in EPS_GAMES else GAMES[name]()


# named correlations


@dataclass(frozen=True)
class LemmaParams:
    p: float
    q: float
    p00: float
    p01: float
    p10: float
    p11: float
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        for k in ("p", "q", "p00", "p01", "p10", "p11"):
            v = getattr(self, k)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{k}={v} is not a probability")
        s = self.p00 + self.p01 + self.p10 + self.p11
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"p00+p01+p10+p11 = {s}, expected 1")
        _check_eps(self.eps, 0.0, 1.0, True, True)


Q_STAR = dict(p=0.5, q=0.5, p00=0.0, p01=0.5, p10=0.5, p11=0.0)
Q_PRIME = dict(p=0.0, q=0.0, p00=0.0, p01=0.5, p10=0.5, p11=0.0)


def lemma_correlation(params: LemmaParams) -> Correlation:
    """Canonical correlation of the coordination/dilemma game in (p, q, p_ab) form."""
    t = np.zeros((2, 2, 2, 2))
    t[0, 0, 0, 0] = 1.0
    t[0, 1, 0, 0], t[0, 1, 0, 1] = 1 - params.p, params.p
    t[1, 0, 0, 0], t[1, 0, 1, 0] = 1 - params.q, params.q
    t[1, 1] = [[params.p00, params.p01], [params.p10, params.p11]]
    return Correlation(t, 2)


def lemma_conditions(params: LemmaParams) -> tuple[float, ...]:
    """Six slacks; all non-negative is the claimed equilibrium criterion."""
    p, q, e = params.p, params.q, params.eps
    p00, p01, p10, p11 = params.p00, params.p01, params.p10, params.p11
    anti = (p01 + p10) - (p00 + p11)
    return (
        p10 - p11 - (1 - e) * q,
        p01 - p11 - (1 - e) * p,
        (1 - e) * (1 - q) - (p00 - p01),
        (1 - e) * (1 - p) - (p00 - p10),
        anti - (1 - e) * (2 * q - 1),
        anti - (1 - e) * (2 * p - 1),
    )


def lemma_conditions_complete(params: LemmaParams) -> tuple[float, ...]:
    """The six slacks plus the four misreport checks they leave out.

    A type-0 player who claims type 1 moves the other player's advice from
    (p or q) to the (1, 1) row; a type-1 player who claims type 0 and then
    plays 0 collects the coordination payoff on the other's type-0 branch.
    """
    p, q, e = params.p, params.q, params.eps
    anti = params.p01 + params.p10
    return lemma_conditions(params) + (
        p - params.p01 - params.p11,
        q - params.p10 - params.p11,
        anti - (1 - e) * q - p,
        anti - (1 - e) * p - q,
    )


def _by_tau(sizes, on_zero: dict, on_one: dict) -> Correlation:
    # rows for every input, including zero-prior ones, follow tau = product of inputs
    return Correlation.from_rule(sizes, (2,) * len(sizes),
                                 lambda r: on_one if all(r) else on_zero)


def _uniform(profiles) -> dict:
    return {tuple(s): 1.0 / len(profiles) for s in profiles}


EVEN3 = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))
ODD3 = ((0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1))


def _pr_box() -> Correlation:
    return _by_tau((2, 2), _uniform([(0, 0), (1, 1)]), _uniform([(0, 1), (1, 0)]))


def _pappa_pure(favour: int) -> Correlation:
    # the favoured player always plays its preferred action; the other follows its type
    if favour == 0:
        return Correlation.deterministic((2, 2), (2, 2), lambda t: (0, t[1]))
    return Correlation.deterministic((2, 2), (2, 2), lambda t: (1 - t[0], 1))


CORRELATIONS: dict[str, Callable[[float], Correlation]] = {
    "pr_box": lambda eps: _pr_box(),
    "chsh_comm": lambda eps: _by_tau((2, 2), {(0, 0): 1.0}, {(0, 1): 1.0}),
    "chsh_shared_coin": lambda eps: Correlation.input_independent((2, 2), [[0.5, 0], [0, 0.5]]),
    "chsh_constant": lambda eps: Correlation.deterministic((2, 2), (2, 2), lambda t: (0, 0)),
    "ghz_binv": lambda eps: _by_tau((2, 2, 2), _uniform(EVEN3), _uniform(ODD3)),
    "ghz_corr_best": lambda eps: Correlation.deterministic(
        (2, 2, 2), (2, 2, 2), lambda t: tuple(1 - x for x in t)),
    "ghz_comm_best": lambda eps: _by_tau((2, 2, 2), _uniform(EVEN3[1:]), _uniform(ODD3[:3])),
    "q_star": lambda eps: lemma_correlation(LemmaParams(**Q_STAR, eps=eps)),
    "q_prime": lambda eps: lemma_correlation(LemmaParams(**Q_PRIME, eps=eps)),
    "pappa_unfair": lambda eps: _pappa_pure(0),
    "pappa_unfair_mirror": lambda eps: _pappa_pure(1),
    "pappa_fair_coin": lambda eps: Correlation(
        0.5 * _pappa_pure(0).table + 0.5 * _pappa_pure(1).table, 2),
}


def reference_correlation(name: str, eps: float = DEFAULT_EPS) -> Correlation:
    if name not in CORRELATIONS:
        raise KeyError(f"unknown correlation {name!r}; known: {', '.join(CORRELATIONS)}")
    return CORRELATIONS[name](eps)


@dataclass(frozen=True)
class MerminQuantities:
    P: float
    M: float


def mermin_quantities(Q: Correlation) -> MerminQuantities:
    """P sums the winning-parity mass over the four GHZ type triples; M = 4 - 2P."""
    if Q.n != 3 or Q.table.shape != (2,) * 6:
        raise ValueError(f"need a 3-player binary correlation, got shape {Q.table.shape}")
    P = 0.0
    for t in GHZ_TYPES:
        tau = t[0] & t[1] & t[2]
        wins = ODD3 if tau else EVEN3
        P += sum(Q.table[t + s] for s in wins)
    return MerminQuantities(float(P), float(4 - 2 * P))
