"""Correlations Q(s|r), communication solutions, and their classification.

A correlation over inputs R = R_1 x ... x R_n and outputs S = S_1 x ... x S_n
is a dense array of shape ``(*R, *S)``.  Canonical correlations use types as
inputs and actions as outputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import simplex
from .simplex import LinearProgram

NORM_TOL = 1e-9
LOCAL_TOL = 1e-8
DEFAULT_LOCAL_BUDGET = 10**6

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class InvalidCorrelation(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Correlation:
    table: np.ndarray
    n: int

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        n = int(self.n)
        if n < 1 or t.ndim != 2 * n:
            raise InvalidCorrelation(f"table of rank {t.ndim} cannot describe {n} players")
        if not np.all(np.isfinite(t)):
            raise InvalidCorrelation("non-finite correlation entries")
        if t.min() < -NORM_TOL:
            idx = tuple(int(x) for x in np.unravel_index(np.argmin(t), t.shape))
            raise InvalidCorrelation(
                f"negative entry {t[idx]:g} at r={list(idx[:n])}, s={list(idx[n:])}"
            )
        rows = t.reshape(t.shape[:n] + (-1,)).sum(axis=-1)
        bad = np.abs(rows - 1.0) > NORM_TOL
        if np.any(bad):
            r = tuple(int(x) for x in np.argwhere(bad)[0])
            raise InvalidCorrelation(f"row r={list(r)} sums to {rows[r]:.12g}, not 1")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def in_sizes(self) -> tuple[int, ...]:
        return self.table.shape[: self.n]

    @property
    def out_sizes(self) -> tuple[int, ...]:
        return self.table.shape[self.n :]

    def __call__(self, s: Sequence[int], r: Sequence[int]) -> float:
        return float(self.table[tuple(r) + tuple(s)])

    def row(self, r: Sequence[int]) -> np.ndarray:
        return self.table[tuple(r)]

    def inputs(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(k) for k in self.in_sizes))

    # constructors

    @classmethod
    def from_array(cls, arr, n: int, clean: bool = False) -> "Correlation":
        """Wrap a raw array; ``clean`` clips LP round-off and renormalizes rows."""
        a = np.array(arr, dtype=float)
        if clean:
            a = np.where(np.abs(a) < 1e-12, 0.0, a)
            a = np.clip(a, 0.0, None)
            rows = a.reshape(a.shape[:n] + (-1,)).sum(axis=-1)
            a = a / rows.reshape(rows.shape + (1,) * n)
        return cls(a, n)

    @classmethod
    def from_rule(cls, in_sizes: Sequence[int], out_sizes: Sequence[int],
                  rule: Callable[[tuple[int, ...]], dict]) -> "Correlation":
        """``rule(r)`` returns a mapping from output profiles to probabilities."""
        n = len(in_sizes)
        t = np.zeros(tuple(in_sizes) + tuple(out_sizes))
        for r in itertools.product(*(range(k) for k in in_sizes)):
            for s, p in rule(r).items():
                t[r + tuple(s)] += p
        return cls(t, n)

    @classmethod
    def deterministic(cls, in_sizes: Sequence[int], out_sizes: Sequence[int],
                      fn: Callable[[tuple[int, ...]], Sequence[int]]) -> "Correlation":
        return cls.from_rule(in_sizes, out_sizes, lambda r: {tuple(fn(r)): 1.0})

    @classmethod
    def input_independent(cls, in_sizes: Sequence[int], dist) -> "Correlation":
        d = np.asarray(dist, dtype=float)
        n = len(in_sizes)
        t = np.broadcast_to(d, tuple(in_sizes) + d.shape).copy()
        return cls(t, n)

    @classmethod
    def product(cls, kernels: Sequence[np.ndarray]) -> "Correlation":
        """Product of single-player kernels ``m_i[r_i, s_i]``."""
        n = len(kernels)
        ins = "".join(_LETTERS[k] for k in range(n))
        outs = "".join(_LETTERS[n + k] for k in range(n))
        subs = ",".join(ins[k] + outs[k] for k in range(n))
        t = np.einsum(f"{subs}->{ins}{outs}", *[np.asarray(m, float) for m in kernels])
        return cls(t, n)


def _check_same_alphabets(Q1: Correlation, Q2: Correlation) -> None:
    if Q1.n != Q2.n or Q1.table.shape != Q2.table.shape:
        raise InvalidCorrelation(
            f"alphabet mismatch: {Q1.table.shape} vs {Q2.table.shape}"
        )


def mix(Q1: Correlation, Q2: Correlation, p: float) -> Correlation:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight {p} outside [0, 1]")
    _check_same_alphabets(Q1, Q2)
    return Correlation(p * Q1.table + (1.0 - p) * Q2.table, Q1.n)


def marginal(Q: Correlation, keep: Iterable[int], r: Sequence[int]) -> np.ndarray:
    """Distribution of the outputs of players in ``keep`` (sorted) given input ``r``."""
    keep = sorted(set(keep))
    if any(not 0 <= i < Q.n for i in keep):
        raise IndexError(f"players {keep} out of range for {Q.n}")
    row = Q.row(r)
    drop = tuple(j for j in range(Q.n) if j not in keep)
    return row.sum(axis=drop) if drop else row.copy()


@dataclass(frozen=True)
class SignallingWitness:
    player: int
    r: tuple[int, ...]
    r_alt: tuple[int, ...]
    marginal_players: tuple[int, ...]
    s: tuple[int, ...]


def _swap_violation(Q: Correlation, movers: tuple[int, ...]):
    """Largest change of the marginal on the other players when ``movers`` change input."""
    n = Q.n
    stay = tuple(k for k in range(n) if k not in movers)
    m = Q.table.sum(axis=tuple(n + j for j in movers))
    # move the varying input axes to the front and flatten them
    m = np.moveaxis(m, movers, tuple(range(len(movers))))
    lead = int(np.prod([Q.in_sizes[j] for j in movers]))
    m = m.reshape((lead,) + m.shape[len(movers) :])
    spread = m.max(axis=0) - m.min(axis=0)
    worst = float(spread.max()) if spread.size else 0.0
    if worst <= 0.0:
        return 0.0, None
    pos = np.unravel_index(int(np.argmax(spread)), spread.shape)
    rest_in, s_out = pos[: len(stay)], pos[len(stay) :]
    hi = int(np.argmax(m[(slice(None),) + pos]))
    lo = int(np.argmin(m[(slice(None),) + pos]))
    mover_sizes = [Q.in_sizes[j] for j in movers]
    r_hi, r_lo = [0] * n, [0] * n
    for k, j in enumerate(stay):
        r_hi[j] = r_lo[j] = int(rest_in[k])
    for j, vh, vl in zip(movers, np.unravel_index(hi, mover_sizes),
                         np.unravel_index(lo, mover_sizes)):
        r_hi[j], r_lo[j] = int(vh), int(vl)
    wit = SignallingWitness(movers[0] if len(movers) == 1 else -1, tuple(r_hi),
                            tuple(r_lo), stay, tuple(int(x) for x in s_out))
    return worst, wit


def is_belief_invariant(Q: Correlation, tol: float = NORM_TOL, exhaustive: bool = False):
    """Return ``(holds, worst violation, witness)``.

    The default check moves one player's input at a time; ``exhaustive``
    moves every non-empty proper subset of players jointly.
    """
    n = Q.n
    if exhaustive:
        groups = [c for k in range(1, n) for c in itertools.combinations(range(n), k)]
    else:
        groups = [(j,) for j in range(n)] if n > 1 else []
    worst, witness = 0.0, None
    for movers in groups:
        v, w = _swap_violation(Q, movers)
        if v > worst:
            worst, witness = v, w
    return worst <= tol, worst, witness


def single_player_conditionals(Q: Correlation) -> list[np.ndarray]:
    """m_i[r_i, s_i] read off with the other inputs fixed at 0."""
    out = []
    for i in range(Q.n):
        r = [0] * Q.n
        m = np.zeros((Q.in_sizes[i], Q.out_sizes[i]))
        for ri in range(Q.in_sizes[i]):
            r[i] = ri
            m[ri] = marginal(Q, [i], r)
        out.append(m)
    return out


def is_product(Q: Correlation, tol: float = NORM_TOL) -> bool:
    if not is_belief_invariant(Q, tol)[0]:
        return False
    prod = Correlation.product(single_player_conditionals(Q)).table
    return bool(np.max(np.abs(prod - Q.table)) <= tol)


@dataclass
class LocalDecomposition:
    """Q(s|r) = sum_g V(g) prod_i L_i(s_i | r_i, g_i)."""

    weights: np.ndarray
    profiles: list[tuple[int, ...]]
    kernels: list[np.ndarray]

    def reconstruct(self) -> np.ndarray:
        n = len(self.kernels)
        ins = "".join(_LETTERS[k] for k in range(n))
        outs = "".join(_LETTERS[n + k] for k in range(n))
        subs = ",".join(ins[k] + outs[k] for k in range(n))
        total = 0.0
        for w, g in zip(self.weights, self.profiles):
            ks = [self.kernels[i][g[i]] for i in range(n)]
            total = total + w * np.einsum(f"{subs}->{ins}{outs}", *ks)
        return total


def _deterministic_functions(r_size: int, s_size: int) -> np.ndarray:
    """All maps R_i -> S_i as rows of an integer array."""
    return np.array(list(itertools.product(range(s_size), repeat=r_size)), dtype=int).reshape(
        -1, r_size
    )


def local_membership(Q: Correlation, budget: int = DEFAULT_LOCAL_BUDGET,
                     tol: float = LOCAL_TOL) -> LocalDecomposition | None:
    """Decompose Q over deterministic local strategy profiles, or None if not local."""
    n = Q.n
    counts = [Q.out_sizes[i] ** Q.in_sizes[i] for i in range(n)]
    total = int(np.prod(counts, dtype=object))
    if total > budget:
        raise BudgetExceeded(f"{total} deterministic profiles exceed the budget of {budget}")
    if is_product(Q, tol=1e-12):
        ks = [m[None] for m in single_player_conditionals(Q)]
        return LocalDecomposition(np.array([1.0]), [(0,) * n], ks)
    funcs = [_deterministic_functions(Q.in_sizes[i], Q.out_sizes[i]) for i in range(n)]
    profiles = list(itertools.product(*(range(c) for c in counts)))
    cells = Q.table.size
    A = np.zeros((cells + 1, len(profiles)))
    for col, g in enumerate(profiles):
        for r in Q.inputs():
            s = tuple(int(funcs[i][g[i], r[i]]) for i in range(n))
            A[np.ravel_multi_index(r + s, Q.table.shape), col] = 1.0
    A[cells] = 1.0
    b = np.concatenate([Q.table.ravel(), [1.0]])
    ok, x = simplex.feasibility(LinearProgram(np.zeros(len(profiles)), A_eq=A, b_eq=b))
    if not ok:
        return None
    if np.max(np.abs(A @ x - b)) > tol:
        return None
    keep = np.flatnonzero(x > 1e-12)
    kernels = []
    for i in range(n):
        k = np.zeros((counts[i], Q.in_sizes[i], Q.out_sizes[i]))
        for gi in range(counts[i]):
            k[gi, np.arange(Q.in_sizes[i]), funcs[i][gi]] = 1.0
        kernels.append(k)
    return LocalDecomposition(x[keep], [profiles[j] for j in keep], kernels)


@dataclass
class ClassificationReport:
    non_signalling: bool
    violation: float
    witness: SignallingWitness | None
    product: bool
    local: bool
    decomposition: LocalDecomposition | None = None
    local_checked: bool = True


def classify(Q: Correlation, tol: float = NORM_TOL, budget: int = DEFAULT_LOCAL_BUDGET,
             exhaustive: bool = False) -> ClassificationReport:
    ns, v, w = is_belief_invariant(Q, tol, exhaustive=exhaustive)
    prod = ns and is_product(Q, tol)
    dec, checked = None, True
    if ns:
        try:
            dec = local_membership(Q, budget)
        except BudgetExceeded:
            checked = False
    return ClassificationReport(ns, v, w, prod, dec is not None, dec, checked)


@dataclass(frozen=True)
class Solution:
    """A communication solution (f, g, Q) with private randomness.

    ``f[i][t_i, l]`` is the input reported for type ``t_i`` and private draw
    ``l``; ``g[i][t_i, s_i, l]`` is the action taken on advice ``s_i``.
    """

    device: Correlation
    f: tuple[np.ndarray, ...]
    g: tuple[np.ndarray, ...]
    lam: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        n = self.device.n
        f = tuple(np.asarray(x, dtype=int) for x in self.f)
        g = tuple(np.asarray(x, dtype=int) for x in self.g)
        lam = self.lam or tuple(np.ones(x.shape[1]) for x in f)
        lam = tuple(np.asarray(x, dtype=float) for x in lam)
        if not len(f) == len(g) == len(lam) == n:
            raise ValueError(f"need one f, g and randomness per player ({n})")
        for i in range(n):
            L = lam[i].shape[0]
            if abs(lam[i].sum() - 1.0) > NORM_TOL or lam[i].min() < -NORM_TOL:
                raise ValueError(f"private randomness of player {i} is not a distribution")
            if f[i].ndim != 2 or f[i].shape[1] != L:
                raise ValueError(f"f[{i}] must have shape (|T_i|, {L})")
            if g[i].shape != (f[i].shape[0], self.device.out_sizes[i], L):
                raise ValueError(
                    f"g[{i}] must have shape ({f[i].shape[0]}, {self.device.out_sizes[i]}, {L})"
                )
            if f[i].min() < 0 or f[i].max() >= self.device.in_sizes[i]:
                raise ValueError(f"f[{i}] reports an input outside R_{i}")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "lam", lam)

    @property
    def n(self) -> int:
        return self.device.n

    @property
    def type_sizes(self) -> tuple[int, ...]:
        return tuple(x.shape[0] for x in self.f)

    @classmethod
    def identity(cls, Q: Correlation) -> "Solution":
        f = [np.arange(k)[:, None] for k in Q.in_sizes]
        g = [np.tile(np.arange(m)[None, :, None], (k, 1, 1))
             for k, m in zip(Q.in_sizes, Q.out_sizes)]
        return cls(Q, tuple(f), tuple(g))


def _player_kernel(sol: Solution, i: int, n_actions: int) -> np.ndarray:
    """W[t_i, r_i, s_i, a_i] = sum_l Lambda_i(l) [f(t_i,l)=r_i] [g(t_i,s_i,l)=a_i]."""
    f, g, lam = sol.f[i], sol.g[i], sol.lam[i]
    T, L = f.shape
    R, S = sol.device.in_sizes[i], sol.device.out_sizes[i]
    if g.min() < 0 or g.max() >= n_actions:
        raise ValueError(f"g[{i}] produces an action outside A_{i}")
    W = np.zeros((T, R, S, n_actions))
    for t in range(T):
        for l in range(L):
            W[t, f[t, l], np.arange(S), g[t, :, l]] += lam[l]
    return W


def canonicalize(sol: Solution, game) -> Correlation:
    """Canonical representative Q^(a|t) of a communication solution."""
    n = sol.n
    if n != game.n or sol.type_sizes != tuple(game.type_sizes):
        raise ValueError(
            f"solution types {list(sol.type_sizes)} do not match game types {list(game.type_sizes)}"
        )
    Ws = [_player_kernel(sol, i, game.action_sizes[i]) for i in range(n)]
    t = _LETTERS[0:n]
    r = _LETTERS[n : 2 * n]
    s = _LETTERS[2 * n : 3 * n]
    a = _LETTERS[3 * n : 4 * n]
    subs = ",".join(t[k] + r[k] + s[k] + a[k] for k in range(n))
    table = np.einsum(f"{subs},{r}{s}->{t}{a}", *Ws, sol.device.table)
    return Correlation(table, n)
