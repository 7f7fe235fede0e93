"""Finite Bayesian games: payoff evaluation under canonical correlations.

A game stores its prior as a dense array over type profiles and its payoffs
as one array of shape ``(n, *type_sizes, *action_sizes)``.  Alphabets are
index based; labels exist for display only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .correlation import Correlation

PROB_TOL = 1e-9


class AlphabetMismatch(ValueError):
    """A correlation's alphabets do not match the game's (T, A)."""


@dataclass(frozen=True)
class BayesianGame:
    prior: np.ndarray
    payoffs: np.ndarray
    type_labels: tuple[tuple[str, ...], ...] = ()
    action_labels: tuple[tuple[str, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        prior = np.array(self.prior, dtype=float)
        payoffs = np.array(self.payoffs, dtype=float)
        n = prior.ndim
        if n < 1:
            raise ValueError("a game needs at least one player")
        if payoffs.ndim != 1 + 2 * n or payoffs.shape[0] != n:
            raise ValueError(
                f"payoffs must have shape (n, *T, *A) with n={n}; got {payoffs.shape}"
            )
        if payoffs.shape[1 : 1 + n] != prior.shape:
            raise ValueError("payoff type axes do not match the prior")
        prior.setflags(write=False)
        payoffs.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "payoffs", payoffs)
        tl = self.type_labels or tuple(tuple(str(k) for k in range(m)) for m in prior.shape)
        al = self.action_labels or tuple(
            tuple(str(k) for k in range(m)) for m in payoffs.shape[1 + n :]
        )
        object.__setattr__(self, "type_labels", tuple(tuple(x) for x in tl))
        object.__setattr__(self, "action_labels", tuple(tuple(x) for x in al))

    @property
    def n(self) -> int:
        return self.prior.ndim

    @property
    def type_sizes(self) -> tuple[int, ...]:
        return self.prior.shape

    @property
    def action_sizes(self) -> tuple[int, ...]:
        return self.payoffs.shape[1 + self.n :]

    def type_profiles(self):
        return itertools.product(*(range(k) for k in self.type_sizes))

    def action_profiles(self):
        return itertools.product(*(range(k) for k in self.action_sizes))

    def type_marginal(self, i: int) -> np.ndarray:
        axes = tuple(j for j in range(self.n) if j != i)
        return self.prior.sum(axis=axes)

    def is_full_coordination(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.payoffs - self.payoffs[0]) <= tol))


@dataclass
class ValidationReport:
    valid: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class SocialObjective:
    """What to maximize: ``sw``, a single player's payoff, or a weighted sum."""

    kind: str = "sw"
    player: int | None = None
    weights: tuple[float, ...] | None = None

    @classmethod
    def sw(cls) -> "SocialObjective":
        return cls("sw")

    @classmethod
    def single(cls, i: int) -> "SocialObjective":
        return cls("single", player=i)

    @classmethod
    def weighted(cls, w: Sequence[float]) -> "SocialObjective":
        w = tuple(float(x) for x in w)
        if not all(np.isfinite(w)):
            raise ValueError("objective weights must be finite")
        return cls("weighted", weights=w)

    def weight_vector(self, n: int) -> np.ndarray:
        if self.kind == "sw":
            return np.ones(n)
        if self.kind == "single":
            if self.player is None or not 0 <= self.player < n:
                raise ValueError(f"player {self.player} out of range for {n} players")
            w = np.zeros(n)
            w[self.player] = 1.0
            return w
        if self.kind == "weighted":
            if self.weights is None or len(self.weights) != n:
                raise ValueError(f"need {n} weights, got {self.weights}")
            return np.asarray(self.weights, dtype=float)
        raise ValueError(f"unknown objective kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "single":
            return f"player{self.player}"
        if self.kind == "weighted":
            return "weighted(" + ",".join(f"{w:g}" for w in self.weights) + ")"
        return "sw"


def validate_game(game: BayesianGame) -> ValidationReport:
    problems = []
    prior, pay = game.prior, game.payoffs
    if any(k < 1 for k in game.type_sizes) or any(k < 1 for k in game.action_sizes):
        problems.append("empty type or action alphabet")
    if np.any(np.isnan(prior)):
        problems.append("prior has missing entries")
    neg = prior < 0
    if np.any(neg):
        t = tuple(int(x) for x in np.argwhere(neg)[0])
        problems.append(f"negative prior probability {prior[t]:g} at t={list(t)}")
    mass = float(np.nansum(prior))
    if abs(mass - 1.0) > PROB_TOL:
        problems.append(f"prior mass {mass:g} (expected 1)")
    missing = np.isnan(pay)
    if np.any(missing):
        idx = np.argwhere(missing)[0]
        i, rest = int(idx[0]), [int(x) for x in idx[1:]]
        problems.append(
            f"{int(missing.sum())} missing payoff entries, first: player {i}, "
            f"t={rest[: game.n]}, a={rest[game.n :]}"
        )
    elif not np.all(np.isfinite(pay)):
        problems.append("non-finite payoff entries")
    return ValidationReport(not problems, problems)


def _check_alphabets(game: BayesianGame, Q: "Correlation") -> None:
    if tuple(Q.in_sizes) != tuple(game.type_sizes) or tuple(Q.out_sizes) != tuple(
        game.action_sizes
    ):
        raise AlphabetMismatch(
            f"correlation alphabets inputs={list(Q.in_sizes)} outputs={list(Q.out_sizes)} "
            f"do not match game types={list(game.type_sizes)} actions={list(game.action_sizes)}"
        )


def _joint(game: BayesianGame, Q: "Correlation") -> np.ndarray:
    _check_alphabets(game, Q)
    n = game.n
    return game.prior.reshape(game.type_sizes + (1,) * n) * Q.table


def expected_payoffs(game: BayesianGame, Q: "Correlation") -> np.ndarray:
    """Expected payoff of every player when ``Q(a|t)`` recommends actions."""
    joint = _joint(game, Q)
    return game.payoffs.reshape(game.n, -1) @ joint.ravel()


def social_payoff(game: BayesianGame, Q: "Correlation",
                  obj: SocialObjective | None = None) -> float:
    obj = obj or SocialObjective.sw()
    return float(obj.weight_vector(game.n) @ expected_payoffs(game, Q))


def conditional_payoff(game: BayesianGame, Q: "Correlation", i: int, t_i: int,
                       normalized: bool = False) -> float:
    """Player ``i``'s payoff restricted to type ``t_i``.

    By default the value keeps the prior weight ``P(t)`` (it sums to the
    unconditional payoff over ``t_i``).  ``normalized=True`` divides by the
    marginal ``P(t_i)``.
    """
    if not 0 <= t_i < game.type_sizes[i]:
        raise IndexError(f"type {t_i} out of range for player {i}")
    p_ti = game.type_marginal(i)[t_i]
    if p_ti <= 0:
        raise ValueError(f"type {t_i} of player {i} has zero probability")
    joint = _joint(game, Q)
    sel = np.take(joint, t_i, axis=i)
    vi = np.take(game.payoffs[i], t_i, axis=i)
    val = float(np.sum(sel * vi))
    return val / p_ti if normalized else val


def restrict_to_type(game: BayesianGame, t0: Sequence[int]) -> BayesianGame:
    """Same payoffs, point-mass prior on the type profile ``t0``."""
    t0 = tuple(int(x) for x in t0)
    if len(t0) != game.n or any(not 0 <= x < k for x, k in zip(t0, game.type_sizes)):
        raise IndexError(f"type profile {list(t0)} out of range {list(game.type_sizes)}")
    prior = np.zeros(game.type_sizes)
    prior[t0] = 1.0
    return BayesianGame(prior, game.payoffs, game.type_labels, game.action_labels,
                        name=f"{game.name}|t={list(t0)}" if game.name else "")


def detect_constant_sum(game: BayesianGame, tol: float = 1e-9) -> np.ndarray | None:
    """Return ``s(t)`` if ``v_1 + v_2`` depends only on the types, else None."""
    if game.n != 2:
        raise ValueError(f"constant-sum detection needs 2 players, game has {game.n}")
    total = game.payoffs[0] + game.payoffs[1]
    flat = total.reshape(game.type_sizes + (-1,))
    s = flat[..., 0]
    if np.all(np.abs(flat - s[..., None]) <= tol):
        return s.copy()
    return None
