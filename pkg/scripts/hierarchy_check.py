"""Check Corr <= BInv <= Comm on random small games, plus the point-mass collapse.

Usage: python scripts/hierarchy_check.py [--games 200] [--seed 0] [--players 2]
"""

import argparse
from dataclasses import dataclass, fields

import numpy as np

from bayescorr.game import BayesianGame, SocialObjective, restrict_to_type
from bayescorr.optimize import max_obj_binv, max_obj_comm, max_obj_correlated


@dataclass
class Config:
    games: int = 200
    seed: int = 0
    players: int = 2
    tol: float = 1e-7


def parse_args() -> Config:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(Config):
        ap.add_argument("--" + f.name, type=type(f.default), default=f.default)
    return Config(**vars(ap.parse_args()))


def random_game(rng, n):
    T = tuple(int(x) for x in rng.integers(1, 3, size=n))
    A = tuple(int(x) for x in rng.integers(1, 3, size=n))
    prior = rng.dirichlet(np.ones(int(np.prod(T)))).reshape(T)
    return BayesianGame(prior, rng.integers(-3, 4, size=(n,) + T + A).astype(float))


def main():
    args = parse_args()

    rng = np.random.default_rng(args.seed)
    worst = {"corr-binv": -np.inf, "binv-comm": -np.inf, "collapse": 0.0}
    strict = {"corr<binv": 0, "binv<comm": 0}
    for _ in range(args.games):
        g = random_game(rng, args.players)
        obj = SocialObjective.weighted(rng.normal(size=g.n))
        c, b, m = (f(g, obj).value for f in (max_obj_correlated, max_obj_binv, max_obj_comm))
        worst["corr-binv"] = max(worst["corr-binv"], c - b)
        worst["binv-comm"] = max(worst["binv-comm"], b - m)
        strict["corr<binv"] += b - c > args.tol
        strict["binv<comm"] += m - b > args.tol
        t0 = tuple(int(rng.integers(0, k)) for k in g.type_sizes)
        r = restrict_to_type(g, t0)
        worst["collapse"] = max(worst["collapse"], abs(max_obj_comm(r, obj).value - max_obj_correlated(r, obj).value))
    print(f"games {args.games}, players {args.players}, seed {args.seed}")
    print(f"largest corr - binv  {worst['corr-binv']:.3g}   (strict gaps {strict['corr<binv']})")
    print(f"largest binv - comm  {worst['binv-comm']:.3g}   (strict gaps {strict['binv<comm']})")
    print(f"largest point-mass |comm - corr|  {worst['collapse']:.3g}")
    ok = worst["corr-binv"] <= args.tol and worst["binv-comm"] <= args.tol and worst["collapse"] <= args.tol
    print("hierarchy holds" if ok else "HIERARCHY VIOLATED")
    raise SystemExit(0 if ok else 2)


if __name__ == "__main__":
    main()
