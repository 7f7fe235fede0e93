"""Recompute the headline numbers for every catalog game and reference solution.

Usage: python scripts/reproduce_values.py [--epsilon 0.1] [--exact]

The rational (--exact) solves take a few minutes on the three-player games.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from bayescorr import catalog
from bayescorr.equilibrium import verify_binv_equilibrium, verify_comm_equilibrium, verify_quantum_equilibrium
from bayescorr.game import SocialObjective, expected_payoffs
from bayescorr.optimize import (binv_value_full_coordination, local_value_full_coordination,
                                max_obj_binv, max_obj_comm, max_obj_correlated)
from bayescorr.quantum import ghz_solution

REFERENCE = [
    ("chsh", "pr_box"), ("chsh", "chsh_comm"), ("chsh", "chsh_shared_coin"),
    ("pappa", "chsh_constant"), ("pappa", "pappa_unfair"), ("pappa", "pappa_fair_coin"), ("pappa", "pr_box"),
    ("ghz_conflict", "ghz_corr_best"), ("ghz_conflict", "ghz_binv"), ("ghz_conflict", "ghz_comm_best"),
    ("ghz_mermin", "ghz_binv"),
    ("pd_coordination", "q_star"), ("pd_coordination", "q_prime"),
    ("congestion_chsh", "chsh_constant"), ("congestion_chsh", "pr_box"),
]


@dataclass
class Config:
    epsilon: float = catalog.DEFAULT_EPS
    exact: bool = False


def parse_args() -> Config:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilon", type=float, default=Config.epsilon)
    ap.add_argument("--exact", action="store_true", help="solve the LPs in rational arithmetic")
    return Config(**vars(ap.parse_args()))


def show(value, exact):
    text = f"{value:.6g}"
    return text + (f" (= {exact})" if exact is not None else "")


def optima(eps, exact):
    print("LP optima (social welfare)")
    for name in catalog.GAMES:
        g = catalog.game(name, eps)
        row = []
        for label, opt in (("corr", max_obj_correlated), ("binv", max_obj_binv), ("comm", max_obj_comm)):
            res = opt(g, SocialObjective.sw(), exact=exact)
            row.append(f"{label} {show(res.value, res.exact_value)}")
        if g.is_full_coordination():
            row.append(f"local value {local_value_full_coordination(g).value:.6g}")
            row.append(f"binv value {binv_value_full_coordination(g).value:.6g}")
        print(f"  {name:26s} " + ", ".join(row))


def references(eps):
    print("reference solutions")
    for gname, qname in REFERENCE:
        g = catalog.game(gname, eps)
        Q = catalog.reference_correlation(qname, eps)
        comm = verify_comm_equilibrium(g, Q)
        binv = verify_binv_equilibrium(g, Q)
        pay = np.round(expected_payoffs(g, Q), 6).tolist()
        print(f"  {gname:18s} {qname:18s} payoffs {pay}  comm {comm.holds} ({comm.margin:+.4g})"
              f"  binv {binv.holds}")
    rep = verify_quantum_equilibrium(catalog.ghz_conflict(eps), ghz_solution())
    print(f"  ghz_conflict       ghz_solution       payoffs {np.round(rep.payoffs, 6).tolist()}"
          f"  quantum {rep.holds} (best deviation {np.round(rep.details['best_total'], 6).tolist()})")


def main():
    args = parse_args()
    optima(args.epsilon, args.exact)
    references(args.epsilon)


if __name__ == "__main__":
    main()
