"""Compare the six-condition equilibrium criterion for the dilemma game with the verifier.

Draws random (p, q, p00..p11) points, verifies the induced correlation
directly and reports where the six slacks and the ten-slack version
disagree with it.

Usage: python scripts/lemma_check.py [--samples 3000] [--seed 0] [--epsilon 0.1]
"""

import argparse
from dataclasses import dataclass, fields

import numpy as np

from bayescorr import catalog
from bayescorr.equilibrium import verify_comm_equilibrium


@dataclass
class Config:
    samples: int = 3000
    seed: int = 0
    epsilon: float = catalog.DEFAULT_EPS
    tol: float = 1e-9


def parse_args() -> Config:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(Config):
        ap.add_argument("--" + f.name, type=type(f.default), default=f.default)
    return Config(**vars(ap.parse_args()))


def draw(rng, eps):
    if rng.random() < 0.4:
        p, q = rng.random(2)
        d = rng.dirichlet(np.ones(4))
    else:
        p00, p11 = rng.random(2) * 0.05
        x = rng.random() * (1 - p00 - p11)
        d = [p00, x, 1 - p00 - p11 - x, p11]
        p = min(1.0, d[1] + d[3] + rng.random() * 0.1)
        q = min(1.0, d[2] + d[3] + rng.random() * 0.1)
    return catalog.LemmaParams(float(p), float(q), *(float(x) for x in d), eps=eps)


def main():
    args = parse_args()

    rng = np.random.default_rng(args.seed)
    g = catalog.pd_coordination(args.epsilon)
    six = ten = equilibria = 0
    example = None
    for _ in range(args.samples):
        P = draw(rng, args.epsilon)
        holds = verify_comm_equilibrium(g, catalog.lemma_correlation(P), args.tol).holds
        equilibria += holds
        if (min(catalog.lemma_conditions(P)) >= -args.tol) != holds:
            six += 1
            example = example or P
        ten += (min(catalog.lemma_conditions_complete(P)) >= -args.tol) != holds
    print(f"samples {args.samples}, verified equilibria {equilibria}")
    print(f"six conditions disagree with the verifier: {six}")
    print(f"ten conditions disagree with the verifier: {ten}")
    if example is not None:
        rep = verify_comm_equilibrium(g, catalog.lemma_correlation(example))
        print(f"first disagreement: {example}")
        print(f"  six slacks {np.round(catalog.lemma_conditions(example), 4).tolist()}")
        print(f"  verifier margin {rep.margin:.6g} at {rep.worst.describe()}")


if __name__ == "__main__":
    main()
