"""Equilibria of Bayesian games under correlated, quantum, belief-invariant
and communication devices."""

from .correlation import Correlation, Solution, classify, is_belief_invariant
from .equilibrium import (verify_binv_equilibrium, verify_comm_equilibrium,
                          verify_correlated_standard, verify_nash, verify_quantum_equilibrium)
from .game import BayesianGame, SocialObjective, expected_payoffs, social_payoff
from .optimize import max_obj_binv, max_obj_comm, max_obj_correlated
from .quantum import QuantumSolution, ghz_solution, induced_correlation

__version__ = "0.1.0"
