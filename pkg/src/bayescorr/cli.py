"""Command-line front end.

Exit status: 0 on success, 2 when a validation or verification fails, 1 on
usage and input errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from . import catalog, serialize
from .correlation import BudgetExceeded, classify
from .equilibrium import (UnsupportedActionCount, correlated_decomposition, verify_binv_equilibrium,
                          verify_comm_equilibrium, verify_correlated_standard, verify_nash,
                          verify_quantum_equilibrium)
from .game import AlphabetMismatch, SocialObjective, expected_payoffs, social_payoff, validate_game
from .optimize import (binv_value_full_coordination, build_comm_lp, build_correlated_lp,
                       local_value_full_coordination, max_obj_binv, max_obj_comm,
                       max_obj_correlated, zero_sum_value)
from .quantum import induced_correlation, validate_quantum_solution
from .serialize import SchemaError
from .simplex import to_lp_format

OK, FAILED, USAGE = 0, 2, 1

log = logging.getLogger("bayescorr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def fmt(x, exact=None) -> str:
    s = f"{float(x):.6g}"
    if isinstance(exact, Fraction) and exact.denominator != 1:
        s += f" (= {exact})"
    return s


def _vec(xs) -> str:
    return "(" + ", ".join(fmt(x) for x in xs) + ")"


def _objective(text: str) -> SocialObjective:
    if text == "sw":
        return SocialObjective.sw()
    if text.startswith("player:"):
        return SocialObjective.single(int(text.split(":", 1)[1]))
    if text.startswith("weights:"):
        return SocialObjective.weighted([float(w) for w in text.split(":", 1)[1].split(",")])
    raise UsageError(f"--objective: expected sw, player:<i> or weights:<w1,w2,...>, got {text!r}")


def _emit(args, doc: dict, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(serialize.dumps(doc))
    else:
        print("\n".join(lines))


# subcommands


def cmd_validate(args) -> int:
    problems = []
    if args.game:
        problems += validate_game(serialize.load_game(args.game)).problems
    if args.correlation:
        serialize.load_correlation(args.correlation)
    if args.solution:
        problems += validate_quantum_solution(serialize.load_quantum(args.solution)).problems
    if not (args.game or args.correlation or args.solution):
        raise UsageError("validate: give at least one of --game, --correlation, --solution")
    _emit(args, {"valid": not problems, "problems": problems},
          ["valid" if not problems else "invalid"] + [f"  {p}" for p in problems])
    return OK if not problems else FAILED


def cmd_payoff(args) -> int:
    game = serialize.load_game(args.game)
    Q = serialize.load_correlation(args.correlation)
    obj = _objective(args.objective)
    u = expected_payoffs(game, Q)
    val = social_payoff(game, Q, obj)
    _emit(args, {"payoffs": [float(x) for x in u], "objective": str(obj), "value": float(val)},
          [f"payoffs   {_vec(u)}", f"{str(obj):9s} {fmt(val)}"])
    return OK


def cmd_classify(args) -> int:
    Q = serialize.load_correlation(args.correlation)
    rep = classify(Q, tol=args.tol, budget=args.budget, exhaustive=args.exhaustive)
    doc = {
        "non_signalling": rep.non_signalling,
        "violation": float(rep.violation),
        "product": rep.product,
        "local": rep.local if rep.local_checked else None,
    }
    lines = [f"non-signalling  {'yes' if rep.non_signalling else 'no'} (worst violation {fmt(rep.violation)})",
             f"product         {'yes' if rep.product else 'no'}",
             f"local           {('yes' if rep.local else 'no') if rep.local_checked else 'not checked (budget)'}"]
    if rep.witness is not None and not rep.non_signalling:
        lines.append(f"witness         {rep.witness}")
    _emit(args, doc, lines)
    return OK


def cmd_verify(args) -> int:
    game = serialize.load_game(args.game)
    Q = serialize.load_correlation(args.correlation)
    if args.cls == "correlated":
        w = correlated_decomposition(game, Q, tol=max(args.tol, 1e-8))
        if w is None:
            rep = verify_comm_equilibrium(game, Q, args.tol)
            rep.cls, rep.holds = "correlated", False
            rep.details["decomposed"] = False
        else:
            rep = verify_correlated_standard(game, w, args.tol)
    else:
        verifier = {"comm": verify_comm_equilibrium, "binv": verify_binv_equilibrium,
                    "nash": verify_nash}[args.cls]
        rep = verifier(game, Q, args.tol)
    lines = [f"{rep.cls} equilibrium: {'yes' if rep.holds else 'no'}",
             f"payoffs  {_vec(rep.payoffs)}",
             f"margin   {fmt(rep.margin)}"]
    if rep.worst is not None:
        lines.append(f"tightest {rep.worst.describe()}")
    if rep.details.get("decomposed") is False:
        lines.append("no standard-form decomposition into a correlated equilibrium")
    doc = serialize.report_to_dict(rep)
    _emit(args, doc, lines)
    return OK if rep.holds else FAILED


def _dump_lp(path: str, lp, name: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_lp_format(lp, name))


def cmd_optimize(args) -> int:
    game = serialize.load_game(args.game)
    cls = args.cls
    if cls == "zero-sum":
        z = zero_sum_value(game, exact=args.exact)
        _emit(args, {"class": cls, "v1": z.v1, "v2": z.v2, "total": z.total},
              [f"guaranteed  v1 = {fmt(z.v1)}, v2 = {fmt(z.v2)}", f"total       {fmt(z.total)}"])
        return OK
    obj = _objective(args.objective)
    if args.dump_lp and cls in ("comm", "binv", "correlated"):
        lp = (build_correlated_lp(game, obj) if cls == "correlated"
              else build_comm_lp(game, obj, non_signalling=cls == "binv"))
        _dump_lp(args.dump_lp, lp, f"{game.name or 'game'}_{cls}")
    if cls == "comm":
        res = max_obj_comm(game, obj, exact=args.exact)
    elif cls == "binv":
        res = max_obj_binv(game, obj, exact=args.exact)
    elif cls == "correlated":
        res = max_obj_correlated(game, obj, exact=args.exact)
    elif cls == "binv-value":
        res = binv_value_full_coordination(game, exact=args.exact)
    else:
        res = local_value_full_coordination(game)
    lines = [f"{res.cls} optimum ({res.objective}): {fmt(res.value, res.exact_value)}"]
    if res.witness is not None:
        lines.append(f"payoffs at witness {_vec(expected_payoffs(game, res.witness))}")
    _emit(args, serialize.result_to_dict(res), lines)
    return OK


def cmd_quantum_eval(args) -> int:
    game = serialize.load_game(args.game)
    q = serialize.load_quantum(args.solution)
    rep = verify_quantum_equilibrium(game, q, args.tol, threads=args.threads)
    lines = [f"equilibrium: {'yes' if rep.holds else 'no'}",
             f"payoffs            {_vec(rep.payoffs)}",
             f"best deviation     {_vec(rep.details['best_total'])}",
             f"margin             {fmt(rep.margin)}"]
    doc = serialize.report_to_dict(rep)
    if args.correlation_out:
        with open(args.correlation_out, "w", encoding="utf-8") as fh:
            fh.write(serialize.dumps(serialize.correlation_to_dict(induced_correlation(q, args.threads))))
    _emit(args, doc, lines)
    return OK if rep.holds else FAILED


def _catalog_names() -> dict[str, str]:
    names = {k: "game" for k in catalog.GAMES}
    names.update({k: "correlation" for k in catalog.CORRELATIONS})
    names["ghz_solution"] = "quantum"
    return names


def cmd_catalog(args) -> int:
    names = _catalog_names()
    if args.action == "list":
        _emit(args, {"names": names}, [f"{k:28s} {v}" for k, v in names.items()])
        return OK
    if not args.name:
        raise UsageError("catalog emit: missing name")
    if args.name not in names:
        raise UsageError(f"name: unknown catalog entry {args.name!r}; try 'catalog list'")
    eps = args.epsilon
    if eps is None:
        env = os.environ.get("EPSILON")
        try:
            eps = float(env) if env else catalog.DEFAULT_EPS
        except ValueError:
            raise UsageError(f"EPSILON: not a number: {env!r}") from None
    kind = names[args.name]
    if kind == "game":
        doc = serialize.game_to_dict(catalog.game(args.name, eps))
    elif kind == "correlation":
        doc = serialize.correlation_to_dict(catalog.reference_correlation(args.name, eps))
    else:
        from .quantum import ghz_solution
        doc = serialize.quantum_to_dict(ghz_solution())
    text = serialize.dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_mermin(args) -> int:
    Q = serialize.load_correlation(args.correlation)
    mq = catalog.mermin_quantities(Q)
    _emit(args, {"P": mq.P, "M": mq.M}, [f"P = {fmt(mq.P)}", f"M = {fmt(mq.M)}"])
    return OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print machine-readable JSON")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="bayescorr", description="Equilibria and correlations in Bayesian games.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check game, correlation or quantum files")
    s.add_argument("--game")
    s.add_argument("--correlation")
    s.add_argument("--solution", help="quantum solution JSON")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("payoff", parents=[common], help="expected payoffs under a correlation")
    s.add_argument("--game", required=True)
    s.add_argument("--correlation", required=True)
    s.add_argument("--objective", default="sw")
    s.set_defaults(func=cmd_payoff)

    s = sub.add_parser("classify", parents=[common], help="non-signalling / product / local tests")
    s.add_argument("--correlation", required=True)
    s.add_argument("--budget", type=int, default=10**6)
    s.add_argument("--exhaustive", action="store_true", help="check every subset of players")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("verify", parents=[common], help="equilibrium check for a canonical correlation")
    s.add_argument("--game", required=True)
    s.add_argument("--correlation", required=True)
    s.add_argument("--class", dest="cls", default="comm",
                   choices=["comm", "binv", "correlated", "nash"])
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("optimize", parents=[common], help="best equilibrium by linear programming")
    s.add_argument("--game", required=True)
    s.add_argument("--class", dest="cls", default="comm",
                   choices=["comm", "binv", "correlated", "binv-value", "local-value", "zero-sum"])
    s.add_argument("--objective", default="sw")
    s.add_argument("--exact", action="store_true", help="rational arithmetic simplex")
    s.add_argument("--dump-lp", metavar="FILE", help="write the LP in CPLEX LP format")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("quantum-eval", parents=[common], help="verify a quantum correlated equilibrium")
    s.add_argument("--game", required=True)
    s.add_argument("--solution", required=True)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--correlation-out", metavar="FILE", help="write the induced correlation")
    s.set_defaults(func=cmd_quantum_eval)

    s = sub.add_parser("catalog", parents=[common], help="list or emit built-in games and correlations")
    s.add_argument("action", choices=["list", "emit"])
    s.add_argument("name", nargs="?")
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--out", metavar="FILE")
    s.set_defaults(func=cmd_catalog)

    s = sub.add_parser("mermin", parents=[common], help="Mermin quantities P and M of a 3-party correlation")
    s.add_argument("--correlation", required=True)
    s.set_defaults(func=cmd_mermin)
    return p


def dispatch(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.set_printoptions(precision=6)
    try:
        return args.func(args)
    except (UsageError, SchemaError, AlphabetMismatch, UnsupportedActionCount, BudgetExceeded,
            OSError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return USAGE


def main() -> None:
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
