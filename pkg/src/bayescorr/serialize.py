"""JSON encodings of games, correlations, solutions and results.

Floats are written with Python's shortest round-trip repr, so a load/dump
cycle reproduces every double bit for bit.  Numeric fields also accept
strings such as ``"1/6"`` on input.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

import numpy as np

from .correlation import Correlation, Solution
from .game import BayesianGame
from .quantum import DensityMatrix, Povm, QuantumSolution


class SchemaError(ValueError):
    """Malformed document; the message starts with the offending field."""


def _num(x, where: str) -> float:
    if isinstance(x, bool):
        raise SchemaError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str):
        try:
            return float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise SchemaError(f"{where}: expected a number, got {x!r}")


def _field(doc: dict, key: str, where: str = ""):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where or 'document'}: expected an object")
    if key not in doc:
        raise SchemaError(f"{where + '.' if where else ''}{key}: missing field")
    return doc[key]


def _index(x, size: int, where: str) -> tuple[int, ...]:
    if not isinstance(x, list) or len(x) != len(size) or not all(isinstance(k, int) and not isinstance(k, bool) for k in x):
        raise SchemaError(f"{where}: expected {len(size)} integer indices, got {x!r}")
    for k, m in zip(x, size):
        if not 0 <= k < m:
            raise SchemaError(f"{where}: index {x} out of range for sizes {list(size)}")
    return tuple(x)


def _sizes(x, where: str) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(isinstance(k, int) and k > 0 for k in x):
        raise SchemaError(f"{where}: expected a list of positive integers, got {x!r}")
    return tuple(x)


def _label_lists(x, n: int, where: str) -> tuple[tuple[str, ...], ...]:
    if not isinstance(x, list) or len(x) != n or not all(isinstance(l, list) and l for l in x):
        raise SchemaError(f"{where}: expected {n} non-empty label lists")
    return tuple(tuple(str(s) for s in l) for l in x)


def _clean(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


# games


def game_to_dict(game: BayesianGame) -> dict:
    n = game.n
    doc = {"players": n}
    if game.name:
        doc["name"] = game.name
    doc["types"] = [list(l) for l in game.type_labels]
    doc["actions"] = [list(l) for l in game.action_labels]
    doc["prior"] = [{"t": list(t), "p": _clean(game.prior[t])}
                    for t in game.type_profiles() if game.prior[t] != 0]
    doc["payoffs"] = [{"t": list(t), "a": list(a),
                       "v": [_clean(game.payoffs[(i,) + t + a]) for i in range(n)]}
                      for t in game.type_profiles() for a in game.action_profiles()]
    return doc


def game_from_dict(doc: dict) -> BayesianGame:
    n = _field(doc, "players")
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"players: expected a positive integer, got {n!r}")
    types = _label_lists(_field(doc, "types"), n, "types")
    actions = _label_lists(_field(doc, "actions"), n, "actions")
    T = tuple(len(l) for l in types)
    A = tuple(len(l) for l in actions)
    prior = np.zeros(T)
    seen = set()
    for k, e in enumerate(_field(doc, "prior") or []):
        where = f"prior[{k}]"
        t = _index(_field(e, "t", where), T, where + ".t")
        if t in seen:
            raise SchemaError(f"{where}.t: duplicate type profile {list(t)}")
        seen.add(t)
        prior[t] = _num(_field(e, "p", where), where + ".p")
    payoffs = np.full((n,) + T + A, np.nan)
    for k, e in enumerate(_field(doc, "payoffs") or []):
        where = f"payoffs[{k}]"
        t = _index(_field(e, "t", where), T, where + ".t")
        a = _index(_field(e, "a", where), A, where + ".a")
        v = _field(e, "v", where)
        if not isinstance(v, list) or len(v) != n:
            raise SchemaError(f"{where}.v: expected {n} payoffs, got {v!r}")
        if not np.isnan(payoffs[(0,) + t + a]):
            raise SchemaError(f"{where}: duplicate entry for t={list(t)} a={list(a)}")
        for i in range(n):
            payoffs[(i,) + t + a] = _num(v[i], f"{where}.v[{i}]")
    missing = np.argwhere(np.isnan(payoffs[0]))
    if len(missing):
        idx = [int(x) for x in missing[0]]
        raise SchemaError(
            f"payoffs: no entry for t={idx[:n]} a={idx[n:]} ({len(missing)} missing in total)"
        )
    return BayesianGame(prior, payoffs, types, actions, str(doc.get("name", "")))


# correlations and communication solutions


def correlation_to_dict(Q: Correlation) -> dict:
    n = Q.n
    entries = []
    for r in Q.inputs():
        for s in itertools.product(*(range(k) for k in Q.out_sizes)):
            p = Q.table[r + s]
            if p != 0:
                entries.append({"r": list(r), "s": list(s), "p": _clean(p)})
    return {"inputs": list(Q.in_sizes), "outputs": list(Q.out_sizes), "entries": entries}


def correlation_from_dict(doc: dict) -> Correlation:
    R = _sizes(_field(doc, "inputs"), "inputs")
    S = _sizes(_field(doc, "outputs"), "outputs")
    if len(R) != len(S):
        raise SchemaError(f"outputs: {len(S)} players, inputs has {len(R)}")
    table = np.zeros(R + S)
    seen = set()
    for k, e in enumerate(_field(doc, "entries") or []):
        where = f"entries[{k}]"
        r = _index(_field(e, "r", where), R, where + ".r")
        s = _index(_field(e, "s", where), S, where + ".s")
        if r + s in seen:
            raise SchemaError(f"{where}: duplicate entry r={list(r)} s={list(s)}")
        seen.add(r + s)
        table[r + s] = _num(_field(e, "p", where), where + ".p")
    return Correlation(table, len(R))


def solution_to_dict(sol: Solution) -> dict:
    return {
        "device": correlation_to_dict(sol.device),
        "f": [x.tolist() for x in sol.f],
        "g": [x.tolist() for x in sol.g],
        "lambda": [[_clean(p) for p in x] for x in sol.lam],
    }


def solution_from_dict(doc: dict) -> Solution:
    dev = correlation_from_dict(_field(doc, "device"))
    try:
        f = tuple(np.asarray(x, dtype=int) for x in _field(doc, "f"))
        g = tuple(np.asarray(x, dtype=int) for x in _field(doc, "g"))
        lam = tuple(np.asarray([_num(p, f"lambda[{i}]") for p in x])
                    for i, x in enumerate(doc.get("lambda") or []))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"f/g: strategy tables must be rectangular integer arrays ({exc})") from None
    return Solution(dev, f, g, lam)


# quantum solutions


def matrix_to_list(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[_clean(z.real), _clean(z.imag)] for z in row] for row in M]


def matrix_from_list(x, where: str) -> np.ndarray:
    if not isinstance(x, list) or not x or not all(isinstance(r, list) for r in x):
        raise SchemaError(f"{where}: expected a nested list of [re, im] pairs")
    rows = []
    for i, row in enumerate(x):
        out = []
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise SchemaError(f"{where}[{i}][{j}]: expected [re, im], got {z!r}")
            out.append(complex(_num(z[0], f"{where}[{i}][{j}]"), _num(z[1], f"{where}[{i}][{j}]")))
        rows.append(out)
    if len({len(r) for r in rows}) != 1:
        raise SchemaError(f"{where}: rows have different lengths")
    return np.array(rows, dtype=complex)


def quantum_to_dict(q: QuantumSolution) -> dict:
    return {
        "dims": list(q.state.dims),
        "rho": matrix_to_list(q.state.matrix),
        "measurements": [[[matrix_to_list(E) for E in P.elements] for P in per_type]
                         for per_type in q.measurements],
    }


def quantum_from_dict(doc: dict) -> QuantumSolution:
    dims = _sizes(_field(doc, "dims"), "dims")
    rho = matrix_from_list(_field(doc, "rho"), "rho")
    meas = _field(doc, "measurements")
    if not isinstance(meas, list) or len(meas) != len(dims):
        raise SchemaError(f"measurements: expected one list per subsystem ({len(dims)})")
    players = []
    for i, per_type in enumerate(meas):
        if not isinstance(per_type, list) or not per_type:
            raise SchemaError(f"measurements[{i}]: expected a non-empty list of POVMs")
        povms = []
        for t, els in enumerate(per_type):
            if not isinstance(els, list) or not els:
                raise SchemaError(f"measurements[{i}][{t}]: expected a non-empty list of elements")
            povms.append(Povm(tuple(matrix_from_list(E, f"measurements[{i}][{t}][{a}]")
                                    for a, E in enumerate(els))))
        players.append(tuple(povms))
    try:
        state = DensityMatrix(rho, dims)
    except ValueError as exc:
        raise SchemaError(f"rho: {exc}") from None
    return QuantumSolution(state, tuple(players))


# reports and optimization results


def _fraction_text(x) -> str | None:
    return str(x) if isinstance(x, Fraction) else None


def report_to_dict(rep) -> dict:
    doc = {
        "class": rep.cls,
        "holds": bool(rep.holds),
        "margin": float(rep.margin),
        "worst": rep.worst.describe() if rep.worst is not None else None,
        "payoffs": [float(x) for x in rep.payoffs],
    }
    if "best_total" in rep.details:
        doc["best_deviation_value"] = [float(x) for x in rep.details["best_total"]]
    if "violation" in rep.details:
        doc["signalling_violation"] = float(rep.details["violation"])
    if "product_gap" in rep.details:
        doc["product_gap"] = float(rep.details["product_gap"])
    return doc


def result_to_dict(res) -> dict:
    doc = {"class": res.cls, "objective": str(res.objective), "value": float(res.value)}
    exact = _fraction_text(res.exact_value)
    if exact is not None:
        doc["exact"] = exact
    doc["witness"] = correlation_to_dict(res.witness) if res.witness is not None else None
    return doc


# files


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}") from None


def load_game(path: str) -> BayesianGame:
    return game_from_dict(load_json(path))


def load_correlation(path: str) -> Correlation:
    return correlation_from_dict(load_json(path))


def load_quantum(path: str) -> QuantumSolution:
    return quantum_from_dict(load_json(path))
