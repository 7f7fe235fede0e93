"""Quantum solutions: a shared state and one local POVM per (player, type)."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .correlation import Correlation
from .game import ValidationReport

QTOL = 1e-10
IMAG_TOL = 1e-10


class InvalidQuantumSolution(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if m.shape != (int(np.prod(dims)),) * 2:
            raise linalg.DimensionError(f"state of shape {m.shape} does not match dims {list(dims)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def pure(cls, psi, dims: Sequence[int]) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), tuple(dims))


@dataclass(frozen=True)
class Povm:
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        els = tuple(linalg.as_matrix(e) for e in self.elements)
        if not els or any(e.shape != els[0].shape for e in els):
            raise linalg.DimensionError("POVM elements must be non-empty and equally sized")
        for e in els:
            e.setflags(write=False)
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def projective(cls, basis_vectors: Sequence) -> "Povm":
        return cls(tuple(np.outer(v, np.conj(v)) for v in np.asarray(basis_vectors, complex)))


@dataclass(frozen=True)
class QuantumSolution:
    state: DensityMatrix
    measurements: tuple[tuple[Povm, ...], ...]

    @property
    def n(self) -> int:
        return len(self.measurements)

    @property
    def type_sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.measurements)

    @property
    def action_sizes(self) -> tuple[int, ...]:
        return tuple(len(m[0]) for m in self.measurements)


def _povm_problems(P: Povm, where: str, tol: float) -> list[str]:
    out = []
    total = np.zeros_like(P.elements[0])
    for a, E in enumerate(P.elements):
        h = linalg.hermitian_residual(E)
        if h > tol:
            out.append(f"{where} element {a} not Hermitian (residual {h:.3g})")
            continue
        lo = linalg.eigenvalues(E, tol=1.0)[0]
        if lo < -tol:
            out.append(f"{where} element {a} not PSD (min eigenvalue {lo:.3g})")
        total = total + E
    dev = float(np.max(np.abs(total - np.eye(P.dim))))
    if dev > tol:
        out.append(f"{where} elements do not sum to identity (deviation {dev:.3g})")
    return out


def validate_quantum_solution(q: QuantumSolution, tol: float = QTOL) -> ValidationReport:
    problems = []
    rho, dims = q.state.matrix, q.state.dims
    if len(dims) != q.n:
        problems.append(f"state has {len(dims)} subsystems but there are {q.n} players")
    h = linalg.hermitian_residual(rho)
    if h > tol:
        problems.append(f"state not Hermitian (residual {h:.3g})")
    else:
        lo = linalg.eigenvalues(rho, tol=1.0)[0]
        if lo < -tol:
            problems.append(f"state not PSD (min eigenvalue {lo:.3g})")
    tr = linalg.trace(rho)
    if abs(tr - 1.0) > tol:
        problems.append(f"state trace {tr.real:.12g} (expected 1)")
    for i, per_type in enumerate(q.measurements):
        if not per_type:
            problems.append(f"player {i} has no types")
            continue
        counts = {len(P) for P in per_type}
        if len(counts) > 1:
            problems.append(f"player {i} POVMs have differing outcome counts {sorted(counts)}")
        for t, P in enumerate(per_type):
            if i < len(dims) and P.dim != dims[i]:
                problems.append(f"POVM of player {i} type {t} has dimension {P.dim}, subsystem has {dims[i]}")
                continue
            problems += _povm_problems(P, f"POVM of player {i} type {t}", tol)
    return ValidationReport(not problems, problems)


def born(rho: np.ndarray, ops: Sequence[np.ndarray]) -> complex:
    return complex(np.trace(rho @ linalg.tensor_all(ops)))


def _clamp(z: complex, where) -> float:
    if abs(z.imag) > IMAG_TOL:
        raise InvalidQuantumSolution(f"Born probability at {where} has imaginary part {z.imag:.3g}")
    return min(max(z.real, 0.0), 1.0)


def induced_correlation(q: QuantumSolution, threads: int | None = None) -> Correlation:
    """Q(a|t) = tr rho (M^{t_1}_{a_1} (x) ... (x) M^{t_n}_{a_n})."""
    rep = validate_quantum_solution(q)
    if not rep:
        raise InvalidQuantumSolution("; ".join(rep.problems))
    rho = q.state.matrix
    T, A = q.type_sizes, q.action_sizes

    def row(t):
        out = np.zeros(A)
        for a in itertools.product(*(range(k) for k in A)):
            ops = [q.measurements[i][t[i]].elements[a[i]] for i in range(q.n)]
            out[a] = _clamp(born(rho, ops), (t, a))
        return t, out

    types = list(itertools.product(*(range(k) for k in T)))
    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(row, types))
    else:
        rows = [row(t) for t in types]
    table = np.zeros(T + A)
    for t, r in rows:
        table[t] = r
    return Correlation(table, q.n)


def embed_local(g: Sequence[np.ndarray], Q, action_sizes: Sequence[int] | None = None) -> QuantumSolution:
    """Diagonal state and POVMs reproducing a correlated solution (g, Q).

    ``g[i][t_i, s_i]`` is the action of player i; ``Q`` is a distribution over
    advice profiles, or an input-independent Correlation.
    """
    if isinstance(Q, Correlation):
        rows = Q.table.reshape((-1,) + Q.out_sizes)
        if np.max(np.abs(rows - rows[0])) > 1e-12:
            raise ValueError("correlation depends on its inputs; a correlated solution needs a fixed advice distribution")
        dist = rows[0]
    else:
        dist = np.asarray(Q, dtype=float)
    g = [np.asarray(x, dtype=int) for x in g]
    n = dist.ndim
    if len(g) != n:
        raise ValueError(f"need {n} output maps, got {len(g)}")
    if abs(dist.sum() - 1.0) > 1e-9 or dist.min() < -1e-12:
        raise ValueError("advice distribution is not normalized")
    if action_sizes is None:
        action_sizes = [int(x.max()) + 1 for x in g]
    rho = DensityMatrix(np.diag(dist.ravel()).astype(complex), dist.shape)
    meas = []
    for i in range(n):
        S = dist.shape[i]
        if g[i].shape[1] != S:
            raise ValueError(f"g[{i}] covers {g[i].shape[1]} advice values, distribution has {S}")
        per_type = []
        for t in range(g[i].shape[0]):
            per_type.append(Povm(tuple(np.diag((g[i][t] == a).astype(float)).astype(complex)
                                       for a in range(action_sizes[i]))))
        meas.append(tuple(per_type))
    return QuantumSolution(rho, tuple(meas))


GHZ_PSI = 0.5 * np.array([0, -1, -1, 0, -1, 0, 0, 1], dtype=complex)


def ghz_solution() -> QuantumSolution:
    rho = DensityMatrix.pure(GHZ_PSI, (2, 2, 2))
    hadamard = Povm((0.5 * np.array([[1, 1], [1, 1]]), 0.5 * np.array([[1, -1], [-1, 1]])))
    computational = Povm((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    per_player = (hadamard, computational)
    return QuantumSolution(rho, (per_player,) * 3)


# random instances for property tests


def random_state(dims: Sequence[int], rng: np.random.Generator) -> DensityMatrix:
    d = int(np.prod(dims))
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    G = X.conj().T @ X
    return DensityMatrix(G / np.trace(G).real, tuple(dims))


def random_binary_povm(d: int, rng: np.random.Generator) -> Povm:
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = X + X.conj().T
    norm = float(np.max(np.abs(linalg.eigenvalues(H))))
    E = 0.5 * (np.eye(d) + H / norm)
    return Povm((E, np.eye(d) - E))


def random_quantum_solution(dims: Sequence[int], type_sizes: Sequence[int],
                            rng: np.random.Generator) -> QuantumSolution:
    meas = tuple(tuple(random_binary_povm(dims[i], rng) for _ in range(type_sizes[i]))
                 for i in range(len(dims)))
    return QuantumSolution(random_state(dims, rng), meas)
