"""Small dense complex matrices: Kronecker products, partial traces, and a
cyclic Jacobi eigensolver for Hermitian matrices.

Matrices are plain numpy complex arrays.  Tensor factors are ordered player 1
first, so ``|xyz> = |x> (x) |y> (x) |z>`` with ``|0> = (1, 0)`` and
``|1> = (0, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

DEFAULT_DIM_BUDGET = 256
HERMITIAN_TOL = 1e-10
MAX_SWEEPS = 100
OFFDIAG_TOL = 1e-13


class NotHermitianError(ValueError):
    pass


class DimensionError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(M) -> np.ndarray:
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or 0 in A.shape:
        raise DimensionError(f"expected a non-empty 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def tensor(A, B, budget: int = DEFAULT_DIM_BUDGET) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if max(rows, cols) > budget:
        raise DimensionError(f"tensor product of size {rows}x{cols} exceeds budget {budget}")
    return np.kron(A, B)


def tensor_all(mats: Sequence, budget: int = DEFAULT_DIM_BUDGET) -> np.ndarray:
    return reduce(lambda x, y: tensor(x, y, budget), mats)


def hermitian_residual(H) -> float:
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise DimensionError(f"matrix is not square: {H.shape}")
    return float(np.max(np.abs(H - H.conj().T)))


def _require_hermitian(H, tol: float) -> np.ndarray:
    H = as_matrix(H)
    res = hermitian_residual(H)
    if res > tol * max(1.0, float(np.max(np.abs(H)))):
        raise NotHermitianError(f"matrix deviates from Hermitian by {res:.3g}")
    return 0.5 * (H + H.conj().T)


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def hermitian_eigen(H, tol: float = HERMITIAN_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors by cyclic Jacobi rotations."""
    A = _require_hermitian(H, tol)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        if _off_norm(A) < OFFDIAG_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                # unit phase making the (p, q) entry real and positive, then a real rotation
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                G = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p], A[q, q] = A[p, p].real, A[q, q].real
                V[:, idx] = V[:, idx] @ G
    else:
        if _off_norm(A) >= OFFDIAG_TOL * scale:
            raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    vals = np.diag(A).real.copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], V[:, order])


def eigenvalues(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    return hermitian_eigen(H, tol).values


def is_psd(H, tol: float = HERMITIAN_TOL) -> bool:
    return bool(eigenvalues(H, tol)[0] >= -tol)


def partial_trace(M, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every tensor factor except those listed in ``keep``."""
    M = as_matrix(M)
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if M.shape != (total, total):
        raise DimensionError(f"matrix {M.shape} does not match subsystem dims {dims}")
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    if any(not 0 <= k < len(dims) for k in keep):
        raise DimensionError(f"kept factors {keep} out of range for {len(dims)} factors")
    n = len(dims)
    T = M.reshape(dims + dims)
    # trace the highest factors first so earlier axis numbers stay valid
    for k in reversed(range(n)):
        if k in keep:
            continue
        m = T.ndim // 2
        T = np.trace(T, axis1=k, axis2=k + m)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return T.reshape(d, d)


def trace(M) -> complex:
    return complex(np.trace(as_matrix(M)))


def positive_part_sum(H, tol: float = HERMITIAN_TOL) -> float:
    """Sum of the positive eigenvalues of a Hermitian matrix."""
    vals = eigenvalues(H, tol)
    return float(np.sum(vals[vals > 0]))
