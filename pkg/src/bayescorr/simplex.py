"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Problems are stated as::

    maximize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

Floating point is the default.  ``exact=True`` runs the same pivots over
:class:`fractions.Fraction` entries, which certifies small rational optima.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
DROP_TOL = 1e-12
REFACTOR_EVERY = 50
PIVOT_MIN = 1e-7
DEFAULT_MAX_PIVOTS = 10**6


class PivotLimitError(RuntimeError):
    """Raised when the solver exceeds its pivot budget."""


@dataclass
class LinearProgram:
    """A maximization LP over non-negative variables.

    Either constraint block may be omitted.  Labels are only used for
    diagnostics and the textual LP dump.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    var_labels: Sequence[str] | None = None
    ub_labels: Sequence[str] | None = None
    eq_labels: Sequence[str] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c)
        n = self.c.shape[0]
        self.A_ub, self.b_ub = _block(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _block(self.A_eq, self.b_eq, n, "eq")
        for name in ("c", "A_ub", "b_ub", "A_eq", "b_eq"):
            arr = getattr(self, name)
            if arr.dtype != object and not np.all(np.isfinite(arr)):
                raise ValueError(f"LP field {name} has non-finite coefficients")

    @property
    def n_vars(self) -> int:
        return self.c.shape[0]

    @property
    def n_ub(self) -> int:
        return self.A_ub.shape[0]

    @property
    def n_eq(self) -> int:
        return self.A_eq.shape[0]


def _block(A, b, n, name):
    if A is None:
        if b is not None and len(b):
            raise ValueError(f"b_{name} given without A_{name}")
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    b = np.asarray(b).reshape(-1)
    if A.shape[1] != n:
        raise ValueError(f"A_{name} has {A.shape[1]} columns, objective has {n}")
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"A_{name} has {A.shape[0]} rows but b_{name} has {b.shape[0]}")
    return A, b


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | Fraction | None
    x: np.ndarray | None
    y_ub: np.ndarray | None = None
    y_eq: np.ndarray | None = None
    pivots: int = 0
    basis: tuple[int, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _to_exact(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    flat = a.reshape(-1)
    res = out.reshape(-1)
    for k, v in enumerate(flat):
        if isinstance(v, Fraction):
            res[k] = v
            continue
        f = Fraction(v)
        g = f.limit_denominator(10**6)
        # keep the short fraction only when it reproduces the float
        res[k] = g if abs(float(g) - float(v)) <= 1e-15 * max(1.0, abs(float(v))) else f
    return out


class _Tableau:
    """Row-reduced tableau [B^-1 M | B^-1 rhs] plus a reduced-cost row.

    The objective row stores reduced costs ``c_j - c_B B^-1 M_j`` and, in the
    last column, ``-z`` so that pivoting updates it like any other row.
    """

    def __init__(self, T, basis, tol, exact, max_pivots):
        self.T = T
        self.basis = list(basis)
        self.tol = tol
        self.exact = exact
        self.max_pivots = max_pivots
        self.pivots = 0
        self.obj = None
        self.cost = None
        self.refactoring = True
        self.rebase()

    def rebase(self):
        """Take the current tableau as the reference for later refactorization."""
        self.T0 = self.T.copy()

    def refactor(self):
        """Recompute B^-1 [M | rhs] from the reference tableau to shed round-off."""
        B = self.T0[:, self.basis]
        self.T = np.linalg.solve(B, self.T0)
        self.T[np.abs(self.T) < DROP_TOL] = 0.0
        self.T[:, self.basis] = np.eye(len(self.basis))
        rhs = self.T[:, -1]
        rhs[(rhs < 0) & (rhs > -self.tol)] = 0.0
        if self.cost is not None:
            self.set_objective(self.cost)

    def set_objective(self, cost):
        """Install cost vector (length = #columns) and price out the basis."""
        self.cost = cost
        m = self.T.shape[0]
        row = np.concatenate([cost, np.zeros(1, dtype=cost.dtype)])
        for i in range(m):
            cb = cost[self.basis[i]]
            if cb != 0:
                row = row - cb * self.T[i]
        self.obj = row

    def pivot(self, r, j):
        T = self.T
        T[r] = T[r] / T[r, j]
        col = T[:, j].copy()
        col[r] = 0
        T -= np.outer(col, T[r])
        self.obj = self.obj - self.obj[j] * T[r]
        if not self.exact:
            # round-off residue left by elimination would later pose as pivots
            T[np.abs(T) < DROP_TOL] = 0.0
            self.obj[np.abs(self.obj) < DROP_TOL] = 0.0
            rhs = T[:, -1]
            rhs[(rhs < 0) & (rhs > -self.tol)] = 0.0
        self.basis[r] = j
        self.pivots += 1
        if self.refactoring and not self.exact and self.pivots % REFACTOR_EVERY == 0:
            self.refactor()
        if self.pivots > self.max_pivots:
            raise PivotLimitError(
                f"simplex exceeded {self.max_pivots} pivots "
                f"(tableau {T.shape[0]}x{T.shape[1] - 1})"
            )

    def run(self, allowed: int) -> str:
        """Iterate with Bland's rule over columns ``< allowed``."""
        tol = self.tol
        while True:
            T = self.T
            rc = self.obj[:allowed]
            cand = np.nonzero(rc > tol)[0] if not self.exact else [
                k for k in range(allowed) if rc[k] > 0
            ]
            if len(cand) == 0:
                return "optimal"
            j = int(cand[0])
            colj = T[:, j]
            ptol = 0 if self.exact else max(tol, PIVOT_MIN)
            rows = [i for i in range(T.shape[0]) if colj[i] > ptol]
            if not rows:
                return "unbounded"
            ratios = [T[i, -1] / colj[i] for i in rows]
            best = min(ratios)
            slack = 0 if self.exact else tol * max(1.0, abs(best))
            ties = [rows[k] for k, q in enumerate(ratios) if q <= best + slack]
            r = min(ties, key=lambda i: self.basis[i])
            self.pivot(r, j)


def _standard_form(lp: LinearProgram, exact: bool):
    """Return (M, rhs, sign, n_cols_without_artificials, needs_artificial)."""
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    conv = _to_exact if exact else (lambda a: np.asarray(a, dtype=float))
    A_ub, b_ub = conv(lp.A_ub), conv(lp.b_ub)
    A_eq, b_eq = conv(lp.A_eq), conv(lp.b_eq)
    dtype = object if exact else float
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    M = np.full((m1 + m2, n + m1), zero, dtype=dtype)
    M[:m1, :n] = A_ub
    M[m1:, :n] = A_eq
    for i in range(m1):
        M[i, n + i] = one
    rhs = np.concatenate([b_ub, b_eq]) if m1 + m2 else np.zeros(0, dtype=dtype)
    rhs = np.asarray(rhs, dtype=dtype)
    return M, rhs


def _phase_one(lp: LinearProgram, tol: float, exact: bool, max_pivots: int):
    if exact:
        tol = 0
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    M0, rhs0 = _standard_form(lp, exact)
    m = m1 + m2
    ncol = n + m1
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    sign = np.array([-1 if rhs0[i] < 0 else 1 for i in range(m)], dtype=int)
    M = M0 * sign[:, None] if m else M0
    rhs = rhs0 * sign if m else rhs0

    art_rows = [i for i in range(m) if i >= m1 or sign[i] < 0]
    T = np.full((m, ncol + len(art_rows) + 1), zero, dtype=M.dtype)
    T[:, :ncol] = M
    T[:, -1] = rhs
    basis = [0] * m
    for i in range(m1):
        basis[i] = n + i
    for k, i in enumerate(art_rows):
        T[i, ncol + k] = one
        basis[i] = ncol + k

    tab = _Tableau(T, basis, tol, exact, max_pivots)
    row_ids = list(range(m))
    if art_rows:
        cost = np.full(T.shape[1] - 1, zero, dtype=T.dtype)
        cost[ncol:] = -one
        tab.set_objective(cost)
        status = tab.run(T.shape[1] - 1)
        assert status == "optimal"  # phase one is bounded by construction
        infeas = tab.obj[-1]  # -z = sum of artificials
        scale = max([1.0] + [abs(float(v)) for v in rhs])
        feas_tol = 0 if exact else 1e-9 * scale
        if infeas > feas_tol:
            return None, M0, rhs0, sign, tab.pivots, float(infeas)
        # drive remaining (zero-level) artificials out of the basis; rows
        # get deleted here, so the reference tableau is rebuilt afterwards
        tab.refactoring = False
        ptol = 0 if exact else max(tol, PIVOT_MIN)
        r = 0
        while r < tab.T.shape[0]:
            if tab.basis[r] >= ncol:
                row = tab.T[r, :ncol]
                nz = [k for k in range(ncol) if abs(row[k]) > ptol]
                if nz:
                    tab.pivot(r, max(nz, key=lambda k: abs(row[k])))
                else:
                    tab.T = np.delete(tab.T, r, axis=0)
                    del tab.basis[r]
                    del row_ids[r]
                    continue
            r += 1
        tab.T = np.concatenate([tab.T[:, :ncol], tab.T[:, -1:]], axis=1)
        tab.cost = None
        tab.refactoring = True
        tab.rebase()
    return tab, M0, rhs0, sign, tab.pivots, 0.0


def _extract_x(tab: _Tableau, ncol: int, exact: bool):
    zero = Fraction(0) if exact else 0.0
    x = np.full(ncol, zero, dtype=object if exact else float)
    for i, b in enumerate(tab.basis):
        x[b] = tab.T[i, -1]
    return x


def feasibility(lp: LinearProgram, tol: float = PIVOT_TOL, exact: bool = False,
                max_pivots: int = DEFAULT_MAX_PIVOTS) -> tuple[bool, np.ndarray | None]:
    """Run phase one only.  Returns ``(feasible, point)``."""
    tab, *_rest, infeas = _phase_one(lp, tol, exact, max_pivots)
    if tab is None:
        return False, None
    x = _extract_x(tab, lp.n_vars + lp.n_ub, exact)
    return True, x[: lp.n_vars]


def solve(lp: LinearProgram, tol: float = PIVOT_TOL, exact: bool = False,
          max_pivots: int = DEFAULT_MAX_PIVOTS) -> LpSolution:
    """Solve ``lp`` with the two-phase method.

    Pivoting is deterministic (Bland's rule), so identical inputs give
    identical pivot sequences.  Optimal solutions carry dual values and
    residual diagnostics in ``diagnostics``.
    """
    tab, M0, rhs0, sign, p1, infeas = _phase_one(lp, tol, exact, max_pivots)
    if tab is None:
        return LpSolution("infeasible", None, None, pivots=p1,
                          diagnostics={"phase_one_infeasibility": infeas})
    n, m1 = lp.n_vars, lp.n_ub
    ncol = n + m1
    zero = Fraction(0) if exact else 0.0
    tab.tol = 0 if exact else tol
    c = _to_exact(lp.c) if exact else np.asarray(lp.c, dtype=float)
    cost = np.full(ncol, zero, dtype=object if exact else float)
    cost[:n] = c
    tab.set_objective(cost)
    status = tab.run(ncol)
    if status == "unbounded":
        return LpSolution("unbounded", None, None, pivots=tab.pivots, basis=tuple(tab.basis))
    x = _extract_x(tab, ncol, exact)
    value = -tab.obj[-1]
    sol = LpSolution("optimal", value, x[:n], pivots=tab.pivots, basis=tuple(tab.basis))
    _certify(sol, lp, M0, tab, cost)
    return sol


def _certify(sol: LpSolution, lp: LinearProgram, M0, tab: _Tableau, cost) -> None:
    """Attach duals and primal/dual residuals (computed in floating point)."""
    n, m1, m2 = lp.n_vars, lp.n_ub, lp.n_eq
    M = np.asarray(M0, dtype=float)
    cf = np.asarray(cost, dtype=float)
    xf = np.asarray(sol.x, dtype=float)
    y = np.zeros(m1 + m2)
    basis = list(tab.basis)
    if basis:
        B = M[:, basis]
        yk, *_ = np.linalg.lstsq(B.T, cf[basis], rcond=None)
        y = yk
    reduced = cf - M.T @ y
    A_ub = np.asarray(lp.A_ub, dtype=float)
    A_eq = np.asarray(lp.A_eq, dtype=float)
    primal = 0.0
    if m1:
        primal = max(primal, float(np.max(A_ub @ xf - np.asarray(lp.b_ub, dtype=float), initial=0.0)))
    if m2:
        primal = max(primal, float(np.max(np.abs(A_eq @ xf - np.asarray(lp.b_eq, dtype=float)))))
    primal = max(primal, float(-np.min(xf, initial=0.0)))
    xs = np.zeros(n + m1)
    xs[:n] = xf
    if m1:
        xs[n:] = np.asarray(lp.b_ub, dtype=float) - A_ub @ xf
    sol.y_ub, sol.y_eq = y[:m1], y[m1:]
    sol.diagnostics = {
        "primal_residual": primal,
        "dual_residual": float(max(0.0, np.max(reduced, initial=0.0))),
        "complementarity": float(np.max(np.abs(xs * reduced), initial=0.0)),
        "dual_value": float(np.concatenate([np.asarray(lp.b_ub, float),
                                            np.asarray(lp.b_eq, float)]) @ y),
    }
    if sol.diagnostics["dual_residual"] > 1e-7 or sol.diagnostics["complementarity"] > 1e-7:
        log.warning("LP certificate is loose: %s", sol.diagnostics)


def to_lp_format(lp: LinearProgram, name: str = "lp") -> str:
    """Render ``lp`` in CPLEX LP text format for external cross-checks."""
    names = list(lp.var_labels) if lp.var_labels else [f"x{j}" for j in range(lp.n_vars)]
    names = [_sanitize(s) for s in names]

    def expr(coefs):
        terms = []
        for a, v in zip(coefs, names):
            a = float(a)
            if a == 0:
                continue
            terms.append(f"{'-' if a < 0 else '+'} {abs(a):.17g} {v}")
        if not terms:
            return "0 " + names[0]
        s = " ".join(terms)
        return s[2:] if s.startswith("+ ") else s

    lines = [f"\\ {name}", "Maximize", f" obj: {expr(lp.c)}", "Subject To"]
    for i in range(lp.n_ub):
        lab = _sanitize(lp.ub_labels[i]) if lp.ub_labels else f"ub{i}"
        lines.append(f" {lab}: {expr(lp.A_ub[i])} <= {float(lp.b_ub[i]):.17g}")
    for i in range(lp.n_eq):
        lab = _sanitize(lp.eq_labels[i]) if lp.eq_labels else f"eq{i}"
        lines.append(f" {lab}: {expr(lp.A_eq[i])} = {float(lp.b_eq[i]):.17g}")
    lines.append("Bounds")
    lines.extend(f" {v} >= 0" for v in names)
    lines.append("End")
    return "\n".join(lines) + "\n"


def _sanitize(s: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "_." else "_" for ch in str(s))
