"""Small dense simplex solver used by the representation searches.

Problems are stated as

    minimize / maximize  c . x
    subject to           A_ub x <= b_ub,  A_eq x = b_eq,
                         x_j >= 0 unless j is marked free.

Internally everything is rewritten as ``max c.x, A x <= b, x >= 0`` (free
variables split into two non-negative parts, equalities as two inequalities)
and solved on a condensed tableau that stores only the non-basic columns, so
its width is the number of structural variables and not rows + columns.
Infeasible starts use a single auxiliary variable in phase one.  Pivoting
follows Bland's rule, which cannot cycle.

The same routine runs on floats (pivot tolerance 1e-9) or on
``fractions.Fraction`` (no tolerance) for adjudicating near-degenerate cases.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

PIVOT_TOL = 1e-9
MAX_PIVOTS = 200_000

FEASIBLE = "feasible"
OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPProblem:
    n_vars: int
    c: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    free: np.ndarray | None = None
    sense: str = "min"

    def __post_init__(self):
        n = self.n_vars
        if self.A_ub is None:
            self.A_ub, self.b_ub = np.zeros((0, n)), np.zeros(0)
        if self.A_eq is None:
            self.A_eq, self.b_eq = np.zeros((0, n)), np.zeros(0)
        self.A_ub = np.asarray(self.A_ub, dtype=object if _is_exact(self.A_ub) else np.float64).reshape(-1, n)
        self.A_eq = np.asarray(self.A_eq, dtype=object if _is_exact(self.A_eq) else np.float64).reshape(-1, n)
        self.b_ub = np.asarray(self.b_ub).reshape(-1)
        self.b_eq = np.asarray(self.b_eq).reshape(-1)
        if self.A_ub.shape[0] != self.b_ub.shape[0] or self.A_eq.shape[0] != self.b_eq.shape[0]:
            raise ValueError("constraint matrix and right-hand side lengths differ")
        self.free = np.zeros(n, dtype=bool) if self.free is None else np.asarray(self.free, dtype=bool)
        if self.free.shape != (n,):
            raise ValueError("free mask must have one entry per variable")
        if self.c is not None and len(self.c) != n:
            raise ValueError("objective length differs from the number of variables")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")


def _is_exact(a):
    return a is not None and np.asarray(a).dtype == object


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    pivots: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status in (FEASIBLE, OPTIMAL)


class _Tableau:
    """x_B = b - A x_N ;  z = v + c . x_N  (maximised)."""

    def __init__(self, A, b, c, exact, N, B):
        self.exact = exact
        self.tol = Fraction(0) if exact else PIVOT_TOL
        self.A = A.copy()
        self.b = b.copy()
        self.c = c.copy()
        self.v = Fraction(0) if exact else 0.0
        self.N = list(N)
        self.B = list(B)
        self.pivots = 0

    def pivot(self, r, e):
        A, b, c = self.A, self.b, self.c
        a = A[r, e]
        newrow = A[r, :] / a
        newrow[e] = 1 / a
        newb = b[r] / a
        col = A[:, e].copy()
        col[r] = 0
        A[:, e] = 0
        A -= np.outer(col, newrow)
        b -= col * newb
        A[r, :] = newrow
        b[r] = newb
        ce = c[e]
        c[e] = 0
        c -= ce * newrow
        self.v = self.v + ce * newb
        self.N[e], self.B[r] = self.B[r], self.N[e]
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise RuntimeError("simplex pivot limit exceeded")

    def entering(self):
        best = None
        for j in np.flatnonzero(self.c > self.tol):
            if best is None or self.N[j] < self.N[best]:
                best = j
        return best

    def leaving(self, e):
        col = self.A[:, e]
        rows = np.flatnonzero(col > self.tol)
        if rows.size == 0:
            return None
        ratios = self.b[rows] / col[rows]
        lo = min(ratios)
        tie = self.tol * (1 + abs(lo)) if not self.exact else 0
        cand = [int(r) for r, q in zip(rows, ratios) if q - lo <= tie]
        return min(cand, key=lambda r: self.B[r])

    def optimize(self):
        while True:
            e = self.entering()
            if e is None:
                return OPTIMAL
            r = self.leaving(e)
            if r is None:
                return UNBOUNDED
            self.pivot(r, e)


def _standard_form(prob: LPProblem):
    n = prob.n_vars
    exact = _is_exact(prob.A_ub) or _is_exact(prob.A_eq)
    conv = (lambda a: np.array([Fraction(x) for x in np.ravel(a)], dtype=object).reshape(np.shape(a))) if exact \
        else (lambda a: np.asarray(a, dtype=np.float64))
    A = np.vstack([conv(prob.A_ub), conv(prob.A_eq), -conv(prob.A_eq)]) if n else np.zeros((0, 0))
    b = np.concatenate([conv(prob.b_ub), conv(prob.b_eq), -conv(prob.b_eq)])
    c = conv(prob.c) if prob.c is not None else conv(np.zeros(n))
    if prob.sense == "min":
        c = -c
    free = np.flatnonzero(prob.free)
    if free.size:
        A = np.hstack([A, -A[:, free]])
        c = np.concatenate([c, -c[free]])
    return A, b, c, free, exact


def solve(prob: LPProblem) -> LPResult:
    """Solve ``prob``; statuses are optimal, infeasible or unbounded."""
    A, b, c, free, exact = _standard_form(prob)
    m, n = A.shape
    zero = Fraction(0) if exact else 0.0
    tol = Fraction(0) if exact else PIVOT_TOL
    if m == 0:
        if np.any(c > tol):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, np.zeros(prob.n_vars, dtype=float), 0.0)

    # phase one: x_B = b - A x + x0, maximise -x0
    aux = n + m
    A1 = np.hstack([A, -np.ones((m, 1), dtype=A.dtype) if not exact
                    else np.full((m, 1), Fraction(-1), dtype=object)])
    c1 = np.zeros(n + 1, dtype=A.dtype) if not exact else np.full(n + 1, Fraction(0), dtype=object)
    c1[n] = -1 if not exact else Fraction(-1)
    tab = _Tableau(A1, b, c1, exact, N=list(range(n)) + [aux], B=range(n, n + m))
    if min(b) < -tol:
        tab.pivot(int(np.argmin(b)), n)
        if tab.optimize() != OPTIMAL:
            raise RuntimeError("phase one cannot be unbounded")
        if tab.v < -(tol * 10 if not exact else 0):
            return LPResult(INFEASIBLE, pivots=tab.pivots)
        if aux in tab.B:
            r = tab.B.index(aux)
            nz = [j for j in range(n + 1) if abs(tab.A[r, j]) > tol]
            if nz:
                tab.pivot(r, min(nz, key=lambda j: tab.N[j]))
            else:
                # redundant row: the auxiliary sits at zero and never moves
                keep_rows = [i for i in range(len(tab.B)) if i != r]
                tab.A, tab.b = tab.A[keep_rows], tab.b[keep_rows]
                tab.B = [tab.B[i] for i in keep_rows]
                tab.A = np.hstack([tab.A, np.zeros((len(keep_rows), 1), dtype=tab.A.dtype)])
                tab.N.append(aux)
    # drop the auxiliary column and restore the objective
    col = tab.N.index(aux)
    keep = [j for j in range(len(tab.N)) if j != col]
    tab.A = tab.A[:, keep]
    tab.N = [tab.N[j] for j in keep]
    obj = np.array([zero] * len(keep), dtype=tab.A.dtype)
    v = zero
    for j, var in enumerate(tab.N):
        if var < n:
            obj[j] += c[var]
    for r, var in enumerate(tab.B):
        if var < n and c[var] != 0:
            v = v + c[var] * tab.b[r]
            obj -= c[var] * tab.A[r, :]
    tab.c, tab.v = obj, v
    if not exact:
        tab.b = np.maximum(tab.b, 0.0)
    status = tab.optimize()
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=tab.pivots)
    x = [zero] * n
    for r, var in enumerate(tab.B):
        if var < n:
            x[var] = tab.b[r]
    x = np.array(x, dtype=object if exact else np.float64)
    k = prob.n_vars
    out = x[:k].copy()
    out[free] = x[free] - x[k:k + free.size]
    objective = tab.v if prob.sense == "max" else -tab.v
    if exact:
        return LPResult(OPTIMAL, out, objective, tab.pivots, {"exact_x": out.copy()})
    return LPResult(OPTIMAL, out.astype(np.float64), float(objective), tab.pivots)


def lp_feasible(prob: LPProblem) -> LPResult:
    """Feasibility only: the objective is ignored."""
    bare = LPProblem(prob.n_vars, None, prob.A_ub, prob.b_ub, prob.A_eq, prob.b_eq, prob.free, "min")
    res = solve(bare)
    if res.status == OPTIMAL:
        res.status = FEASIBLE
    return res


def to_exact(prob: LPProblem) -> LPProblem:
    """Copy of ``prob`` with every number converted to an exact Fraction."""
    fr = lambda a: np.array([Fraction(x) for x in np.ravel(a)], dtype=object).reshape(np.shape(a))  # noqa: E731
    return LPProblem(prob.n_vars, None if prob.c is None else fr(prob.c), fr(prob.A_ub), fr(prob.b_ub),
                     fr(prob.A_eq), fr(prob.b_eq), prob.free, prob.sense)


def solve_highs(prob: LPProblem) -> LPResult:
    """Reference solution from scipy's HiGHS, for cross-checking only."""
    from scipy.optimize import linprog

    c = np.zeros(prob.n_vars) if prob.c is None else np.asarray(prob.c, dtype=float)
    if prob.sense == "max":
        c = -c
    bounds = [(None, None) if fr else (0, None) for fr in prob.free]
    kw = {}
    if prob.A_ub.shape[0]:
        kw.update(A_ub=prob.A_ub.astype(float), b_ub=prob.b_ub.astype(float))
    if prob.A_eq.shape[0]:
        kw.update(A_eq=prob.A_eq.astype(float), b_eq=prob.b_eq.astype(float))
    r = linprog(c, bounds=bounds, method="highs", **kw)
    if r.status == 2:
        return LPResult(INFEASIBLE)
    if r.status == 3:
        return LPResult(UNBOUNDED)
    obj = float(r.fun) if prob.sense == "min" else -float(r.fun)
    return LPResult(OPTIMAL, r.x, obj)
