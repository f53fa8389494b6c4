"""Two-phase revised simplex for sparse linear programs.

Programs have non-negative variables and rows of sense ``=`` or ``<=``.
The basis is held as a sparse LU factorisation (SuperLU) refreshed every
``refactor_every`` pivots, with product-form eta updates in between.
Pricing is Dantzig's rule with a Harris two-pass ratio test; after a streak
of degenerate pivots the solver switches to Bland's rule until the objective
moves again.  Pivots that are small relative to their column are refused
and another entering column is tried.

A presolve pass removes forcing rows (one-signed coefficients, zero
right-hand side), which pin their variables to zero.  Occupancy programs with
zero alarm budgets consist almost entirely of such rows, and pivoting on them
directly is numerically fragile.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-10
# pivots smaller than this fraction of the largest column entry are refused
REL_PIVOT_TOL = 1e-7
FEAS_TOL = 1e-9
OPT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

EQ, LE = "=", "<="


class NumericalError(RuntimeError):
    """Basis became singular and no alternative pivot was available."""


@dataclass(eq=False)
class LinearProgram:
    """``max/min c @ x`` s.t. ``A x (=|<=) b``, ``x >= 0``."""

    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    senses: tuple
    maximize: bool = False

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        self.A = sp.csc_matrix(self.A, dtype=float)
        self.senses = tuple(EQ if s in ("=", "==", "E") else LE if s in ("<=", "L") else s
                            for s in self.senses)
        m, n = self.A.shape
        if self.c.shape != (n,) or self.b.shape != (m,) or len(self.senses) != m:
            raise ValueError("inconsistent linear program dimensions")
        if any(s not in (EQ, LE) for s in self.senses):
            raise ValueError("row senses must be '=' or '<='")
        if not (np.all(np.isfinite(self.c)) and np.all(np.isfinite(self.b))
                and np.all(np.isfinite(self.A.data))):
            raise ValueError("linear program coefficients must be finite")

    @property
    def shape(self):
        return self.A.shape

    def dump(self, fh) -> None:
        """Write the sparse triplet text format (see ``load_lp``)."""
        m, n = self.A.shape
        coo = self.A.tocoo()
        fh.write(f"LP {m} {n} {coo.nnz} {'max' if self.maximize else 'min'}\n")
        fh.write("SENSE " + " ".join("E" if s == EQ else "L" for s in self.senses) + "\n")
        fh.write("RHS " + " ".join(repr(float(v)) for v in self.b) + "\n")
        fh.write("OBJ " + " ".join(repr(float(v)) for v in self.c) + "\n")
        order = np.lexsort((coo.col, coo.row))
        for i, j, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{i} {j} {float(v)!r}\n")

    def dumps(self) -> str:
        buf = io.StringIO()
        self.dump(buf)
        return buf.getvalue()


def load_lp(fh) -> LinearProgram:
    """Read a program written by ``LinearProgram.dump``.

    Layout: ``LP m n nnz max|min``, then ``SENSE`` (E/L per row), ``RHS`` and
    ``OBJ`` lines, then one ``row col value`` triplet per line.
    """
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    head = fh.readline().split()
    if len(head) != 5 or head[0] != "LP":
        raise ValueError("not an LP dump")
    m, n, nnz = (int(v) for v in head[1:4])

    def tagged(tag):
        parts = fh.readline().split()
        if not parts or parts[0] != tag:
            raise ValueError(f"expected {tag} line")
        return parts[1:]

    senses = tuple(EQ if s == "E" else LE for s in tagged("SENSE"))
    b = np.array([float(v) for v in tagged("RHS")])
    c = np.array([float(v) for v in tagged("OBJ")])
    rows, cols, vals = [], [], []
    for line in fh:
        if line.strip():
            i, j, v = line.split()
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
    if len(vals) != nnz:
        raise ValueError("triplet count does not match header")
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m, n))
    return LinearProgram(c, A, b, senses, maximize=head[4] == "max")


@dataclass(eq=False)
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective: float = float("nan")
    duals: np.ndarray | None = None
    iterations: int = 0
    phase1_iterations: int = 0
    pivots: list = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class ResidualReport:
    primal_residual: float
    dual_residual: float
    complementary_slackness: float
    duality_gap: float
    primal_objective: float
    dual_objective: float
    ok: bool

    def as_dict(self):
        return dict(
            primal_residual=self.primal_residual,
            dual_residual=self.dual_residual,
            complementary_slackness=self.complementary_slackness,
            duality_gap=self.duality_gap,
        )


def check_solution(p: LinearProgram, s: LpSolution) -> ResidualReport:
    """Primal/dual feasibility, complementary slackness and duality gap."""
    x = np.asarray(s.x, dtype=float)
    y = np.zeros(p.shape[0]) if s.duals is None else np.asarray(s.duals, dtype=float)
    Ax = p.A @ x
    le = np.array([sn == LE for sn in p.senses], dtype=bool)
    viol = np.where(le, np.maximum(Ax - p.b, 0.0), np.abs(Ax - p.b))
    primal = max(float(viol.max(initial=0.0)), float(np.maximum(-x, 0.0).max(initial=0.0)))
    # orient so that the dual reads: A^T y >= c, y_le >= 0 (max) or A^T y <= c, y_le <= 0 (min)
    sign = 1.0 if p.maximize else -1.0
    rc = sign * (p.A.T @ y - p.c)
    dual = max(float(np.maximum(-rc, 0.0).max(initial=0.0)),
               float(np.maximum(-sign * y[le], 0.0).max(initial=0.0)))
    slack = np.where(le, p.b - Ax, 0.0)
    cs = max(float(np.abs(x * rc).max(initial=0.0)), float(np.abs(y * slack).max(initial=0.0)))
    pobj = float(p.c @ x)
    dobj = float(p.b @ y)
    gap = abs(pobj - dobj)
    bnorm = float(np.abs(p.b).max(initial=0.0))
    ok = (primal <= 1e-8 * (1 + bnorm) and cs <= 1e-7
          and gap <= 1e-7 * (1 + abs(pobj)) and dual <= 1e-7)
    return ResidualReport(primal, dual, cs, gap, pobj, dobj, ok)


class _Basis:
    """``B^{-1}`` as SuperLU factors of ``B_0`` plus an eta file."""

    def __init__(self, A: sp.csc_matrix):
        self.A = A
        self.m = A.shape[0]
        self.lu = None
        self.etas: list = []

    def refactor(self, cols):
        B = self.A[:, cols].tocsc()
        try:
            self.lu = splu(B, permc_spec="COLAMD", diag_pivot_thresh=0.1)
        except RuntimeError as exc:
            raise NumericalError(f"basis factorisation failed: {exc}") from None
        self.etas = []

    def ftran(self, v):
        x = self.lu.solve(v)
        for r, idx, val, piv in self.etas:
            xr = x[r] / piv
            if xr != 0.0:
                x[idx] -= xr * val
            x[r] = xr
        return x

    def btran(self, v):
        v = np.array(v, dtype=float)
        for r, idx, val, piv in reversed(self.etas):
            # val excludes the pivot row entry
            v[r] = (v[r] - val @ v[idx]) / piv
        return self.lu.solve(v, trans="T")

    def update(self, r, w):
        idx = np.flatnonzero(w)
        idx = idx[idx != r]
        self.etas.append((r, idx, w[idx].copy(), w[r]))


def _scale(A: sp.csc_matrix):
    absA = abs(A).tocsr()
    rmax = absA.max(axis=1).toarray().ravel()
    rs = np.where(rmax > 0, 1.0 / np.where(rmax > 0, rmax, 1.0), 1.0)
    As = sp.diags(rs) @ A
    cmax = abs(As).tocsc().max(axis=0).toarray().ravel()
    cs = np.where(cmax > 0, 1.0 / np.where(cmax > 0, cmax, 1.0), 1.0)
    return rs, cs


def _unit_columns(rows, signs, m):
    k = len(rows)
    return sp.csc_matrix((np.asarray(signs, dtype=float), (np.asarray(rows, dtype=int),
                                                         np.arange(k))), shape=(m, k))


def solve_lp(p: LinearProgram, basis_hint=None, max_iter: int | None = None,
             refactor_every: int = 100, bland_after: int = 50, scale: bool = True,
             record_pivots: bool = False, presolve: bool = True) -> LpSolution:
    """Solve ``p`` with the two-phase revised simplex method.

    ``basis_hint`` optionally maps each row to a structural column
    (``-1`` leaves the row to a slack or artificial).  The hinted columns must
    form a nonsingular basis whose structural values are non-negative;
    otherwise the plain slack/artificial start is used.

    With ``presolve`` forcing and empty rows are removed first (see
    ``_presolve``); recorded pivots then index the reduced program.
    """
    kw = dict(max_iter=max_iter, refactor_every=refactor_every, bland_after=bland_after,
              scale=scale, record_pivots=record_pivots)
    if not presolve:
        return _simplex(p, basis_hint, **kw)
    pre = _presolve(p)
    if pre.infeasible:
        return LpSolution(INFEASIBLE)
    m, n = p.shape
    rows, cols = pre.rows, pre.cols
    if rows.size == m and cols.size == n:
        return _simplex(p, basis_hint, **kw)
    sub = LinearProgram(p.c[cols], p.A[rows][:, cols], p.b[rows],
                        tuple(p.senses[i] for i in rows), p.maximize)
    hint = None
    if basis_hint is not None:
        new_col = -np.ones(n, dtype=int)
        new_col[cols] = np.arange(cols.size)
        h = np.asarray(basis_hint, dtype=int)[rows]
        hint = np.where(h >= 0, new_col[np.maximum(h, 0)], -1)
    if sub.shape[1] == 0 or sub.shape[0] == 0:
        sol = _trivial_solution(sub)
    else:
        sol = _simplex(sub, hint, **kw)
    if sol.status != OPTIMAL:
        return sol
    x = np.zeros(n)
    x[cols] = sol.x
    y = np.zeros(m)
    y[rows] = sol.duals
    _postsolve_duals(p, pre, y)
    sol.x, sol.duals = x, y
    sol.objective = float(p.c @ x)
    return sol


@dataclass
class _Presolved:
    rows: np.ndarray
    cols: np.ndarray
    # forcing rows in removal order, each with the columns it fixed at zero
    forcing: list
    infeasible: bool = False


def _presolve(p: LinearProgram) -> _Presolved:
    """Remove rows that pin all their variables to zero.

    A row whose remaining coefficients share one sign and whose right-hand
    side is exactly zero forces those variables to zero (``x >= 0``); an
    equality or a positive ``<=`` row whose sign pattern cannot meet its
    right-hand side proves infeasibility.  Empty rows are dropped or prove
    infeasibility.  Repeats until no rule applies.
    """
    m, n = p.shape
    A = p.A
    R = A.tocsr()
    col_alive = np.ones(n, dtype=bool)
    row_alive = np.ones(m, dtype=bool)
    pos = np.asarray((R > 0).sum(axis=1)).ravel()
    neg = np.asarray((R < 0).sum(axis=1)).ravel()
    is_eq = np.array([s == EQ for s in p.senses], dtype=bool)
    forcing = []
    queue = list(range(m))
    queued = np.ones(m, dtype=bool)
    while queue:
        i = queue.pop()
        queued[i] = False
        if not row_alive[i]:
            continue
        b, np_, nn = p.b[i], pos[i], neg[i]
        if np_ == 0 and nn == 0:
            if (is_eq[i] and abs(b) > FEAS_TOL) or (not is_eq[i] and b < -FEAS_TOL):
                return _Presolved(np.zeros(0, int), np.zeros(0, int), [], True)
            row_alive[i] = False
            continue
        one_sign = np_ == 0 or nn == 0
        if not one_sign:
            continue
        sign = 1.0 if nn == 0 else -1.0
        if is_eq[i]:
            if sign * b < 0:
                return _Presolved(np.zeros(0, int), np.zeros(0, int), [], True)
            if b != 0:
                continue
        else:
            if sign < 0:
                if b >= 0:
                    row_alive[i] = False  # never binding
                continue
            if b < 0:
                return _Presolved(np.zeros(0, int), np.zeros(0, int), [], True)
            if b != 0:
                continue
        lo, hi = R.indptr[i], R.indptr[i + 1]
        js = R.indices[lo:hi]
        js = js[col_alive[js] & (R.data[lo:hi] != 0)]
        row_alive[i] = False
        forcing.append((i, js))
        col_alive[js] = False
        for j in js:
            clo, chi = A.indptr[j], A.indptr[j + 1]
            for k, v in zip(A.indices[clo:chi], A.data[clo:chi]):
                if v > 0:
                    pos[k] -= 1
                elif v < 0:
                    neg[k] -= 1
                if row_alive[k] and not queued[k]:
                    queue.append(k)
                    queued[k] = True
    return _Presolved(np.flatnonzero(row_alive), np.flatnonzero(col_alive), forcing)


def _postsolve_duals(p: LinearProgram, pre: _Presolved, y: np.ndarray) -> None:
    """Duals of forcing rows, chosen so the columns they fixed price out.

    Rows are handled in reverse removal order: a column fixed by a row never
    appears in rows removed before it, so all its other duals are final.
    """
    sign = 1.0 if p.maximize else -1.0
    AT = p.A.T.tocsr()
    for i, js in reversed(pre.forcing):
        if js.size == 0:
            continue
        a = np.asarray(p.A[i, js].todense()).ravel()
        others = AT[js] @ y - a * y[i]
        # need sign * (a * y_i + others - c) >= 0 for every fixed column
        bound = (p.c[js] - others) / a
        up = sign * a > 0
        if np.all(up):
            yi = bound.max()
        else:
            yi = bound.min()
        if p.senses[i] == LE:
            yi = max(0.0, yi) if sign > 0 else min(0.0, yi)
        y[i] = yi


def _trivial_solution(p: LinearProgram) -> LpSolution:
    m, n = p.shape
    if n == 0:
        le = np.array([s == LE for s in p.senses], dtype=bool)
        bad = np.where(le, p.b < -FEAS_TOL, np.abs(p.b) > FEAS_TOL)
        if bad.any():
            return LpSolution(INFEASIBLE)
        return LpSolution(OPTIMAL, x=np.zeros(0), objective=0.0, duals=np.zeros(m))
    # no rows: each variable is either zero or raises the objective without bound
    improving = p.c > 0 if p.maximize else p.c < 0
    if improving.any():
        return LpSolution(UNBOUNDED)
    return LpSolution(OPTIMAL, x=np.zeros(n), objective=0.0, duals=np.zeros(0))


def _simplex(p: LinearProgram, basis_hint=None, max_iter: int | None = None,
             refactor_every: int = 100, bland_after: int = 50, scale: bool = True,
             record_pivots: bool = False) -> LpSolution:
    m, n = p.shape
    if max_iter is None:
        max_iter = 50 * (m + n)
    if scale:
        rs, cs = _scale(p.A)
    else:
        rs, cs = np.ones(m), np.ones(n)
    As = (sp.diags(rs) @ p.A @ sp.diags(cs)).tocsc()
    bs = rs * p.b
    cost_sign = -1.0 if p.maximize else 1.0
    c2 = cost_sign * cs * p.c

    le_rows = np.array([i for i, s in enumerate(p.senses) if s == LE], dtype=int)
    n_slack = le_rows.size
    slack_of_row = -np.ones(m, dtype=int)
    slack_of_row[le_rows] = n + np.arange(n_slack)
    A_ext = sp.hstack([As, _unit_columns(le_rows, np.ones(n_slack), m)], format="csc")

    start = _initial_basis(A_ext, bs, n, slack_of_row, basis_hint)
    basis, art_rows, art_signs = start
    n_art = len(art_rows)
    first_art = n + n_slack
    basis = np.asarray(basis, dtype=int)
    if n_art:
        A_full = sp.hstack([A_ext, _unit_columns(art_rows, art_signs, m)], format="csc")
    else:
        A_full = A_ext
    ncol = A_full.shape[1]
    AT = A_full.T.tocsr()
    indptr, indices, data = A_full.indptr, A_full.indices, A_full.data

    def column(j):
        v = np.zeros(m)
        lo, hi = indptr[j], indptr[j + 1]
        v[indices[lo:hi]] = data[lo:hi]
        return v

    is_art = np.zeros(ncol, dtype=bool)
    is_art[first_art:] = True
    eligible = ~is_art
    is_basic = np.zeros(ncol, dtype=bool)
    is_basic[basis] = True

    fac = _Basis(A_full)
    fac.refactor(basis)
    xB = np.maximum(fac.ftran(bs), 0.0)
    pivots = []
    it_total = 0
    phase1_iters = 0

    def run_phase(cost, phase):
        nonlocal xB, it_total
        since_refactor = 0
        degenerate = 0
        bland = False
        checked_fresh = False
        # entering columns refused for lack of a stable pivot; reset on refactor
        refused = np.zeros(ncol, dtype=bool)
        while True:
            if since_refactor >= refactor_every:
                fac.refactor(basis)
                xB = fac.ftran(bs)
                since_refactor = 0
                refused[:] = False
            y = fac.btran(cost[basis])
            d = cost - AT @ y
            improving = eligible & ~is_basic & (d < -OPT_TOL)
            cand = improving & ~refused
            q = r = -1
            while cand.any():
                if bland:
                    q = int(np.flatnonzero(cand)[0])
                else:
                    q = int(np.argmin(np.where(cand, d, np.inf)))
                w = fac.ftran(column(q))
                r, theta = _ratio_test(xB, w, basis, is_art if phase == 2 else None, bland)
                if r != UNSTABLE:
                    break
                refused[q] = True
                cand[q] = False
            if not cand.any():
                if (since_refactor or refused.any()) and not checked_fresh:
                    # confirm optimality on a fresh factorisation
                    fac.refactor(basis)
                    xB = fac.ftran(bs)
                    since_refactor = 0
                    refused[:] = False
                    checked_fresh = True
                    continue
                if improving.any():
                    raise NumericalError("no numerically stable pivot for improving columns")
                return OPTIMAL
            if it_total >= max_iter:
                return ITERATION_LIMIT
            if r < 0:
                return UNBOUNDED
            checked_fresh = False
            xB = xB - theta * w
            xB[r] = theta
            np.maximum(xB, 0.0, out=xB)
            leaving = basis[r]
            is_basic[leaving] = False
            if is_art[leaving]:
                eligible[leaving] = False
            basis[r] = q
            is_basic[q] = True
            fac.update(r, w)
            since_refactor += 1
            it_total += 1
            if record_pivots:
                pivots.append((phase, q, int(leaving)))
            if theta * -d[q] <= 1e-12:
                degenerate += 1
                if degenerate >= bland_after and not bland:
                    bland = True
                    log.debug("switching to Bland's rule after %d degenerate pivots", degenerate)
            else:
                degenerate = 0
                bland = False

    def finish(status):
        return LpSolution(status, iterations=it_total, phase1_iterations=phase1_iters,
                          pivots=pivots)

    if n_art:
        cost1 = np.zeros(ncol)
        cost1[first_art:] = 1.0
        status = run_phase(cost1, 1)
        phase1_iters = it_total
        if status == ITERATION_LIMIT:
            return finish(status)
        fac.refactor(basis)
        xB = fac.ftran(bs)
        infeas = float(np.sum(np.where(is_art[basis], np.abs(xB), 0.0)))
        if infeas > FEAS_TOL * (1.0 + float(np.abs(bs).max(initial=0.0))):
            return finish(INFEASIBLE)
        _drive_out_artificials(fac, basis, is_basic, is_art, eligible, AT, column, xB)
        fac.refactor(basis)
        xB = np.maximum(fac.ftran(bs), 0.0)

    cost2 = np.zeros(ncol)
    cost2[:n] = c2
    status = run_phase(cost2, 2)
    if status != OPTIMAL:
        return finish(status)

    fac.refactor(basis)
    xB = fac.ftran(bs)
    xs = np.zeros(ncol)
    xs[basis] = xB
    x = cs * xs[:n]
    x[(x < 0) & (x > -FEAS_TOL)] = 0.0
    y_s = fac.btran(cost2[basis])
    duals = cost_sign * rs * y_s
    sol = finish(OPTIMAL)
    sol.x = x
    sol.objective = float(p.c @ x)
    sol.duals = duals
    return sol


UNSTABLE = -2


def _ratio_test(xB, w, basis, locked_art, bland):
    """Leaving row and step length, ``-1`` if unbounded, ``UNSTABLE`` if the
    only blocking rows have pivots too small relative to the column."""
    stable = max(PIVOT_TOL, REL_PIVOT_TOL * float(np.abs(w).max(initial=0.0)))
    pos = w > PIVOT_TOL
    if locked_art is not None:
        # artificials still basic in phase 2 must stay at zero
        art_basic = locked_art[basis]
        locked = art_basic & (np.abs(w) > PIVOT_TOL)
        if locked.any():
            idx = np.flatnonzero(locked)
            r = int(idx[np.argmax(np.abs(w[idx]))])
            return (r, 0.0) if abs(w[r]) >= stable else (UNSTABLE, 0.0)
        pos &= ~art_basic
    if not pos.any():
        return -1, 0.0
    idx = np.flatnonzero(pos)
    xb = np.maximum(xB[idx], 0.0)
    wi = w[idx]
    ratios = xb / wi
    if bland:
        tmin = ratios.min()
        ties = idx[(ratios <= tmin + 1e-12 * (1.0 + tmin)) & (wi >= stable)]
        if ties.size == 0:
            return UNSTABLE, 0.0
        r = int(ties[np.argmin(basis[ties])])
        return r, float(max(xB[r], 0.0) / w[r])
    tmax = ((xb + FEAS_TOL) / wi).min()
    ok = ratios <= tmax
    r = int(idx[ok][np.argmax(wi[ok])])
    if w[r] < stable:
        return UNSTABLE, 0.0
    return r, float(max(xB[r], 0.0) / w[r])


def _drive_out_artificials(fac, basis, is_basic, is_art, eligible, AT, column, xB):
    m = basis.shape[0]
    for r in range(m):
        if not is_art[basis[r]]:
            continue
        e = np.zeros(m)
        e[r] = 1.0
        row = AT @ fac.btran(e)
        row[~eligible | is_basic] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) <= PIVOT_TOL:
            continue  # redundant row
        w = fac.ftran(column(j))
        theta = xB[r] / w[r]
        xB -= theta * w
        xB[r] = theta
        leaving = basis[r]
        is_basic[leaving] = False
        eligible[leaving] = False
        basis[r] = j
        is_basic[j] = True
        fac.update(r, w)


def _initial_basis(A_ext, bs, n, slack_of_row, hint):
    """Starting basis and the artificial columns it needs."""
    m = bs.shape[0]
    if hint is not None:
        start = _try_hint(A_ext, bs, n, slack_of_row, np.asarray(hint, dtype=int))
        if start is not None:
            return start
        log.debug("basis hint rejected; using slack/artificial start")
    basis = []
    art_rows, art_signs = [], []
    first_art = A_ext.shape[1]
    for i in range(m):
        if slack_of_row[i] >= 0 and bs[i] >= 0:
            basis.append(int(slack_of_row[i]))
        else:
            basis.append(first_art + len(art_rows))
            art_rows.append(i)
            art_signs.append(1.0 if bs[i] >= 0 else -1.0)
    return basis, art_rows, art_signs


def _try_hint(A_ext, bs, n, slack_of_row, hint):
    m = bs.shape[0]
    if hint.shape != (m,) or np.any(hint >= n):
        return None
    struct = hint >= 0
    if np.unique(hint[struct]).size != int(struct.sum()):
        return None
    unit_rows = np.flatnonzero(~struct)
    B = sp.hstack([A_ext[:, hint[struct]], _unit_columns(unit_rows, np.ones(unit_rows.size), m)],
                  format="csc")
    try:
        x = splu(B, permc_spec="COLAMD").solve(bs.copy())
    except RuntimeError:
        return None
    k = int(struct.sum())
    if not np.all(np.isfinite(x)) or np.any(x[:k] < -FEAS_TOL):
        return None
    basis = [0] * m
    for pos, i in enumerate(np.flatnonzero(struct)):
        basis[i] = int(hint[i])
    art_rows, art_signs = [], []
    first_art = A_ext.shape[1]
    for pos, i in enumerate(unit_rows):
        v = x[k + pos]
        if slack_of_row[i] >= 0 and v >= 0:
            basis[i] = int(slack_of_row[i])
        else:
            basis[i] = first_art + len(art_rows)
            art_rows.append(int(i))
            art_signs.append(1.0 if v >= 0 else -1.0)
    return basis, art_rows, art_signs
