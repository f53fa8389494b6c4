"""Occupation-measure programs for chance-constrained augmented MDPs.

Besides the main solve this module holds the exact reference computations
used to check it: the LP over the unfolded history tree (optimum over all
history-dependent policies) and the best Markov policy on the unaugmented
state space.
"""

from __future__ import annotations

import itertools
import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize

from .augment import (
    AlarmRegion,
    AugmentedMdp,
    alarm_counts,
    augment,
    lift_policy,
)
from .lp import EQ, LE, OPTIMAL, LinearProgram, check_solution, solve_lp
from .mdp import (
    DEFAULT_NODE_BUDGET,
    FiniteMdp,
    MarkovPolicy,
    backward_induction,
    enumerate_history_tree,
    forward_marginals,
    marginal_value,
    policy_value_functions,
)

log = logging.getLogger(__name__)

REACH_TOL = 1e-12
CHECK_TOL = 1e-7
DEFAULT_VARIABLE_BUDGET = 10**6


class InfeasibleConstraints(RuntimeError):
    """No policy meets the alarm-probability budgets."""


class SolverFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ConstraintSpec:
    """Budgets ``Delta_i`` on ``P(at least i alarms)``, ``i = 1..len``."""

    deltas: tuple

    def __init__(self, deltas):
        if np.isscalar(deltas):
            deltas = (deltas,)
        deltas = tuple(float(d) for d in deltas)
        if not deltas:
            raise ValueError("at least one budget is required")
        if any(not 0.0 <= d <= 1.0 for d in deltas):
            raise ValueError("budgets must lie in [0, 1]")
        object.__setattr__(self, "deltas", deltas)

    def __len__(self):
        return len(self.deltas)


@dataclass(eq=False)
class OccupancyMeasure:
    """``sa[t, s, a]`` for ``t < T`` and ``terminal[s]``."""

    sa: np.ndarray
    terminal: np.ndarray

    def flow_residual(self, mdp: FiniteMdp) -> float:
        """Largest violation of initial, flow and terminal balance."""
        out = np.abs(self.sa[0].sum(axis=1) - mdp.p0).max()
        T = mdp.horizon
        for t in range(T):
            inflow = np.einsum("sa,sab->b", self.sa[t], mdp.P(t))
            nxt = self.sa[t + 1].sum(axis=1) if t + 1 < T else self.terminal
            out = max(out, np.abs(nxt - inflow).max())
        return float(out)


@dataclass(eq=False)
class OccupancyLp:
    """A built occupancy program with its variable maps.

    ``col_sa[t, s, a]`` / ``col_T[s]`` give LP column indices (``-1`` when the
    variable was pruned as unreachable); ``offset`` is a constant added to
    the LP objective to recover the impact.
    """

    program: LinearProgram
    mdp: FiniteMdp
    col_sa: np.ndarray
    col_T: np.ndarray
    row_of: np.ndarray
    row_T: np.ndarray
    n_constraint_rows: int
    offset: float = 0.0

    def occupancy(self, x) -> OccupancyMeasure:
        x = np.maximum(np.asarray(x, dtype=float), 0.0)
        sa = np.where(self.col_sa >= 0, x[np.maximum(self.col_sa, 0)], 0.0)
        term = np.where(self.col_T >= 0, x[np.maximum(self.col_T, 0)], 0.0)
        return OccupancyMeasure(sa, term)

    def basis_hint(self, actions) -> np.ndarray:
        """Basis of the deterministic policy ``actions[t, s]``.

        The chosen columns make the flow block unit lower-triangular, so the
        basis is nonsingular and its values are that policy's occupancies.
        """
        m = self.program.shape[0]
        hint = -np.ones(m, dtype=int)
        T, S = actions.shape
        mask = self.mdp.action_mask()
        for t in range(T):
            for s in np.flatnonzero(self.row_of[t] >= 0):
                a = actions[t, s]
                if not mask[s, a] or self.col_sa[t, s, a] < 0:
                    a = int(np.flatnonzero(mask[s])[0])
                hint[self.row_of[t, s]] = self.col_sa[t, s, a]
        rows = self.row_T >= 0
        hint[self.row_T[rows]] = self.col_T[rows]
        return hint


def reachable_states(mdp: FiniteMdp) -> np.ndarray:
    """``reach[t, s]``: state ``s`` has positive probability at ``t`` under
    some policy."""
    T = mdp.horizon
    mask = mdp.action_mask()
    reach = np.zeros((T + 1, mdp.n_states), dtype=bool)
    reach[0] = mdp.p0 > 0
    for t in range(T):
        P = mdp.P(t)
        live = reach[t][:, None] & mask
        reach[t + 1] = (P[live] > 0).any(axis=0)
    return reach


def _occupancy_program(mdp: FiniteMdp, terminal_rows, rhs, *, keep=None, exit_values=None,
                       exit_rows=None, variable_budget=DEFAULT_VARIABLE_BUDGET,
                       maximize=True) -> OccupancyLp:
    """Occupancy LP of ``mdp`` with extra ``terminal_rows @ rho_T <= rhs``.

    ``keep`` restricts the modelled states; transitions leaving the kept set
    are paid ``exit_values[t+1, s']`` in the objective and charged to the
    constraint rows listed by ``exit_rows[s']`` (a boolean matrix
    ``(n_rows, S)``).
    """
    T, S, A = mdp.horizon, mdp.n_states, mdp.n_actions
    mask = mdp.action_mask()
    reach = reachable_states(mdp)
    if keep is not None:
        reach &= keep[None, :]
    n_sa = int(sum((reach[t][:, None] & mask).sum() for t in range(T)))
    n_var = n_sa + int(reach[T].sum())
    if n_var > variable_budget:
        raise SolverFailure(f"occupancy LP needs {n_var} variables (budget {variable_budget})")

    col_sa = -np.ones((T, S, A), dtype=int)
    live = reach[:T, :, None] & mask[None]
    col_sa[live] = np.arange(n_sa)
    col_T = -np.ones(S, dtype=int)
    col_T[reach[T]] = n_sa + np.arange(int(reach[T].sum()))
    row_of = -np.ones((T, S), dtype=int)
    n_flow = int(reach[:T].sum())
    row_of[reach[:T]] = np.arange(n_flow)
    row_T = -np.ones(S, dtype=int)
    row_T[reach[T]] = n_flow + np.arange(int(reach[T].sum()))
    n_bal = n_flow + int(reach[T].sum())
    k = terminal_rows.shape[0]

    rows, cols, vals = [], [], []
    c = np.zeros(n_var)
    b = np.zeros(n_bal + k)
    offset = 0.0
    b[n_bal:] = rhs
    # own-state entries of the balance rows
    for t in range(T):
        ss, aa = np.nonzero(live[t])
        rows.append(row_of[t, ss])
        cols.append(col_sa[t, ss, aa])
        vals.append(np.ones(ss.size))
        c[col_sa[t, ss, aa]] = mdp.g(t)[ss, aa]
    sT = np.flatnonzero(reach[T])
    rows.append(row_T[sT])
    cols.append(col_T[sT])
    vals.append(np.ones(sT.size))
    c[col_T[sT]] = mdp.terminal_reward[sT]
    if k:
        tr, ts = np.nonzero(terminal_rows[:, sT])
        rows.append(n_bal + tr)
        cols.append(col_T[sT[ts]])
        vals.append(np.asarray(terminal_rows[:, sT], dtype=float)[tr, ts])
    # initial mass
    p0 = mdp.p0
    for s in np.flatnonzero(p0 > 0):
        if reach[0, s]:
            b[row_of[0, s] if T > 0 else row_T[s]] = p0[s]
        else:
            offset += p0[s] * exit_values[0, s]
            if k:
                b[n_bal:] -= p0[s] * exit_rows[:, s]
    # transitions
    for t in range(T):
        P = mdp.P(t)
        ss, aa, s2 = np.nonzero(P * live[t][:, :, None])
        p = P[ss, aa, s2]
        src = col_sa[t, ss, aa]
        inside = reach[t + 1, s2]
        dst_rows = row_of[t + 1, s2[inside]] if t + 1 < T else row_T[s2[inside]]
        rows.append(dst_rows)
        cols.append(src[inside])
        vals.append(-p[inside])
        out = ~inside
        if out.any():
            np.add.at(c, src[out], p[out] * exit_values[t + 1, s2[out]])
            if k:
                er, ei = np.nonzero(exit_rows[:, s2[out]])
                rows.append(n_bal + er)
                cols.append(src[out][ei])
                vals.append(p[out][ei])
    A = sp.csc_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n_bal + k, n_var))
    senses = (EQ,) * n_bal + (LE,) * k
    prog = LinearProgram(c, A, b, senses, maximize=maximize)
    return OccupancyLp(prog, mdp, col_sa, col_T, row_of, row_T, k, offset)


def build_occupancy_lp(aug: AugmentedMdp, spec: ConstraintSpec, **kw) -> OccupancyLp:
    """Full occupancy LP: ``P(f_T >= i) <= Delta_i`` for every budget."""
    if len(spec) > aug.M:
        raise ValueError("more budgets than counted alarm levels")
    flags = aug.flag_of()
    rows = np.stack([flags >= i for i in range(1, len(spec) + 1)])
    return _occupancy_program(aug.lifted, rows, np.array(spec.deltas), **kw)


def build_reduced_lp(aug: AugmentedMdp, spec: ConstraintSpec, top_values, **kw) -> OccupancyLp:
    """Occupancy LP over flag layers below ``M``.

    Mass entering layer ``M`` is paid the unconstrained value ``top_values``
    (``(T+1, S)`` on base states) and counts towards every budget.
    """
    if len(spec) > aug.M:
        raise ValueError("more budgets than counted alarm levels")
    flags = aug.flag_of()
    keep = flags < aug.M
    rows = np.stack([flags >= i for i in range(1, len(spec) + 1)])
    exit_values = np.tile(top_values, (1, aug.n_flags))
    return _occupancy_program(aug.lifted, rows & keep, np.array(spec.deltas), keep=keep,
                              exit_values=exit_values, exit_rows=rows, **kw)


def extract_policy(occ: OccupancyMeasure, fallback_actions, mask=None,
                   tol: float = REACH_TOL) -> MarkovPolicy:
    """``pi_t(a|s) = rho_t(s,a) / sum_a rho_t(s,a)``; states with mass below
    ``tol`` take the deterministic ``fallback_actions[t, s]``."""
    sa = np.maximum(occ.sa, 0.0)
    if mask is not None:
        sa = np.where(mask[None], sa, 0.0)
    tot = sa.sum(axis=2, keepdims=True)
    T, S, A = sa.shape
    fb = np.zeros((T, S, A))
    np.put_along_axis(fb, np.asarray(fallback_actions)[..., None], 1.0, axis=-1)
    rules = np.where(tot > tol, sa / np.where(tot > tol, tot, 1.0), fb)
    rules /= rules.sum(axis=2, keepdims=True)
    return MarkovPolicy(rules)


@dataclass(eq=False)
class SolveReport:
    value: float
    policy: MarkovPolicy
    alarm_probabilities: np.ndarray
    status: str
    residuals: dict
    timing: dict
    lp_objective: float = float("nan")
    occupancy: OccupancyMeasure | None = field(default=None, repr=False)
    duals: np.ndarray | None = field(default=None, repr=False)
    path: str = "full"

    def as_dict(self) -> dict:
        return dict(
            value=float(self.value),
            status=self.status,
            alarm_probabilities=[float(p) for p in self.alarm_probabilities],
            residuals={k: float(v) for k, v in self.residuals.items()},
            timing={k: float(v) for k, v in self.timing.items()},
            path=self.path,
        )

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def flag_profile(aug: AugmentedMdp, policy: MarkovPolicy) -> np.ndarray:
    """Exact ``P(f_t >= i)`` as an array ``(T+1, M)`` (column ``i-1``)."""
    marg = forward_marginals(aug.lifted, policy)
    flags = aug.flag_of()
    return np.stack([marg.state[:, flags >= i].sum(axis=1) for i in range(1, aug.M + 1)], axis=1)


def _verified_report(aug, spec, policy, lp_value, sol, lp, t_build, t_solve, path):
    marg = forward_marginals(aug.lifted, policy)
    exact = marginal_value(aug.lifted, marg)
    flags = aug.flag_of()
    probs = np.array([marg.state[-1, flags >= i].sum() for i in range(1, aug.M + 1)])
    if abs(exact - lp_value) > CHECK_TOL:
        raise SolverFailure(f"extracted policy value {exact:.12g} != LP optimum {lp_value:.12g}")
    over = probs[:len(spec)] - np.array(spec.deltas)
    if np.any(over > CHECK_TOL):
        raise SolverFailure(f"extracted policy violates budgets by {over.max():.3g}")
    res = check_solution(lp.program, sol)
    residuals = res.as_dict()
    if path == "full":
        residuals["flow"] = lp.occupancy(sol.x).flow_residual(aug.lifted)
    residuals["value_mismatch"] = abs(exact - lp_value)
    timing = dict(build=t_build, solve=t_solve, iterations=sol.iterations)
    return SolveReport(exact, policy, probs, sol.status, residuals, timing, lp_value,
                       lp.occupancy(sol.x), sol.duals, path)


def solve_constrained(aug: AugmentedMdp, spec: ConstraintSpec, **lp_kw) -> SolveReport:
    """Maximise impact subject to ``P(f_T >= i) <= Delta_i`` over augmented
    Markov policies."""
    t0 = time.perf_counter()
    bi = backward_induction(aug.lifted)
    lp = build_occupancy_lp(aug, spec)
    t1 = time.perf_counter()
    sol = solve_lp(lp.program, basis_hint=lp.basis_hint(bi.actions), **lp_kw)
    t2 = time.perf_counter()
    _raise_on_status(sol)
    policy = extract_policy(lp.occupancy(sol.x), bi.actions, aug.lifted.allowed)
    return _verified_report(aug, spec, policy, sol.objective + lp.offset, sol, lp,
                            t1 - t0, t2 - t1, "full")


def solve_reduced(base: FiniteMdp, alarms: AlarmRegion, spec: ConstraintSpec, M: int = 1,
                  aug: AugmentedMdp | None = None, **lp_kw) -> SolveReport:
    """As ``solve_constrained`` but with the top flag layer fixed to the
    unconstrained optimal policy, so only layers ``f < M`` enter the LP."""
    t0 = time.perf_counter()
    if aug is None:
        aug = augment(base, alarms, M)
    bi = backward_induction(base)
    lp = build_reduced_lp(aug, spec, bi.value_functions)
    t1 = time.perf_counter()
    top_acts = np.tile(bi.actions, (1, aug.n_flags))
    if lp.program.shape[1] == 0:
        x = np.zeros(0)
        if np.any(lp.program.b < -CHECK_TOL):
            raise InfeasibleConstraints("initial alarm mass already exceeds the budget")
        from .lp import LpSolution
        sol = LpSolution(OPTIMAL, x=x, objective=0.0, duals=np.zeros(lp.program.shape[0]))
    else:
        sol = solve_lp(lp.program, basis_hint=lp.basis_hint(top_acts), **lp_kw)
    t2 = time.perf_counter()
    _raise_on_status(sol)
    occ = lp.occupancy(sol.x)
    policy = extract_policy(occ, top_acts, aug.lifted.allowed)
    rules = np.array(policy.rules)
    top = aug.flag_of() == aug.M
    rules[:, top] = lift_policy(aug, bi.policy).rules[:, top]
    return _verified_report(aug, spec, MarkovPolicy(rules), sol.objective + lp.offset, sol, lp,
                            t1 - t0, t2 - t1, "reduced")


def _raise_on_status(sol):
    if sol.status == "infeasible":
        raise InfeasibleConstraints("no policy satisfies the alarm budgets")
    if sol.status != OPTIMAL:
        raise SolverFailure(f"LP solve ended with status {sol.status}")


def min_alarm_probability(aug: AugmentedMdp, level: int = 1) -> float:
    """Smallest achievable ``P(f_T >= level)`` (auxiliary LP)."""
    flags = aug.flag_of()
    L = aug.lifted
    zero = FiniteMdp(L.horizon, L.p0, L.kernel, np.zeros_like(L.stage_reward),
                     -(flags >= level).astype(float), L.allowed)
    lp = _occupancy_program(zero, np.zeros((0, L.n_states)), np.zeros(0))
    sol = solve_lp(lp.program)
    _raise_on_status(sol)
    return -sol.objective


def top_layer_value_gap(aug: AugmentedMdp, policy: MarkovPolicy, base_values=None) -> float:
    """``max |V_t(s, M) - V^u_t(s)|`` between the policy's value on the top
    flag layer and the unconstrained optimal value."""
    if base_values is None:
        base_values = backward_induction(aug.base).value_functions
    V = policy_value_functions(aug.lifted, policy)
    top = aug.flag_of() == aug.M
    return float(np.abs(V[:, top] - base_values).max())


# -- exact references ---------------------------------------------------------


def tree_lp(base: FiniteMdp, alarms: AlarmRegion, spec: ConstraintSpec,
            node_budget: int = DEFAULT_NODE_BUDGET):
    """Occupancy LP on the unfolded history tree.

    One variable per (internal history, action); leaf masses are substituted
    out.  Budget row ``i`` charges every transition into a leaf whose path
    carries at least ``i`` alarms.
    """
    tree = enumerate_history_tree(base, node_budget)
    T = tree.horizon
    mask = base.action_mask()
    counts = alarm_counts(tree, alarms)
    inner = np.flatnonzero(tree.time < T)
    row = -np.ones(tree.n_nodes, dtype=int)
    row[inner] = np.arange(inner.size)
    var = {}
    for k in inner:
        for a in np.flatnonzero(mask[tree.state[k]]):
            var[(int(k), int(a))] = len(var)
    n, m, L = len(var), inner.size, len(spec)
    rows, cols, vals = [], [], []
    c = np.zeros(n)
    b = np.zeros(m + L)
    b[m:] = spec.deltas
    for (k, a), j in var.items():
        s, t = tree.state[k], tree.time[k]
        rows.append(row[k])
        cols.append(j)
        vals.append(1.0)
        c[j] += base.g(t)[s, a]
        for ch in tree.children[(k, a)]:
            p = tree.step_prob[ch]
            if tree.time[ch] < T:
                rows.append(row[ch])
                cols.append(j)
                vals.append(-p)
            else:
                c[j] += p * base.terminal_reward[tree.state[ch]]
                for i in range(1, L + 1):
                    if counts[ch] >= i:
                        rows.append(m + i - 1)
                        cols.append(j)
                        vals.append(p)
    roots = np.flatnonzero(tree.parent < 0)
    b[row[roots]] = tree.step_prob[roots]
    A = sp.csc_matrix((vals, (rows, cols)), shape=(m + L, n))
    return LinearProgram(c, A, b, (EQ,) * m + (LE,) * L, maximize=True), tree, var


def tree_oracle(base: FiniteMdp, alarms: AlarmRegion, spec: ConstraintSpec, M: int | None = None,
                node_budget: int = DEFAULT_NODE_BUDGET, **lp_kw) -> float:
    """Exact optimum over history-dependent randomised policies."""
    if M is not None and len(spec) > M:
        raise ValueError("more budgets than counted alarm levels")
    prog, _, _ = tree_lp(base, alarms, spec, node_budget)
    sol = solve_lp(prog, **lp_kw)
    _raise_on_status(sol)
    return sol.objective


@dataclass
class MarkovOracleResult:
    value: float
    policy: MarkovPolicy | None
    method: str
    alarm_probability: float = float("nan")


def _alarm_absorbing(mdp: FiniteMdp, alarms: AlarmRegion) -> bool:
    amask = alarms.mask
    mask = mdp.action_mask()
    for t in range(mdp.horizon):
        P = mdp.P(t)
        for s in np.flatnonzero(amask):
            rows = P[s][mask[s]]
            if np.any(rows[:, ~amask] > 0):
                return False
    return True


def markov_restricted_oracle(base: FiniteMdp, alarms: AlarmRegion, delta: float,
                             resolution: int = 200, max_grid: int = 10**6) -> MarkovOracleResult:
    """Best Markov policy on the unaugmented state space under
    ``P(some alarm) <= delta``.

    Exact LP when the alarm region is absorbing; otherwise an exhaustive grid
    over the randomisation at every reachable decision point (step
    ``1/resolution``) followed by an SLSQP polish of the best grid point.
    """
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    bi = backward_induction(base)
    if len(alarms) == 0:
        return MarkovOracleResult(bi.value, bi.policy, "unconstrained", 0.0)
    amask = alarms.mask
    if _alarm_absorbing(base, alarms):
        lp = _occupancy_program(base, amask[None, :].astype(float), np.array([delta]))
        sol = solve_lp(lp.program, basis_hint=lp.basis_hint(bi.actions))
        _raise_on_status(sol)
        pol = extract_policy(lp.occupancy(sol.x), bi.actions, base.allowed)
        return MarkovOracleResult(sol.objective, pol, "absorbing-lp",
                                  float(lp.occupancy(sol.x).terminal[amask].sum()))

    aug = augment(base, alarms, 1)
    mask = base.action_mask()
    reach = reachable_states(base)
    points = [(t, s) for t in range(base.horizon) for s in np.flatnonzero(reach[t])
              if mask[s].sum() > 1]
    arity = [int(mask[s].sum()) for _, s in points]
    grids = [_simplex_grid(k, resolution) for k in arity]
    size = int(np.prod([g.shape[0] for g in grids], dtype=float)) if grids else 1
    if size > max_grid:
        raise SolverFailure(f"Markov policy grid of {size} points exceeds {max_grid}")
    flags = aug.flag_of()

    def make_rules(thetas):
        rules = np.array(bi.policy.rules)
        for (t, s), th in zip(points, thetas):
            rules[t, s] = 0.0
            rules[t, s, np.flatnonzero(mask[s])] = th
        return rules

    def evaluate(rules):
        pol = MarkovPolicy(rules)
        marg = forward_marginals(aug.lifted, lift_policy(aug, pol))
        return marginal_value(aug.lifted, marg), float(marg.state[-1, flags >= 1].sum())

    best = (-np.inf, None, np.nan)
    for combo in itertools.product(*grids):
        rules = make_rules(combo)
        val, prob = evaluate(rules)
        if prob <= delta + 1e-12 and val > best[0]:
            best = (val, rules, prob)
    if best[1] is None:
        raise InfeasibleConstraints("no Markov policy on the grid meets the budget")
    method = "grid"
    if points:
        # polish on the free coordinates (all but the last action of each point)
        x0 = np.concatenate([best[1][t, s, np.flatnonzero(mask[s])][:-1] for t, s in points])
        splits = np.cumsum([k - 1 for k in arity])[:-1]

        def unpack(x):
            return [np.append(p, 1.0 - p.sum()) for p in np.split(np.clip(x, 0, 1), splits)]

        cons = [dict(type="ineq", fun=lambda x: delta - evaluate(make_rules(unpack(x)))[1])]
        cons += [dict(type="ineq", fun=lambda x, lo=lo, hi=hi: 1.0 - x[lo:hi].sum())
                 for lo, hi in zip(np.concatenate([[0], splits]), np.concatenate([splits, [x0.size]]))]
        res = minimize(lambda x: -evaluate(make_rules(unpack(x)))[0], x0, method="SLSQP",
                       bounds=[(0.0, 1.0)] * x0.size, constraints=cons,
                       options=dict(ftol=1e-15, maxiter=500))
        rules = make_rules(unpack(res.x))
        val, prob = evaluate(rules)
        if prob <= delta + 1e-12 and val > best[0]:
            best = (val, rules, prob)
            method = "grid+slsqp"
    return MarkovOracleResult(float(best[0]), MarkovPolicy(best[1]), method, best[2])


def _simplex_grid(k: int, resolution: int) -> np.ndarray:
    pts = [c for c in itertools.product(range(resolution + 1), repeat=k - 1) if sum(c) <= resolution]
    arr = np.array(pts, dtype=float).reshape(-1, k - 1) / resolution
    return np.hstack([arr, 1.0 - arr.sum(axis=1, keepdims=True)])


# -- analytic tracking controller -----------------------------------------------


@dataclass(frozen=True)
class LqrPolicy:
    """Affine rules ``a_t = -K_t (z_t - z_ref)`` for the scalar integrator."""

    gains: np.ndarray
    z_ref: float

    def action(self, t: int, z, a_min: float = -np.inf, a_max: float = np.inf):
        return np.clip(-self.gains[t] * (np.asarray(z) - self.z_ref), a_min, a_max)


def lqr_policy(q_weight: float, r_weight: float, z_ref: float, horizon: int) -> LqrPolicy:
    """Finite-horizon Riccati recursion for ``z' = z + a + w`` with stage cost
    ``q (z - z_ref)^2 + r a^2`` and terminal cost ``q (z_T - z_ref)^2``."""
    if q_weight < 0 or r_weight < 0:
        raise ValueError("weights must be non-negative")
    if q_weight == 0 and r_weight == 0:
        raise ValueError("at least one weight must be positive")
    P = float(q_weight)
    K = np.zeros(horizon)
    for t in range(horizon - 1, -1, -1):
        denom = r_weight + P
        K[t] = P / denom if denom > 0 else 0.0
        P = q_weight + (r_weight * P / denom if denom > 0 else 0.0)
    return LqrPolicy(K, float(z_ref))
