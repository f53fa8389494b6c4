"""Independent reference computations used by the tests.

Nothing here calls the package's solvers: values come from brute-force
enumeration, HiGHS, or mpmath.
"""

from __future__ import annotations

import itertools

import mpmath
import numpy as np
import scipy.optimize as so


def trajectories(mdp, policy_rules):
    """Yield ``(prob, states, actions)`` for every positive-probability path
    under a Markov policy given as an array ``(T, S, A)``."""
    T, S = mdp.horizon, mdp.n_states
    A = mdp.n_actions

    def rec(t, s, prob, states, actions):
        if t == T:
            yield prob, states, actions
            return
        P = mdp.P(t)
        for a in range(A):
            pa = policy_rules[t, s, a]
            if pa == 0:
                continue
            for s2 in range(S):
                p = P[s, a, s2]
                if p > 0:
                    yield from rec(t + 1, s2, prob * pa * p, states + [s2], actions + [a])

    for s0 in range(S):
        if mdp.p0[s0] > 0:
            yield from rec(0, s0, mdp.p0[s0], [s0], [])


def path_value(mdp, prob_states_actions):
    total = 0.0
    for prob, states, actions in prob_states_actions:
        r = sum(mdp.g(t)[states[t], actions[t]] for t in range(mdp.horizon))
        total += prob * (r + mdp.terminal_reward[states[-1]])
    return total


def brute_value(mdp, rules) -> float:
    return path_value(mdp, trajectories(mdp, rules))


def brute_alarm_probability(mdp, alarm_mask, rules, i: int) -> float:
    return sum(p for p, st, _ in trajectories(mdp, rules) if sum(alarm_mask[s] for s in st) >= i)


def brute_best_deterministic_markov(mdp) -> float:
    """Exhaustive search over deterministic Markov policies."""
    T, S, A = mdp.horizon, mdp.n_states, mdp.n_actions
    mask = mdp.action_mask()
    choices = [np.flatnonzero(mask[s]) for s in range(S)]
    best = -np.inf
    for combo in itertools.product(*[choices[s] for _ in range(T) for s in range(S)]):
        acts = np.array(combo).reshape(T, S)
        rules = np.zeros((T, S, A))
        np.put_along_axis(rules, acts[..., None], 1.0, axis=-1)
        best = max(best, brute_value(mdp, rules))
    return best


def highs(p):
    """Solve a package ``LinearProgram`` with HiGHS: ``(status, objective)``."""
    A = p.A.tocsr()
    eq = np.array([s == "=" for s in p.senses], dtype=bool)
    kw = {}
    if (~eq).any():
        kw.update(A_ub=A[~eq], b_ub=p.b[~eq])
    if eq.any():
        kw.update(A_eq=A[eq], b_eq=p.b[eq])
    c = -p.c if p.maximize else p.c
    res = so.linprog(c, bounds=(0, None), method="highs", **kw)
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status, "other")
    obj = None if res.fun is None else (-res.fun if p.maximize else res.fun)
    return status, obj


def gaussian_mass_mp(mean, sigma, lower, upper, dps: int = 50) -> float:
    with mpmath.workdps(dps):
        def cdf(x):
            if x == float("inf"):
                return mpmath.mpf(1)
            if x == float("-inf"):
                return mpmath.mpf(0)
            return mpmath.ncdf((mpmath.mpf(x) - mean) / sigma)
        return float(cdf(upper) - cdf(lower))
