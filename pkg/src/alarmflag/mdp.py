"""Finite-horizon finite MDPs: forward propagation, policy evaluation,
backward induction and history-tree enumeration.

Rewards are maximised (they represent attack impact).  Decisions are taken at
``t = 0..T-1``; the terminal reward is collected on the state at ``t = T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-12
DEFAULT_NODE_BUDGET = 10**6


class HorizonMismatch(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when an exact enumeration would exceed its node budget."""


def _check_prob_rows(arr, what, mask=None):
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    if np.any(arr < 0):
        raise ValueError(f"{what} has negative entries")
    sums = arr.sum(axis=-1)
    ok = np.abs(sums - 1.0) <= PROB_TOL
    if mask is not None:
        ok = ok | ~mask
    if not np.all(ok):
        raise ValueError(f"{what} rows must sum to 1 (max error {np.max(np.abs(sums - 1)):.3g})")


@dataclass(frozen=True, eq=False)
class FiniteMdp:
    """Finite MDP over ``T`` decision steps.

    ``kernel`` is ``(S, A, S)`` (time-invariant) or ``(T, S, A, S)``;
    ``stage_reward`` is ``(S, A)`` or ``(T, S, A)``.  ``allowed`` optionally
    restricts the actions available in each state; kernel rows of disallowed
    pairs are ignored.
    """

    horizon: int
    p0: np.ndarray
    kernel: np.ndarray
    stage_reward: np.ndarray
    terminal_reward: np.ndarray
    allowed: np.ndarray | None = None
    state_labels: tuple | None = None
    action_labels: tuple | None = None

    def __post_init__(self):
        T = int(self.horizon)
        if T < 1:
            raise ValueError("horizon must be a positive integer")
        object.__setattr__(self, "horizon", T)
        p0 = np.asarray(self.p0, dtype=float)
        K = np.asarray(self.kernel, dtype=float)
        g = np.asarray(self.stage_reward, dtype=float)
        gT = np.asarray(self.terminal_reward, dtype=float)
        if K.ndim not in (3, 4):
            raise ValueError("kernel must be (S,A,S) or (T,S,A,S)")
        S, A = K.shape[-3], K.shape[-2]
        if K.shape[-1] != S:
            raise ValueError("kernel must be square in the state dimension")
        if K.ndim == 4 and K.shape[0] != T:
            raise ValueError("time-varying kernel must have T leading slices")
        if p0.shape != (S,):
            raise ValueError("p0 has wrong shape")
        if g.shape not in ((S, A), (T, S, A)):
            raise ValueError("stage_reward must be (S,A) or (T,S,A)")
        if gT.shape != (S,):
            raise ValueError("terminal_reward must be (S,)")
        allowed = None
        if self.allowed is not None:
            allowed = np.asarray(self.allowed, dtype=bool)
            if allowed.shape != (S, A):
                raise ValueError("allowed mask must be (S,A)")
            if not np.all(allowed.any(axis=1)):
                raise ValueError("every state needs at least one allowed action")
        mask = None if allowed is None else np.broadcast_to(allowed, K.shape[:-1])
        _check_prob_rows(K, "kernel", mask)
        _check_prob_rows(p0, "p0")
        if not (np.all(np.isfinite(g)) and np.all(np.isfinite(gT))):
            raise ValueError("rewards must be finite")
        for name, arr in (("p0", p0), ("kernel", K), ("stage_reward", g),
                          ("terminal_reward", gT)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if allowed is not None:
            allowed = allowed.copy()
            allowed.setflags(write=False)
        object.__setattr__(self, "allowed", allowed)

    @property
    def n_states(self) -> int:
        return self.p0.shape[0]

    @property
    def n_actions(self) -> int:
        return self.kernel.shape[-2]

    def P(self, t: int) -> np.ndarray:
        """Transition tensor ``(S, A, S)`` used at decision step ``t``."""
        return self.kernel if self.kernel.ndim == 3 else self.kernel[t]

    def g(self, t: int) -> np.ndarray:
        return self.stage_reward if self.stage_reward.ndim == 2 else self.stage_reward[t]

    def action_mask(self) -> np.ndarray:
        if self.allowed is None:
            return np.ones((self.n_states, self.n_actions), dtype=bool)
        return self.allowed


@dataclass(frozen=True, eq=False)
class MarkovPolicy:
    """Time-indexed randomised rules, ``rules[t, s, a] = pi_t(a | s)``."""

    rules: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rules, dtype=float)
        if r.ndim != 3:
            raise ValueError("rules must be (T, S, A)")
        _check_prob_rows(r, "policy rules")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "rules", r)

    @property
    def horizon(self) -> int:
        return self.rules.shape[0]

    @classmethod
    def deterministic(cls, actions, n_actions: int) -> "MarkovPolicy":
        actions = np.asarray(actions, dtype=int)
        rules = np.zeros(actions.shape + (n_actions,))
        np.put_along_axis(rules, actions[..., None], 1.0, axis=-1)
        return cls(rules)

    @classmethod
    def uniform(cls, mdp: FiniteMdp) -> "MarkovPolicy":
        mask = mdp.action_mask().astype(float)
        rule = mask / mask.sum(axis=1, keepdims=True)
        return cls(np.broadcast_to(rule, (mdp.horizon,) + rule.shape))


@dataclass(frozen=True, eq=False)
class HistoryTree:
    """Enumerated histories ``(s_0, a_0, ..., s_t)`` with positive reach.

    Node ``k`` is a history ending at ``time[k]`` in ``state[k]``; it was
    reached from ``parent[k]`` by action ``action[k]`` (``-1`` at roots).
    ``step_prob`` is the probability of the last transition (``p0`` at roots)
    and ``reach`` the product of transition probabilities along the path, i.e.
    the probability of the history when every action on it is chosen.
    """

    horizon: int
    time: np.ndarray
    state: np.ndarray
    parent: np.ndarray
    action: np.ndarray
    step_prob: np.ndarray
    reach: np.ndarray
    children: dict = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.time.shape[0]

    def layer(self, t: int) -> np.ndarray:
        return np.flatnonzero(self.time == t)

    def path_states(self, k: int) -> list[int]:
        out = []
        while k >= 0:
            out.append(int(self.state[k]))
            k = int(self.parent[k])
        return out[::-1]


def enumerate_history_tree(mdp: FiniteMdp, node_budget: int = DEFAULT_NODE_BUDGET) -> HistoryTree:
    """Unfold every positive-probability history of ``mdp``.

    Branches with zero transition probability or disallowed actions are not
    created.  ``children[(k, a)]`` lists the child node ids of ``k`` under
    action ``a``.
    """
    mask = mdp.action_mask()
    time, state, parent, action, step, reach = [], [], [], [], [], []
    children: dict = {}

    def add(t, s, par, a, p, r):
        if len(time) >= node_budget:
            raise BudgetExceeded(f"history tree exceeds {node_budget} nodes")
        time.append(t)
        state.append(s)
        parent.append(par)
        action.append(a)
        step.append(p)
        reach.append(r)
        return len(time) - 1

    frontier = [add(0, int(s), -1, -1, float(mdp.p0[s]), float(mdp.p0[s]))
                for s in np.flatnonzero(mdp.p0 > 0)]
    for t in range(mdp.horizon):
        P = mdp.P(t)
        nxt = []
        for k in frontier:
            s = state[k]
            for a in np.flatnonzero(mask[s]):
                kids = []
                for s2 in np.flatnonzero(P[s, a] > 0):
                    p = float(P[s, a, s2])
                    kids.append(add(t + 1, int(s2), k, int(a), p, reach[k] * p))
                children[(k, int(a))] = kids
                nxt.extend(kids)
        frontier = nxt
    return HistoryTree(
        horizon=mdp.horizon,
        time=np.array(time, dtype=int),
        state=np.array(state, dtype=int),
        parent=np.array(parent, dtype=int),
        action=np.array(action, dtype=int),
        step_prob=np.array(step),
        reach=np.array(reach),
        children=children,
    )


@dataclass(frozen=True, eq=False)
class HistoryPolicy:
    """History-dependent randomised policy on an enumerated tree.

    ``rules[k]`` is the action distribution at tree node ``k``; rows of leaf
    nodes (time ``T``) are ignored.
    """

    tree: HistoryTree
    rules: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rules, dtype=float)
        if r.ndim != 2 or r.shape[0] != self.tree.n_nodes:
            raise ValueError("rules must be (n_nodes, A)")
        internal = self.tree.time < self.tree.horizon
        _check_prob_rows(r[internal], "history policy rules")
        r = r.copy()
        r.setflags(write=False)
        object.__setattr__(self, "rules", r)

    @property
    def horizon(self) -> int:
        return self.tree.horizon


@dataclass(frozen=True, eq=False)
class StateMarginals:
    """``state[t, s]`` for ``t = 0..T`` and ``state_action[t, s, a]`` for ``t < T``."""

    state: np.ndarray
    state_action: np.ndarray


def _check_markov(mdp: FiniteMdp, policy: MarkovPolicy):
    if policy.horizon != mdp.horizon:
        raise HorizonMismatch(f"policy horizon {policy.horizon} != mdp horizon {mdp.horizon}")
    if policy.rules.shape[1:] != (mdp.n_states, mdp.n_actions):
        raise ValueError("policy shape does not match the mdp")
    if mdp.allowed is not None and np.any(policy.rules[:, ~mdp.allowed] > PROB_TOL):
        raise ValueError("policy puts mass on disallowed actions")


def history_node_probabilities(policy: HistoryPolicy) -> np.ndarray:
    """Probability of every tree node under ``policy``."""
    tree = policy.tree
    prob = np.zeros(tree.n_nodes)
    roots = tree.parent < 0
    prob[roots] = tree.step_prob[roots]
    # nodes are created parent-before-child
    for k in np.flatnonzero(~roots):
        par = tree.parent[k]
        prob[k] = prob[par] * policy.rules[par, tree.action[k]] * tree.step_prob[k]
    return prob


def forward_marginals(mdp: FiniteMdp, policy) -> StateMarginals:
    """Exact state and state-action marginals induced by ``policy``."""
    T, S, A = mdp.horizon, mdp.n_states, mdp.n_actions
    state = np.zeros((T + 1, S))
    sa = np.zeros((T, S, A))
    if isinstance(policy, HistoryPolicy):
        if policy.horizon != T:
            raise HorizonMismatch("policy horizon does not match mdp horizon")
        tree = policy.tree
        prob = history_node_probabilities(policy)
        np.add.at(state, (tree.time, tree.state), prob)
        inner = tree.time < T
        np.add.at(sa, (tree.time[inner], tree.state[inner]),
                  prob[inner, None] * policy.rules[inner])
        return StateMarginals(state, sa)
    _check_markov(mdp, policy)
    state[0] = mdp.p0
    for t in range(T):
        sa[t] = state[t][:, None] * policy.rules[t]
        state[t + 1] = np.einsum("sa,sab->b", sa[t], mdp.P(t))
    return StateMarginals(state, sa)


def policy_value_functions(mdp: FiniteMdp, policy: MarkovPolicy) -> np.ndarray:
    """``V[t, s]`` of a Markov policy, ``t = 0..T``."""
    _check_markov(mdp, policy)
    T = mdp.horizon
    V = np.zeros((T + 1, mdp.n_states))
    V[T] = mdp.terminal_reward
    for t in range(T - 1, -1, -1):
        Q = mdp.g(t) + mdp.P(t) @ V[t + 1]
        V[t] = np.einsum("sa,sa->s", policy.rules[t], Q)
    return V


def evaluate_policy(mdp: FiniteMdp, policy: MarkovPolicy) -> float:
    """Expected total reward ``J(pi)`` by backward value recursion."""
    V = policy_value_functions(mdp, policy)
    return float(mdp.p0 @ V[0])


def marginal_value(mdp: FiniteMdp, marg: StateMarginals) -> float:
    """Expected total reward from precomputed marginals."""
    total = float(marg.state[-1] @ mdp.terminal_reward)
    for t in range(mdp.horizon):
        total += float(np.sum(marg.state_action[t] * mdp.g(t)))
    return total


@dataclass(frozen=True, eq=False)
class InductionResult:
    policy: MarkovPolicy
    value: float
    value_functions: np.ndarray
    actions: np.ndarray


def backward_induction(mdp: FiniteMdp, tie_tol: float = 1e-12) -> InductionResult:
    """Optimal deterministic Markov policy of the unconstrained problem.

    Among actions within ``tie_tol * (1 + |max|)`` of the best Q-value the
    lowest index is chosen.
    """
    T, S = mdp.horizon, mdp.n_states
    mask = mdp.action_mask()
    V = np.zeros((T + 1, S))
    V[T] = mdp.terminal_reward
    acts = np.zeros((T, S), dtype=int)
    for t in range(T - 1, -1, -1):
        Q = np.where(mask, mdp.g(t) + mdp.P(t) @ V[t + 1], -np.inf)
        best = Q.max(axis=1)
        near = Q >= best[:, None] - tie_tol * (1.0 + np.abs(best[:, None]))
        acts[t] = np.argmax(near, axis=1)
        V[t] = Q[np.arange(S), acts[t]]
    policy = MarkovPolicy.deterministic(acts, mdp.n_actions)
    return InductionResult(policy, float(mdp.p0 @ V[0]), V, acts)
