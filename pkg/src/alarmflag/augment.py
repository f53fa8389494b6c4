"""Alarm-flag and alarm-count state augmentation.

The augmented state is ``(s, f)`` with ``f`` in ``0..M``.  States are indexed
layer-major, ``index = f * S + s``, so all states sharing a flag value are
contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mdp import (
    DEFAULT_NODE_BUDGET,
    FiniteMdp,
    HistoryPolicy,
    HistoryTree,
    MarkovPolicy,
    enumerate_history_tree,
    forward_marginals,
    history_node_probabilities,
)


@dataclass(frozen=True, eq=False)
class AlarmRegion:
    """Subset of base-state indices in which the detector fires."""

    members: frozenset
    n_states: int

    def __init__(self, members, n_states: int):
        members = frozenset(int(m) for m in members)
        if any(m < 0 or m >= n_states for m in members):
            raise ValueError("alarm region member out of state range")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "n_states", int(n_states))

    @classmethod
    def from_mask(cls, mask) -> "AlarmRegion":
        mask = np.asarray(mask, dtype=bool)
        return cls(np.flatnonzero(mask), mask.shape[0])

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.n_states, dtype=bool)
        m[list(self.members)] = True
        return m

    def __contains__(self, s) -> bool:
        return int(s) in self.members

    def __len__(self) -> int:
        return len(self.members)


def flag_step(f, in_alarm, M: int):
    """Next flag given the current flag and whether the successor alarms."""
    f = np.asarray(f)
    return np.where(f >= M, M, np.minimum(M, f + np.asarray(in_alarm, dtype=int)))


def initial_flag(in_alarm, M: int):
    return np.minimum(M, np.asarray(in_alarm, dtype=int))


def consistent_flags(states, alarms: AlarmRegion, M: int = 1) -> np.ndarray:
    """Flag trajectory ``f_t = min(M, #{tau <= t : s_tau in X_a})``."""
    states = np.asarray(states, dtype=int)
    if states.size == 0:
        raise ValueError("state sequence must be non-empty")
    hits = alarms.mask[states].astype(int)
    return np.minimum(M, np.cumsum(hits))


@dataclass(frozen=True, eq=False)
class AugmentedMdp:
    base: FiniteMdp
    alarms: AlarmRegion
    M: int
    lifted: FiniteMdp

    @property
    def n_base(self) -> int:
        return self.base.n_states

    @property
    def n_flags(self) -> int:
        return self.M + 1

    def index(self, s, f):
        return np.asarray(f) * self.n_base + np.asarray(s)

    def split(self, idx):
        idx = np.asarray(idx)
        return idx % self.n_base, idx // self.n_base

    def flag_of(self) -> np.ndarray:
        """Flag value of every augmented state index."""
        return np.repeat(np.arange(self.n_flags), self.n_base)


def _lift_kernel(P: np.ndarray, amask: np.ndarray, M: int) -> np.ndarray:
    S, A, _ = P.shape
    F = M + 1
    out = np.zeros((F * S, A, F * S))
    for f in range(F):
        # successor flag for every base successor s'
        f2 = flag_step(np.full(S, f), amask, M)
        cols = f2 * S + np.arange(S)
        out[f * S:(f + 1) * S][:, :, cols] = P
    return out


def augment(mdp: FiniteMdp, alarms: AlarmRegion, M: int = 1) -> AugmentedMdp:
    """Product of ``mdp`` with the flag (``M = 1``) or alarm-count coordinate."""
    if int(M) != M or M < 1:
        raise ValueError("M must be an integer >= 1")
    M = int(M)
    if alarms.n_states != mdp.n_states:
        raise ValueError("alarm region does not match the mdp state count")
    S, F = mdp.n_states, M + 1
    amask = alarms.mask
    if mdp.kernel.ndim == 3:
        K = _lift_kernel(mdp.kernel, amask, M)
    else:
        K = np.stack([_lift_kernel(mdp.P(t), amask, M) for t in range(mdp.horizon)])
    p0 = np.zeros(F * S)
    p0[initial_flag(amask, M) * S + np.arange(S)] = mdp.p0
    g = np.concatenate([mdp.stage_reward] * F, axis=-2)
    gT = np.tile(mdp.terminal_reward, F)
    allowed = None if mdp.allowed is None else np.tile(mdp.allowed, (F, 1))
    lifted = FiniteMdp(mdp.horizon, p0, K, g, gT, allowed)
    return AugmentedMdp(mdp, alarms, M, lifted)


def lift_policy(aug: AugmentedMdp, policy: MarkovPolicy) -> MarkovPolicy:
    """Flag-independent augmented policy from a base Markov policy."""
    return MarkovPolicy(np.concatenate([policy.rules] * aug.n_flags, axis=1))


def tree_flags(tree: HistoryTree, alarms: AlarmRegion, M: int) -> np.ndarray:
    """Consistent flag value at every node of a history tree."""
    amask = alarms.mask
    flags = np.zeros(tree.n_nodes, dtype=int)
    for k in range(tree.n_nodes):
        hit = int(amask[tree.state[k]])
        par = tree.parent[k]
        flags[k] = min(M, hit) if par < 0 else int(flag_step(flags[par], hit, M))
    return flags


def project_policy(aug: AugmentedMdp, aug_policy: MarkovPolicy,
                   tree: HistoryTree | None = None,
                   node_budget: int = DEFAULT_NODE_BUDGET) -> HistoryPolicy:
    """History policy on the base system reading the augmented rule at the
    consistent flag of each history."""
    if tree is None:
        tree = enumerate_history_tree(aug.base, node_budget)
    flags = tree_flags(tree, aug.alarms, aug.M)
    rules = np.zeros((tree.n_nodes, aug.base.n_actions))
    inner = tree.time < tree.horizon
    t = tree.time[inner]
    idx = aug.index(tree.state[inner], flags[inner])
    rules[inner] = aug_policy.rules[t, idx]
    rules[~inner] = 1.0 / aug.base.n_actions
    return HistoryPolicy(tree, rules)


def alarm_counts(tree: HistoryTree, alarms: AlarmRegion) -> np.ndarray:
    """Unclamped number of alarming states along the path to every node."""
    return tree_flags(tree, alarms, M=tree.horizon + 1)


def alarm_event_probability(mdp: FiniteMdp, alarms: AlarmRegion, policy, i: int,
                            node_budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Exact probability that at least ``i`` visited states alarm."""
    if i <= 0:
        return 1.0
    if len(alarms) == 0:
        return 0.0
    if isinstance(policy, HistoryPolicy):
        tree = policy.tree
        prob = history_node_probabilities(policy)
        leaves = tree.time == tree.horizon
        counts = alarm_counts(tree, alarms)
        return float(prob[leaves & (counts >= i)].sum())
    if i > mdp.horizon + 1:
        return 0.0
    aug = augment(mdp, alarms, M=i)
    marg = forward_marginals(aug.lifted, lift_policy(aug, policy))
    return float(marg.state[-1][aug.flag_of() >= i].sum())
