"""Built-in finite instances: the two-step counterexample and random MDPs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import AlarmRegion
from .mdp import FiniteMdp

# state indices of the counterexample
X0, X0A, X1, X2, X2P, X2PA = range(6)
ACT_SAFE, ACT_RISKY = 0, 1


def appendix_mdp() -> tuple[FiniteMdp, AlarmRegion]:
    """Two-step MDP on which Markov policies are strictly suboptimal.

    The adversary only chooses at ``t = 1`` in state ``x1``: the safe action
    leads to ``x2`` (impact 1); the risky one to ``x2'`` (impact 10) or the
    alarming ``x2'a`` (impact 0) with equal probability.  The initial state
    is ``x0`` w.p. 3/4 and the alarming ``x0a`` w.p. 1/4.
    """
    S, A = 6, 2
    P = np.zeros((S, A, S))
    allowed = np.zeros((S, A), dtype=bool)
    allowed[:, ACT_SAFE] = True
    allowed[X1, ACT_RISKY] = True
    P[X0, ACT_SAFE, X1] = 1.0
    P[X0A, ACT_SAFE, X1] = 1.0
    P[X1, ACT_SAFE, X2] = 1.0
    P[X1, ACT_RISKY, X2P] = 0.5
    P[X1, ACT_RISKY, X2PA] = 0.5
    for s in (X2, X2P, X2PA):
        P[s, ACT_SAFE, s] = 1.0
    p0 = np.zeros(S)
    p0[X0], p0[X0A] = 0.75, 0.25
    gT = np.zeros(S)
    gT[X2], gT[X2P] = 1.0, 10.0
    mdp = FiniteMdp(
        horizon=2, p0=p0, kernel=P, stage_reward=np.zeros((S, A)), terminal_reward=gT,
        allowed=allowed,
        state_labels=("x0", "x0a", "x1", "x2", "x2'", "x2'a"),
        action_labels=("a", "a'"),
    )
    return mdp, AlarmRegion([X0A, X2PA], S)


APPENDIX_DELTA = 0.5


@dataclass
class RandomInstance:
    mdp: FiniteMdp
    alarms: AlarmRegion
    deltas: tuple
    seed: int


def random_instance(seed: int, max_states: int = 4, max_actions: int = 2, max_horizon: int = 3,
                    n_levels: int = 1, time_varying: bool | None = None) -> RandomInstance:
    """Small random MDP with a random alarm region and random budgets.

    Kernels are Dirichlet rows with roughly a third of the entries zeroed, so
    history trees have uneven branching.
    """
    rng = np.random.default_rng(seed)
    S = int(rng.integers(2, max_states + 1))
    A = int(rng.integers(1, max_actions + 1))
    T = int(rng.integers(1, max_horizon + 1))
    if time_varying is None:
        time_varying = bool(rng.random() < 0.3)
    shape = (T, S, A, S) if time_varying else (S, A, S)
    K = rng.dirichlet(np.ones(S), size=shape[:-1])
    K = np.where(rng.random(shape) < 0.35, 0.0, K)
    dead = K.sum(axis=-1) == 0
    K[dead, 0] = 1.0
    K /= K.sum(axis=-1, keepdims=True)
    p0 = rng.dirichlet(np.ones(S))
    g = rng.normal(size=(S, A))
    gT = rng.normal(size=S)
    alarms = AlarmRegion(np.flatnonzero(rng.random(S) < 0.4), S)
    deltas = tuple(float(d) for d in np.sort(rng.random(n_levels))[::-1])
    mdp = FiniteMdp(T, p0, K, g, gT)
    return RandomInstance(mdp, alarms, deltas, seed)
