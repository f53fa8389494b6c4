"""Seeded Monte Carlo rollouts and the statistics plotted for the experiments.

Randomness comes from numpy's PCG64 generator.  Trajectories are simulated
in fixed blocks of ``BLOCK`` with child seeds spawned from the user seed, so
a batch is a deterministic function of ``(seed, N)`` and its first ``k``
blocks do not depend on ``N``.  Gaussian noise uses ``Generator.normal``
(ziggurat method).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augment import AugmentedMdp, flag_step, initial_flag
from .mdp import MarkovPolicy
from .plant import CascadeModel, DiscretizedModel, cusum_step, plant_step
from .solver import LqrPolicy, flag_profile

BLOCK = 10_000


@dataclass(eq=False)
class RolloutBatch:
    """Trajectories ``z, zd, alarm, flag`` of shape ``(N, T+1)`` and actions ``(N, T)``."""

    z: np.ndarray
    zd: np.ndarray
    actions: np.ndarray
    alarm: np.ndarray
    flags: np.ndarray
    seed: int
    label: str
    M: int

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def horizon(self) -> int:
        return self.actions.shape[1]


@dataclass(eq=False)
class EmpiricalReport:
    mean_z_alarm: np.ndarray
    mean_z_noalarm: np.ndarray
    mean_zd_alarm: np.ndarray
    mean_zd_noalarm: np.ndarray
    histogram: np.ndarray
    p_at_least: np.ndarray
    stderr: np.ndarray
    n: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.histogram / self.n

    def mean_alarms_given_alarm(self) -> float:
        counts = np.arange(self.histogram.size)
        hit = self.histogram[1:].sum()
        return float((counts[1:] * self.histogram[1:]).sum() / hit) if hit else float("nan")


class GridPolicyLookup:
    """Samples actions of an augmented grid policy at continuous states.

    The continuous state is mapped to the nearest grid cell; the sampled
    action node is returned.
    """

    def __init__(self, dm: DiscretizedModel, policy: MarkovPolicy, M: int):
        S = dm.mdp.n_states
        if policy.rules.shape[1] != (M + 1) * S:
            raise ValueError("policy does not match the grid and alarm levels")
        self.dm, self.policy, self.M = dm, policy, M
        self.a_nodes = dm.grid.a_nodes

    def __call__(self, t, z, zd, flags, rng):
        cells = self.dm.cell(z, zd)
        idx = flags * self.dm.mdp.n_states + cells
        return self.a_nodes[_sample_rows(self.policy.rules[t, idx], rng)]


class LqrLookup:
    def __init__(self, lqr: LqrPolicy):
        self.lqr = lqr

    def __call__(self, t, z, zd, flags, rng):
        return self.lqr.action(t, z)


def _sample_rows(probs, rng):
    """One categorical draw per row of ``probs``."""
    cum = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0]) * cum[:, -1]
    idx = (cum <= u[:, None]).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


def _blocks(n, seed):
    sizes = [BLOCK] * (n // BLOCK) + ([n % BLOCK] if n % BLOCK else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return zip(sizes, (np.random.default_rng(c) for c in children))


def rollout(model: CascadeModel, lookup, n: int, seed: int, horizon: int, M: int = 1,
            label: str = "policy") -> RolloutBatch:
    """Simulate the continuous cascade under ``lookup``.

    ``lookup(t, z, zd, flags, rng)`` returns one action per trajectory;
    actions are clamped to the model's range.
    """
    if n < 1:
        raise ValueError("need at least one trajectory")
    parts = []
    for size, rng in _blocks(n, seed):
        z = np.zeros((size, horizon + 1))
        zd = np.zeros((size, horizon + 1))
        acts = np.zeros((size, horizon))
        flags = np.zeros((size, horizon + 1), dtype=int)
        z[:, 0], zd[:, 0] = model.z0, model.zd0
        alarm0 = model.alarm(zd[:, 0])
        flags[:, 0] = initial_flag(alarm0, M)
        for t in range(horizon):
            a = np.clip(lookup(t, z[:, t], zd[:, t], flags[:, t], rng), model.a_min, model.a_max)
            w = rng.normal(0.0, model.sigma, size)
            acts[:, t] = a
            z[:, t + 1] = plant_step(z[:, t], a, w)
            zd[:, t + 1] = cusum_step(zd[:, t], z[:, t + 1], model.bias)
            flags[:, t + 1] = flag_step(flags[:, t], model.alarm(zd[:, t + 1]), M)
        parts.append((z, zd, acts, model.alarm(zd), flags))
    z, zd, acts, alarm, flags = (np.concatenate(p) for p in zip(*parts))
    return RolloutBatch(z, zd, acts, alarm, flags, seed, label, M)


def rollout_chain(aug: AugmentedMdp, policy: MarkovPolicy, n: int, seed: int,
                  cell_values=None, action_values=None, label: str = "policy") -> RolloutBatch:
    """Sample trajectories of the discrete chain itself.

    ``cell_values`` optionally maps base states to ``(z, zd)`` node values for
    reporting; otherwise the base state index is stored in both.
    """
    if n < 1:
        raise ValueError("need at least one trajectory")
    base, M = aug.base, aug.M
    S, T = base.n_states, base.horizon
    amask = aug.alarms.mask
    if cell_values is None:
        cell_values = (np.arange(S, dtype=float), np.arange(S, dtype=float))
    parts = []
    for size, rng in _blocks(n, seed):
        s = np.zeros((size, T + 1), dtype=int)
        f = np.zeros((size, T + 1), dtype=int)
        a = np.zeros((size, T), dtype=int)
        s[:, 0] = _sample_rows(np.broadcast_to(base.p0, (size, S)), rng)
        f[:, 0] = initial_flag(amask[s[:, 0]], M)
        for t in range(T):
            a[:, t] = _sample_rows(policy.rules[t, f[:, t] * S + s[:, t]], rng)
            s[:, t + 1] = _sample_rows(base.P(t)[s[:, t], a[:, t]], rng)
            f[:, t + 1] = flag_step(f[:, t], amask[s[:, t + 1]], M)
        parts.append((s, f, a))
    s, f, a = (np.concatenate(p) for p in zip(*parts))
    acts = a.astype(float) if action_values is None else np.asarray(action_values)[a]
    return RolloutBatch(cell_values[0][s], cell_values[1][s], acts, amask[s], f, seed, label, M)


def empirical_report(batch: RolloutBatch, M: int | None = None) -> EmpiricalReport:
    """Conditional means, alarm-count histogram and ``P(>= i alarms)``."""
    M = batch.M if M is None else M
    n, T = batch.n, batch.horizon
    counts = batch.alarm.sum(axis=1)
    hit = counts >= 1

    def cond_mean(x, sel):
        return x[sel].mean(axis=0) if sel.any() else None

    hist = np.bincount(counts, minlength=T + 2)[: T + 2]
    p = np.array([(counts >= i).mean() for i in range(1, M + 1)])
    se = np.sqrt(p * (1 - p) / n)
    return EmpiricalReport(
        cond_mean(batch.z, hit), cond_mean(batch.z, ~hit),
        cond_mean(batch.zd, hit), cond_mean(batch.zd, ~hit),
        hist, p, se, n,
    )


def exact_chain_statistics(aug: AugmentedMdp, policy: MarkovPolicy) -> np.ndarray:
    """Exact ``P(f_t >= i)``, shape ``(T+1, M)``, by forward propagation."""
    return flag_profile(aug, policy)
