"""Integrator plant with a CUSUM detector, and its grid discretisation.

The cascade state is ``(z, zd)``: plant state and detector statistic.  Within
a step the plant moves first and the detector reads the updated plant state,
so the alarm test on the successor cell matches the continuous test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .augment import AlarmRegion
from .mdp import FiniteMdp


@dataclass(frozen=True)
class CascadeModel:
    sigma: float = 0.1
    bias: float = 0.8
    threshold: float = 2.0
    z_ref: float = 1.5
    a_min: float = -1.0
    a_max: float = 1.0
    z0: float = 0.0
    zd0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.bias > 0:
            raise ValueError("CUSUM bias must be positive")
        if not self.threshold > 0:
            raise ValueError("CUSUM threshold must be positive")
        if not self.a_min < self.a_max:
            raise ValueError("empty action range")

    def alarm(self, zd) -> np.ndarray:
        return np.asarray(zd) >= self.threshold


@dataclass(frozen=True)
class Grid:
    nz: int = 17
    z_lo: float = -0.5
    z_hi: float = 2.5
    nd: int = 11
    zd_hi: float = 2.2
    na: int = 9
    a_min: float = -1.0
    a_max: float = 1.0

    def __post_init__(self):
        if min(self.nz, self.nd, self.na) < 2:
            raise ValueError("grid node counts must be >= 2")
        if not (self.z_lo < self.z_hi and self.zd_hi > 0 and self.a_min < self.a_max):
            raise ValueError("grid ranges must be strictly increasing")

    @property
    def z_nodes(self) -> np.ndarray:
        return np.linspace(self.z_lo, self.z_hi, self.nz)

    @property
    def zd_nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.zd_hi, self.nd)

    @property
    def a_nodes(self) -> np.ndarray:
        return np.linspace(self.a_min, self.a_max, self.na)

    @property
    def n_cells(self) -> int:
        return self.nz * self.nd


def cusum_step(zd, z, bias):
    """``max(0, zd + |z| - bias)``."""
    return np.maximum(0.0, np.asarray(zd) + np.abs(z) - bias)


def plant_step(z, a, w):
    return np.asarray(z) + a + w


def gaussian_cell_mass(mean, sigma, lower, upper):
    """Mass of ``N(mean, sigma^2)`` on ``[lower, upper]``.

    Differences are taken on the tail nearer to the interval so that cells far
    in the upper tail do not lose precision to cancellation.
    """
    if not np.all(np.asarray(sigma) > 0):
        raise ValueError("sigma must be positive")
    lo = (np.asarray(lower, dtype=float) - mean) / sigma
    hi = (np.asarray(upper, dtype=float) - mean) / sigma
    upper_tail = lo > 0
    return np.where(upper_tail, ndtr(-lo) - ndtr(-hi), ndtr(hi) - ndtr(lo))


def nearest_index(x, lo, hi, n):
    """Nearest node of ``linspace(lo, hi, n)``; ties go to the lower index."""
    h = (hi - lo) / (n - 1)
    idx = np.ceil((np.asarray(x, dtype=float) - lo) / h - 0.5)
    return np.clip(idx, 0, n - 1).astype(int)


@dataclass(frozen=True, eq=False)
class DiscretizedModel:
    model: CascadeModel
    grid: Grid
    mdp: FiniteMdp
    alarms: AlarmRegion

    def cell(self, z, zd):
        """State index of the nearest grid cell (``iz * nd + jd``)."""
        g = self.grid
        iz = nearest_index(z, g.z_lo, g.z_hi, g.nz)
        jd = nearest_index(zd, 0.0, g.zd_hi, g.nd)
        return iz * g.nd + jd

    def cell_values(self):
        """``(z, zd)`` node values of every state index."""
        g = self.grid
        return np.repeat(g.z_nodes, g.nd), np.tile(g.zd_nodes, g.nz)


def discretize(model: CascadeModel, grid: Grid, horizon: int,
               mass_floor: float = 0.0) -> DiscretizedModel:
    """Finite MDP on the ``(z, zd)`` grid.

    Next-``z`` mass is the Gaussian mass of the Voronoi interval of each node
    around ``z_i + a_k`` (edge cells absorb the tails).  The detector update
    is applied to the successor ``z`` node and rounded to the nearest ``zd``
    node.  Transition masses below ``mass_floor`` are dropped and the row
    renormalised.
    """
    if int(horizon) != horizon or horizon < 1:
        raise ValueError("horizon must be a positive integer")
    if grid.zd_hi < model.threshold:
        raise ValueError("zd grid must reach the alarm threshold")
    zn, dn, an = grid.z_nodes, grid.zd_nodes, grid.a_nodes
    nz, nd, na = grid.nz, grid.nd, grid.na
    edges = np.concatenate([[-np.inf], 0.5 * (zn[1:] + zn[:-1]), [np.inf]])
    mean = zn[:, None] + an[None, :]                                  # (nz, na)
    mass = gaussian_cell_mass(mean[..., None], model.sigma, edges[:-1], edges[1:])
    if mass_floor > 0:
        mass = np.where(mass < mass_floor, 0.0, mass)
    mass /= mass.sum(axis=-1, keepdims=True)                           # (nz, na, nz)
    next_d = nearest_index(cusum_step(dn[:, None], zn[None, :], model.bias), 0.0, grid.zd_hi, nd)
    S = nz * nd
    P = np.zeros((nz, nd, na, nz, nd))
    iz, jd, k, iz2 = np.meshgrid(np.arange(nz), np.arange(nd), np.arange(na), np.arange(nz),
                                 indexing="ij")
    P[iz, jd, k, iz2, next_d[jd, iz2]] = mass[iz, k, iz2]
    P = P.reshape(S, na, S)
    z_of = np.repeat(zn, nd)
    cost = (z_of - model.z_ref) ** 2
    g = -np.repeat(cost[:, None], na, axis=1)
    p0 = np.zeros(S)
    s0 = nearest_index(model.z0, grid.z_lo, grid.z_hi, nz) * nd + nearest_index(
        model.zd0, 0.0, grid.zd_hi, nd)
    p0[s0] = 1.0
    mdp = FiniteMdp(int(horizon), p0, P, g, -cost)
    alarms = AlarmRegion.from_mask(model.alarm(np.tile(dn, nz)))
    return DiscretizedModel(model, grid, mdp, alarms)


def rollout_step(model: CascadeModel, state, action, noise):
    """One step of the continuous cascade: plant first, then detector."""
    a = np.asarray(action, dtype=float)
    if np.any(a < model.a_min - 1e-12) or np.any(a > model.a_max + 1e-12):
        raise ValueError("action outside the admissible range")
    z, zd = state
    z2 = plant_step(z, a, noise)
    return z2, cusum_step(zd, z2, model.bias)
