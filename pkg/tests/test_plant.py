import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alarmflag.mdp import backward_induction
from alarmflag.plant import (CascadeModel, Grid, cusum_step, discretize, gaussian_cell_mass,
                             nearest_index, plant_step, rollout_step)

from oracles import gaussian_mass_mp


def test_cusum_examples():
    assert cusum_step(0, 0, 0.8) == 0
    assert cusum_step(1.0, 1.5, 0.8) == pytest.approx(1.7, abs=1e-15)
    assert cusum_step(0.5, 0.1, 0.8) == 0


def test_plant_examples():
    assert plant_step(0, 0, 0) == 0
    assert plant_step(1.0, 0.5, -0.1) == pytest.approx(1.4, abs=1e-15)
    z = 0.37
    assert plant_step(z, 1.5 - z, 0) == pytest.approx(1.5, abs=1e-15)


@given(st.floats(0, 10), st.floats(-10, 10), st.floats(0.01, 5))
def test_cusum_nonnegative(zd, z, b):
    assert cusum_step(zd, z, b) >= 0


def test_gaussian_mass_against_high_precision():
    got = gaussian_cell_mass(0.0, 0.1, -0.05, 0.05)
    assert got == pytest.approx(gaussian_mass_mp(0.0, 0.1, -0.05, 0.05), abs=1e-12)
    assert got == pytest.approx(0.38292492254802624, abs=1e-12)
    assert gaussian_cell_mass(0.3, 0.2, -np.inf, np.inf) == 1.0
    assert gaussian_cell_mass(0.0, 0.1, 10, 11) < 1e-300
    with pytest.raises(ValueError):
        gaussian_cell_mass(0.0, 0.0, 0, 1)


@given(st.floats(-3, 3), st.floats(0.01, 2), st.floats(-4, 4), st.floats(0.001, 3))
def test_gaussian_mass_matches_oracle(mean, sigma, lower, width):
    got = gaussian_cell_mass(mean, sigma, lower, lower + width)
    assert got == pytest.approx(gaussian_mass_mp(mean, sigma, lower, lower + width), abs=1e-12)


def test_rollout_step_examples():
    wide = CascadeModel(a_min=-2.0, a_max=2.0)
    assert rollout_step(wide, (0.0, 0.0), 0.0, 0.0) == (0.0, 0.0)
    z, zd = rollout_step(wide, (0.0, 0.0), 1.5, 0.0)
    assert (z, zd) == (1.5, pytest.approx(0.7, abs=1e-15))
    z, zd = rollout_step(wide, (1.5, 1.5), 0.0, 0.0)
    assert zd == pytest.approx(2.2, abs=1e-15) and wide.alarm(zd)
    with pytest.raises(ValueError):
        rollout_step(CascadeModel(), (0.0, 0.0), 1.5, 0.0)


def test_model_validation():
    for bad in (dict(sigma=0), dict(bias=-1), dict(threshold=0), dict(a_min=1, a_max=1)):
        with pytest.raises(ValueError):
            CascadeModel(**bad)
    with pytest.raises(ValueError):
        Grid(nz=1)
    with pytest.raises(ValueError):
        discretize(CascadeModel(), Grid(zd_hi=1.5), 5)
    with pytest.raises(ValueError):
        discretize(CascadeModel(), Grid(), 0)


def test_nearest_index_idempotent_on_nodes():
    g = Grid()
    for lo, hi, n in ((g.z_lo, g.z_hi, g.nz), (0.0, g.zd_hi, g.nd)):
        nodes = np.linspace(lo, hi, n)
        np.testing.assert_array_equal(nearest_index(nodes, lo, hi, n), np.arange(n))
    # midpoint tie goes to the lower node; out-of-range values clamp
    assert nearest_index(0.11, 0.0, 2.2, 11) == 0
    assert nearest_index(5.0, 0.0, 2.2, 11) == 10


def test_kernel_rows_and_alarm_region(cascade_model):
    P = cascade_model.mdp.kernel
    assert P.min() >= 0
    np.testing.assert_allclose(P.sum(axis=-1), 1.0, atol=1e-12)
    _, zd = cascade_model.cell_values()
    np.testing.assert_array_equal(cascade_model.alarms.mask, zd >= 2.0)
    assert cascade_model.alarms.mask.any()


def test_rewards_and_initial_cell(cascade_model):
    z, zd = cascade_model.cell_values()
    np.testing.assert_allclose(cascade_model.mdp.terminal_reward, -(z - 1.5) ** 2)
    np.testing.assert_allclose(cascade_model.mdp.stage_reward[:, 0], -(z - 1.5) ** 2)
    s0 = int(np.flatnonzero(cascade_model.mdp.p0)[0])
    # z = 0 falls between nodes -0.125 and 0.0625
    assert (z[s0], zd[s0]) == (0.0625, 0.0)
    assert s0 == cascade_model.cell(0.0, 0.0)


def test_small_sigma_concentrates():
    g = Grid()
    dm = discretize(CascadeModel(sigma=0.01), g, 3)
    zn, an = g.z_nodes, g.a_nodes
    P = dm.mdp.kernel.reshape(g.nz, g.nd, g.na, g.nz, g.nd).sum(axis=-1)
    for i in range(g.nz):
        for k in range(g.na):
            target = nearest_index(zn[i] + an[k], g.z_lo, g.z_hi, g.nz)
            assert P[i, 0, k, target] > 0.99


def test_detector_successor_reads_next_z(cascade_model):
    g = cascade_model.grid
    P = cascade_model.mdp.kernel.reshape(g.nz, g.nd, g.na, g.nz, g.nd)
    zn, dn = g.z_nodes, g.zd_nodes
    for j in (0, 4, 9):
        for i2 in (0, 8, 16):
            support = np.flatnonzero(P[3, j, 2, i2] > 0)
            expect = nearest_index(cusum_step(dn[j], zn[i2], 0.8), 0.0, g.zd_hi, g.nd)
            np.testing.assert_array_equal(support, [expect])


def test_mass_floor_keeps_rows_stochastic():
    dm = discretize(CascadeModel(), Grid(), 3, mass_floor=1e-12)
    np.testing.assert_allclose(dm.mdp.kernel.sum(axis=-1), 1.0, atol=1e-12)


@pytest.mark.slow
def test_refinement_differences_decrease():
    values = []
    for nz in (17, 33, 65, 129):
        values.append(backward_induction(discretize(CascadeModel(), Grid(nz=nz), 15).mdp).value)
    diffs = np.abs(np.diff(values))
    assert np.all(diffs[1:] < diffs[:-1]), values
