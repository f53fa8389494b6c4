import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alarmflag.augment import AlarmRegion, augment, project_policy
from alarmflag.instances import ACT_RISKY, X1, appendix_mdp, random_instance
from alarmflag.mdp import MarkovPolicy, backward_induction, forward_marginals, marginal_value
from alarmflag.solver import (ConstraintSpec, InfeasibleConstraints, OccupancyMeasure,
                              build_occupancy_lp, extract_policy, flag_profile, lqr_policy,
                              markov_restricted_oracle, min_alarm_probability, solve_constrained,
                              solve_reduced, top_layer_value_gap, tree_lp, tree_oracle)

from oracles import highs


@pytest.fixture(scope="module")
def appendix():
    mdp, alarms = appendix_mdp()
    return mdp, alarms, augment(mdp, alarms, 1)


def test_appendix_full_solve(appendix):
    mdp, alarms, aug = appendix
    rep = solve_constrained(aug, ConstraintSpec(0.5))
    assert rep.value == pytest.approx(4.0, abs=1e-9)
    assert rep.alarm_probabilities[0] <= 0.5 + 1e-7
    rules = rep.policy.rules
    assert rules[1, aug.index(X1, 0), ACT_RISKY] == pytest.approx(2 / 3, abs=1e-9)
    assert rules[1, aug.index(X1, 1), ACT_RISKY] == pytest.approx(1.0, abs=1e-9)


def test_appendix_reduced_solve(appendix):
    mdp, alarms, aug = appendix
    rep = solve_reduced(mdp, alarms, ConstraintSpec(0.5), M=1)
    assert rep.value == pytest.approx(4.0, abs=1e-9)
    assert rep.path == "reduced"
    bi = backward_induction(mdp)
    top = aug.flag_of() == 1
    np.testing.assert_array_equal(rep.policy.rules[:, top], bi.policy.rules)


def test_appendix_tree_and_markov_oracles(appendix):
    mdp, alarms, aug = appendix
    assert tree_oracle(mdp, alarms, ConstraintSpec(0.5)) == pytest.approx(4.0, abs=1e-9)
    res = markov_restricted_oracle(mdp, alarms, 0.5)
    assert res.value == pytest.approx(11 / 3, abs=1e-8)
    assert res.policy.rules[1, X1, ACT_RISKY] == pytest.approx(2 / 3, abs=1e-6)
    gap = solve_constrained(aug, ConstraintSpec(0.5)).value - res.value
    assert gap == pytest.approx(1 / 3, abs=1e-7)
    assert markov_restricted_oracle(mdp, alarms, 1.0).value == pytest.approx(5.0, abs=1e-8)
    empty = AlarmRegion([], mdp.n_states)
    assert markov_restricted_oracle(mdp, empty, 0.1).value == pytest.approx(5.0, abs=1e-12)


def test_budget_one_equals_backward_induction(appendix):
    mdp, alarms, aug = appendix
    bi = backward_induction(mdp).value
    assert solve_constrained(aug, ConstraintSpec(1.0)).value == pytest.approx(bi, abs=1e-9)
    assert tree_oracle(mdp, alarms, ConstraintSpec(1.0)) == pytest.approx(bi, abs=1e-9)


def test_zero_budget_with_alarmed_start_is_infeasible(appendix):
    mdp, alarms, aug = appendix
    with pytest.raises(InfeasibleConstraints):
        solve_constrained(aug, ConstraintSpec(0.0))
    with pytest.raises(InfeasibleConstraints):
        solve_reduced(mdp, alarms, ConstraintSpec(0.0))
    assert min_alarm_probability(aug) == pytest.approx(0.25, abs=1e-12)


def test_empty_region_reduced_is_unconstrained():
    inst = random_instance(4)
    empty = AlarmRegion([], inst.mdp.n_states)
    rep = solve_reduced(inst.mdp, empty, ConstraintSpec(0.0))
    assert rep.value == pytest.approx(backward_induction(inst.mdp).value, abs=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        ConstraintSpec(1.5)
    with pytest.raises(ValueError):
        ConstraintSpec(())
    mdp, alarms = appendix_mdp()
    with pytest.raises(ValueError):
        build_occupancy_lp(augment(mdp, alarms, 1), ConstraintSpec((0.5, 0.2)))


def test_extract_policy_cases():
    sa = np.zeros((1, 3, 2))
    sa[0, 0] = (0.0, 0.4)
    sa[0, 1] = (0.3, 0.3)
    occ = OccupancyMeasure(sa, np.array([0.4, 0.6, 0.0]))
    pol = extract_policy(occ, np.array([[0, 0, 1]]))
    np.testing.assert_array_equal(pol.rules[0, 0], [0.0, 1.0])
    np.testing.assert_array_equal(pol.rules[0, 1], [0.5, 0.5])
    np.testing.assert_array_equal(pol.rules[0, 2], [0.0, 1.0])  # unreached: fallback action


def test_report_serialisation(appendix):
    rep = solve_constrained(appendix[2], ConstraintSpec(0.5))
    doc = json.loads(rep.to_json())
    assert {"value", "status", "alarm_probabilities", "residuals", "timing"} <= set(doc)
    assert doc["status"] == "optimal"


def test_occupancy_invariants(appendix):
    rep = solve_constrained(appendix[2], ConstraintSpec(0.5))
    occ = rep.occupancy
    np.testing.assert_allclose(occ.sa.sum(axis=(1, 2)), 1.0, atol=1e-8)
    assert occ.terminal.sum() == pytest.approx(1.0, abs=1e-8)
    assert occ.flow_residual(appendix[2].lifted) <= 1e-8


@settings(max_examples=25)
@given(st.integers(0, 10**6))
def test_tree_lp_against_highs(seed):
    # the tree LP is solved by an independent solver; the other side is the augmented LP
    inst = random_instance(seed)
    spec = ConstraintSpec(inst.deltas[:1])
    prog, _, _ = tree_lp(inst.mdp, inst.alarms, spec)
    status, obj = highs(prog)
    aug = augment(inst.mdp, inst.alarms, 1)
    if status == "infeasible":
        with pytest.raises(InfeasibleConstraints):
            solve_constrained(aug, spec)
        return
    assert solve_constrained(aug, spec).value == pytest.approx(obj, abs=1e-7)


@given(st.integers(0, 10**6))
def test_extracted_policy_consistency(seed):
    inst = random_instance(seed, n_levels=2)
    aug = augment(inst.mdp, inst.alarms, 2)
    spec = ConstraintSpec(inst.deltas)
    try:
        rep = solve_constrained(aug, spec)
    except InfeasibleConstraints:
        assert min_alarm_probability(aug, 1) > spec.deltas[0] - 1e-9 or \
            min_alarm_probability(aug, 2) > spec.deltas[1] - 1e-9
        return
    assert rep.value == pytest.approx(rep.lp_objective, abs=1e-7)
    flags = aug.flag_of()
    profile = flag_profile(aug, rep.policy)[-1]
    lp_mass = [rep.occupancy.terminal[flags >= i].sum() for i in (1, 2)]
    np.testing.assert_allclose(profile, lp_mass, atol=1e-7)
    assert np.all(rep.alarm_probabilities <= np.array(spec.deltas) + 1e-7)
    assert top_layer_value_gap(aug, rep.policy) <= 1e-7


@given(st.integers(0, 10**6))
def test_value_monotone_in_budget(seed):
    inst = random_instance(seed)
    aug = augment(inst.mdp, inst.alarms, 1)
    last = -np.inf
    for d in (0.0, 0.1, 0.3, 0.6, 1.0):
        try:
            v = solve_constrained(aug, ConstraintSpec(d)).value
        except InfeasibleConstraints:
            assert last == -np.inf
            continue
        assert v >= last - 1e-8
        last = v


def test_projected_policy_reaches_same_value(appendix):
    mdp, alarms, aug = appendix
    rep = solve_constrained(aug, ConstraintSpec(0.5))
    marg = forward_marginals(mdp, project_policy(aug, rep.policy))
    assert marginal_value(mdp, marg) == pytest.approx(4.0, abs=1e-9)


def test_lqr_cases():
    dead = lqr_policy(1.0, 0.0, 1.5, 10)
    np.testing.assert_array_equal(dead.gains, 1.0)
    for z in (-0.3, 0.0, 2.0):
        assert dead.action(3, z) == pytest.approx(1.5 - z, abs=1e-15)
    half = lqr_policy(1.0, 1.0, 1.5, 1)
    assert half.action(0, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert lqr_policy(2.0, 0.7, 1.5, 5).action(0, 1.5) == 0.0
    assert dead.action(0, -3.0, -1.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        lqr_policy(0.0, 0.0, 1.5, 3)


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-2, 2))
def test_lqr_one_step_optimality(q, r, z):
    # with T=1 the gain minimises q (z + a - z_ref)^2 + r a^2
    a = float(lqr_policy(q, r, 1.0, 1).action(0, z))
    cost = lambda u: q * (z + u - 1.0) ** 2 + r * u ** 2
    assert cost(a) <= min(cost(a + 1e-4), cost(a - 1e-4))
    assert a == pytest.approx(q * (1.0 - z) / (q + r), abs=1e-12)


def test_flag_profile_matches_marginals(appendix):
    aug = appendix[2]
    pol = MarkovPolicy.uniform(aug.lifted)
    prof = flag_profile(aug, pol)
    marg = forward_marginals(aug.lifted, pol)
    assert prof[-1, 0] == pytest.approx(marg.state[-1, aug.flag_of() == 1].sum(), abs=1e-15)
    assert np.all(np.diff(prof[:, 0]) >= -1e-15)
