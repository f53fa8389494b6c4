import io

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given
from hypothesis import strategies as st

from alarmflag.lp import (EQ, ITERATION_LIMIT, LE, LinearProgram, LpSolution, check_solution,
                          load_lp, solve_lp)

from lp_cases import cases, lp
from oracles import highs

CASES = cases()


@pytest.mark.parametrize("name,prog,status,optimum", CASES, ids=[c[0] for c in CASES])
def test_hand_cases(name, prog, status, optimum):
    sol = solve_lp(prog)
    assert sol.status == status
    assert highs(prog)[0] == status
    if optimum is not None:
        assert sol.objective == pytest.approx(optimum, abs=1e-9)
        rep = check_solution(prog, sol)
        assert rep.ok, rep
        assert rep.duality_gap <= 1e-7


@pytest.mark.parametrize("name,prog,status,optimum", CASES, ids=[c[0] for c in CASES])
def test_hand_cases_without_presolve(name, prog, status, optimum):
    sol = solve_lp(prog, presolve=False)
    assert sol.status == status
    if optimum is not None:
        assert sol.objective == pytest.approx(optimum, abs=1e-9)
        assert check_solution(prog, sol).ok


def test_cycling_example_switches_to_bland():
    prog = dict((c[0], c[1]) for c in CASES)["beale cycling"]
    sol = solve_lp(prog, bland_after=1, record_pivots=True, presolve=False)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(-0.05, abs=1e-12)
    np.testing.assert_allclose(sol.x, [0.04, 0, 1, 0], atol=1e-12)


def test_trivial_lp_residuals_zero():
    prog = lp([1], [[1]], [3], [LE], True)
    rep = check_solution(prog, solve_lp(prog))
    assert rep.primal_residual == 0 and rep.complementary_slackness == 0 and rep.duality_gap == 0


def test_perturbed_primal_flagged():
    prog = lp([1], [[1]], [3], [LE], True)
    sol = solve_lp(prog)
    bad = LpSolution("optimal", x=np.array([3.1]), objective=3.1, duals=sol.duals)
    rep = check_solution(prog, bad)
    assert rep.primal_residual == pytest.approx(0.1, abs=1e-12)
    assert not rep.ok


def test_iteration_limit():
    prog = dict((c[0], c[1]) for c in CASES)["transport"]
    assert solve_lp(prog, max_iter=2).status == ITERATION_LIMIT


def test_dump_load_roundtrip():
    prog = dict((c[0], c[1]) for c in CASES)["transport"]
    text = prog.dumps()
    assert text.splitlines()[0].startswith("LP 5 6")
    back = load_lp(io.StringIO(text))
    np.testing.assert_array_equal(back.A.toarray(), prog.A.toarray())
    np.testing.assert_array_equal(back.b, prog.b)
    np.testing.assert_array_equal(back.c, prog.c)
    assert back.senses == prog.senses and back.maximize == prog.maximize


def test_bad_dimensions_rejected():
    with pytest.raises(ValueError):
        LinearProgram(np.ones(2), sp.csc_matrix(np.ones((1, 3))), np.ones(1), (LE,))


def test_deterministic_pivots():
    rng = np.random.default_rng(5)
    A = rng.random((6, 10))
    prog = LinearProgram(rng.normal(size=10), sp.csc_matrix(A), A @ rng.random(10), (EQ,) * 3 + (LE,) * 3,
                         maximize=True)
    a = solve_lp(prog, record_pivots=True)
    b = solve_lp(prog, record_pivots=True)
    assert a.pivots == b.pivots
    np.testing.assert_array_equal(a.x, b.x)


def random_lp(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 7)), int(rng.integers(1, 9))
    A = rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.7)
    x0 = rng.random(n) * (rng.random(n) < 0.7)
    senses = [EQ if rng.random() < 0.4 else LE for _ in range(m)]
    b = A @ x0 + np.where(np.array(senses) == LE, rng.random(m), 0.0)
    if rng.random() < 0.4:
        # one-signed row with zero right-hand side
        F = np.abs(rng.normal(size=(1, n))) * (rng.random((1, n)) < 0.5)
        A = np.vstack([A, F])
        b = np.append(b, 0.0)
        senses.append(EQ if rng.random() < 0.5 else LE)
    if rng.random() < 0.15:
        b = b - 5.0  # often infeasible
    return LinearProgram(rng.normal(size=n), sp.csc_matrix(A), b, tuple(senses),
                         maximize=bool(rng.random() < 0.5))


@given(st.integers(0, 10**6))
def test_random_lps_match_highs(seed):
    prog = random_lp(seed)
    sol = solve_lp(prog)
    status, obj = highs(prog)
    assert sol.status == status
    if status == "optimal":
        assert sol.objective == pytest.approx(obj, abs=1e-8 * (1 + abs(obj)))
        rep = check_solution(prog, sol)
        assert rep.ok, rep
        assert rep.duality_gap <= 1e-7 * (1 + abs(sol.objective))
