"""Small linear programs with optima derivable by hand.

Each case is ``(name, LinearProgram, status, optimum or None)``.
"""

import numpy as np
import scipy.sparse as sp

from alarmflag.lp import EQ, LE, LinearProgram


def lp(c, A, b, senses, maximize):
    return LinearProgram(np.array(c, float), sp.csc_matrix(np.array(A, float)), np.array(b, float),
                         tuple(senses), maximize)


def cases():
    out = []
    add = out.append
    add(("single bound", lp([1], [[1]], [3], [LE], True), "optimal", 3.0))
    # alpha <= 2/3, alpha <= 1, beta <= 1; objective 3 alpha + beta (constant 1 dropped)
    add(("two-parameter box", lp([3, 1], [[1, 0], [1, 0], [0, 1]], [2 / 3, 1, 1], [LE] * 3, True),
         "optimal", 3.0))
    add(("negative equality", lp([0], [[1]], [-1], [EQ], False), "infeasible", None))
    add(("ray", lp([1, 0], [[1, -1]], [1], [LE], True), "unbounded", None))
    # Beale's cycling example: optimum at x4 = 1/25, x6 = 1
    add(("beale cycling", lp([-0.75, 150, -0.02, 6],
                             [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]],
                             [0, 0, 1], [LE] * 3, False), "optimal", -0.05))
    # Chvatal's cycling example: optimum at x1 = 1, x3 = 1
    add(("chvatal cycling", lp([10, -57, -9, -24],
                               [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]],
                               [0, 0, 1], [LE] * 3, True), "optimal", 1.0))
    add(("degenerate vertex", lp([1, 1], [[1, 1], [1, 0], [0, 1], [1, 2]], [1, 1, 1, 2], [LE] * 4,
                                 True), "optimal", 1.0))
    add(("redundant equalities", lp([1, 0], [[1, 1], [2, 2]], [1, 2], [EQ, EQ], True),
         "optimal", 1.0))
    add(("contradictory rows", lp([0, 0], [[1, 1], [1, 1]], [1, 2], [LE, EQ], False),
         "infeasible", None))
    # 2x3 transport problem, supplies (10, 10), demands (8, 6, 6)
    cost = [1, 3, 3, 4, 1, 2]
    A = [[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1],
         [1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 1, 0], [0, 0, 1, 0, 0, 1]]
    add(("transport", lp(cost, A, [10, 10, 8, 6, 6], [LE, LE, EQ, EQ, EQ], False), "optimal", 28.0))
    # covering rows written as <= with negated coefficients: optimum at (4/5, 3/5)
    add(("covering", lp([1, 1], [[-1, -2], [-3, -1]], [-2, -3], [LE, LE], False), "optimal", 1.4))
    add(("unbounded minimum", lp([-1, 0], [[1, -1]], [0], [EQ], False), "unbounded", None))
    add(("zero objective", lp([0], [[1]], [5], [LE], True), "optimal", 0.0))
    add(("klee-minty 3", lp([100, 10, 1], [[1, 0, 0], [20, 1, 0], [200, 20, 1]], [1, 100, 10000],
                            [LE] * 3, True), "optimal", 10000.0))
    add(("forcing row", lp([1, 1, 0], [[1, 1, 1], [1, 2, 0]], [1, 0], [EQ, LE], True),
         "optimal", 0.0))
    add(("balanced pair", lp([1, 0], [[1, -1], [0, 1], [1, 1]], [0, 2, 4], [EQ, LE, LE], True),
         "optimal", 2.0))
    add(("zero budget with mass", lp([1], [[1], [1]], [1, 0], [EQ, LE], True), "infeasible", None))
    return out
