"""Worst-case stealthy attack impact via alarm-flag augmented constrained MDPs."""

from .augment import AlarmRegion, AugmentedMdp, augment
from .mdp import FiniteMdp, MarkovPolicy, backward_induction, evaluate_policy
from .solver import (ConstraintSpec, InfeasibleConstraints, SolveReport, SolverFailure,
                     solve_constrained, solve_reduced, tree_oracle)

__all__ = [
    "AlarmRegion", "AugmentedMdp", "augment", "FiniteMdp", "MarkovPolicy",
    "backward_induction", "evaluate_policy", "ConstraintSpec", "InfeasibleConstraints",
    "SolveReport", "SolverFailure", "solve_constrained", "solve_reduced", "tree_oracle",
]
