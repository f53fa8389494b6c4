"""Command-line front end.

    alarmflag evaluate  --preset paper-exp1 --out runs/exp1
    alarmflag simulate  --preset paper-exp1 --out runs/exp1 --rollouts 100000
    alarmflag sweep     --preset paper-exp1 --deltas 0.1,0.5,1.0 --out runs/sweep
    alarmflag appendix

Exit status: 0 on success, 1 when the alarm budgets are infeasible, 2 on a
solver failure (including a non-monotone sweep), 64 on invalid input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .augment import AugmentedMdp, augment
from .config import ExperimentConfig
from .lp import NumericalError
from .instances import ACT_RISKY, APPENDIX_DELTA, X1, appendix_mdp
from .mdp import MarkovPolicy, forward_marginals
from .plant import DiscretizedModel, discretize
from .sim import (GridPolicyLookup, empirical_report, exact_chain_statistics, rollout,
                  rollout_chain)
from .solver import (ConstraintSpec, InfeasibleConstraints, SolveReport, SolverFailure,
                     markov_restricted_oracle, min_alarm_probability, solve_constrained,
                     solve_reduced, tree_oracle)

log = logging.getLogger("alarmflag")

EXIT_OK, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_INPUT = 0, 1, 2, 64
POLICY_FORMAT = "alarmflag-policy/1"
MONOTONE_TOL = 1e-8


class InputError(ValueError):
    pass


# -- file helpers -------------------------------------------------------------


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def fmt_num(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(c if isinstance(c, str) else fmt_num(c) for c in row) for row in rows]
    return "\n".join(lines) + "\n"


# -- solve plumbing -----------------------------------------------------------


def build_problem(cfg: ExperimentConfig) -> tuple[DiscretizedModel, AugmentedMdp]:
    dm = discretize(cfg.model(), cfg.grid(), cfg.horizon)
    return dm, augment(dm.mdp, dm.alarms, cfg.M)


def solve_config(cfg: ExperimentConfig, dm: DiscretizedModel, aug: AugmentedMdp) -> SolveReport:
    spec = ConstraintSpec(cfg.deltas)
    if cfg.path == "reduced":
        return solve_reduced(dm.mdp, dm.alarms, spec, cfg.M, aug=aug)
    return solve_constrained(aug, spec)


def policy_summary(aug: AugmentedMdp, policy: MarkovPolicy, a_nodes) -> dict:
    """Occupancy-weighted mean action and randomisation count per flag layer."""
    marg = forward_marginals(aug.lifted, policy)
    flags = aug.flag_of()
    layers = []
    for f in range(aug.n_flags):
        sa = marg.state_action[:, flags == f]
        mass = sa.sum()
        reached = marg.state[:-1, flags == f] > 1e-12
        randomized = (policy.rules[:, flags == f] > 1e-9).sum(axis=-1) > 1
        layers.append(dict(
            flag=f,
            mass=float(mass),
            mean_action=float((sa * a_nodes).sum() / mass) if mass > 0 else None,
            randomized_decisions=int((randomized & reached).sum()),
        ))
    return dict(layers=layers)


def policy_document(cfg: ExperimentConfig, policy: MarkovPolicy) -> dict:
    return dict(
        format=POLICY_FORMAT,
        config=cfgmod.serialize(cfg),
        horizon=cfg.horizon, M=cfg.M, grid=[cfg.nz, cfg.nd, cfg.na],
        rules=policy.rules.tolist(),
    )


def load_policy(path: Path, cfg: ExperimentConfig) -> MarkovPolicy:
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read policy file {path}: {exc}") from None
    if doc.get("format") != POLICY_FORMAT:
        raise InputError(f"{path} is not a policy file")
    stored = cfgmod.parse(doc["config"])
    mismatched = [k for k in ("horizon", "M", "sigma", "bias", "threshold", "z_ref", "nz", "z_lo",
                              "z_hi", "nd", "zd_hi", "na", "a_min", "a_max")
                  if getattr(stored, k) != getattr(cfg, k)]
    if mismatched:
        raise InputError(f"policy file does not match the configuration: {', '.join(mismatched)}")
    return MarkovPolicy(np.asarray(doc["rules"], dtype=float))


# -- commands -----------------------------------------------------------------


def cmd_evaluate(cfg: ExperimentConfig, out: Path) -> int:
    dm, aug = build_problem(cfg)
    log.info("LP over %d augmented states, horizon %d (%s path)",
             aug.lifted.n_states, cfg.horizon, cfg.path)
    try:
        rep = solve_config(cfg, dm, aug)
    except InfeasibleConstraints:
        floor = min_alarm_probability(aug, 1)
        msg = dict(status="infeasible", deltas=list(cfg.deltas), min_alarm_probability=floor)
        write_atomic(out / "report.json", json.dumps(msg, indent=2) + "\n")
        print(f"infeasible: smallest achievable P(at least one alarm) is {floor:.12g}",
              file=sys.stderr)
        return EXIT_INFEASIBLE
    profile = exact_chain_statistics(aug, rep.policy)
    doc = rep.as_dict()
    doc.update(deltas=list(cfg.deltas), M=cfg.M, preset=cfg.name,
               alarm_profile=profile.tolist(),
               policy_summary=policy_summary(aug, rep.policy, dm.grid.a_nodes))
    write_atomic(out / "report.json", json.dumps(doc, indent=2) + "\n")
    write_atomic(out / "policy.json", json.dumps(policy_document(cfg, rep.policy)) + "\n")
    header = ["t"] + [f"p_ge_{i}" for i in range(1, cfg.M + 1)]
    write_atomic(out / "alarm_profile.csv",
                 csv_text(header, [[t, *row] for t, row in enumerate(profile)]))
    print(f"value {rep.value:.12g}  P(>= i alarms) "
          + " ".join(f"{p:.12g}" for p in rep.alarm_probabilities))
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig, out: Path, policy_path: Path | None,
                 mode: str = "continuous") -> int:
    dm, aug = build_problem(cfg)
    policy_path = policy_path or out / "policy.json"
    if policy_path.exists():
        policy = load_policy(policy_path, cfg)
    else:
        log.info("no policy file at %s; solving first", policy_path)
        code = cmd_evaluate(cfg, out)
        if code != EXIT_OK:
            return code
        policy = load_policy(out / "policy.json", cfg)
    if policy.rules.shape != (cfg.horizon, aug.lifted.n_states, cfg.na):
        raise InputError("policy shape does not match the grid")
    if mode == "chain":
        batch = rollout_chain(aug, policy, cfg.rollouts, cfg.seed, cell_values=dm.cell_values(),
                              action_values=dm.grid.a_nodes, label=f"{cfg.name}/chain")
    else:
        batch = rollout(dm.model, GridPolicyLookup(dm, policy, cfg.M), cfg.rollouts, cfg.seed,
                        cfg.horizon, cfg.M, label=f"{cfg.name}/continuous")
    er = empirical_report(batch, cfg.M)
    exact = exact_chain_statistics(aug, policy)[-1]

    def col(arr, t):
        return None if arr is None else arr[t]

    write_atomic(out / "trajectories.csv", csv_text(
        ["t", "mean_z_alarm", "mean_z_noalarm", "mean_zd_alarm", "mean_zd_noalarm"],
        [[t, col(er.mean_z_alarm, t), col(er.mean_z_noalarm, t), col(er.mean_zd_alarm, t),
          col(er.mean_zd_noalarm, t)] for t in range(cfg.horizon + 1)]))
    write_atomic(out / "histogram.csv", csv_text(
        ["alarms", "count", "probability"],
        [[k, int(c), c / er.n] for k, c in enumerate(er.histogram)]))
    deltas = list(cfg.deltas) + [None] * (cfg.M - len(cfg.deltas))
    write_atomic(out / "constraints.csv", csv_text(
        ["i", "delta_i", "exact_p", "empirical_p", "stderr"],
        [[i + 1, deltas[i], exact[i], er.p_at_least[i], er.stderr[i]] for i in range(cfg.M)]))
    print(f"{mode} rollouts N={er.n}: empirical P(>= i alarms) "
          + " ".join(f"{p:.6g}" for p in er.p_at_least)
          + f"; E[#alarms | >= 1] {er.mean_alarms_given_alarm():.6g}")
    return EXIT_OK


def appendix_values() -> dict:
    mdp, alarms = appendix_mdp()
    spec = ConstraintSpec(APPENDIX_DELTA)
    aug = augment(mdp, alarms, 1)
    rep = solve_constrained(aug, spec)
    markov = markov_restricted_oracle(mdp, alarms, APPENDIX_DELTA)
    return dict(
        history_value=rep.value,
        tree_value=tree_oracle(mdp, alarms, spec),
        markov_value=markov.value,
        alpha=float(rep.policy.rules[1, aug.index(X1, 0), ACT_RISKY]),
        beta=float(rep.policy.rules[1, aug.index(X1, 1), ACT_RISKY]),
        gamma=float(markov.policy.rules[1, X1, ACT_RISKY]),
        alarm_probability=float(rep.alarm_probabilities[0]),
        markov_method=markov.method,
    )


def cmd_appendix(out: Path | None = None) -> int:
    vals = appendix_values()
    print(f"history-dependent optimum (augmented LP): {vals['history_value']:.12g}")
    print(f"history-dependent optimum (tree oracle):  {vals['tree_value']:.12g}")
    print(f"Markov-restricted optimum:                {vals['markov_value']:.12g}")
    print(f"alpha {vals['alpha']:.12g}  beta {vals['beta']:.12g}  gamma {vals['gamma']:.12g}")
    print(f"P(alarm) under the optimum:               {vals['alarm_probability']:.12g}")
    if out is not None:
        write_atomic(out / "appendix.json", json.dumps(vals, indent=2) + "\n")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig, deltas, out: Path) -> int:
    """Vary the first budget; further levels keep their configured values."""
    dm, aug = build_problem(cfg)
    rows, feasible = [], []
    for d in deltas:
        point = cfg.with_deltas((d, *cfg.deltas[1:]))
        try:
            rep = solve_config(point, dm, aug)
            rows.append([d, "optimal", rep.value, rep.alarm_probabilities[0]])
            feasible.append((d, rep.value))
        except InfeasibleConstraints:
            rows.append([d, "infeasible", None, None])
        log.info("delta %.6g -> %s", d, rows[-1][1])
    write_atomic(out / "sweep.csv", csv_text(["delta", "status", "value", "p_ge_1"], rows))
    feasible.sort()
    for (d0, v0), (d1, v1) in zip(feasible, feasible[1:]):
        if v1 < v0 - MONOTONE_TOL:
            print(f"value decreases from {v0:.12g} at delta {d0} to {v1:.12g} at delta {d1}",
                  file=sys.stderr)
            return EXIT_SOLVER
    for r in rows:
        print(",".join(c if isinstance(c, str) else fmt_num(c) for c in r))
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _config_from_args(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise InputError("use either --config or --preset")
    if args.config:
        try:
            cfg = cfgmod.load(args.config)
        except OSError as exc:
            raise InputError(str(exc)) from None
    else:
        cfg = cfgmod.preset(args.preset or "paper-exp1")
    over = {}
    if args.seed is not None:
        over["seed"] = args.seed
    if getattr(args, "rollouts", None) is not None:
        over["rollouts"] = args.rollouts
    if args.path is not None:
        over["path"] = args.path
    return replace(cfg, **over) if over else cfg


def _parse_deltas(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad delta list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty delta list")
    return vals


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config file")
    common.add_argument("--preset", help=f"built-in config: {', '.join(cfgmod.PRESETS)}")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=Path, default=Path("."))
    common.add_argument("--path", choices=cfgmod.PATHS)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="alarmflag", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("evaluate", parents=[common], help="solve and write report + policy")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo statistics of a policy")
    sim.add_argument("--rollouts", type=int)
    sim.add_argument("--policy", type=Path, help="policy file (default OUT/policy.json)")
    sim.add_argument("--mode", choices=("continuous", "chain"), default="continuous")
    sw = sub.add_parser("sweep", parents=[common], help="value against the alarm budget")
    sw.add_argument("--deltas", type=_parse_deltas, default=[0.1, 0.3, 0.5, 0.7, 1.0])
    app = sub.add_parser("appendix", help="exact values of the two-step counterexample")
    app.add_argument("--out", type=Path)
    app.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "appendix":
            return cmd_appendix(args.out)
        if args.preset == cfgmod.APPENDIX:
            return cmd_appendix(args.out)
        cfg = _config_from_args(args)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.out)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.out, args.policy, args.mode)
        return cmd_sweep(cfg, args.deltas, args.out)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleConstraints as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SolverFailure, NumericalError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
