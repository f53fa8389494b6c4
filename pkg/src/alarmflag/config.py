"""Experiment configuration: dataclass, INI-style text format and presets."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

from .plant import CascadeModel, Grid

PATHS = ("full", "reduced")

# section -> (config key, attribute, type)
_LAYOUT = {
    "experiment": [
        ("horizon", "horizon", int), ("sigma", "sigma", float), ("bias", "bias", float),
        ("threshold", "threshold", float), ("z_ref", "z_ref", float),
        ("delta", "deltas", "floats"), ("M", "M", int),
    ],
    "grid": [
        ("Nz", "nz", int), ("z_lo", "z_lo", float), ("z_hi", "z_hi", float),
        ("Nd", "nd", int), ("zd_hi", "zd_hi", float), ("Na", "na", int),
        ("a_min", "a_min", float), ("a_max", "a_max", float),
    ],
    "run": [("rollouts", "rollouts", int), ("seed", "seed", int), ("path", "path", str)],
}


@dataclass(frozen=True)
class ExperimentConfig:
    horizon: int = 15
    sigma: float = 0.1
    bias: float = 0.8
    threshold: float = 2.0
    z_ref: float = 1.5
    deltas: tuple = (0.5,)
    M: int = 1
    nz: int = 17
    z_lo: float = -0.5
    z_hi: float = 2.5
    nd: int = 11
    zd_hi: float = 2.2
    na: int = 9
    a_min: float = -1.0
    a_max: float = 1.0
    rollouts: int = 100_000
    seed: int = 0
    path: str = "full"
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if not 1 <= len(self.deltas) <= self.M:
            raise ValueError("need between 1 and M delta values")
        if any(not 0.0 <= d <= 1.0 for d in self.deltas):
            raise ValueError("delta values must lie in [0, 1]")
        if self.rollouts < 1:
            raise ValueError("rollouts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}")
        # delegate the remaining checks
        self.model()
        self.grid()

    def model(self) -> CascadeModel:
        return CascadeModel(self.sigma, self.bias, self.threshold, self.z_ref,
                            self.a_min, self.a_max)

    def grid(self) -> Grid:
        return Grid(self.nz, self.z_lo, self.z_hi, self.nd, self.zd_hi, self.na,
                    self.a_min, self.a_max)

    def with_deltas(self, deltas) -> "ExperimentConfig":
        return replace(self, deltas=tuple(deltas))


def _fmt(value, kind) -> str:
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind is float:
        return repr(float(value))
    return str(value)


def serialize(cfg: ExperimentConfig) -> str:
    parser = configparser.ConfigParser()
    parser.optionxform = str
    for section, keys in _LAYOUT.items():
        parser[section] = {key: _fmt(getattr(cfg, attr), kind) for key, attr, kind in keys}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def parse(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read a config; keys missing from ``text`` keep the values of ``base``."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    parser.read_string(text)
    known = {s: {k: (a, t) for k, a, t in keys} for s, keys in _LAYOUT.items()}
    values = {}
    for section in parser.sections():
        if section not in known:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in known[section]:
                raise ValueError(f"unknown key {key!r} in [{section}]")
            attr, kind = known[section][key]
            if kind == "floats":
                values[attr] = tuple(float(v) for v in raw.replace(",", " ").split())
            else:
                values[attr] = kind(raw.strip())
    return replace(base or ExperimentConfig(), **values)


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse(fh.read())


PRESETS = {
    "paper-exp1": ExperimentConfig(name="paper-exp1"),
    "paper-exp2": ExperimentConfig(deltas=(0.5, 0.3, 0.1), M=3, name="paper-exp2"),
}
# the counterexample MDP has no cascade parameters; the name is handled by the CLI
APPENDIX = "appendix"


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
