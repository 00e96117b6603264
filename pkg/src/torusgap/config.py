"""Run configuration: a flat YAML document.

Schema (every key optional except ``law``)::

    law:                     # or a shorthand string: uniform | gaussian | mixture
      kind: uniform          # uniform | gaussian | atoms | density_table | mixture | iid_sum
      a: -1.0
      b: 1.0
    n: 4096                  # grid size, power of two in [16, 65536]
    t: [0.02, 0.05, 0.1]     # default: 12 geometric points in [0.02, 0.5]
    p: [1, 2, inf]
    cutoff: 512              # multiplier backend frequency cutoff
    seed: 0
    output_dir: out
    lemma1:
      scale: 3.0             # C in (C * S_n / sqrt(n)) mod 1
      counts: [32, 128]      # inclusive range of n
    tolerances:
      sharpness: 1.0e-6
      l2_asymptotic: 0.02
      gap_oracle: 1.0e-8
      lemma1_floor: 0.99
      lclt_jitter: 0.05

Law kinds and their fields:

    uniform        a, b
    gaussian       mean, sigma
    atoms          atoms: [[position, mass], ...]
    density_table  lo, hi, samples: [...]
    mixture        components: [{weight: w, law: {...}}, ...]
    iid_sum        base: {...}, count: m
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import yaml

from .gap import default_t_list
from .law import Atoms, Gaussian, LawSpec, Mixture, Uniform, law_from_dict, law_to_dict

DEFAULT_TOLERANCES = {
    "sharpness": 1e-6,
    "l2_asymptotic": 0.02,
    "gap_oracle": 1e-8,
    "lemma1_floor": 0.99,
    "lclt_jitter": 0.05,
}

SHORTHANDS = {
    "uniform": lambda: Uniform(-1.0, 1.0),
    "gaussian": lambda: Gaussian(0.0, 1.0),
    "mixture": lambda: Mixture(((0.5, Atoms(((0.0, 1.0),))), (0.5, Uniform(-1.0, 1.0)))),
}

_KEYS = {"law", "n", "t", "p", "cutoff", "seed", "output_dir", "lemma1", "tolerances"}


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("invalid config:\n  " + "\n  ".join(errors))
        self.errors = errors


@dataclass
class RunConfig:
    law: LawSpec
    n: int = 4096
    ts: list = field(default_factory=default_t_list)
    ps: list = field(default_factory=lambda: [1.0, 2.0, math.inf])
    cutoff: int = 512
    seed: int = 0
    output_dir: str | None = None
    lemma1_scale: float = 3.0
    lemma1_counts: tuple = (32, 128)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def to_dict(self) -> dict:
        return {
            "law": law_to_dict(self.law),
            "n": self.n,
            "t": list(self.ts),
            "p": [p_text(p) for p in self.ps],
            "cutoff": self.cutoff,
            "seed": self.seed,
            "lemma1": {"scale": self.lemma1_scale, "counts": list(self.lemma1_counts)},
            "tolerances": dict(sorted(self.tolerances.items())),
        }

    def digest(self) -> str:
        """Hash of everything that affects results (not the output dir)."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def p_text(p: float) -> str:
    return "inf" if math.isinf(p) else repr(float(p))


def _num(v) -> float:
    # PyYAML reads "1e-6" (no dot) as a string
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise ValueError
    x = float(v)
    if math.isnan(x):
        raise ValueError
    return x


def _parse_p(v):
    if isinstance(v, str) and v.strip().lower() in {"inf", "infinity", ".inf", "∞"}:
        return math.inf
    if isinstance(v, bool):
        raise ValueError
    p = float(v)
    if math.isnan(p) or p < 1:
        raise ValueError
    return p


def parse_law_arg(text: str) -> LawSpec:
    """A shorthand name or a path to a YAML file holding a law mapping."""
    if text in SHORTHANDS:
        return SHORTHANDS[text]()
    with open(text) as fh:
        data = yaml.safe_load(fh)
    if isinstance(data, dict) and "law" in data and "kind" not in data:
        data = data["law"]
    return law_from_dict(data)


def parse_config(text: str) -> RunConfig:
    """Validate a YAML config; every problem is reported, each with its
    field path."""
    errors: list[str] = []
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"<root>: not valid YAML ({exc})"]) from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a mapping"])
    for key in sorted(set(data) - _KEYS, key=str):
        errors.append(f"{key}: unknown field")

    law = None
    if "law" not in data:
        errors.append("law: required field missing")
    elif isinstance(data["law"], str):
        if data["law"] in SHORTHANDS:
            law = SHORTHANDS[data["law"]]()
        else:
            errors.append(f"law: unknown shorthand {data['law']!r}; "
                          f"expected one of {sorted(SHORTHANDS)} or a mapping")
    else:
        law = law_from_dict(data["law"], "law", errors)

    cfg = RunConfig(law=law)

    if "n" in data:
        n = data["n"]
        if (not isinstance(n, int) or isinstance(n, bool) or n < 16 or n > 2**16
                or n & (n - 1)):
            errors.append(f"n: expected a power of two between 16 and 65536, got {n!r}")
        else:
            cfg.n = n

    if "t" in data:
        ts = data["t"]
        if not isinstance(ts, list) or not ts:
            errors.append("t: expected a non-empty list")
        else:
            good = []
            for i, t in enumerate(ts):
                try:
                    v = _num(t)
                    if not 0 < v < 1:
                        raise ValueError
                    good.append(v)
                except ValueError:
                    errors.append(f"t[{i}]: expected a number in (0, 1), got {t!r}")
            cfg.ts = good

    if "p" in data:
        ps = data["p"]
        if not isinstance(ps, list) or not ps:
            errors.append("p: expected a non-empty list")
        else:
            good = []
            for i, p in enumerate(ps):
                try:
                    good.append(_parse_p(p))
                except (TypeError, ValueError):
                    errors.append(f"p[{i}]: expected p >= 1 or 'inf', got {p!r}")
            cfg.ps = good

    for key, attr in (("cutoff", "cutoff"), ("seed", "seed")):
        if key in data:
            v = data[key]
            lo = 1 if key == "cutoff" else 0
            if not isinstance(v, int) or isinstance(v, bool) or v < lo:
                errors.append(f"{key}: expected an integer >= {lo}, got {v!r}")
            else:
                setattr(cfg, attr, v)

    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            errors.append("output_dir: expected a string")
        else:
            cfg.output_dir = data["output_dir"]

    if "lemma1" in data:
        l1 = data["lemma1"]
        if not isinstance(l1, dict):
            errors.append("lemma1: expected a mapping")
        else:
            for key in sorted(set(l1) - {"scale", "counts"}, key=str):
                errors.append(f"lemma1.{key}: unknown field")
            if "scale" in l1:
                s = l1["scale"]
                try:
                    cfg.lemma1_scale = _num(s)
                    if not cfg.lemma1_scale > 0:
                        raise ValueError
                except ValueError:
                    errors.append(f"lemma1.scale: expected a positive number, got {s!r}")
            if "counts" in l1:
                c = l1["counts"]
                if (not isinstance(c, list) or len(c) != 2
                        or not all(isinstance(v, int) and not isinstance(v, bool) for v in c)
                        or not 1 <= c[0] <= c[1]):
                    errors.append(f"lemma1.counts: expected [lo, hi] with 1 <= lo <= hi, "
                                  f"got {c!r}")
                else:
                    cfg.lemma1_counts = (c[0], c[1])

    if "tolerances" in data:
        tol = data["tolerances"]
        if not isinstance(tol, dict):
            errors.append("tolerances: expected a mapping")
        else:
            for key, v in tol.items():
                if key not in DEFAULT_TOLERANCES:
                    errors.append(f"tolerances.{key}: unknown tolerance")
                    continue
                try:
                    x = _num(v)
                    if not x > 0:
                        raise ValueError
                    cfg.tolerances[key] = x
                except ValueError:
                    errors.append(f"tolerances.{key}: expected a positive number, got {v!r}")

    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
