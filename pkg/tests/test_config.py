import math

import pytest
import yaml

from torusgap.config import ConfigError, RunConfig, parse_config
from torusgap.law import Atoms, Gaussian, IidSum, Mixture, Uniform, decency


def test_minimal_defaults():
    cfg = parse_config("law: {kind: uniform, a: -1, b: 1}")
    assert cfg.law == Uniform(-1, 1)
    assert cfg.n == 4096 and cfg.seed == 0
    assert cfg.ps == [1.0, 2.0, math.inf]
    assert len(cfg.ts) == 12
    assert cfg.ts[0] == pytest.approx(0.02) and cfg.ts[-1] == pytest.approx(0.5)


def test_shorthand():
    assert parse_config("law: mixture").law == Mixture(
        ((0.5, Atoms(((0.0, 1.0),))), (0.5, Uniform(-1, 1))))


def test_atom_masses_named():
    with pytest.raises(ConfigError) as exc:
        parse_config("law: {kind: atoms, atoms: [[0, 0.5], [1, 0.4]]}")
    assert any(e.startswith("law.atoms") for e in exc.value.errors)


def test_nested_mixture_accepted():
    text = """
law:
  kind: mixture
  components:
    - weight: 0.4
      law: {kind: gaussian, mean: 0, sigma: 2}
    - weight: 0.6
      law:
        kind: iid_sum
        count: 3
        base: {kind: atoms, atoms: [[0, 0.5], [0.5, 0.5]]}
"""
    cfg = parse_config(text)
    assert isinstance(cfg.law.components[1][1], IidSum)
    assert decency(cfg.law) is not None


def test_errors_are_exhaustive():
    text = """
law: {kind: gaussian, sigma: -1}
n: 1000
t: [0.1, 1.5, abc]
p: [0.5, 2]
seed: -3
bogus: 1
tolerances: {sharpness: 0, nope: 1}
"""
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    paths = {e.split(":")[0] for e in exc.value.errors}
    assert {"law", "n", "t[1]", "t[2]", "p[0]", "seed", "bogus",
            "tolerances.sharpness", "tolerances.nope"} <= paths


def test_missing_law():
    with pytest.raises(ConfigError, match="law: required"):
        parse_config("n: 64")


def test_scientific_notation():
    cfg = parse_config("law: uniform\ntolerances: {sharpness: 1e-7}")
    assert cfg.tolerances["sharpness"] == 1e-7


def test_inf_spellings():
    cfg = parse_config("law: uniform\np: [1, inf, .inf, 3]")
    assert cfg.ps == [1.0, math.inf, math.inf, 3.0]


def test_digest_ignores_output_dir():
    a = parse_config("law: uniform\noutput_dir: a")
    b = parse_config("law: uniform\noutput_dir: b")
    c = parse_config("law: uniform\nseed: 1")
    assert a.digest() == b.digest() != c.digest()


def test_roundtrip_dict():
    cfg = RunConfig(law=Gaussian(0, 1), ts=[0.1], ps=[2.0])
    again = parse_config(yaml.safe_dump(cfg.to_dict()))
    assert again.digest() == cfg.digest()
