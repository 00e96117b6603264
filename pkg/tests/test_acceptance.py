"""The ten acceptance criteria, each at its stated tolerance and time budget.

A pass/fail line per criterion is printed in the terminal summary (see
conftest.py).
"""

import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest

from torusgap import gap as G
from torusgap import verify as V
from torusgap.cli import main
from torusgap.law import Atoms, Gaussian, Mixture, Uniform, char_fn
from torusgap.operator import apply, build_grid_operator
from torusgap.torus import GridFunction, TorusGrid, TrigPoly, lp_norm, project_mean_zero

ROOT = Path(__file__).resolve().parents[1]
N = 4096
MIXTURE = Mixture(((0.5, Atoms(((0.0, 1.0),))), (0.5, Uniform(-1, 1))))
LAWS = {"uniform": Uniform(-1, 1), "gaussian": Gaussian(0, 1), "mixture": MIXTURE}

# regression constants from the first verified run at n = 4096 (see test_gap.py)
FROZEN_C_EST = {
    "uniform": {"1": 4.0, "2": 4.0, "inf": 4.0},
    "gaussian": {"1": 3.9634438862145935, "2": 3.9712324693972274, "inf": 3.9634438862145926},
    "mixture": {"1": 2.0, "2": 2.0, "inf": 2.0},
}


class Timer:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.budget, f"took {self.elapsed:.1f} s > {self.budget} s"


_SWEEPS = {}


def sweep(name):
    if name not in _SWEEPS:
        _SWEEPS[name] = G.sweep_fit_constant(LAWS[name], grid=TorusGrid(N))
    return _SWEEPS[name]


@pytest.mark.acceptance(1, "sharpness identity for cos(2 pi x), t in {0.05,0.1,0.25,0.5}, p in {1,2,inf}")
def test_01_sharpness():
    with Timer(5):
        grid = TorusGrid(N)
        f = grid.sample(lambda x: np.cos(2 * np.pi * x))
        for t in (0.05, 0.1, 0.25, 0.5):
            op = build_grid_operator(Uniform(-1, 1), t, grid)
            resid = f - apply(op, f)
            expected = 1 - math.sin(2 * math.pi * t) / (2 * math.pi * t)
            for p in (1, 2, math.inf):
                ratio = lp_norm(resid, p) / lp_norm(f, p)
                assert abs(ratio - expected) <= 1e-6, (t, p, ratio, expected)


@pytest.mark.acceptance(2, "L2 gap asymptotics gap_2(t)/t^2 within 2% of (2 pi)^2/6")
def test_02_l2_asymptotics():
    limit = (2 * math.pi) ** 2 / 6
    assert limit == pytest.approx(6.5797, abs=1e-4)
    with Timer(1):
        for t in (0.01, 0.02, 0.05):
            rep = G.gap_l2(build_grid_operator(Uniform(-1, 1), t, TorusGrid(N)))
            assert abs(rep.gap / t**2 / limit - 1) <= 0.02, (t, rep.gap / t**2)
            # exhaustive k-scan oracle on the exact symbol
            k = np.arange(1, 2001)
            oracle = np.abs(1 - char_fn(Uniform(-1, 1), 2 * np.pi * k * t)).min()
            assert abs(oracle / t**2 / limit - 1) <= 0.02
            # the grid window spans only 2tn cells at t = 0.01
            assert rep.gap == pytest.approx(oracle, rel=1e-3)


@pytest.mark.acceptance(3, "sweeps over 12 t x p in {1,2,inf}: c_est > 0, max_p/min_p <= 10, frozen values")
def test_03_sweep_constants():
    with Timer(300):
        for name in LAWS:
            sw = sweep(name)
            assert sw.c_est > 0, name
            by_p = sw.c_est_by_p
            assert max(by_p.values()) / min(by_p.values()) <= 10, name
            assert len(sw.reports) == 36
            for p, value in FROZEN_C_EST[name].items():
                assert by_p[p] == pytest.approx(value, rel=1e-9), (name, p)


@pytest.mark.acceptance(4, "gap_l1 / gap_linf match extreme-point and LP oracles, n in {4,8,16}")
def test_04_gap_oracles():
    with Timer(30):
        for n in (4, 8, 16):
            r = V.gap_oracle_check(n, count=20, seed=100 + n, tol=1e-8)
            assert r.status == "pass", r.values


@pytest.mark.acceptance(5, "c-good kernels contract mean-zero functions by 1 - c")
def test_05_lemma2():
    rng = np.random.default_rng(2024)
    with Timer(30):
        for i in range(20):
            w = V.random_good_kernel(64, rng)
            c = 64 * w.min()
            for p in (1, 2, math.inf):
                assert V.meanzero_operator_norm(w, p) <= 1 - c + 1e-9
            r = V.lemma2_check(w, ps=(1.0, 2.0, math.inf, 1.5, 3.0), samples=1000, seed=i)
            assert r.status == "pass", r.values
            for p in ("1.5", "3"):
                assert r.values["sampled_ratio"][p] <= 1 - c + 1e-9


@pytest.mark.acceptance(6, "goodness >= 0.99 for n in [32,128]; LCLT distance decreasing; atoms n/a")
def test_06_lemma1():
    with Timer(60):
        r = V.lemma1_check(Uniform(-1, 1), 3.0, range(32, 129), floor=0.99)
        assert r.status == "pass" and min(r.values["goodness"]) >= 0.99
        # the wrapped limit N(0, C^2 / 3) mod 1, by the theta series at x = 1/2
        sigma = 3 / math.sqrt(3)
        k = np.arange(-50, 51)
        theta = np.exp(-((0.5 + k) ** 2) / (2 * sigma**2)).sum() / (math.sqrt(2 * math.pi) * sigma)
        assert r.values["goodness"][-1] == pytest.approx(theta, abs=1e-3)
        d = [V.lclt_distance(Uniform(-1, 1), n) for n in (8, 16, 32, 64)]
        assert all(b <= a * 1.05 for a, b in zip(d, d[1:])), d
        atomic = V.lemma1_check(Atoms(((0.0, 0.5), (1.0, 0.5))), 3.0, [32])
        assert atomic.status == "not_applicable"


@pytest.mark.acceptance(7, "telescoping and contraction, 100 functions, m <= 64, 1e-12 slack")
def test_07_telescoping():
    with Timer(30):
        grid = TorusGrid(1024)
        op = build_grid_operator(Uniform(-1, 1), 0.1, grid)
        rng = np.random.default_rng(7)
        for _ in range(100):
            f = project_mean_zero(GridFunction(grid, rng.standard_normal(grid.n)))
            for m in range(1, 65):
                r = V.telescoping_contraction_check(op, f, m, slack=1e-12)
                assert r.passed, (m, r.margins)


@pytest.mark.acceptance(8, "atomic counterexamples: n = 4, some n <= 1e4, n = 10; within pigeonhole bound")
def test_08_counterexamples():
    expected_n = [4, None, 10]
    with Timer(30):
        for (atoms, t, eps), n in zip(V.COUNTEREXAMPLE_CASES, expected_n):
            rep = V.counterexample_search(Atoms(atoms), t, eps)
            if n is not None:
                assert rep.n == n
            assert rep.n <= 10_000
            assert rep.residual <= eps
            assert rep.n <= rep.pigeonhole_bound
            assert abs(rep.residual - rep.residual_quadrature) <= 1e-9


@pytest.mark.acceptance(9, "Sobolev corollary for sin(2 pi k x), k <= 4, with c_est from criterion 3")
def test_09_sobolev():
    c_est = sweep("uniform").c_est_by_p["1"]
    with Timer(30):
        for k in range(1, 5):
            f = TrigPoly.sin(k)
            for t in (0.05, 0.1, 0.25, 0.5):
                r = V.sobolev_corollary_check(f, t, c_est, slack=1e-8)
                assert r.values["lhs"] >= c_est * t * t * lp_norm(f, 1)
                assert r.values["lhs"] >= r.values["chain_rhs"] - 1e-8
                assert r.status == "pass"


@pytest.mark.acceptance(10, "verify outputs byte-identical across 1, 2 and 8 threads")
def test_10_determinism(tmp_path):
    config = ROOT / "configs" / "uniform.yaml"
    dirs = []
    for threads in (1, 2, 8, 1):
        out = tmp_path / f"threads{threads}_{len(dirs)}"
        assert main(["verify", "--config", str(config), "--out", str(out),
                     "--threads", str(threads)]) == 0
        dirs.append(out)
    files = sorted(p.relative_to(dirs[0]) for p in dirs[0].rglob("*") if p.is_file())
    assert len(files) > 10
    for other in dirs[1:]:
        assert sorted(p.relative_to(other) for p in other.rglob("*") if p.is_file()) == files
        match, mismatch, errors = filecmp.cmpfiles(dirs[0], other, [str(f) for f in files],
                                                   shallow=False)
        assert not mismatch and not errors, mismatch
