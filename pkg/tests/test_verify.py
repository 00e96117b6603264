import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torusgap import verify as V
from torusgap.law import Atoms, Mixture, Uniform
from torusgap.operator import build_grid_operator, global_average_operator
from torusgap.torus import GridFunction, TorusGrid, TrigPoly, project_mean_zero

MIXTURE = Mixture(((0.5, Atoms(((0.0, 1.0),))), (0.5, Uniform(-1, 1))))


def theta_min(sigma, terms=50):
    k = np.arange(-terms, terms + 1)
    return float(np.exp(-((0.5 + k) ** 2) / (2 * sigma**2)).sum() / (math.sqrt(2 * math.pi) * sigma))


class TestSharpness:
    def test_half(self):
        for p in (1, 2, math.inf):
            r = V.sharpness_cos(0.5, p)
            assert r.values["ratio"] == pytest.approx(1.0, abs=1e-6)

    def test_tenth_l1(self):
        r = V.sharpness_cos(0.1, 1)
        assert r.values["ratio"] == pytest.approx(0.064511, abs=1e-6)

    def test_ratios_agree_across_p(self):
        for backend in ("grid", "multiplier"):
            ratios = [V.sharpness_cos(0.25, p, backend).values["ratio"]
                      for p in (1, 2, math.inf)]
            assert max(ratios) - min(ratios) < 1e-8


class TestLemma1:
    def test_uniform(self):
        r = V.lemma1_check(Uniform(-1, 1), 3.0, [32], floor=0.99)
        assert r.status == "pass"
        # the limit is a wrapped Gaussian with sigma = C / sqrt(3)
        assert r.values["goodness"][0] == pytest.approx(theta_min(3 / math.sqrt(3)), abs=1e-3)

    def test_atoms_not_applicable(self):
        r = V.lemma1_check(Atoms(((0.0, 0.5), (1.0, 0.5))), 3.0, [8])
        assert r.status == "not_applicable"

    def test_mixture_positive(self):
        r = V.lemma1_check(MIXTURE, 3.0, [64], floor=0.0)
        assert r.values["goodness"][0] > 0.5

    def test_lclt_decreases(self):
        d = [V.lclt_distance(Uniform(-1, 1), n) for n in (8, 16, 32, 64)]
        assert all(b <= a * 1.05 for a, b in zip(d, d[1:]))


class TestLemma2:
    def test_uniform_kernel(self):
        w = np.full(64, 1 / 64)
        for p in (1, 2, math.inf):
            assert V.meanzero_operator_norm(w, p) < 1e-14

    def test_three_quarters(self):
        n = 64
        w = np.full(n, 0.75 / n)
        w[0] += 0.25
        for p in (1, 2, math.inf):
            assert V.meanzero_operator_norm(w, p) == pytest.approx(0.25, abs=1e-9)
        assert V.lemma2_check(w).status == "pass"

    def test_random_kernels(self):
        rng = np.random.default_rng(0)
        for i in range(20):
            r = V.lemma2_check(V.random_good_kernel(64, rng), seed=i)
            assert r.status == "pass"
            for p, s in r.values["sampled_ratio"].items():
                if p in r.values["exact_norm"]:
                    assert s <= r.values["exact_norm"][p] + 1e-9

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_l1_norm_brute_force(self, seed):
        # exact l1 norm on mean-zero functions is attained at some (e_i - e_j)/2
        rng = np.random.default_rng(seed)
        n = 8
        w = rng.dirichlet(np.ones(n))
        M = np.array([[w[(j - i) % n] for j in range(n)] for i in range(n)])
        best = max(np.abs(M @ (np.eye(n)[i] - np.eye(n)[j])).sum() / 2
                   for i in range(n) for j in range(n) if i != j)
        assert V.meanzero_operator_norm(w, 1) == pytest.approx(best, abs=1e-12)


class TestTelescoping:
    def test_m1_equal(self):
        grid = TorusGrid(256)
        op = build_grid_operator(Uniform(-1, 1), 0.1, grid)
        f = project_mean_zero(GridFunction(grid, np.random.default_rng(0).standard_normal(256)))
        r = V.telescoping_contraction_check(op, f, 1)
        for p in r.values:
            assert r.values[p]["lhs"] == pytest.approx(r.values[p]["rhs"], abs=1e-14)

    def test_global_average(self):
        grid = TorusGrid(64)
        f = project_mean_zero(GridFunction(grid, np.random.default_rng(1).standard_normal(64)))
        r = V.telescoping_contraction_check(global_average_operator(grid), f, 10)
        assert r.passed
        for p in r.values:
            assert r.values[p]["rhs"] == pytest.approx(r.values[p]["lhs"] / 10, rel=1e-12)

    def test_needs_mean_zero(self):
        grid = TorusGrid(16)
        with pytest.raises(ValueError):
            V.telescoping_contraction_check(global_average_operator(grid),
                                            GridFunction(grid, np.ones(16)), 2)

    def test_batch(self):
        r = V._telescoping_batch(Uniform(-1, 1), 0.1, TorusGrid(256), seed=3, count=10)
        assert r.status == "pass"


class TestSobolev:
    def test_half_period(self):
        r = V.sobolev_corollary_check(TrigPoly.sin(1), 0.5, 4.0)
        assert r.values["lhs"] == pytest.approx(4.0, abs=1e-12)
        assert r.status == "pass"

    def test_zero(self):
        r = V.sobolev_corollary_check(TrigPoly([0.0]), 0.1, 4.0)
        assert r.values["lhs"] == 0 and r.values["rhs"] == 0

    def test_taylor(self):
        # f' - (f(x+t) - f(x-t))/2t = (2 pi)^3 t^2 / 6 cos(2 pi x) + O(t^4)
        t = 0.01
        r = V.sobolev_corollary_check(TrigPoly.sin(1), t, 4.0)
        expected = (2 * math.pi) ** 3 / 6 * (2 / math.pi)
        assert r.values["lhs"] / t**2 == pytest.approx(expected, rel=0.05)

    def test_grid_agrees(self):
        r = V.sobolev_corollary_check(TrigPoly.sin(3), 0.1, 4.0, TorusGrid(1024))
        # Riemann sum of |.| loses O(h^2) at each kink
        assert r.values["lhs_grid"] == pytest.approx(r.values["lhs"], rel=1e-5)


class TestCounterexample:
    @pytest.mark.parametrize("atoms,t,eps,n", [
        (((0.5, 1.0),), 0.5, 1e-9, 4),
        (((0.3, 0.5), (0.7, 0.5)), 1.0, 1e-6, 10),
    ])
    def test_rational(self, atoms, t, eps, n):
        rep = V.counterexample_search(Atoms(atoms), t, eps)
        assert rep.n == n and rep.residual <= 1e-14

    def test_irrational(self):
        rep = V.counterexample_search(Atoms(((math.sqrt(2) / 2, 1.0),)), 1.0, 0.01)
        assert rep.n <= 10_000 and rep.residual <= 0.01
        # independent oracle: the residual is 2 |sin(pi n x)|
        assert rep.residual == pytest.approx(2 * abs(math.sin(math.pi * rep.n * math.sqrt(2) / 2)),
                                             abs=1e-12)
        assert abs(rep.residual - rep.residual_quadrature) <= 1e-9
        assert rep.n <= rep.pigeonhole_bound

    def test_truncation(self):
        masses = [0.5 ** k for k in range(1, 30)]
        masses[-1] *= 2
        law = Atoms(tuple((0.5, m) for m in masses))
        rep = V.counterexample_search(law, 0.5, 1e-3)
        assert rep.tail_mass < 1e-3 / 4
        assert rep.truncation < len(masses)

    def test_not_found(self):
        with pytest.raises(V.NotFound):
            V.counterexample_search(Atoms(((math.sqrt(2) / 2, 1.0),)), 1.0, 1e-9, n_max=100)

    def test_density_rejected(self):
        with pytest.raises(TypeError):
            V.counterexample_search(Uniform(-1, 1), 0.5, 0.1)


class TestOracles:
    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_gap_oracle_check(self, n):
        assert V.gap_oracle_check(n, count=20, seed=n).status == "pass"
