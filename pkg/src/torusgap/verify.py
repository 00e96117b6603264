"""Named numerical checks of the inequalities about A_t, and a suite
runner that executes them in a fixed order."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import gap as gapmod
from .law import (Atoms, LawSpec, Mixture, PurelyAtomic, Uniform, decency,
                  goodness_constant, law_label, sum_density_iid, wrapped_density)
from .operator import (MultiplierOperator, GridOperator, apply, apply_multiplier_trig,
                       apply_power, build_grid_operator)
from .torus import (GridFunction, TorusGrid, TrigPoly, lp_norm, project_mean_zero,
                    spectral_derivative)

PS = (1.0, 2.0, math.inf)
SHARP_TS = (0.05, 0.1, 0.25, 0.5)
L2_ASYMPTOTIC_TS = (0.01, 0.02, 0.05)
L2_ASYMPTOTIC_LIMIT = (2 * math.pi) ** 2 / 6


@dataclass
class CheckResult:
    name: str
    status: str
    values: dict = field(default_factory=dict)
    margins: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)
    witness: dict | None = None

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_dict(self) -> dict:
        return asdict(self)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _p(p) -> str:
    return gapmod.p_label(p)


# -- sharpness --------------------------------------------------------------------

def sharpness_cos(t: float, p: float, backend: str = "grid", n: int = 4096,
                  tol: float = 1e-6) -> CheckResult:
    """||f - U_t f||_p / ||f||_p for f = cos(2 pi x) against 1 - sinc."""
    expected = 1.0 - float(np.sinc(2 * t))
    if backend == "grid":
        grid = TorusGrid(n)
        f = grid.sample(lambda x: np.cos(2 * np.pi * x))
        op = build_grid_operator(Uniform(-1, 1), t, grid)
        ratio = lp_norm(f - apply(op, f), p) / lp_norm(f, p)
        meta = {"backend": "grid", "n": n}
    elif backend == "multiplier":
        f = TrigPoly.cos(1)
        op = MultiplierOperator(Uniform(-1, 1), t, cutoff=1)
        ratio = lp_norm(f - apply_multiplier_trig(op, f), p) / lp_norm(f, p)
        meta = {"backend": "multiplier"}
    else:
        raise ValueError(f"unknown backend {backend!r}")
    err = abs(ratio - expected)
    return CheckResult(f"sharpness[t={t:g},p={_p(p)},{backend}]", _status(err <= tol),
                       {"ratio": ratio, "expected": expected, "t": t, "p": _p(p)},
                       {"abs_error": err, "tol": tol}, meta)


def l2_asymptotic_check(t: float, grid: TorusGrid, rel_tol: float = 0.02) -> CheckResult:
    op = build_grid_operator(Uniform(-1, 1), t, grid)
    rep = gapmod.gap_l2(op)
    scaled = rep.gap / t**2
    rel = abs(scaled / L2_ASYMPTOTIC_LIMIT - 1)
    return CheckResult(f"l2_asymptotic[t={t:g}]", _status(rel <= rel_tol),
                       {"gap": rep.gap, "gap_over_t2": scaled, "limit": L2_ASYMPTOTIC_LIMIT,
                        "k": rep.witness["k"]},
                       {"rel_error": rel, "tol": rel_tol}, {"n": grid.n})


# -- Lemma 1: c-goodness of wrapped standardized sums -------------------------------

def lclt_distance(law: LawSpec, n: int, resolution: int = 4096) -> float:
    """sup_x |q_n(x) - N(0, Var Y) density(x)| over the sample points."""
    q = sum_density_iid(law, n, resolution)
    sigma = math.sqrt(law.variance)
    x = q.points
    gauss = np.exp(-0.5 * (x / sigma) ** 2) / (math.sqrt(2 * math.pi) * sigma)
    return float(np.abs(q.samples - gauss).max())


def lemma1_check(law: LawSpec, C: float, counts, grid: TorusGrid | None = None,
                 floor: float = 0.5, settle: int | None = None,
                 resolution: int = 4096) -> CheckResult:
    grid = grid or TorusGrid()
    counts = [int(c) for c in counts]
    name = f"lemma1[{law_label(law)},C={C:g}]"
    meta = {"n_grid": grid.n, "resolution": resolution, "C": C}
    if decency(law) is None:
        return CheckResult(name, "not_applicable", {"reason": "purely atomic law"},
                           meta=meta)
    settle = min(counts) if settle is None else settle
    sigma = math.sqrt(law.variance)
    goodness, lclt = [], []
    for n in counts:
        try:
            q = sum_density_iid(law, n, resolution)
        except PurelyAtomic:
            return CheckResult(name, "not_applicable", {"reason": "purely atomic law"},
                               meta=meta)
        goodness.append(goodness_constant(wrapped_density(q, C, grid)))
        x = q.points
        gauss = np.exp(-0.5 * (x / sigma) ** 2) / (math.sqrt(2 * math.pi) * sigma)
        lclt.append(float(np.abs(q.samples - gauss).max()))
    judged = [g for n, g in zip(counts, goodness) if n >= settle]
    worst = min(judged) if judged else math.nan
    ok = bool(judged) and worst >= floor
    witness = None
    if not ok and judged:
        bad = [n for n, g in zip(counts, goodness) if n >= settle and g < floor]
        witness = {"n": bad[0]}
    return CheckResult(name, _status(ok),
                       {"counts": counts, "goodness": goodness, "lclt_sup_distance": lclt,
                        "min_goodness": worst},
                       {"floor": floor, "margin": worst - floor}, meta, witness)


# -- Lemma 2: c-good kernels contract mean-zero functions ---------------------------

def meanzero_operator_norm(w: np.ndarray, p: float) -> float:
    """Exact norm of f -> sum_j w_j f_{i+j} on mean-zero functions, p in {1, 2, inf}."""
    if p == 1:
        return gapmod.circulant_norm_l1(np.asarray(w, dtype=float))[0]
    if math.isinf(p):
        return gapmod.circulant_norm_linf(np.asarray(w, dtype=float))[0]
    if p == 2:
        lam = np.fft.ifft(w) * len(w)
        return float(np.abs(lam[1:]).max())
    raise ValueError("exact norms are available for p in {1, 2, inf}")


def _batch_norms(values: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=1)
    return np.mean(a**p, axis=1) ** (1.0 / p)


def lemma2_check(w, ps=(1.0, 2.0, math.inf, 1.5, 3.0), samples: int = 1000,
                 seed: int = 0, slack: float = 1e-9) -> CheckResult:
    w = np.asarray(w, dtype=float)
    n = w.size
    c = n * float(w.min())
    bound = 1.0 - c
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((samples, n))
    F -= F.mean(axis=1, keepdims=True)
    symbol = np.fft.ifft(w) * n
    BF = np.fft.ifft(np.fft.fft(F, axis=1) * symbol, axis=1).real
    exact, sampled, ok = {}, {}, True
    for p in ps:
        ratio = float((_batch_norms(BF, p) / _batch_norms(F, p)).max())
        sampled[_p(p)] = ratio
        ok &= ratio <= bound + slack
        if p in (1.0, 2.0) or math.isinf(p):
            norm = meanzero_operator_norm(w, p)
            exact[_p(p)] = norm
            ok &= norm <= bound + slack
            ok &= ratio <= norm + slack
    worst = max(list(exact.values()) + list(sampled.values()))
    return CheckResult(f"lemma2[n={n},c={c:.6g}]", _status(bool(ok)),
                       {"c": c, "bound": bound, "exact_norm": exact, "sampled_ratio": sampled},
                       {"margin": bound - worst, "slack": slack},
                       {"n": n, "samples": samples, "seed": seed})


# -- telescoping -------------------------------------------------------------------

def telescoping_contraction_check(op: GridOperator, f: GridFunction, m: int,
                                  ps=PS, slack: float = 1e-12) -> CheckResult:
    scale = float(np.abs(f.values).max()) or 1.0
    if abs(f.mean()) > 1e-12 * scale:
        raise ValueError("f must have mean zero")
    Af = apply(op, f)
    Amf = apply_power(op, f, m)
    values, margins, ok = {}, {}, True
    for p in ps:
        nf, nAf = lp_norm(f, p), lp_norm(Af, p)
        lhs = lp_norm(f - Af, p)
        rhs = lp_norm(f - Amf, p) / m
        values[_p(p)] = {"norm_f": nf, "norm_Af": nAf, "lhs": lhs, "rhs": rhs}
        margins[_p(p)] = {"contraction": nf - nAf, "telescoping": lhs - rhs}
        ok &= nAf <= nf + slack and lhs >= rhs - slack
    return CheckResult(f"telescoping[m={m}]", _status(ok), values, margins,
                       {"n": op.grid.n, "t": op.t, "m": m, "slack": slack})


# -- Sobolev-type corollary -------------------------------------------------------

def sobolev_corollary_check(f: TrigPoly, t: float, c_est: float,
                            grid: TorusGrid | None = None, slack: float = 1e-8) -> CheckResult:
    """LHS = int |f' - (f(x+t) - f(x-t)) / 2t| against c_est t^2 ||f||_1,
    plus LHS >= 2 ||f - U_t f||_1 (g = f - U_t f has g' equal to the
    integrand and ||g||_1 <= ||g||_inf <= ||g'||_1 / 2)."""
    if abs(f.mean()) > 1e-12:
        raise ValueError("f must have mean zero")
    # c_k (2 pi i k - i sin(2 pi k t) / t)
    resid = f.map_coeffs(lambda k: 2j * np.pi * k - 1j * np.sin(2 * np.pi * k * t) / t,
                         real=f.real or None)
    lhs = lp_norm(resid, 1)
    g = f.map_coeffs(lambda k: 1.0 - np.sinc(2 * k * t), real=f.real or None)
    chain = 2 * lp_norm(g, 1)
    norm_f = lp_norm(f, 1)
    rhs = c_est * t * t * norm_f
    values = {"lhs": lhs, "rhs": rhs, "chain_rhs": chain, "norm_f_l1": norm_f,
              "c_est": c_est, "t": t}
    if grid is not None:
        F = f.to_grid(grid)
        diff = (f.shifted(t).to_grid(grid) - f.shifted(-t).to_grid(grid)) * (1 / (2 * t))
        values["lhs_grid"] = lp_norm(spectral_derivative(F) - diff, 1)
    ok = lhs >= rhs and lhs >= chain - slack
    return CheckResult(f"sobolev[t={t:g},deg={f.degree}]", _status(ok), values,
                       {"bound_margin": lhs - rhs, "chain_margin": lhs - chain},
                       {"n": None if grid is None else grid.n})


# -- atomic counterexample ------------------------------------------------------------

@dataclass
class CounterexampleReport:
    atoms: list
    t: float
    eps: float
    truncation: int
    tail_mass: float
    n: int
    bound: float
    residual: float
    residual_quadrature: float
    search_bound: int
    pigeonhole_bound: int
    found: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pigeonhole_bound"] = str(self.pigeonhole_bound)
        return d


class NotFound(LookupError):
    def __init__(self, report: CounterexampleReport):
        super().__init__(f"no n <= {report.search_bound} reaches eps={report.eps:g}; "
                         f"best n={report.n} with residual {report.residual:.3e}")
        self.report = report


def _sine_residual_l1(law: Atoms, t: float, n: int) -> float:
    """int_0^1 |f_n - A_t f_n| with f_n = (pi/2) sin(2 pi n x), by adaptive
    quadrature over one period of the rescaled expression."""
    pos, mass = law._arrays
    phase = 2 * np.pi * ((n * t * pos) % 1.0)

    half = np.sin(phase / 2)

    # sin(a) - sin(a + phi) = -2 sin(phi / 2) cos(a + phi / 2), without cancellation
    def h(y):
        return abs(np.pi * (mass * half) @ np.cos(2 * np.pi * y + phase / 2))

    # the integrand is |Re(z e^{2 pi i y})|; its kinks go in as breakpoints
    z = np.pi * (mass * half) @ np.exp(0.5j * phase)
    kinks = ((0.25 - np.angle(z) / (2 * np.pi) + np.array([0.0, 0.5])) % 1.0)
    val, _ = integrate.quad(h, 0.0, 1.0, points=np.sort(kinks), limit=400,
                            epsabs=1e-14, epsrel=1e-13)
    return float(val)


def _exact_residual(law: Atoms, t: float, n: int) -> float:
    f = TrigPoly.sin(n, math.pi / 2)
    op = MultiplierOperator(law, t, cutoff=n)
    return lp_norm(f - apply_multiplier_trig(op, f), 1)


def counterexample_search(law: Atoms, t: float, eps: float,
                          n_max: int = 10_000) -> CounterexampleReport:
    """First n <= n_max with pi sum_{i<=N} p_i |sin(pi n t x_i)| + 2 tail <= eps,
    where the first N atoms leave a tail of mass < eps/4."""
    if not isinstance(law, Atoms):
        raise TypeError("counterexample search needs an atomic law")
    if not eps > 0 or not t > 0:
        raise ValueError("eps and t must be positive")
    pos, mass = law._arrays
    tails = np.concatenate([np.cumsum(mass[::-1])[::-1], [0.0]])
    N = int(np.argmax(tails < eps / 4))
    tail = float(tails[N])
    ns = np.arange(1, n_max + 1)
    bound = np.pi * (np.abs(np.sin(np.pi * ((np.outer(ns, t * pos[:N])) % 2.0))) @ mass[:N])
    bound += 2 * tail
    hits = np.nonzero(bound <= eps)[0]
    found = hits.size > 0
    j = int(hits[0]) if found else int(np.argmin(bound))
    n = int(ns[j])
    residual = _exact_residual(law, t, n)
    report = CounterexampleReport(
        atoms=[list(a) for a in law.atoms], t=t, eps=eps, truncation=N, tail_mass=tail,
        n=n, bound=float(bound[j]), residual=residual,
        residual_quadrature=_sine_residual_l1(law, t, n), search_bound=n_max,
        pigeonhole_bound=math.ceil(8 * math.pi / eps) ** N, found=found and residual <= eps)
    if not report.found:
        raise NotFound(report)
    return report


# -- brute-force oracles for the circulant gap formulas --------------------------------

def _dense_inverse(w: np.ndarray) -> np.ndarray:
    n = w.size
    op = GridOperator(TorusGrid(n), w)
    return np.linalg.pinv(np.eye(n) - op.dense())


def oracle_gap_l1(w: np.ndarray) -> float:
    """1 / max over pairs i < j of ||T (e_i - e_j)||_1 / 2 with T the dense
    pseudo-inverse of I - W."""
    T = _dense_inverse(np.asarray(w, dtype=float))
    n = T.shape[0]
    best = max(0.5 * np.abs(T[:, i] - T[:, j]).sum()
               for i in range(n) for j in range(i + 1, n))
    return 1.0 / best


def oracle_gap_linf(w: np.ndarray) -> float:
    """1 / max over rows r of the LP max T_r . f, |f| <= 1, sum f = 0."""
    T = _dense_inverse(np.asarray(w, dtype=float))
    n = T.shape[0]
    best = 0.0
    for r in range(n):
        res = optimize.linprog(-T[r], A_eq=np.ones((1, n)), b_eq=[0.0],
                               bounds=[(-1, 1)] * n, method="highs")
        best = max(best, -res.fun)
    return 1.0 / best


def gap_oracle_check(n: int, count: int = 20, seed: int = 0,
                     tol: float = 1e-8) -> CheckResult:
    rng = np.random.default_rng(seed)
    grid = TorusGrid(n)
    errs_l1, errs_linf = [], []
    for _ in range(count):
        w = rng.dirichlet(np.ones(n))
        op = GridOperator(grid, w / w.sum())
        errs_l1.append(abs(gapmod.gap_l1(op).gap - oracle_gap_l1(op.weights)))
        errs_linf.append(abs(gapmod.gap_linf(op).gap - oracle_gap_linf(op.weights)))
    worst = max(max(errs_l1), max(errs_linf))
    return CheckResult(f"gap_oracles[n={n}]", _status(worst <= tol),
                       {"max_err_l1": max(errs_l1), "max_err_linf": max(errs_linf)},
                       {"worst": worst, "tol": tol}, {"n": n, "count": count, "seed": seed})


def random_good_kernel(n: int, rng) -> np.ndarray:
    c = rng.uniform(0.05, 0.95)
    w = c / n + (1 - c) * rng.dirichlet(np.ones(n) * 0.5)
    return w / w.sum()


# -- suite ----------------------------------------------------------------------------

COUNTEREXAMPLE_CASES = (
    (((0.5, 1.0),), 0.5, 1e-9),
    (((math.sqrt(2) / 2, 1.0),), 1.0, 0.01),
    (((0.3, 0.5), (0.7, 0.5)), 1.0, 1e-6),
)


def counterexample_check(atoms, t, eps, n_max=10_000) -> CheckResult:
    law = Atoms(atoms)
    name = f"counterexample[{law_label(law)},t={t:g},eps={eps:g}]"
    try:
        rep = counterexample_search(law, t, eps, n_max)
    except NotFound as exc:
        return CheckResult(name, "fail", exc.report.to_dict(), witness={"n": exc.report.n})
    agree = abs(rep.residual - rep.residual_quadrature)
    ok = rep.residual <= eps and rep.n <= rep.pigeonhole_bound and agree <= 1e-9
    return CheckResult(name, _status(ok), rep.to_dict(),
                       {"eps_margin": eps - rep.residual, "quadrature_gap": agree})


def _telescoping_batch(law, t, grid, seed, count=100, m_max=64, ps=PS) -> CheckResult:
    op = build_grid_operator(law, t, grid)
    rng = np.random.default_rng(seed)
    worst_c, worst_t, failures = math.inf, math.inf, []
    for i in range(count):
        f = project_mean_zero(GridFunction(grid, rng.standard_normal(grid.n)))
        for m in range(1, m_max + 1):
            r = telescoping_contraction_check(op, f, m, ps)
            for p in r.margins:
                worst_c = min(worst_c, r.margins[p]["contraction"])
                worst_t = min(worst_t, r.margins[p]["telescoping"])
            if not r.passed:
                failures.append({"sample": i, "m": m})
    return CheckResult(f"telescoping[{law_label(law)},t={t:g}]", _status(not failures),
                       {"samples": count, "m_max": m_max},
                       {"min_contraction_margin": worst_c, "min_telescoping_margin": worst_t},
                       {"n": grid.n, "seed": seed}, failures[0] if failures else None)


def _sweep_check(law, ts, ps, grid, workers) -> tuple[CheckResult, gapmod.SweepReport]:
    sw = gapmod.sweep_fit_constant(law, ps, ts, grid, workers=workers)
    decent = decency(law) is not None
    if decent:
        ok = sw.c_est > 0
        status = _status(ok)
    else:
        status = "not_applicable"
    return CheckResult(f"sweep[{sw.law_id}]", status,
                       {"c_est": sw.c_est, "c_est_by_p": sw.c_est_by_p,
                        "rows": [r.as_row() for r in sw.reports]},
                       {"c_est": sw.c_est}, {"n": grid.n, "flags": sw.flags}), sw


def run_suite(config, workers: int = 1) -> list[CheckResult]:
    """Every check for one RunConfig; results come back in a fixed order
    whatever the worker count."""
    grid = TorusGrid(config.n)
    law = config.law
    tol = config.tolerances
    ps = config.ps
    seeds = np.random.SeedSequence(config.seed).generate_state(8)

    sweep_result, sweep = _sweep_check(law, config.ts, ps, grid, workers)
    uniform = Uniform(-1, 1)
    if law == uniform:
        uniform_sweep = sweep
    else:
        uniform_sweep = gapmod.sweep_fit_constant(uniform, ps, config.ts, grid, workers)
    c_sobolev = uniform_sweep.c_est_by_p.get("1", uniform_sweep.c_est)

    jobs = []
    exact_ps = [p for p in ps if p in (1.0, 2.0) or math.isinf(p)]
    for t in SHARP_TS:
        for p in exact_ps:
            jobs.append(lambda t=t, p=p: sharpness_cos(t, p, "grid", config.n,
                                                      tol["sharpness"]))
    for t in L2_ASYMPTOTIC_TS:
        jobs.append(lambda t=t: l2_asymptotic_check(t, grid, tol["l2_asymptotic"]))
    for i, n in enumerate((4, 8, 16)):
        jobs.append(lambda n=n, i=i: gap_oracle_check(n, 20, int(seeds[0]) + i,
                                                      tol["gap_oracle"]))

    def lemma2_batch():
        rng = np.random.default_rng(int(seeds[1]))
        results = [lemma2_check(random_good_kernel(64, rng), seed=int(seeds[2]) + i)
                   for i in range(20)]
        worst = min(r.margins["margin"] for r in results)
        return CheckResult("lemma2[20 kernels,n=64]",
                           _status(all(r.passed for r in results)),
                           {"kernels": len(results)}, {"min_margin": worst}, {"n": 64})

    jobs.append(lemma2_batch)
    lemma1_counts = list(range(config.lemma1_counts[0], config.lemma1_counts[1] + 1))
    jobs.append(lambda: lemma1_check(law, config.lemma1_scale, lemma1_counts, grid,
                                     floor=tol["lemma1_floor"]))
    jobs.append(lambda: _lclt_check(law, tol["lclt_jitter"]))

    def atomic_na():
        r = lemma1_check(Atoms(((0.0, 0.5), (1.0, 0.5))), config.lemma1_scale, [8], grid)
        return CheckResult("lemma1[atomic not applicable]",
                           _status(r.status == "not_applicable"), {"verdict": r.status})

    jobs.append(atomic_na)
    tele_law = law if decency(law) is not None else uniform
    jobs.append(lambda: _telescoping_batch(tele_law, 0.1, TorusGrid(min(config.n, 1024)),
                                           int(seeds[3]), ps=exact_ps))
    for k in range(1, 5):
        for t in SHARP_TS:
            jobs.append(lambda k=k, t=t: sobolev_corollary_check(
                TrigPoly.sin(k), t, c_sobolev, TorusGrid(min(config.n, 1024))))
    for atoms, t, eps in COUNTEREXAMPLE_CASES:
        jobs.append(lambda a=atoms, t=t, e=eps: counterexample_check(a, t, e))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: job(), jobs))
    else:
        results = [job() for job in jobs]
    return [sweep_result] + results


def _lclt_check(law, jitter: float, counts=(8, 16, 32, 64)) -> CheckResult:
    name = f"lclt[{law_label(law)}]"
    if decency(law) is None:
        return CheckResult(name, "not_applicable", {"reason": "purely atomic law"})
    d = [lclt_distance(law, n) for n in counts]
    ok = all(b <= a * (1 + jitter) for a, b in zip(d, d[1:]))
    return CheckResult(name, _status(ok), {"counts": list(counts), "sup_distance": d},
                       {"jitter": jitter})
