"""Gaps of I - A_t on mean-zero functions.

The gap in L_p is g_p = inf ||(I - A)f||_p / ||f||_p over nonzero mean-zero
f, i.e. one over the norm of (I - A)^{-1} on that subspace. For p = 2 it is
the smallest |1 - lambda_k|; for p = 1 and p = inf the inverse is a
circulant kernel whose norm has a closed form over extreme points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import optimize

from .law import LawSpec, decency, law_label
from .operator import GridOperator, MultiplierOperator, build_grid_operator
from .torus import TorusGrid

RESONANCE_TOL = 1e-13
DEFAULT_PS = (1.0, 2.0, math.inf)


class Resonant(ArithmeticError):
    """Some lambda_k with k != 0 equals 1; I - A is not invertible on
    mean-zero functions."""

    def __init__(self, k: int):
        super().__init__(f"resonant frequency k={k}: lambda_k = 1")
        self.k = k


@dataclass(frozen=True, eq=False)
class InverseKernel:
    """Kernel g with ((I - A)^{-1} h)_i = sum_j g_j h_{i+j} on mean-zero h."""

    grid: TorusGrid
    g: np.ndarray


@dataclass
class GapReport:
    p: float
    t: float | None
    gap: float
    method: str
    witness: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        t = self.t
        return {
            "p": p_label(self.p),
            "t": t,
            "t2": None if t is None else t * t,
            "gap": self.gap,
            "gap_over_t2": None if not t else self.gap / (t * t),
            "method": self.method,
            "witness": ";".join(f"{k}={v}" for k, v in self.witness.items()),
        }


@dataclass
class SweepReport:
    law_id: str
    reports: list
    c_est: float
    c_est_by_p: dict
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)


def p_label(p: float) -> str:
    return "inf" if math.isinf(p) else format(p, "g")


# -- p = 2 ----------------------------------------------------------------------

def gap_l2(op, K: int | None = None) -> GapReport:
    """min over 1 <= k <= K of |1 - lambda_k|. On the grid backend K
    defaults to n/2 (every mode of the discretization)."""
    if isinstance(op, GridOperator):
        n = op.grid.n
        K = n // 2 if K is None else min(K, n // 2)
        lam = op.symbol[1:K + 1]
        meta = {"backend": "grid", "n": n}
    elif isinstance(op, MultiplierOperator):
        K = op.cutoff if K is None else K
        lam = op.symbols(np.arange(1, K + 1))
        meta = {"backend": "multiplier", "cutoff": K}
    else:
        raise TypeError(f"unsupported operator {type(op).__name__}")
    if K < 1:
        raise ValueError("need K >= 1")
    dist = np.abs(1.0 - lam)
    j = int(np.argmin(dist))
    gap = float(dist[j])
    if gap < RESONANCE_TOL:
        gap = 0.0
    return GapReport(2.0, op.t, gap, "l2-symbol-scan", {"k": j + 1}, meta)


# -- inverse kernel and p in {1, inf} -------------------------------------------

def inverse_kernel(op: GridOperator) -> InverseKernel:
    lam = op.symbol
    dist = np.abs(1.0 - lam)
    dist[0] = np.inf
    k = int(np.argmin(dist))
    if dist[k] < RESONANCE_TOL:
        raise Resonant(int(op.grid.frequencies[k]))
    mu = np.zeros_like(lam)
    mu[1:] = 1.0 / (1.0 - lam[1:])
    g = np.fft.fft(mu).real / op.grid.n
    return InverseKernel(op.grid, g)


def circulant_norm_l1(kernel: np.ndarray) -> tuple[float, int]:
    """Norm on mean-zero l1 of h -> (sum_j kernel_j h_{i+j}), with the
    maximizing shift d: the extreme points are (e_i - e_j)/2, giving
    max_d 1/2 sum_k |kernel_k - kernel_{k-d}|."""
    n = kernel.size
    doubled = np.concatenate([kernel, kernel])
    # row d of windows[n - d] is kernel_{k - d}
    windows = sliding_window_view(doubled, n)
    best, arg = -1.0, 1
    shifts = np.arange(1, n // 2 + 1)
    for a in range(0, shifts.size, 256):
        d = shifts[a:a + 256]
        sums = np.abs(windows[n - d] - kernel).sum(axis=1)
        j = int(np.argmax(sums))
        if sums[j] > best:
            best, arg = float(sums[j]), int(d[j])
    return 0.5 * best, arg


def circulant_norm_linf(kernel: np.ndarray) -> tuple[float, float]:
    """Norm on mean-zero l_inf: max of sum_j kernel_j h_j over |h_j| <= 1,
    sum h = 0, which equals min over c of sum |kernel_j - c|; the minimum
    sits at a median (the lower median is returned)."""
    c = float(np.sort(kernel)[(kernel.size - 1) // 2])
    return float(np.abs(kernel - c).sum()), c


def gap_l1(op: GridOperator) -> GapReport:
    meta = {"backend": "grid", "n": op.grid.n}
    try:
        kern = inverse_kernel(op)
    except Resonant as exc:
        return GapReport(1.0, op.t, 0.0, "l1-extreme-points", {"k": exc.k}, meta)
    norm, d = circulant_norm_l1(kern.g)
    return GapReport(1.0, op.t, 1.0 / norm, "l1-extreme-points", {"shift": d}, meta)


def gap_linf(op: GridOperator) -> GapReport:
    meta = {"backend": "grid", "n": op.grid.n}
    try:
        kern = inverse_kernel(op)
    except Resonant as exc:
        return GapReport(math.inf, op.t, 0.0, "linf-median", {"k": exc.k}, meta)
    norm, c = circulant_norm_linf(kern.g)
    return GapReport(math.inf, op.t, 1.0 / norm, "linf-median", {"median": c}, meta)


# -- other p ----------------------------------------------------------------------

def _pnorm_and_grad(v: np.ndarray, p: float):
    a = np.abs(v)
    s = a.max()
    if s == 0:
        return 0.0, np.zeros_like(v)
    r = a / s
    norm = s * np.sum(r**p) ** (1.0 / p)
    grad = np.sign(v) * (a / norm) ** (p - 1)
    return norm, grad


def gap_general_p(op: GridOperator, p: float, budget: int = 2000,
                  restarts: int = 4, seed: int = 0) -> GapReport:
    """Upper bound on g_p for 1 < p < inf: the ratio is minimized by
    L-BFGS over mean-zero functions, started from the best Fourier mode
    and from random functions."""
    if not 1 < p < math.inf:
        raise ValueError(f"heuristic gap needs 1 < p < inf, got {p}")
    n = op.grid.n
    lam = op.symbol
    resid, resid_adj = 1.0 - lam, np.conj(1.0 - lam)

    def project(z):
        return z - z.mean()

    def ratio(z):
        f = project(z)
        r = np.fft.ifft(np.fft.fft(f) * resid).real
        nr, gr = _pnorm_and_grad(r, p)
        nf, gf = _pnorm_and_grad(f, p)
        if nf == 0:
            return 1.0, np.zeros_like(z)
        val = nr / nf
        grad = np.fft.ifft(np.fft.fft(gr) * resid_adj).real / nf - val * gf / nf
        return val, project(grad)

    k_best = gap_l2(op).witness["k"]
    x = op.grid.points
    rng = np.random.default_rng(seed)
    starts = [np.cos(2 * np.pi * k_best * x), np.sin(2 * np.pi * k_best * x)]
    starts += [rng.standard_normal(n) for _ in range(restarts)]
    per_start = max(budget // len(starts), 10)
    best, witness = math.inf, None
    for z0 in starts:
        res = optimize.minimize(ratio, project(z0), jac=True, method="L-BFGS-B",
                                options={"maxiter": per_start, "gtol": 1e-12,
                                         "ftol": 1e-15})
        val = ratio(res.x)[0]
        if val < best:
            best, witness = val, project(res.x)
    return GapReport(p, op.t, float(best), "lbfgs-heuristic-upper-bound",
                     {"argmax_abs": int(np.argmax(np.abs(witness)))},
                     {"backend": "grid", "n": n, "heuristic": True,
                      "witness_function": witness})


def gap(op: GridOperator, p: float, **kwargs) -> GapReport:
    if p == 1:
        return gap_l1(op)
    if p == 2:
        return gap_l2(op)
    if math.isinf(p):
        return gap_linf(op)
    return gap_general_p(op, p, **kwargs)


# -- sweeps -----------------------------------------------------------------------

def default_t_list(count: int = 12, lo: float = 0.02, hi: float = 0.5) -> list[float]:
    return [float(v) for v in np.geomspace(lo, hi, count)]


def _sweep_point(law, t, ps, grid):
    op = build_grid_operator(law, t, grid)
    return [gap(op, p) for p in ps]


def sweep_fit_constant(law: LawSpec, ps=DEFAULT_PS, ts=None, grid: TorusGrid | None = None,
                       workers: int = 1) -> SweepReport:
    """Gaps on the (t, p) lattice and c_est = min gap / t^2, overall and
    per p. Lattice points run in parallel but are merged in lattice order."""
    ts = default_t_list() if ts is None else list(ts)
    grid = grid or TorusGrid()
    ps = [float(p) for p in ps]
    for t in ts:
        if not 0 < t < 1:
            raise ValueError(f"t must lie in (0, 1), got {t}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _sweep_point(law, t, ps, grid), ts))
    else:
        rows = [_sweep_point(law, t, ps, grid) for t in ts]
    reports = [r for row in rows for r in row]
    by_p = {}
    for p in ps:
        by_p[p_label(p)] = min(r.gap / r.t**2 for r in reports if r.p == p)
    c_est = min(by_p.values())
    flags = []
    for r in reports:
        if r.gap == 0:
            flags.append(f"resonant at t={r.t:g}, p={p_label(r.p)}, witness {r.witness}")
    if c_est == 0 and not flags:
        flags.append("c_est is zero")
    if c_est > 0 and decency(law) is None:
        flags.append("positive c_est for a purely atomic law is a grid-smoothing artifact")
    return SweepReport(law_label(law), reports, c_est, by_p, flags,
                       {"n": grid.n, "ts": ts, "ps": [p_label(p) for p in ps]})
