"""Laws of the real random variable Y.

Each law knows its characteristic function, first two moments and how to
rescale itself. The module-level functions push laws onto the torus grid,
build densities of standardized i.i.d. sums and wrap them modulo 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy import fft as sfft
from scipy import special

from .torus import TorusGrid

log = logging.getLogger(__name__)

MASS_TOL = 1e-12
TABLE_TOL = 1e-9
GAUSS_TAIL_SIGMAS = 10.0
WINDOW_SIGMAS = 8.0
DEFAULT_RESOLUTION = 2**12
MAX_CELLS = 2**26
WRAP_TAIL = 1e-12


class LawError(ValueError):
    pass


class PurelyAtomic(LawError):
    """No absolutely continuous part at any order: the law is not decent."""


def _as_float(x, name):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise LawError(f"{name} must be a real number, got {x!r}") from None
    if not math.isfinite(x):
        raise LawError(f"{name} must be finite, got {x}")
    return x


@dataclass(frozen=True)
class Uniform:
    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        a, b = _as_float(self.a, "a"), _as_float(self.b, "b")
        if not b > a:
            raise LawError(f"uniform law needs b > a, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def _char_fn(self, u):
        half = 0.5 * (self.b - self.a)
        return np.exp(0.5j * (self.a + self.b) * u) * np.sinc(half * u / np.pi)

    @property
    def mean(self):
        return 0.5 * (self.a + self.b)

    @property
    def variance(self):
        return (self.b - self.a) ** 2 / 12.0

    def support(self):
        return self.a, self.b

    def cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def scaled(self, s):
        lo, hi = sorted((s * self.a, s * self.b))
        return Uniform(lo, hi)


@dataclass(frozen=True)
class Gaussian:
    mean: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        mu, sigma = _as_float(self.mean, "mean"), _as_float(self.sigma, "sigma")
        if not sigma > 0:
            raise LawError(f"gaussian sigma must be positive, got {sigma}")
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "sigma", sigma)

    def _char_fn(self, u):
        return np.exp(1j * self.mean * u - 0.5 * (self.sigma * u) ** 2)

    @property
    def variance(self):
        return self.sigma**2

    def support(self):
        r = GAUSS_TAIL_SIGMAS * self.sigma
        return self.mean - r, self.mean + r

    def cdf(self, x):
        return special.ndtr((x - self.mean) / self.sigma)

    def scaled(self, s):
        return Gaussian(s * self.mean, abs(s) * self.sigma)


@dataclass(frozen=True)
class Atoms:
    """Finitely many point masses, given as (position, mass) pairs."""

    atoms: tuple

    def __post_init__(self):
        pairs = []
        for i, item in enumerate(self.atoms):
            try:
                pos, mass = item
            except (TypeError, ValueError):
                raise LawError(f"atom {i} must be a (position, mass) pair") from None
            pos = _as_float(pos, f"atoms[{i}].position")
            mass = _as_float(mass, f"atoms[{i}].mass")
            if mass < 0:
                raise LawError(f"atoms[{i}].mass is negative ({mass})")
            pairs.append((pos, mass))
        if not pairs:
            raise LawError("at least one atom is required")
        total = math.fsum(m for _, m in pairs)
        if abs(total - 1.0) > MASS_TOL:
            raise LawError(f"atom masses sum to {total!r}, expected 1")
        object.__setattr__(self, "atoms", tuple(pairs))

    @cached_property
    def _arrays(self):
        pos = np.array([a for a, _ in self.atoms])
        mass = np.array([m for _, m in self.atoms])
        return pos, mass

    def _char_fn(self, u):
        pos, mass = self._arrays
        return np.exp(1j * np.multiply.outer(u, pos)) @ mass

    @property
    def mean(self):
        pos, mass = self._arrays
        return float(pos @ mass)

    @property
    def variance(self):
        pos, mass = self._arrays
        return float(((pos - self.mean) ** 2) @ mass)

    def support(self):
        pos, _ = self._arrays
        return float(pos.min()), float(pos.max())

    def scaled(self, s):
        return Atoms(tuple((s * p, m) for p, m in self.atoms))


@dataclass(frozen=True)
class DensityTable:
    """Density sampled at equally spaced knots on [lo, hi], read as its
    piecewise-linear interpolant."""

    lo: float
    hi: float
    samples: tuple

    def __post_init__(self):
        lo, hi = _as_float(self.lo, "lo"), _as_float(self.hi, "hi")
        if not hi > lo:
            raise LawError(f"density table needs hi > lo, got [{lo}, {hi}]")
        vals = np.asarray(self.samples, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise LawError("density table needs at least two samples")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise LawError("density samples must be finite and nonnegative")
        step = (hi - lo) / (vals.size - 1)
        total = step * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
        if abs(total - 1.0) > TABLE_TOL:
            raise LawError(f"density table integrates to {total!r}, expected 1")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "samples", tuple(float(v) for v in vals))

    @classmethod
    def from_function(cls, fn, lo, hi, m=1025):
        """Sample fn on m knots and normalize it."""
        x = np.linspace(lo, hi, m)
        vals = np.clip(np.asarray(fn(x), dtype=float), 0.0, None)
        step = (hi - lo) / (m - 1)
        vals = vals / (step * (vals.sum() - 0.5 * (vals[0] + vals[-1])))
        return cls(lo, hi, tuple(vals))

    @cached_property
    def density(self) -> "RealDensity":
        vals = np.asarray(self.samples)
        d = RealDensity(self.lo, (self.hi - self.lo) / (vals.size - 1), vals)
        return RealDensity(d.lo, d.step, vals / d.integral())

    def _char_fn(self, u):
        return self.density.char_fn(u)

    @property
    def mean(self):
        return self.density.mean()

    @property
    def variance(self):
        return self.density.variance()

    def support(self):
        return self.lo, self.hi

    def cdf(self, x):
        return self.density.cdf(x)

    def scaled(self, s):
        if s <= 0:
            raise LawError("density tables scale by positive factors only")
        vals = np.asarray(self.samples) / s
        return DensityTable(s * self.lo, s * self.hi, tuple(vals))


@dataclass(frozen=True)
class Mixture:
    """sum_i w_i * law_i, given as (weight, law) pairs."""

    components: tuple

    def __post_init__(self):
        comps = []
        for i, item in enumerate(self.components):
            try:
                w, law = item
            except (TypeError, ValueError):
                raise LawError(f"component {i} must be a (weight, law) pair") from None
            w = _as_float(w, f"components[{i}].weight")
            if w < 0:
                raise LawError(f"components[{i}].weight is negative ({w})")
            if not isinstance(law, LAW_TYPES):
                raise LawError(f"components[{i}].law is not a law")
            comps.append((w, law))
        if not comps:
            raise LawError("mixture needs at least one component")
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > MASS_TOL:
            raise LawError(f"mixture weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", tuple(comps))

    def _char_fn(self, u):
        return sum(w * law._char_fn(u) for w, law in self.components)

    @property
    def mean(self):
        return math.fsum(w * law.mean for w, law in self.components)

    @property
    def variance(self):
        second = math.fsum(w * (law.variance + law.mean**2) for w, law in self.components)
        return max(second - self.mean**2, 0.0)

    def support(self):
        lows, highs = zip(*(law.support() for w, law in self.components if w > 0))
        return min(lows), max(highs)

    def scaled(self, s):
        return Mixture(tuple((w, law.scaled(s)) for w, law in self.components))


@dataclass(frozen=True)
class IidSum:
    """Law of Y_1 + ... + Y_count with Y_i i.i.d. copies of base."""

    base: object
    count: int

    def __post_init__(self):
        if not isinstance(self.base, LAW_TYPES):
            raise LawError("iid_sum base is not a law")
        if int(self.count) != self.count or self.count < 1:
            raise LawError(f"iid_sum count must be a positive integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))

    def _char_fn(self, u):
        return self.base._char_fn(u) ** self.count

    @property
    def mean(self):
        return self.count * self.base.mean

    @property
    def variance(self):
        return self.count * self.base.variance

    def support(self):
        lo, hi = self.base.support()
        return self.count * lo, self.count * hi

    def scaled(self, s):
        return IidSum(self.base.scaled(s), self.count)


LAW_TYPES = (Uniform, Gaussian, Atoms, DensityTable, Mixture, IidSum)
LawSpec = Union[Uniform, Gaussian, Atoms, DensityTable, Mixture, IidSum]


def char_fn(law: LawSpec, u):
    """E exp(i u Y); scalar in, complex out, arrays broadcast."""
    u_arr = np.asarray(u, dtype=float)
    val = np.asarray(law._char_fn(u_arr), dtype=complex)
    val = np.where(u_arr == 0, 1.0 + 0j, val)
    return complex(val) if val.ndim == 0 else val


def decency(law: LawSpec):
    """Smallest l such that the l-fold i.i.d. sum has an absolutely
    continuous part, decided structurally; None for purely atomic laws."""
    if isinstance(law, (Uniform, Gaussian, DensityTable)):
        return 1
    if isinstance(law, Atoms):
        return None
    if isinstance(law, Mixture):
        orders = [decency(l) for w, l in law.components if w > 0]
        orders = [o for o in orders if o is not None]
        return min(orders) if orders else None
    if isinstance(law, IidSum):
        inner = decency(law.base)
        return None if inner is None else -(-inner // law.count)
    raise TypeError(f"not a law: {law!r}")


def law_label(law: LawSpec) -> str:
    if isinstance(law, Uniform):
        return f"uniform({law.a:g},{law.b:g})"
    if isinstance(law, Gaussian):
        return f"gaussian({law.mean:g},{law.sigma:g})"
    if isinstance(law, Atoms):
        return "atoms(" + ",".join(f"{p:g}:{m:g}" for p, m in law.atoms) + ")"
    if isinstance(law, DensityTable):
        return f"table[{law.lo:g},{law.hi:g}]x{len(law.samples)}"
    if isinstance(law, Mixture):
        return "mix(" + ",".join(f"{w:g}*{law_label(l)}" for w, l in law.components) + ")"
    return f"sum{law.count}({law_label(law.base)})"


# -- serialization --------------------------------------------------------------

def law_to_dict(law: LawSpec) -> dict:
    if isinstance(law, Uniform):
        return {"kind": "uniform", "a": law.a, "b": law.b}
    if isinstance(law, Gaussian):
        return {"kind": "gaussian", "mean": law.mean, "sigma": law.sigma}
    if isinstance(law, Atoms):
        return {"kind": "atoms", "atoms": [[p, m] for p, m in law.atoms]}
    if isinstance(law, DensityTable):
        return {"kind": "density_table", "lo": law.lo, "hi": law.hi,
                "samples": list(law.samples)}
    if isinstance(law, Mixture):
        return {"kind": "mixture",
                "components": [{"weight": w, "law": law_to_dict(l)}
                               for w, l in law.components]}
    return {"kind": "iid_sum", "count": law.count, "base": law_to_dict(law.base)}


_FIELDS = {
    "uniform": {"a": -1.0, "b": 1.0},
    "gaussian": {"mean": 0.0, "sigma": 1.0},
    "atoms": {"atoms": None},
    "density_table": {"lo": None, "hi": None, "samples": None},
    "mixture": {"components": None},
    "iid_sum": {"base": None, "count": None},
}


def law_from_dict(data, path: str = "law", errors: list | None = None):
    """Build a law from nested dicts/lists.

    With errors=None the first problem raises LawError; otherwise problems
    are appended to errors as "path: message" strings and None is returned
    for the offending subtree.
    """
    collect = errors is not None
    errs = errors if collect else []

    def fail(where, msg):
        errs.append(f"{where}: {msg}")
        return None

    def build(d, where):
        if not isinstance(d, dict):
            return fail(where, "expected a mapping with a 'kind' key")
        kind = d.get("kind")
        if kind not in _FIELDS:
            return fail(f"{where}.kind", f"unknown law kind {kind!r}; "
                        f"expected one of {sorted(_FIELDS)}")
        extra = set(d) - set(_FIELDS[kind]) - {"kind"}
        for key in sorted(extra):
            fail(f"{where}.{key}", "unexpected field")
        missing = [k for k, v in _FIELDS[kind].items() if v is None and k not in d]
        for key in missing:
            fail(f"{where}.{key}", "required field missing")
        if missing:
            return None
        args = {k: d.get(k, v) for k, v in _FIELDS[kind].items()}
        n_before = len(errs)
        if kind == "mixture":
            comps = args["components"]
            if not isinstance(comps, list) or not comps:
                return fail(f"{where}.components", "expected a non-empty list")
            built = []
            for i, c in enumerate(comps):
                cw = f"{where}.components[{i}]"
                if not isinstance(c, dict) or set(c) != {"weight", "law"}:
                    fail(cw, "expected a mapping with 'weight' and 'law'")
                    continue
                built.append((c["weight"], build(c["law"], f"{cw}.law")))
            if len(errs) > n_before:
                return None
            try:
                return Mixture(tuple(built))
            except LawError as exc:
                return fail(f"{where}.components", str(exc))
        if kind == "iid_sum":
            base = build(args["base"], f"{where}.base")
            if base is None:
                return None
            try:
                return IidSum(base, args["count"])
            except (LawError, TypeError) as exc:
                return fail(f"{where}.count", str(exc))
        try:
            if kind == "uniform":
                return Uniform(args["a"], args["b"])
            if kind == "gaussian":
                return Gaussian(args["mean"], args["sigma"])
            if kind == "atoms":
                atoms = args["atoms"]
                if not isinstance(atoms, list):
                    return fail(f"{where}.atoms", "expected a list of [position, mass]")
                return Atoms(tuple(tuple(a) if isinstance(a, (list, tuple)) else a
                                   for a in atoms))
            return DensityTable(args["lo"], args["hi"], tuple(args["samples"]))
        except (LawError, TypeError) as exc:
            field = {"atoms": "atoms", "density_table": "samples"}.get(kind, "")
            return fail(f"{where}.{field}" if field else where, str(exc))

    law = build(data, path)
    if not collect and errs:
        raise LawError("; ".join(errs))
    return law


# -- lattice discretization ---------------------------------------------------

def _cells_from_cdf(cdf, lo, hi, h):
    """Masses of cells [(j - 1/2) h, (j + 1/2) h) covering [lo, hi]."""
    jlo = math.floor(lo / h + 0.5)
    jhi = math.ceil(hi / h - 0.5)
    if jhi - jlo + 1 > MAX_CELLS:
        raise LawError(f"support [{lo}, {hi}] needs {jhi - jlo + 1} cells at step {h}")
    edges = (np.arange(jlo, jhi + 2) - 0.5) * h
    return jlo, np.diff(cdf(edges))


def _snap(r):
    near = np.round(r)
    return np.where(np.abs(r - near) < 1e-10, near, r)


def _lattice_masses(law: LawSpec, h: float):
    """(start, masses): mass of law near the lattice point (start + i) * h.

    Densities are integrated over the cell around each point; atoms are
    split linearly between their two neighbouring points.
    """
    if isinstance(law, (Uniform, Gaussian, DensityTable)):
        lo, hi = law.support()
        start, m = _cells_from_cdf(law.cdf, lo, hi, h)
        return start, np.clip(m, 0.0, None)
    if isinstance(law, Atoms):
        pos, mass = law._arrays
        r = _snap(pos / h)
        base = np.floor(r).astype(np.int64)
        frac = r - base
        start = int(base.min())
        size = int(base.max()) - start + 2
        if size > MAX_CELLS:
            raise LawError("atoms spread over too many lattice cells")
        out = np.zeros(size)
        np.add.at(out, base - start, (1.0 - frac) * mass)
        np.add.at(out, base - start + 1, frac * mass)
        return start, out
    if isinstance(law, Mixture):
        parts = [(w, *_lattice_masses(l, h)) for w, l in law.components if w > 0]
        start = min(s for _, s, _ in parts)
        stop = max(s + m.size for _, s, m in parts)
        out = np.zeros(stop - start)
        for w, s, m in parts:
            out[s - start:s - start + m.size] += w * m
        return start, out
    if isinstance(law, IidSum):
        start, m = _lattice_masses(law.base, h)
        size = law.count * (m.size - 1) + 1
        if size > MAX_CELLS:
            raise LawError("iid sum spreads over too many lattice cells")
        L = sfft.next_fast_len(size, real=True)
        out = sfft.irfft(sfft.rfft(m, L) ** law.count, L)[:size]
        return law.count * start, np.clip(out, 0.0, None)
    raise TypeError(f"not a law: {law!r}")


def pushforward_to_torus(law: LawSpec, t: float, grid: TorusGrid) -> np.ndarray:
    """Probability weights w_j of (tY mod 1) near the grid point j/n."""
    start, m = _lattice_masses(law.scaled(t), grid.h)
    idx = (start + np.arange(m.size)) % grid.n
    w = np.bincount(idx, weights=m, minlength=grid.n)
    return w / math.fsum(w)


# -- densities on the line and on the circle ------------------------------------

@dataclass(frozen=True, eq=False)
class RealDensity:
    """Density on the line sampled at lo + i*step, read as its
    piecewise-linear interpolant (zero outside the knots)."""

    lo: float
    step: float
    samples: np.ndarray
    drift: float = 0.0
    tail_mass: float = 0.0

    def __post_init__(self):
        vals = np.array(self.samples, dtype=float)
        if vals.ndim != 1 or vals.size < 2 or np.any(vals < 0):
            raise LawError("density needs at least two nonnegative samples")
        vals.setflags(write=False)
        object.__setattr__(self, "samples", vals)

    @property
    def hi(self):
        return self.lo + self.step * (self.samples.size - 1)

    @property
    def points(self):
        return self.lo + self.step * np.arange(self.samples.size)

    def integral(self) -> float:
        v = self.samples
        return float(self.step * (v.sum() - 0.5 * (v[0] + v[-1])))

    @cached_property
    def _cumulative(self):
        v = self.samples
        return np.concatenate([[0.0], np.cumsum(0.5 * self.step * (v[1:] + v[:-1]))])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        v = self.samples
        pos = np.clip((x - self.lo) / self.step, 0.0, v.size - 1)
        i = np.minimum(np.floor(pos).astype(np.int64), v.size - 2)
        s = (pos - i) * self.step
        r0, r1 = v[i], v[i + 1]
        return self._cumulative[i] + r0 * s + (r1 - r0) * s * s / (2 * self.step)

    def mean(self) -> float:
        x0 = self.points[:-1]
        x1 = x0 + self.step
        r0, r1 = self.samples[:-1], self.samples[1:]
        first = self.step / 6 * (r0 * (2 * x0 + x1) + r1 * (x0 + 2 * x1))
        return float(first.sum() / self.integral())

    def variance(self) -> float:
        mu = self.mean()
        x0 = self.points[:-1] - mu
        x1 = x0 + self.step
        r0, r1 = self.samples[:-1], self.samples[1:]
        second = self.step / 12 * (r0 * (3 * x0**2 + 2 * x0 * x1 + x1**2)
                                   + r1 * (x0**2 + 2 * x0 * x1 + 3 * x1**2))
        return float(second.sum() / self.integral())

    def char_fn(self, u):
        """Exact transform of the normalized interpolant."""
        u = np.asarray(u, dtype=float)
        v = self.samples
        mid = self.lo + self.step * (np.arange(v.size - 1) + 0.5)
        m = 0.5 * (v[1:] + v[:-1])
        d = v[1:] - v[:-1]
        h = self.step
        flat = u.ravel()
        out = np.empty(flat.shape, dtype=complex)
        for a in range(0, flat.size, 256):
            uu = flat[a:a + 256, None]
            half = 0.5 * uu * h
            small = np.abs(half) < 1e-4
            safe = np.where(small, 1.0, half)
            odd = np.where(small, half / 3 - half**3 / 30,
                           (np.sin(safe) - safe * np.cos(safe)) / safe**2)
            seg = np.exp(1j * uu * mid) * (m * h * np.sinc(half / np.pi)
                                           + 0.5j * d * h * odd)
            out[a:a + 256] = seg.sum(axis=1)
        return (out / self.integral()).reshape(u.shape)

    def value(self, x):
        return np.interp(x, self.points, self.samples, left=0.0, right=0.0)


def sum_density_iid(law: LawSpec, n: int, resolution: int = DEFAULT_RESOLUTION,
                    window_sigmas: float = WINDOW_SIGMAS) -> RealDensity:
    """Density q_n of (Y_1 + ... + Y_n - n EY) / sqrt(n).

    Y is put on the lattice of step 1/resolution and convolved with itself n
    times by FFT; the sum is kept on a window of +-window_sigmas standard
    deviations around its mean. Mass outside the window is reported as
    tail_mass and the result is renormalized.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if decency(law) is None:
        raise PurelyAtomic(f"{law_label(law)} has no absolutely continuous part")
    h = 1.0 / resolution
    start, m = _lattice_masses(law, h)
    mu, sigma = law.mean, math.sqrt(law.variance)
    full_lo, full_hi = n * start, n * (start + m.size - 1)
    centre, half = n * mu / h, window_sigmas * sigma * math.sqrt(n) / h
    lo_idx = max(full_lo, math.floor(centre - half))
    hi_idx = min(full_hi, math.ceil(centre + half))
    width = hi_idx - lo_idx + 1
    L = sfft.next_fast_len(max(width, m.size), real=True)
    if L > MAX_CELLS:
        raise LawError(f"sum density needs {L} lattice cells")
    base = np.zeros(L)
    np.add.at(base, (start + np.arange(m.size)) % L, m)
    summed = sfft.irfft(sfft.rfft(base) ** n, L)
    masses = np.clip(summed[(lo_idx + np.arange(width)) % L], 0.0, None)
    tail = max(0.0, 1.0 - math.fsum(masses))

    root = math.sqrt(n)
    step = h / root
    dens = RealDensity((lo_idx * h - n * mu) / root, step, masses / step)
    total = dens.integral()
    drift = total - 1.0
    if abs(drift) > 1e-12:
        log.debug("sum density (n=%d) renormalized by %.3e", n, drift)
    return RealDensity(dens.lo, step, dens.samples / total, drift=drift, tail_mass=tail)


@dataclass(frozen=True, eq=False)
class WrappedDensity:
    """Cell averages of a density on T with respect to Lebesgue measure."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n,) or np.any(vals < 0):
            raise LawError("wrapped density needs n nonnegative values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def mass(self) -> float:
        return math.fsum(self.values) / self.grid.n


def _trim(d: RealDensity, tail: float) -> tuple[float, float]:
    c = d._cumulative
    total = c[-1]
    i = int(np.searchsorted(c, tail * total, side="right")) - 1
    j = int(np.searchsorted(c, (1 - tail) * total, side="left"))
    pts = d.points
    return float(pts[max(i, 0)]), float(pts[min(j, pts.size - 1)])


def wrapped_density(d: RealDensity, scale: float, grid: TorusGrid) -> WrappedDensity:
    """Density of (scale * Z) mod 1 for Z with density d, summing the
    integer translates; tails below 1e-12 are dropped."""
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    lo, hi = _trim(d, WRAP_TAIL)
    n = grid.n
    jlo = math.floor(scale * lo * n + 0.5)
    jhi = math.ceil(scale * hi * n - 0.5)
    edges = (np.arange(jlo, jhi + 2) - 0.5) / n
    masses = np.diff(d.cdf(edges / scale))
    vals = np.bincount(np.arange(jlo, jhi + 1) % n, weights=masses, minlength=n)
    vals = vals / math.fsum(vals)
    return WrappedDensity(grid, np.clip(vals * n, 0.0, None))


def goodness_constant(d: WrappedDensity) -> float:
    """Largest c with P(Z in A) >= c|A| for the discretized law."""
    return max(float(d.values.min()), 0.0)
