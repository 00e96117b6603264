"""Uniform grids on the circle T = R/Z, grid functions, trigonometric
polynomials and their L_p norms."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy import optimize

DEFAULT_N = 4096


@dataclass(frozen=True)
class TorusGrid:
    """n equally spaced points x_i = i/n; point i stands for the cell
    [x_i - h/2, x_i + h/2)."""

    n: int = DEFAULT_N

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"grid size must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @cached_property
    def points(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    @cached_property
    def frequencies(self) -> np.ndarray:
        """Signed integer frequency of each DFT slot."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).round().astype(np.int64)

    def sample(self, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return GridFunction(self, fn(self.points))


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def _check(self, other: "GridFunction") -> None:
        if other.grid != self.grid:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check(other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - other)

    def __mul__(self, scalar):
        return GridFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def mean(self) -> float:
        return math.fsum(self.values) / self.grid.n

    def roll(self, shift: int) -> "GridFunction":
        """g(x_i) = f(x_{i+shift})."""
        return GridFunction(self.grid, np.roll(self.values, -shift))

    # -- I/O ------------------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "value"])
            for i, v in enumerate(self.values):
                writer.writerow([i, format(float(v), ".17g")])

    @classmethod
    def from_csv(cls, path) -> "GridFunction":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        values = np.empty(len(rows))
        for row in rows:
            values[int(row["index"])] = float(row["value"])
        return cls(TorusGrid(len(rows)), values)

    def to_raw(self, path) -> None:
        """Little-endian float64, no header."""
        Path(path).write_bytes(self.values.astype("<f8").tobytes())

    @classmethod
    def from_raw(cls, path) -> "GridFunction":
        values = np.frombuffer(Path(path).read_bytes(), dtype="<f8")
        return cls(TorusGrid(values.size), values.astype(float))


class TrigPoly:
    """f(x) = sum_{|k| <= K} c_k exp(2 pi i k x).

    Coefficients are stored densely, index k + K holding c_k.
    """

    def __init__(self, coeffs, real: bool | None = None):
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size % 2 == 0:
            raise ValueError("coefficient vector must have odd length 2K+1")
        mirror = np.conj(coeffs[::-1])
        tol = 1e-14 * max(1.0, float(np.abs(coeffs).max(initial=0.0)))
        symmetric = bool(np.allclose(coeffs, mirror, rtol=0, atol=tol))
        if real is None:
            real = symmetric
        elif real and not symmetric:
            raise ValueError("real flag set but coefficients are not conjugate symmetric")
        if real:
            coeffs = 0.5 * (coeffs + mirror)
        self.coeffs = coeffs
        self.coeffs.setflags(write=False)
        self.real = real

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def frequencies(self) -> np.ndarray:
        K = self.degree
        return np.arange(-K, K + 1)

    @classmethod
    def from_terms(cls, terms: Mapping[int, complex], degree: int | None = None,
                   real: bool | None = None) -> "TrigPoly":
        K = max((abs(k) for k in terms), default=0)
        if degree is not None:
            if degree < K:
                raise ValueError("degree smaller than largest frequency")
            K = degree
        c = np.zeros(2 * K + 1, dtype=complex)
        for k, v in terms.items():
            c[k + K] += v
        return cls(c, real=real)

    @classmethod
    def sin(cls, k: int, amplitude: float = 1.0) -> "TrigPoly":
        """amplitude * sin(2 pi k x)"""
        if k == 0:
            return cls([0.0])
        a = amplitude / 2j
        return cls.from_terms({k: a, -k: -a}, real=True)

    @classmethod
    def cos(cls, k: int, amplitude: float = 1.0) -> "TrigPoly":
        if k == 0:
            return cls([amplitude])
        return cls.from_terms({k: amplitude / 2, -k: amplitude / 2}, real=True)

    def coeff(self, k: int) -> complex:
        K = self.degree
        return complex(self.coeffs[k + K]) if abs(k) <= K else 0j

    def padded(self, degree: int) -> "TrigPoly":
        K = self.degree
        if degree < K:
            raise ValueError("cannot pad to a smaller degree")
        c = np.zeros(2 * degree + 1, dtype=complex)
        c[degree - K:degree + K + 1] = self.coeffs
        return TrigPoly(c, real=self.real)

    def map_coeffs(self, fn: Callable[[np.ndarray], np.ndarray],
                   real: bool | None = None) -> "TrigPoly":
        """c_k -> fn(k) * c_k."""
        return TrigPoly(self.coeffs * fn(self.frequencies), real=real)

    def _binary(self, other, sign):
        K = max(self.degree, other.degree)
        a, b = self.padded(K), other.padded(K)
        real = self.real and other.real
        return TrigPoly(a.coeffs + sign * b.coeffs, real=real or None)

    def __add__(self, other):
        return self._binary(other, 1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __mul__(self, scalar):
        real = self.real and np.isreal(scalar)
        return TrigPoly(self.coeffs * scalar, real=real or None)

    __rmul__ = __mul__

    def derivative(self) -> "TrigPoly":
        return self.map_coeffs(lambda k: 2j * np.pi * k, real=self.real or None)

    def shifted(self, s: float) -> "TrigPoly":
        """x -> f(x + s)."""
        return self.map_coeffs(lambda k: np.exp(2j * np.pi * k * s),
                               real=self.real or None)

    def mean(self) -> complex:
        return self.coeff(0)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = self.frequencies
        out = np.exp(2j * np.pi * np.multiply.outer(x, k)) @ self.coeffs
        return out.real if self.real else out

    def antiderivative(self, x) -> np.ndarray:
        """Primitive G with G(0) = 0; G(x + 1) = G(x) + c_0."""
        x = np.asarray(x, dtype=float)
        k = self.frequencies
        nz = k != 0
        d = self.coeffs[nz] / (2j * np.pi * k[nz])
        phase = np.exp(2j * np.pi * np.multiply.outer(x, k[nz])) - 1.0
        out = self.coeffs[~nz][0] * x + phase @ d
        return out.real if self.real else out

    def on_grid(self, m: int) -> np.ndarray:
        """Values at j/m, j < m; requires m > 2K."""
        K = self.degree
        if m <= 2 * K:
            raise ValueError(f"need more than {2 * K} samples, got {m}")
        spec = np.zeros(m, dtype=complex)
        k = self.frequencies
        spec[k % m] = self.coeffs
        out = np.fft.ifft(spec) * m
        return out.real if self.real else out

    def to_grid(self, grid: TorusGrid) -> GridFunction:
        if not self.real:
            raise ValueError("only real trigonometric polynomials map to grid functions")
        return GridFunction(grid, self.on_grid(grid.n))

    def support(self) -> np.ndarray:
        return self.frequencies[np.abs(self.coeffs) > 0]

    def reduced(self) -> "TrigPoly":
        """Divide every frequency by their gcd d: f(x) = r(d x), and r has
        the same L_p norms on T."""
        ks = self.support()
        ks = ks[ks != 0]
        if ks.size == 0:
            return TrigPoly([self.coeff(0)], real=self.real)
        d = int(np.gcd.reduce(np.abs(ks)))
        if d == 1:
            return self
        K = int(np.abs(ks).max()) // d
        c = np.zeros(2 * K + 1, dtype=complex)
        for k in range(-K, K + 1):
            c[k + K] = self.coeff(k * d)
        return TrigPoly(c, real=self.real)


# -- norms ------------------------------------------------------------------

def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1:
        raise ValueError(f"p must satisfy p >= 1 or p = inf, got {p}")
    return p


def lp_norm(f, p: float) -> float:
    """L_p norm with respect to Lebesgue (probability) measure on T.

    Grid functions use the Riemann sum h * sum |f_i|^p. Real trigonometric
    polynomials are handled exactly for p = 1 (integration between sign
    changes of the primitive) and p = 2 (Parseval), by a refined maximum
    search for p = inf, and on an oversampled grid for other p.
    """
    p = _check_p(p)
    if isinstance(f, GridFunction):
        return _array_norm(f.values, p)
    if isinstance(f, TrigPoly):
        return _trig_norm(f, p)
    raise TypeError(f"cannot take the norm of {type(f).__name__}")


def _array_norm(v: np.ndarray, p: float) -> float:
    a = np.abs(v)
    if math.isinf(p):
        return float(a.max())
    if p == 1:
        return float(a.mean())
    if p == 2:
        return float(np.sqrt(np.mean(a * a)))
    scale = a.max()
    if scale == 0:
        return 0.0
    return float(scale * np.mean((a / scale) ** p) ** (1.0 / p))


def _trig_norm(f: TrigPoly, p: float) -> float:
    if not f.real:
        raise ValueError("norms are implemented for real trigonometric polynomials")
    r = f.reduced()
    if p == 2:
        return float(np.sqrt(np.sum(np.abs(r.coeffs) ** 2)))
    if p == 1:
        return _trig_l1(r)
    K = max(r.degree, 1)
    if math.isinf(p):
        return _trig_sup(r)
    m = 1 << max(12, math.ceil(math.log2(64 * K)))
    return _array_norm(r.on_grid(m), p)


def _trig_l1(f: TrigPoly) -> float:
    K = f.degree
    if K == 0:
        return abs(f.coeff(0).real)
    m = 1 << max(8, math.ceil(math.log2(32 * K)))
    x = np.arange(m + 1) / m
    y = f.on_grid(m)
    y = np.append(y, y[0])
    roots = list(x[:-1][y[:-1] == 0])
    left = np.nonzero(y[:-1] * y[1:] < 0)[0]
    if left.size:
        roots.extend(_bisect_roots(f, x[left], x[left + 1]))
    if not roots:
        return abs(float(f.coeff(0).real))
    roots = np.sort(np.asarray(roots) % 1.0)
    G = f.antiderivative(roots)
    total = np.abs(np.diff(G)).sum()
    total += abs(G[0] + f.coeff(0).real - G[-1])
    return float(total)


def _bisect_roots(f: TrigPoly, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa, fb = f.evaluate(a), f.evaluate(b)
    # a root sitting on a sample point can show opposite rounding signs in
    # the FFT samples and in direct evaluation; keep the smaller endpoint
    stuck = np.sign(fa) == np.sign(fb)
    at_a = stuck & (np.abs(fa) <= np.abs(fb))
    at_b = stuck & ~at_a
    a0, b0 = a.copy(), b.copy()
    for _ in range(60):
        mid = 0.5 * (a + b)
        fm = f.evaluate(mid)
        same = np.sign(fm) == np.sign(fa)
        a = np.where(same, mid, a)
        fa = np.where(same, fm, fa)
        b = np.where(same, b, mid)
    return np.where(at_a, a0, np.where(at_b, b0, 0.5 * (a + b)))


def _trig_sup(f: TrigPoly) -> float:
    K = max(f.degree, 1)
    m = 1 << max(10, math.ceil(math.log2(64 * K)))
    y = np.abs(f.on_grid(m))
    best = float(y.max())
    for j in np.argsort(y)[-4:]:
        res = optimize.minimize_scalar(
            lambda s: -abs(float(f.evaluate(s))),
            bounds=((j - 1) / m, (j + 1) / m), method="bounded",
            options={"xatol": 1e-14})
        best = max(best, -float(res.fun))
    return best


# -- grid operations ----------------------------------------------------------

def project_mean_zero(f: GridFunction) -> GridFunction:
    v = f.values - math.fsum(f.values) / f.grid.n
    # one compensated correction pass removes the rounding residue
    v = v - math.fsum(v) / f.grid.n
    return GridFunction(f.grid, v)


def circular_convolve(f: GridFunction, w) -> GridFunction:
    """(A f)_i = sum_j w_j f_{i+j mod n}, computed through the DFT."""
    w = np.asarray(w)
    if w.shape != (f.grid.n,):
        raise ValueError(f"kernel length {w.shape} does not match grid size {f.grid.n}")
    symbol = np.fft.ifft(w) * f.grid.n
    out = np.fft.ifft(np.fft.fft(f.values) * symbol)
    return GridFunction(f.grid, out.real)


def spectral_derivative(f: GridFunction) -> GridFunction:
    """f' by multiplying Fourier coefficient k by 2 pi i k. The Nyquist
    mode is dropped, so f should be band-limited below n/2."""
    k = f.grid.frequencies.astype(float)
    if f.grid.n % 2 == 0:
        k[f.grid.n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(f.values) * (2j * np.pi * k))
    return GridFunction(f.grid, out.real)
