"""The averaging operator (A_t f)(x) = E f(x + tY mod 1) in two backends.

GridOperator is the circulant matrix obtained by pushing the law of tY onto
the grid; MultiplierOperator acts on trigonometric polynomials through the
exact symbol phi_Y(2 pi k t).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .law import LawSpec, char_fn, pushforward_to_torus
from .torus import GridFunction, TorusGrid, TrigPoly, circular_convolve

DEFAULT_CUTOFF = 512


@dataclass(frozen=True, eq=False)
class GridOperator:
    grid: TorusGrid
    weights: np.ndarray
    t: float | None = None
    law: LawSpec | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} weights, got shape {w.shape}")
        if np.any(w < 0) or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @cached_property
    def symbol(self) -> np.ndarray:
        """lambda_k = sum_j w_j exp(2 pi i j k / n), in DFT slot order."""
        lam = np.fft.ifft(self.weights) * self.grid.n
        lam[0] = 1.0
        lam.setflags(write=False)
        return lam

    def dense(self) -> np.ndarray:
        """Matrix M with (M f)_i = sum_j w_j f_{i+j}."""
        n = self.grid.n
        i = np.arange(n)
        return self.weights[(i[None, :] - i[:, None]) % n]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "position", "weight"])
            for j, v in enumerate(self.weights):
                writer.writerow([j, format(j / self.grid.n, ".17g"), format(float(v), ".17g")])


@dataclass(frozen=True)
class MultiplierOperator:
    law: LawSpec
    t: float
    cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        # the symbol is defined for any t > 0; only the grid builder needs t < 1
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")
        if int(self.cutoff) != self.cutoff or self.cutoff < 1:
            raise ValueError(f"cutoff must be a positive integer, got {self.cutoff!r}")

    def symbols(self, k) -> np.ndarray:
        return char_fn(self.law, 2 * np.pi * np.asarray(k, dtype=float) * self.t)


def _check_t(t):
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")


def build_grid_operator(law: LawSpec, t: float, grid: TorusGrid) -> GridOperator:
    _check_t(t)
    return GridOperator(grid, pushforward_to_torus(law, t, grid), t=t, law=law)


def identity_operator(grid: TorusGrid) -> GridOperator:
    w = np.zeros(grid.n)
    w[0] = 1.0
    return GridOperator(grid, w)


def global_average_operator(grid: TorusGrid) -> GridOperator:
    return GridOperator(grid, np.full(grid.n, 1.0 / grid.n))


def apply(op: GridOperator, f: GridFunction) -> GridFunction:
    if f.grid != op.grid:
        raise ValueError("grid mismatch between operator and function")
    return circular_convolve(f, op.weights)


def apply_symbol(values: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(values) * symbol).real


def apply_power(op: GridOperator, f: GridFunction, m: int) -> GridFunction:
    """A^m f by raising the DFT symbol to the m-th power."""
    if int(m) != m or m < 1:
        raise ValueError(f"power must be a positive integer, got {m!r}")
    if f.grid != op.grid:
        raise ValueError("grid mismatch between operator and function")
    return GridFunction(f.grid, apply_symbol(f.values, op.symbol ** int(m)))


def multiplier_symbol(op, k: int) -> complex:
    """lambda_k of either backend."""
    k = int(k)
    if isinstance(op, GridOperator):
        n = op.grid.n
        if abs(k) > n // 2:
            raise ValueError(f"frequency {k} outside |k| <= {n // 2}")
        return complex(op.symbol[k % n])
    if abs(k) > op.cutoff:
        raise ValueError(f"frequency {k} beyond cutoff {op.cutoff}")
    return complex(op.symbols(k))


def apply_multiplier_trig(op: MultiplierOperator, f: TrigPoly) -> TrigPoly:
    if f.degree > op.cutoff:
        raise ValueError(f"degree {f.degree} exceeds cutoff {op.cutoff}")
    return f.map_coeffs(op.symbols, real=f.real or None)
