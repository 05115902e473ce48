"""Scalar fields on a collar: angular Fourier modes times radial samples.

A field f(z) = sum_n F_n(tau) e^{i n theta} is stored as a dict mode ->
complex profile on the collar's TauGrid.  Products convolve modes; the
volume element only sees mode 0:

    integral f dv = pi u * integral F_0(tau) csc^2(tau) dtau.

Wirtinger derivatives shift modes by one:

    dz    : F_n -> (u F_n' + n F_n) / (2 r)   placed in mode n - 1,
    dzbar : F_n -> (u F_n' - n F_n) / (2 r)   placed in mode n + 1,

with F' the tau-derivative (dr = (r/u) dtau).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .collar import CollarParams, TauGrid

DEFAULT_BANDWIDTH = 24  # modes kept: |n| <= bandwidth (2K + 8 with K = 8)


class BandwidthWarning(UserWarning):
    pass


class UnderResolvedError(ValueError):
    pass


@dataclass
class CollarField:
    collar: CollarParams
    grid: TauGrid
    modes: dict[int, np.ndarray] = field(default_factory=dict)
    bandwidth: int = DEFAULT_BANDWIDTH
    truncated: bool = False

    def copy(self) -> "CollarField":
        return replace(self, modes={n: v.copy() for n, v in self.modes.items()})

    def profile(self, n: int) -> np.ndarray:
        """Mode-n radial profile (zeros if absent)."""
        v = self.modes.get(n)
        if v is None:
            return np.zeros(self.grid.n, dtype=complex)
        return v

    def set_mode(self, n: int, values) -> "CollarField":
        self.modes[n] = np.asarray(values, dtype=complex)
        return self

    def at(self, r, theta) -> complex:
        """Pointwise value by barycentric-free direct summation.

        Radial profiles are interpolated with a local polynomial through
        the nearest stencil of grid nodes; intended for spot checks.
        """
        tau = self.collar.tau_of_r(r)
        x = self.grid.nodes
        i = np.searchsorted(x, tau)
        s = min(max(i - 4, 0), self.grid.n - 9)
        xs = x[s : s + 9]
        # Lagrange basis at tau
        val = 0.0 + 0.0j
        for n, prof in self.modes.items():
            ys = prof[s : s + 9]
            acc = 0.0 + 0.0j
            for k in range(9):
                lk = 1.0
                for m in range(9):
                    if m != k:
                        lk *= (tau - xs[m]) / (xs[k] - xs[m])
                acc += ys[k] * lk
            val += acc * np.exp(1j * n * theta)
        return val

    def sup_norm(self, region=None) -> float:
        """Sup over grid nodes of |f|; crude angular max via mode moduli.

        The triangle-inequality bound sum_n |F_n| is exact for fields with
        a single mode and a sharp upper envelope otherwise; region is an
        optional boolean mask over tau nodes.
        """
        if not self.modes:
            return 0.0
        acc = np.zeros(self.grid.n)
        for v in self.modes.values():
            acc += np.abs(v)
        if region is not None:
            if not np.any(region):
                return 0.0
            acc = acc[region]
        return float(acc.max())

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "CollarField") -> "CollarField":
        _check_same(self, other)
        out = {n: v.copy() for n, v in self.modes.items()}
        for n, v in other.modes.items():
            if n in out:
                out[n] = out[n] + v
            else:
                out[n] = v.copy()
        return CollarField(self.collar, self.grid, out,
                           min(self.bandwidth, other.bandwidth),
                           self.truncated or other.truncated)

    def __sub__(self, other: "CollarField") -> "CollarField":
        return self + other.scale(-1.0)

    def __mul__(self, other: "CollarField") -> "CollarField":
        _check_same(self, other)
        bw = min(self.bandwidth, other.bandwidth)
        out: dict[int, np.ndarray] = {}
        truncated = self.truncated or other.truncated
        for n1, v1 in self.modes.items():
            for n2, v2 in other.modes.items():
                n = n1 + n2
                if abs(n) > bw:
                    truncated = True
                    continue
                if n in out:
                    out[n] = out[n] + v1 * v2
                else:
                    out[n] = v1 * v2
        if truncated and not (self.truncated or other.truncated):
            warnings.warn("mode bandwidth exceeded; product truncated",
                          BandwidthWarning, stacklevel=2)
        return CollarField(self.collar, self.grid, out, bw, truncated)

    def scale(self, a: complex) -> "CollarField":
        return CollarField(self.collar, self.grid,
                           {n: a * v for n, v in self.modes.items()},
                           self.bandwidth, self.truncated)

    def conj(self) -> "CollarField":
        return CollarField(self.collar, self.grid,
                           {-n: np.conj(v) for n, v in self.modes.items()},
                           self.bandwidth, self.truncated)


def _check_same(f: CollarField, g: CollarField):
    if f.grid is not g.grid and (f.grid.n != g.grid.n
                                 or not np.array_equal(f.grid.nodes, g.grid.nodes)):
        raise ValueError("fields live on different grids")


def field_arith(op: str, f: CollarField, g: CollarField | complex | None = None) -> CollarField:
    """Dispatcher form of field arithmetic: add, sub, mul, conj, scale."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "conj":
        return f.conj()
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


def constant_field(collar: CollarParams, grid: TauGrid, value: complex = 1.0,
                   bandwidth: int = DEFAULT_BANDWIDTH) -> CollarField:
    return CollarField(collar, grid,
                       {0: np.full(grid.n, complex(value))}, bandwidth)


def resolution_defect(f: CollarField) -> float:
    """Relative disagreement between wide- and narrow-stencil derivatives.

    Cheap resolution heuristic: well-resolved profiles give ~1e-10, an
    under-resolved boundary layer gives O(1).
    """
    top = 0.0
    bot = 0.0
    g = f.grid
    for v in f.modes.values():
        d9 = g.dtau(v)
        # 5-point comparison derivative
        d5 = _dtau_narrow(g, v)
        top = max(top, float(np.abs(d9 - d5).max()))
        bot = max(bot, float(np.abs(d9).max()))
    if bot == 0.0:
        return 0.0
    return top / bot


def _dtau_narrow(grid: TauGrid, values: np.ndarray) -> np.ndarray:
    key = "stencils5"
    if key not in grid._cache:
        from .collar import _fd_weights
        x = grid.nodes
        n = grid.n
        starts = np.clip(np.arange(n) - 2, 0, n - 5)
        w = np.empty((n, 5))
        for i in range(n):
            s = starts[i]
            w[i] = _fd_weights(x[s : s + 5], x[i], 1)[:, 1]
        grid._cache[key] = (starts[:, None] + np.arange(5)[None, :], w)
    idx, w = grid._cache[key]
    return np.einsum("ij,ij->i", w, np.asarray(values)[idx])


def wirtinger(f: CollarField, which: str, check_resolution: bool = False) -> CollarField:
    """dz or dzbar of a field; shifts each mode by -1 or +1."""
    if which not in ("dz", "dzbar"):
        raise ValueError("which must be 'dz' or 'dzbar'")
    if f.truncated:
        raise UnderResolvedError("refusing to differentiate a truncated field")
    if check_resolution and resolution_defect(f) > 1e-4:
        raise UnderResolvedError("field profiles not resolved on this grid")
    u = f.collar.u
    inv2r = 0.5 / f.grid.r
    sign = 1.0 if which == "dz" else -1.0
    shift = -1 if which == "dz" else 1
    out: dict[int, np.ndarray] = {}
    for n, v in f.modes.items():
        prof = inv2r * (u * f.grid.dtau(v) + sign * n * v)
        m = n + shift
        if m in out:
            out[m] = out[m] + prof
        else:
            out[m] = prof
    return CollarField(f.collar, f.grid, out, f.bandwidth, False)


def volume_integral(f: CollarField) -> complex:
    """Integral of f over the collar against the hyperbolic area element."""
    v0 = f.modes.get(0)
    if v0 is None:
        return 0.0 + 0.0j
    u = f.collar.u
    return math.pi * u * f.grid.integrate(v0 * f.grid.csc2)


def pairing_l2(f: CollarField, g: CollarField) -> complex:
    """L2 pairing integral of f * conj(g) dv (mode-orthogonal sum)."""
    _check_same(f, g)
    u = f.collar.u
    acc = 0.0 + 0.0j
    for n, v in f.modes.items():
        w = g.modes.get(n)
        if w is not None:
            acc += f.grid.integrate(v * np.conj(w) * f.grid.csc2)
    return math.pi * u * acc


def integral_product(f: CollarField, g: CollarField) -> complex:
    """Integral of f * g dv with no conjugation (modes n and -n pair up)."""
    _check_same(f, g)
    u = f.collar.u
    acc = 0.0 + 0.0j
    for n, v in f.modes.items():
        w = g.modes.get(-n)
        if w is not None:
            acc += f.grid.integrate(v * w * f.grid.csc2)
    return math.pi * u * acc
