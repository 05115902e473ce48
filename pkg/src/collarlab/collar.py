"""Collar geometry: pinching parameters, tau grids, metric density.

Model conventions
-----------------
A collar with pinching parameter ``t`` (``0 < |t| < 1``) and cut
``c in (0, 1)`` is the annulus ``c**-1 * rho < |z| < c`` carrying the
hyperbolic metric ``lambda |dz|^2`` with

    lambda(z) = u**2 / (2 r**2 sin(tau)**2),
    u   = -pi / log|t|,    rho = exp(-pi/u) = |t|,
    tau = u log r in (-pi - u log c, u log c)  strictly inside (-pi, 0).

The geodesic core circle sits at ``r = sqrt(rho)`` (``tau = -pi/2``) and
has length ``2 pi u``.  All radial samplings live on a ``TauGrid``:
composite Gauss-Legendre panels in tau with geometric refinement toward
both ends, so that boundary layers of width ``O(u)`` (cutoff transition
zones, ``r**k`` factors) stay resolved at every supported ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Float range limits the supported pinching: r**-2 = exp(2 pi/u) must be
# representable, and intermediate 1/r profiles appear in mode shifts.
U_MIN = 0.01
U_MAX = 0.5


class CollarError(ValueError):
    pass


@dataclass(frozen=True)
class CollarParams:
    """Geometry of one hyperbolic collar in the model gauge rho = |t|."""

    t: complex
    c: float

    def __post_init__(self):
        a = abs(self.t)
        if not 0.0 < a < 1.0:
            raise CollarError(f"|t| must lie in (0, 1), got {a}")
        if not 0.0 < self.c < 1.0:
            raise CollarError(f"cut c must lie in (0, 1), got {self.c}")
        u = -math.pi / math.log(a)
        if not U_MIN <= u <= U_MAX:
            raise CollarError(
                f"u = {u:.6g} outside supported range [{U_MIN}, {U_MAX}]"
            )
        if self.tau_max <= self.tau_min:
            raise CollarError("cut c too small: empty tau interval")

    @property
    def u(self) -> float:
        return -math.pi / math.log(abs(self.t))

    @property
    def rho(self) -> float:
        return abs(self.t)

    @property
    def tau_min(self) -> float:
        return -math.pi - self.u * math.log(self.c)

    @property
    def tau_max(self) -> float:
        return self.u * math.log(self.c)

    def r_of_tau(self, tau):
        return np.exp(np.asarray(tau) / self.u)

    def tau_of_r(self, r):
        return self.u * np.log(np.asarray(r))


def collar_from_t(t: complex, c: float = 0.5) -> CollarParams:
    """Collar for pinching parameter t; u and rho = |t| are derived."""
    return CollarParams(t=complex(t), c=c)


def collar_from_u(u: float, c: float = 0.5) -> CollarParams:
    """Collar for a target u; t is real positive, |t| = exp(-pi/u)."""
    if not U_MIN <= u <= U_MAX:
        raise CollarError(f"u = {u} outside supported range [{U_MIN}, {U_MAX}]")
    return CollarParams(t=complex(math.exp(-math.pi / u)), c=c)


def metric_density(collar: CollarParams, tau):
    """Hyperbolic density lambda = u^2 / (2 r^2 sin^2 tau) at tau."""
    tau = np.asarray(tau, dtype=float)
    r = collar.r_of_tau(tau)
    return 0.5 * collar.u**2 / (r**2 * np.sin(tau) ** 2)


def geodesic_circle(collar: CollarParams) -> tuple[float, float]:
    """(r*, length) of the core geodesic: r* = sqrt(rho), length 2 pi u."""
    return math.sqrt(collar.rho), 2.0 * math.pi * collar.u


def _fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Finite-difference weights on arbitrary nodes (Fornberg recursion).

    Returns c with c[:, k] the weights of the k-th derivative at x0,
    exact for polynomials of degree < len(x).
    """
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


STENCIL = 9  # polynomial exactness 8; >= 6th order as required


@dataclass
class TauGrid:
    """Open-interval quadrature/differentiation grid on (tau_min, tau_max).

    nodes/weights: composite Gauss-Legendre panels (no endpoint nodes).
    Derivatives use sliding 9-node polynomial stencils on the same nodes.
    """

    collar: CollarParams
    nodes: np.ndarray
    weights: np.ndarray
    panel_edges: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    # -- geometry arrays -------------------------------------------------
    def _geom(self, key):
        cache = self._cache
        if key not in cache:
            tau = self.nodes
            u = self.collar.u
            if key == "r":
                cache[key] = np.exp(tau / u)
            elif key == "sin":
                cache[key] = np.sin(tau)
            elif key == "csc2":
                cache[key] = 1.0 / np.sin(tau) ** 2
            elif key == "lam":
                cache[key] = 0.5 * u**2 * np.exp(-2 * tau / u) / np.sin(tau) ** 2
            elif key == "inv_lam":
                cache[key] = 2.0 * np.exp(2 * tau / u) * np.sin(tau) ** 2 / u**2
            else:
                raise KeyError(key)
        return cache[key]

    @property
    def r(self):
        return self._geom("r")

    @property
    def sin_tau(self):
        return self._geom("sin")

    @property
    def csc2(self):
        return self._geom("csc2")

    @property
    def lam(self):
        return self._geom("lam")

    @property
    def inv_lam(self):
        return self._geom("inv_lam")

    # -- quadrature ------------------------------------------------------
    def integrate(self, values) -> complex:
        """Integral over the tau interval of a sampled profile."""
        return np.dot(self.weights, values)

    # -- differentiation -------------------------------------------------
    def _stencils(self):
        if "stencils" not in self._cache:
            x = self.nodes
            n = self.n
            half = STENCIL // 2
            starts = np.clip(np.arange(n) - half, 0, n - STENCIL)
            w1 = np.empty((n, STENCIL))
            w2 = np.empty((n, STENCIL))
            for i in range(n):
                s = starts[i]
                c = _fd_weights(x[s : s + STENCIL], x[i], 2)
                w1[i] = c[:, 1]
                w2[i] = c[:, 2]
            idx = starts[:, None] + np.arange(STENCIL)[None, :]
            self._cache["stencils"] = (idx, w1, w2)
        return self._cache["stencils"]

    def dtau(self, values, order: int = 1):
        """order-th tau derivative of a sampled profile (order 1 or 2)."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        idx, w1, w2 = self._stencils()
        w = w1 if order == 1 else w2
        v = np.asarray(values)
        return np.einsum("ij,ij->i", w, v[idx])

    def d2_banded_dirichlet(self):
        """Second-derivative operator with zero Dirichlet ends.

        Stencils near the interval ends include the endpoints as ghost
        nodes pinned to zero (their columns are dropped).  Returned in
        scipy banded storage: (ab, (l, u)) with ab[u + i - j, j] = D2[i, j].
        """
        if "d2_dirichlet" in self._cache:
            return self._cache["d2_dirichlet"]
        x = self.nodes
        n = self.n
        xe = np.concatenate(([self.collar.tau_min], x, [self.collar.tau_max]))
        half = STENCIL // 2
        bw = STENCIL - 1
        ab = np.zeros((2 * bw + 1, n))
        for i in range(n):
            ie = i + 1  # position in extended array
            s = min(max(ie - half, 0), n + 2 - STENCIL)
            c = _fd_weights(xe[s : s + STENCIL], xe[ie], 2)
            for k in range(STENCIL):
                j = s + k - 1  # interior column index
                if 0 <= j < n:
                    ab[bw + i - j, j] = c[k, 2]
        out = (ab, (bw, bw))
        self._cache["d2_dirichlet"] = out
        return out


def make_grid(collar: CollarParams, n_tau: int = 2048, nodes_per_panel: int = 10) -> TauGrid:
    """Build the composite Gauss grid for a collar.

    Panel widths shrink geometrically toward both interval ends, starting
    at ~0.02 u (finer than any cutoff transition zone) and doubling until
    they reach the uniform interior width.
    """
    if n_tau < 64:
        raise CollarError("n_tau too small (need >= 64)")
    a, b = collar.tau_min, collar.tau_max
    length = b - a
    p = nodes_per_panel
    total_panels = max(8, int(round(n_tau / p)))
    w0 = 0.02 * collar.u

    # fixed point: interior width consistent with cascade panel count
    n_casc = 0
    for _ in range(8):
        interior = max(4, total_panels - 2 * n_casc)
        w_int = length / interior
        k = 0
        w = w0
        acc = 0.0
        while w < w_int and acc + w < 0.25 * length:
            acc += w
            w *= 2.0
            k += 1
        if k == n_casc:
            break
        n_casc = k

    casc = w0 * 2.0 ** np.arange(n_casc) if n_casc else np.zeros(0)
    left = a + np.concatenate(([0.0], np.cumsum(casc)))
    right = b - np.concatenate(([0.0], np.cumsum(casc)))[::-1]
    mid_lo, mid_hi = left[-1], right[0]
    n_mid = max(2, total_panels - 2 * n_casc)
    mid = np.linspace(mid_lo, mid_hi, n_mid + 1)
    edges = np.unique(np.concatenate((left, mid, right)))

    xg, wg = np.polynomial.legendre.leggauss(p)
    half_w = 0.5 * np.diff(edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    nodes = (centers[:, None] + half_w[:, None] * xg[None, :]).ravel()
    weights = (half_w[:, None] * wg[None, :]).ravel()
    return TauGrid(collar=collar, nodes=nodes, weights=weights, panel_edges=edges)
