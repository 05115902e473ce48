"""Harmonic Beltrami differentials, quadratic differentials, WP pairings.

Scaled coefficient gauge
------------------------
Collar quantities scale by exact powers of |t_i| (one factor per tensor
slot), and u**4/|t|**4-type magnitudes overflow doubles below u ~ 0.02.
All coefficient data here is therefore stored in the |t|-scaled gauge:

* Beltrami data (lower slot):  b_hat = |t_i| b,  a_hat_k = |t_i| a_k,
* quadratic-differential data (upper slot): prefactor_hat = prefactor/|t_i|,

so stored values are O(1) and every derived tensor equals the true one
times the product of |t_i| (lower slots) and 1/|t_i| (upper slots).
Reported asymptotic constants are the |t|-normalized ones, which is what
all the target laws state anyway.

Shapes on a collar with coordinate z (diagonal entry shown):

    A_i = (z/zbar) sin(tau)^2 (conj(p) + conj(b)),   b_hat = -(u/pi) t/|t|,
    phi_i = prefactor z^-2 (q + beta),               prefactor_hat = -(t/|t|)/pi,

with Laurent tails p(z) = sum_{k<=-1} a_k rho^-k z^k + sum_{k>=1} a_k z^k
and q(z) = sum_{k<0} alpha_k t^-k z^k + sum_{k>0} alpha_k z^k; the
combinations rho^-k z^k and t^-k z^k are bounded by c^|k| on the collar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collar import CollarParams, TauGrid
from .fields import CollarField, DEFAULT_BANDWIDTH, pairing_l2


@dataclass(frozen=True)
class CollarSystem:
    """The degenerate collars of a model surface (compact part dropped)."""

    collars: tuple[CollarParams, ...]
    grids: tuple[TauGrid, ...]

    def __post_init__(self):
        if len(self.collars) != len(self.grids):
            raise ValueError("one grid per collar required")

    @property
    def m(self) -> int:
        return len(self.collars)


CASES = ("diagonal", "degenerate", "nondegenerate")


@dataclass(frozen=True)
class BeltramiEntry:
    """Data of A_i on one collar, |t_i|-scaled gauge."""

    b: complex
    a: dict[int, complex] = field(default_factory=dict)
    case: str = "diagonal"

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if 0 in self.a:
            raise ValueError("Laurent tail excludes k = 0")


@dataclass(frozen=True)
class QuadDiffEntry:
    """Data of phi_i on one collar, |t_i|-scaled gauge."""

    prefactor: complex
    beta: complex
    alpha: dict[int, complex] = field(default_factory=dict)
    case: str = "diagonal"

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if 0 in self.alpha:
            raise ValueError("Laurent tail excludes k = 0")


@dataclass(frozen=True)
class BeltramiSpec:
    """Entries keyed by (index i, collar j); missing keys mean A_i|_j = 0."""

    n: int
    entries: dict[tuple[int, int], BeltramiEntry]


@dataclass(frozen=True)
class QuadDiffSpec:
    n: int
    entries: dict[tuple[int, int], QuadDiffEntry]


def _laurent_radial(collar: CollarParams, grid: TauGrid, k: int) -> np.ndarray:
    """Bounded radial factor of the k-th Laurent term.

    k <= -1: rho^-k z^k has modulus exp(k (tau + pi)/u) <= c^|k|;
    k >= +1: z^k has modulus exp(k tau/u) <= c^k.
    """
    u = collar.u
    if k <= -1:
        return np.exp(k * (grid.nodes + math.pi) / u)
    return np.exp(k * grid.nodes / u)


def beltrami_field(spec: BeltramiSpec, i: int, j: int, system: CollarSystem,
                   bandwidth: int = DEFAULT_BANDWIDTH) -> CollarField:
    """A_i restricted to collar j (scaled gauge); zero field if no entry."""
    collar = system.collars[j]
    grid = system.grids[j]
    entry = spec.entries.get((i, j))
    out = CollarField(collar, grid, {}, bandwidth)
    if entry is None:
        return out
    sin2 = grid.sin_tau**2
    out.set_mode(2, sin2 * np.conj(entry.b))
    for k, ak in entry.a.items():
        rad = _laurent_radial(collar, grid, k)
        prof = sin2 * np.conj(ak) * rad
        mode = 2 - k
        if mode in out.modes:
            out.modes[mode] = out.modes[mode] + prof
        else:
            out.set_mode(mode, prof)
    return out


def _qdiff_reduced(spec: QuadDiffSpec, i: int, j: int, system: CollarSystem) -> CollarField:
    """The bounded part prefactor (q + beta); full phi_i = z^-2 times this."""
    collar = system.collars[j]
    grid = system.grids[j]
    entry = spec.entries.get((i, j))
    out = CollarField(collar, grid, {})
    if entry is None:
        return out
    phase = collar.t / abs(collar.t)
    out.set_mode(0, np.full(grid.n, entry.prefactor * entry.beta, dtype=complex))
    for k, ak in entry.alpha.items():
        rad = _laurent_radial(collar, grid, k).astype(complex)
        if k <= -1:
            rad = rad * phase ** (-k)  # t^-k = rho^-k (t/|t|)^-k
        out.set_mode(k, entry.prefactor * ak * rad)
    return out


def qdiff_field(spec: QuadDiffSpec, i: int, j: int, system: CollarSystem,
                bandwidth: int = DEFAULT_BANDWIDTH) -> CollarField:
    """phi_i on collar j as a raw field (modes k - 2, r^(k-2) radials)."""
    red = _qdiff_reduced(spec, i, j, system)
    grid = system.grids[j]
    inv_r2 = np.exp(-2.0 * grid.nodes / system.collars[j].u)
    out = CollarField(red.collar, grid, {}, bandwidth)
    for k, v in red.modes.items():
        out.set_mode(k - 2, v * inv_r2)
    return out


@dataclass
class MetricMatrix:
    """Hermitian index-pairing matrix with a kind tag.

    kind in {"WP", "WP-cometric", "Ricci", "perturbed-Ricci"}.  Values are
    in the scaled gauge (entry (i, j) carries |t_i| |t_j| for metric kinds
    and 1/(|t_i| |t_j|) for the cometric).
    """

    values: np.ndarray
    kind: str

    HERMITIAN_TOL = 1e-10

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        scale = max(1.0, float(np.abs(v).max()))
        if np.abs(v - v.conj().T).max() > self.HERMITIAN_TOL * scale:
            raise ValueError(f"{self.kind} matrix is not Hermitian")
        self.values = 0.5 * (v + v.conj().T)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def require_positive(self):
        w = np.linalg.eigvalsh(self.values)
        if w.min() <= 0:
            raise ValueError(f"{self.kind} matrix is not positive definite "
                             f"(min eigenvalue {w.min():.3e})")
        return self

    def inv_values(self) -> np.ndarray:
        return np.linalg.inv(self.values)

    def inverse(self) -> "MetricMatrix":
        kind = {"WP": "WP-cometric", "WP-cometric": "WP"}.get(self.kind, self.kind)
        return MetricMatrix(self.inv_values(), kind)


def wp_metric(spec: BeltramiSpec, system: CollarSystem,
              compact_part: np.ndarray | None = None) -> MetricMatrix:
    """h_{i jbar} = sum over collars of int A_i conj(A_j) dv (+ compact part)."""
    n = spec.n
    h = np.zeros((n, n), dtype=complex)
    fields = {
        (i, j): beltrami_field(spec, i, j, system)
        for i in range(n) for j in range(system.m)
        if (i, j) in spec.entries
    }
    for i in range(n):
        for j in range(n):
            acc = 0.0 + 0.0j
            for J in range(system.m):
                fi = fields.get((i, J))
                fj = fields.get((j, J))
                if fi is not None and fj is not None:
                    acc += pairing_l2(fi, fj)
            h[i, j] = acc
    if compact_part is not None:
        h = h + np.asarray(compact_part, dtype=complex)
    return MetricMatrix(h, "WP")


def wp_cometric(spec: QuadDiffSpec, system: CollarSystem) -> MetricMatrix:
    """h^{i jbar} = int phi_i conj(phi_j) lambda^-2 dv via reduced profiles.

    The z^-2 factors cancel against lambda^-1 analytically:
    integrand = (2/u^2) P_i conj(P_j) sin^2 tau / r, P = prefactor (q + beta).
    """
    n = spec.n
    out = np.zeros((n, n), dtype=complex)
    reduced = {
        (i, j): _qdiff_reduced(spec, i, j, system)
        for i in range(n) for j in range(system.m)
        if (i, j) in spec.entries
    }
    for i in range(n):
        for j in range(n):
            acc = 0.0 + 0.0j
            for J in range(system.m):
                pi_ = reduced.get((i, J))
                pj = reduced.get((j, J))
                if pi_ is None or pj is None:
                    continue
                grid = system.grids[J]
                u = system.collars[J].u
                sin2 = grid.sin_tau**2
                for k, v in pi_.modes.items():
                    w = pj.modes.get(k)
                    if w is not None:
                        acc += (4.0 * math.pi / u**3) * grid.integrate(
                            v * np.conj(w) * sin2)
            out[i, j] = acc
    mm = MetricMatrix(out, "WP-cometric")
    mm.require_positive()
    return mm


def duality_check(bspec: BeltramiSpec, qspec: QuadDiffSpec, system: CollarSystem,
                  h: MetricMatrix | None = None) -> dict:
    """Sup-error of A_i against lambda^-1 sum_l h_{i lbar} conj(phi_l).

    Computed per (index, collar) with the r-powers cancelled analytically:
    lambda^-1 conj(phi_l) = (2 sin^2/u^2) (z/zbar) conj(P_l).
    Returns absolute and relative sup errors (relative to sup |A_i|).
    """
    if h is None:
        h = wp_metric(bspec, system)
    report = {}
    for i in range(bspec.n):
        for J in range(system.m):
            if (i, J) not in bspec.entries:
                continue
            grid = system.grids[J]
            collar = system.collars[J]
            a_field = beltrami_field(bspec, i, J, system)
            dual = CollarField(collar, grid, {})
            w = 2.0 * grid.sin_tau**2 / collar.u**2
            for l in range(qspec.n):
                red = _qdiff_reduced(qspec, l, J, system)
                coeff = h.values[i, l]
                if not red.modes or coeff == 0:
                    continue
                for k, v in red.modes.items():
                    prof = coeff * w * np.conj(v)
                    mode = 2 - k  # (z/zbar) conj(z^k reduced term)
                    if mode in dual.modes:
                        dual.modes[mode] = dual.modes[mode] + prof
                    else:
                        dual.set_mode(mode, prof)
            diff = a_field - dual
            sup_a = a_field.sup_norm()
            report[(i, J)] = {
                "sup_err": diff.sup_norm(),
                "rel_err": diff.sup_norm() / sup_a if sup_a > 0 else 0.0,
            }
    return report


# -- model families ------------------------------------------------------

def diagonal_family(collars: CollarSystem, phases: list[float] | None = None
                    ) -> tuple[BeltramiSpec, QuadDiffSpec]:
    """Pure diagonal family: q = 0, beta = 1, p = 0, b_hat = -(u/pi) t/|t|."""
    m = collars.m
    bentries = {}
    qentries = {}
    for j in range(m):
        col = collars.collars[j]
        phase = col.t / abs(col.t)
        # true b = -u/(pi conj(t)); scaled by |t| this is -(u/pi) t/|t|
        bentries[(j, j)] = BeltramiEntry(b=-(col.u / math.pi) * phase,
                                         case="diagonal")
        qentries[(j, j)] = QuadDiffEntry(prefactor=-phase / math.pi, beta=1.0,
                                         case="diagonal")
    return BeltramiSpec(m, bentries), QuadDiffSpec(m, qentries)


def coupled_family(collars: CollarSystem, kappa: float = 1.0
                   ) -> tuple[BeltramiSpec, QuadDiffSpec]:
    """Diagonal family plus off-diagonal couplings b_i^j = kappa u_j u_i^3/|t_i|.

    Stored scaled: b_hat_i^j = kappa u_j u_i^3.  Setting kappa = 0 recovers
    the uncoupled family exactly.
    """
    bspec, qspec = diagonal_family(collars)
    bentries = dict(bspec.entries)
    for i in range(collars.m):
        for j in range(collars.m):
            if i == j:
                continue
            u_i = collars.collars[i].u
            u_j = collars.collars[j].u
            b = kappa * u_j * u_i**3
            if b != 0.0:
                bentries[(i, j)] = BeltramiEntry(b=b, case="degenerate")
    return BeltramiSpec(collars.m, bentries), qspec
