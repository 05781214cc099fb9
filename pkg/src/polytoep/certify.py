"""Certified lower bounds for Σ|fᵢ|² on boundary regions of the polydisc.

The region for the Fredholm criterion is the closure of 𝕌ᵣⁿ = 𝔻ⁿ ∖ 𝔻ᵣⁿ,
covered by the n faces on which one coordinate has modulus in [r, 1] and the
others range over the whole closed disc.  Two variants share the machinery:
the closed annulus s ≤ |z| ≤ 1 for tuples of one-variable symbols, and the
full closed polydisc (zero-freeness checks for factored-out divisors).

Certification is by adaptive subdivision.  Each cell is a product of polar
rectangles with per-variable covering radii δ_v (hypot of the radial and
tangential half-widths).  Pruning uses the directional bound
|fᵢ| ≥ |fᵢ(center)| − Σ_v G_iv·δ_v on each cell, with G_iv the coefficient
bound for sup|∂fᵢ/∂z_v|; summing the squares of the clipped drops bounds
Σ|fᵢ|² from below.  Cells that cannot be pruned are split along their widest
parameter until they shrink past four halvings of the starting mesh.  The
directional form matters: a symbol pays nothing for variables it does not
involve, so the three-variable frontiers stay small where a global Lipschitz
constant would force more cells than any reasonable budget.

Certified ``c`` is the minimum of v − L_cell·δ over pruned cells; the
reported ``mesh`` is the effective uniform step, defined by
min_sample − lipschitz·mesh = c with the global constant, so the classical
sampled-grid reading of the certificate remains exactly valid.

Failed certificates carry an explicit witness: a region point whose value is
below the failure threshold, polished by Nelder–Mead from the best center
seen (closure membership enforced by radial projection).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .kernels import PackedTuple, pack_tuple, sumsq_block, values_block
from .poly import (MultiPoly, SymbolTuple, coefficient_bounds, constant,
                   directional_gradient_bounds)

WITNESS_THRESHOLD = 1e-3
DISTANCE_TOLERANCE = 1e-3
DEFAULT_R_SCHEDULE = (0.5, 0.75, 0.9)
CELL_BUDGET = 6_000_000          # centers evaluated per certification attempt
MAX_HALVINGS = 4

_DEFAULT_MESH = {1: 0.05, 2: 0.15, 3: 0.5}


@dataclass(frozen=True)
class BoundaryCertificate:
    """Outcome of one certified lower-bound attempt on one region."""

    r: float
    c: float                      # certified lower bound (0.0 unless certified)
    mesh: float                   # finest covering radius used
    lipschitz: float
    verdict: str                  # certified | failed | inconclusive
    region: str                   # boundary | annulus | polydisc
    min_sample: float             # smallest center value seen
    min_point: tuple              # where it was seen
    witness: Optional[tuple] = None
    witness_value: Optional[float] = None
    cells_evaluated: int = 0


@dataclass(frozen=True)
class SpectrumQuery:
    lam: tuple
    r: float
    resolution: int
    verdict: str                  # inside | outside | inconclusive
    distance_estimate: float


def lipschitz_sumsq(st: SymbolTuple) -> float:
    """Gradient bound for Σ|fᵢ|² on the closed polydisc: 2·Σ supᵢ·gradᵢ."""
    total = 0.0
    for s in st.symbols:
        sup, grad = coefficient_bounds(s)
        total += 2.0 * sup * grad
    return total


# ---- adaptive cell engine -----------------------------------------------------


class _CellSet:
    """Vectorized batch of polar product cells (one face)."""

    __slots__ = ("rlo", "rhi", "tlo", "thi")

    def __init__(self, rlo, rhi, tlo, thi):
        self.rlo, self.rhi, self.tlo, self.thi = rlo, rhi, tlo, thi

    @property
    def count(self) -> int:
        return self.rlo.shape[0]

    def centers(self) -> np.ndarray:
        rc = 0.5 * (self.rlo + self.rhi)
        tc = 0.5 * (self.tlo + self.thi)
        return rc * np.exp(1j * tc)

    def deltas(self) -> np.ndarray:
        """Per-variable covering radii, shape (ncells, nvars)."""
        return np.hypot(0.5 * (self.rhi - self.rlo),
                        self.rhi * 0.5 * (self.thi - self.tlo))

    def radius(self) -> np.ndarray:
        d = self.deltas()
        return np.sqrt(np.sum(d * d, axis=1))

    def select(self, mask) -> "_CellSet":
        return _CellSet(self.rlo[mask], self.rhi[mask], self.tlo[mask], self.thi[mask])

    def split_widest(self) -> "_CellSet":
        """Split every cell in two along its largest parameter extent."""
        n, nv = self.rlo.shape
        d_r = 0.5 * (self.rhi - self.rlo)
        d_t = self.rhi * 0.5 * (self.thi - self.tlo)
        flat = np.concatenate([d_r, d_t], axis=1)
        pick = np.argmax(flat, axis=1)
        a = _CellSet(self.rlo.copy(), self.rhi.copy(), self.tlo.copy(), self.thi.copy())
        b = _CellSet(self.rlo.copy(), self.rhi.copy(), self.tlo.copy(), self.thi.copy())
        rows = np.arange(n)
        radial = pick < nv
        var_r = pick[radial]
        mid = 0.5 * (self.rlo[rows[radial], var_r] + self.rhi[rows[radial], var_r])
        a.rhi[rows[radial], var_r] = mid
        b.rlo[rows[radial], var_r] = mid
        var_t = pick[~radial] - nv
        midt = 0.5 * (self.tlo[rows[~radial], var_t] + self.thi[rows[~radial], var_t])
        a.thi[rows[~radial], var_t] = midt
        b.tlo[rows[~radial], var_t] = midt
        return _CellSet(np.vstack([a.rlo, b.rlo]), np.vstack([a.rhi, b.rhi]),
                        np.vstack([a.tlo, b.tlo]), np.vstack([a.thi, b.thi]))


def _initial_cells(bounds: Sequence[Tuple[float, float]], target_mesh: float) -> _CellSet:
    """Product subdivision of one face, aiming cells at the target mesh."""
    nv = len(bounds)
    step = target_mesh * math.sqrt(2.0 / nv)
    axes = []
    for lo, hi in bounds:
        nr = max(1, math.ceil((hi - lo) / step))
        nt = max(4, math.ceil(2 * math.pi * hi / step)) if hi > 0 else 1
        r_edges = np.linspace(lo, hi, nr + 1)
        t_edges = np.linspace(0.0, 2 * math.pi, nt + 1)
        axes.append([(r_edges[i], r_edges[i + 1], t_edges[j], t_edges[j + 1])
                     for i in range(nr) for j in range(nt)])
    counts = [len(a) for a in axes]
    total = int(np.prod(counts))
    rlo = np.empty((total, nv)); rhi = np.empty((total, nv))
    tlo = np.empty((total, nv)); thi = np.empty((total, nv))
    idx = np.indices(counts).reshape(nv, -1)
    for v in range(nv):
        ax = np.asarray(axes[v])
        sel = ax[idx[v]]
        rlo[:, v], rhi[:, v], tlo[:, v], thi[:, v] = sel.T
    return _CellSet(rlo, rhi, tlo, thi)


def _project_region(x: np.ndarray, faces: List[Sequence[Tuple[float, float]]]) -> np.ndarray:
    """Radially project a point (stacked re/im pairs) into the closest face."""
    nv = len(faces[0])
    z = x[0::2] + 1j * x[1::2]
    best = None
    best_move = None
    for face in faces:
        w = z.copy()
        move = 0.0
        for v, (lo, hi) in enumerate(face):
            rad = abs(w[v])
            tgt = min(max(rad, lo), hi)
            if rad == 0.0:
                if tgt > 0.0:
                    w[v] = tgt
                    move += tgt
            elif tgt != rad:
                w[v] = w[v] * (tgt / rad)
                move += abs(tgt - rad)
        if best is None or move < best_move:
            best, best_move = w, move
    out = np.empty_like(x)
    out[0::2] = best.real
    out[1::2] = best.imag
    return out


def _polish_witness(pk: PackedTuple, start: np.ndarray,
                    faces: List[Sequence[Tuple[float, float]]]) -> Tuple[np.ndarray, float]:
    """Deterministic Nelder–Mead descent of Σ|fᵢ|² inside the region closure."""

    def objective(x):
        y = _project_region(x, faces)
        return float(sumsq_block(pk, y.view(np.complex128).reshape(1, -1))[0])

    x0 = np.empty(2 * pk.nvars)
    x0[0::2] = start.real
    x0[1::2] = start.imag
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 2000})
    y = _project_region(res.x, faces)
    val = float(sumsq_block(pk, y.view(np.complex128).reshape(1, -1))[0])
    return y.view(np.complex128).copy(), val


def _certify_region(st: SymbolTuple, faces: List[Sequence[Tuple[float, float]]],
                    r_label: float, region: str, target_mesh: float,
                    threshold: float = WITNESS_THRESHOLD,
                    cell_budget: int = CELL_BUDGET) -> BoundaryCertificate:
    pk = pack_tuple(st)
    lip = lipschitz_sumsq(st)
    gmat = np.array([directional_gradient_bounds(s) for s in st.symbols])
    cells = [_initial_cells(face, target_mesh) for face in faces]
    delta_floor = target_mesh / (2 ** MAX_HALVINGS)
    evaluated = 0
    c_min = math.inf
    mesh_finest = math.inf
    min_val = math.inf
    min_pt = None
    stuck_best: Optional[Tuple[float, np.ndarray]] = None

    def witness_result(pt0: np.ndarray) -> Optional[BoundaryCertificate]:
        w, val = _polish_witness(pk, pt0, faces)
        if val < threshold:
            return BoundaryCertificate(
                r=r_label, c=0.0, mesh=float(min(mesh_finest, target_mesh)),
                lipschitz=lip, verdict="failed", region=region,
                min_sample=float(min(min_val, val)),
                min_point=tuple(w.tolist()), witness=tuple(w.tolist()),
                witness_value=val, cells_evaluated=evaluated)
        return None

    budget_hit = False
    active = cells
    while active and not budget_hit:
        batch = active.pop()
        while batch.count:
            if evaluated + batch.count > cell_budget:
                budget_hit = True
                break
            centers = batch.centers()
            vb = values_block(pk, centers)
            absv = np.abs(vb)
            vals = np.sum(absv * absv, axis=1)
            evaluated += batch.count
            i = int(np.argmin(vals))
            if vals[i] < min_val:
                min_val = float(vals[i])
                min_pt = centers[i].copy()
            if vals[i] < threshold:
                got = witness_result(centers[i])
                if got is not None:
                    return got
            d = batch.deltas()
            rad = np.sqrt(np.sum(d * d, axis=1))
            # per-cell directional bound: inside the cell each |f_i| stays
            # above |f_i(center)| - Σ_v G_iv·δ_v, so the squares of the
            # clipped drops bound Σ|f_i|² from below.  Variables a symbol
            # does not depend on cost nothing, which keeps three-variable
            # frontiers from blowing up.
            low = np.maximum(absv - d @ gmat.T, 0.0)
            bound = np.sum(low * low, axis=1)
            # aim for slack under half the value so c tracks the infimum, but
            # settle for bare positivity when a cell nears the depth floor
            pruned = (bound > 0.5 * vals) | ((bound > 0) & (rad <= 4 * delta_floor))
            if np.any(pruned):
                c_min = min(c_min, float(np.min(bound[pruned])))
                mesh_finest = min(mesh_finest, float(np.min(rad[pruned])))
            rest = batch.select(~pruned)
            if rest.count == 0:
                batch = rest
                continue
            splittable = rest.radius() > delta_floor
            exhausted = rest.select(~splittable)
            if exhausted.count:
                vals_e = sumsq_block(pk, exhausted.centers())
                j = int(np.argmin(vals_e))
                if stuck_best is None or vals_e[j] < stuck_best[0]:
                    stuck_best = (float(vals_e[j]), exhausted.centers()[j].copy())
            batch = rest.select(splittable).split_widest() if np.any(splittable) \
                else rest.select(splittable)

    if stuck_best is None and not active and not budget_hit and c_min < math.inf:
        # effective uniform step: min_sample - lipschitz * mesh == c exactly
        mesh_eff = (min_val - c_min) / lip if lip > 0 else float(mesh_finest)
        return BoundaryCertificate(
            r=r_label, c=float(c_min), mesh=float(mesh_eff), lipschitz=lip,
            verdict="certified", region=region, min_sample=float(min_val),
            min_point=_pt(min_pt), cells_evaluated=evaluated)
    # could not prune everything: hunt for a witness from the best center
    if min_pt is not None:
        got = witness_result(min_pt)
        if got is not None:
            return got
    if stuck_best is not None:
        got = witness_result(stuck_best[1])
        if got is not None:
            return got
    return BoundaryCertificate(
        r=r_label, c=0.0, mesh=float(min(mesh_finest, delta_floor)), lipschitz=lip,
        verdict="inconclusive", region=region, min_sample=float(min_val),
        min_point=_pt(min_pt), cells_evaluated=evaluated)


def _pt(z) -> tuple:
    if z is None:
        return ()
    arr = np.atleast_1d(z)
    return tuple(complex(v) for v in arr)


# ---- public certification entry points -----------------------------------------


def boundary_lower_bound(st: SymbolTuple, r: float,
                         target_mesh: Optional[float] = None,
                         cell_budget: int = CELL_BUDGET) -> BoundaryCertificate:
    """Certified positive lower bound for Σ|fᵢ|² on closure(𝔻ⁿ ∖ 𝔻ᵣⁿ)."""
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    nv = st.nvars
    mesh = target_mesh if target_mesh is not None else _DEFAULT_MESH[nv]
    faces = []
    for j in range(nv):
        faces.append([(r, 1.0) if v == j else (0.0, 1.0) for v in range(nv)])
    return _certify_region(st, faces, r, "boundary", mesh, cell_budget=cell_budget)


def as_condition_check(st: SymbolTuple, s: float,
                       target_mesh: Optional[float] = None) -> BoundaryCertificate:
    """Annulus condition for tuples of one-variable symbols: a certified
    positive lower bound of Σ|fᵢ|² on s ≤ |z| ≤ 1."""
    if st.nvars != 1:
        raise ValueError("annulus condition applies to one-variable symbol tuples")
    if not 0 <= s < 1:
        raise ValueError(f"s must lie in [0, 1), got {s}")
    mesh = target_mesh if target_mesh is not None else _DEFAULT_MESH[1]
    return _certify_region(st, [[(s, 1.0)]], s, "annulus", mesh)


def polydisc_lower_bound(st: SymbolTuple,
                         target_mesh: Optional[float] = None) -> BoundaryCertificate:
    """Certified positive lower bound of Σ|fᵢ|² on the whole closed polydisc
    (used to verify factored-out divisors are zero-free)."""
    nv = st.nvars
    mesh = target_mesh if target_mesh is not None else _DEFAULT_MESH[nv]
    faces = [[(0.0, 1.0) for _ in range(nv)]]
    return _certify_region(st, faces, 0.0, "polydisc", mesh)


# ---- essential spectrum ----------------------------------------------------------


def shifted_tuple(st: SymbolTuple, lam: Sequence[complex]) -> SymbolTuple:
    """(f₁ − λ₁, …) as a float tuple."""
    if len(lam) != len(st):
        raise ValueError("shift length must match the tuple length")
    stf = st.to_float()
    shifted = tuple(s - constant(st.nvars, complex(l), "float")
                    for s, l in zip(stf.symbols, lam))
    return SymbolTuple(shifted, st.nvars, st.assignment)


def _region_grid(nvars: int, r: float, resolution: int) -> np.ndarray:
    """Deterministic polar product grid over the closed polydisc, restricted
    to max |z_i| ≥ r (the closure of 𝕌ᵣⁿ)."""
    radii = np.linspace(0.0, 1.0, resolution)
    angles = np.linspace(0.0, 2 * math.pi, resolution, endpoint=False)
    ring = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    ring = np.concatenate([[0.0 + 0.0j], ring[ring != 0]])
    grids = np.meshgrid(*([ring] * nvars), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    keep = np.max(np.abs(pts), axis=1) >= r
    return pts[keep]


def essential_spectrum_membership(st: SymbolTuple, lam: Sequence[complex],
                                  r_schedule: Sequence[float] = DEFAULT_R_SCHEDULE,
                                  resolution: int = 24) -> SpectrumQuery:
    """Decide λ against the essential spectrum of the tuple.

    outside: the λ-shifted tuple certifies a positive boundary bound at some
    scheduled r (certificate-backed).  inside: at every scheduled r some
    region sample maps within the distance tolerance of λ (approximate).
    """
    if not r_schedule:
        raise ValueError("empty r schedule")
    lam = tuple(complex(l) for l in lam)
    shifted = shifted_tuple(st, lam)
    for r in r_schedule:
        cert = boundary_lower_bound(shifted, r)
        if cert.verdict == "certified":
            return SpectrumQuery(lam, r, resolution, "outside",
                                 float(math.sqrt(cert.c)))
    pk = pack_tuple(shifted)
    worst = 0.0
    inside_all = True
    for r in r_schedule:
        pts = _region_grid(st.nvars, r, resolution)
        vals = sumsq_block(pk, pts)
        i = int(np.argmin(vals))
        faces = [[(r, 1.0) if v == j else (0.0, 1.0) for v in range(st.nvars)]
                 for j in range(st.nvars)]
        _, val = _polish_witness(pk, pts[i], faces)
        best = math.sqrt(min(float(vals[i]), val))
        worst = max(worst, best)
        if best >= DISTANCE_TOLERANCE:
            inside_all = False
    if inside_all:
        return SpectrumQuery(lam, float(r_schedule[-1]), resolution, "inside", worst)
    return SpectrumQuery(lam, float(r_schedule[-1]), resolution, "inconclusive", worst)


def essential_spectrum_cloud(st: SymbolTuple, r: float, resolution: int) -> np.ndarray:
    """Images F(grid over closure 𝕌ᵣⁿ): an outer approximation of the
    essential spectrum at this r (the true set is the intersection over
    r → 1).  Deterministic point list, shape (npts, len(tuple))."""
    if not 0 < r < 1:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    if resolution < 2 or resolution > 64:
        raise ValueError("resolution must lie in [2, 64]")
    pts = _region_grid(st.nvars, r, resolution)
    return values_block(pack_tuple(st), pts)
