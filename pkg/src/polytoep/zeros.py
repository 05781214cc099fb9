"""Algebraic route: locate and count joint zeros of a bivariate symbol pair.

The index of a Fredholm pair equals minus the number of common zeros inside
the open bidisc, counted with multiplicity.  Multiplicities come from the
quotient algebra C[z₁,z₂]/(p,q): its dimension is the total zero count, and
the eigenvalues of the multiplication operators z₁·, z₂· are the zero
coordinates.

Everything structural is exact.  The quotient basis is read off a Macaulay
window matrix (rows = monomial shifts z^γ·fᵢ, columns = a monomial window)
reduced to row echelon form over exact complex rationals; the window is
enlarged until the staircase stabilizes, the basis is closed under the
variable actions, and the two multiplication matrices commute exactly.  Only
the final eigensolve is floating point: one complex Schur decomposition of a
random unit-modulus combination M₁ + τM₂ triangularizes both matrices at
once, and the paired diagonals are the zero coordinates.

Eigenvalues are clustered at radius 1e-7 (multiplicity = cluster size).  A
cluster of a μ-fold zero spreads like ε^(1/μ), so very high multiplicities
may resolve as that many nearby simple zeros; locations and the inside count
are unaffected.  Ambiguous clusterings retry once with a fresh combination
before raising.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import schur

from .certify import BoundaryCertificate, polydisc_lower_bound
from .exact import EXACT_ZERO, ExactComplex
from .koszul import MonomialWindow
from .poly import (
    ModeMismatchError,
    MultiPoly,
    NotEliminableError,
    SymbolTuple,
    divexact,
    gcd_bivariate,
    resultant,
    symbols,
)

CLUSTER_RADIUS = 1e-7
BOUNDARY_MARGIN = 1e-6
_MAX_ROUNDS = 6
_WINDOW_COL_BUDGET = 3200


class ClusterAmbiguityError(RuntimeError):
    """Two located zeros fell within cluster radius of each other; results
    would need refined eigensolving to separate."""


@dataclass(frozen=True)
class Zero:
    point: Tuple[complex, complex]
    multiplicity: int
    location: str                 # inside | boundary_proximate | outside


@dataclass(frozen=True)
class ZeroSet:
    zeros: Tuple[Zero, ...]
    total_inside: int
    degenerate: bool              # any zero within the boundary margin
    quotient_dim: int


@dataclass(frozen=True)
class ZeroDimensionality:
    kind: str                     # zero_dimensional | common_factor | degenerate
    factor: Optional[MultiPoly] = None


@dataclass(frozen=True)
class GcdReduction:
    common_factor: Optional[MultiPoly]
    reduced: SymbolTuple
    factor_zero_free: bool        # certified nonvanishing on the closed bidisc
    certificate: Optional[BoundaryCertificate]


def _require_pair(st: SymbolTuple) -> Tuple[MultiPoly, MultiPoly]:
    if len(st) != 2 or st.nvars != 2:
        raise ValueError("algebraic route handles pairs in two variables")
    if st.mode != "exact":
        raise ModeMismatchError("algebraic route requires exact coefficients")
    return st.symbols


def zero_dimensionality(st: SymbolTuple) -> ZeroDimensionality:
    """Classify the common zero set: finite, a curve (common factor), or
    degenerate (a zero symbol).  Uses both elimination resultants; either
    vanishing identically forces a common factor of positive degree."""
    p, q = _require_pair(st)
    if p.is_zero() or q.is_zero():
        return ZeroDimensionality("degenerate")
    for var in (0, 1):
        try:
            r = resultant(p, q, eliminate=var)
        except NotEliminableError:
            continue
        if r.is_zero():
            g = gcd_bivariate(p, q)
            if g.degree() == 0:
                raise AssertionError("vanishing resultant with trivial gcd")
            return ZeroDimensionality("common_factor", g)
    return ZeroDimensionality("zero_dimensional")


# ---- exact quotient algebra ---------------------------------------------------


def _echelon(rows: List[Dict[int, ExactComplex]]) -> Dict[int, Dict[int, ExactComplex]]:
    """Sparse Gaussian elimination; returns pivot column -> normalized tail."""
    pivots: Dict[int, Dict[int, ExactComplex]] = {}
    for row in rows:
        row = dict(row)
        while row:
            lead = min(row)
            tail = pivots.get(lead)
            c = row.pop(lead)
            if tail is None:
                pivots[lead] = {k: v / c for k, v in row.items()}
                break
            for k, v in tail.items():
                nv = row.get(k, EXACT_ZERO) - c * v
                if nv:
                    row[k] = nv
                elif k in row:
                    del row[k]
    # back-substitute, smallest monomial first, so tails avoid pivot columns
    for lead in sorted(pivots, reverse=True):
        tail = pivots[lead]
        for k in [k for k in tail if k in pivots]:
            c = tail.pop(k)
            for k2, v2 in pivots[k].items():
                nv = tail.get(k2, EXACT_ZERO) - c * v2
                if nv:
                    tail[k2] = nv
                elif k2 in tail:
                    del tail[k2]
    return pivots


def _mat_mul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), EXACT_ZERO)
             for j in range(n)] for i in range(n)]


def quotient_basis(st: SymbolTuple):
    """Stabilized monomial basis of C[z]/(p, q) plus exact multiplication
    matrices (M₁, M₂) for the two coordinate actions.

    Returns (basis exponent list, M1, M2) with matrices as nested lists of
    exact complex entries, entry [i][j] = coefficient of basis[i] in the
    reduction of z_v · basis[j].
    """
    p, q = _require_pair(st)
    dmax = max(p.degree(), q.degree())
    K = max(2, p.degree() * q.degree())
    M = K + 2
    prev_ns = None
    for _ in range(_MAX_ROUNDS):
        cap = tuple(M + d for d in st.degree_vec())
        win = MonomialWindow(2, cap)
        if win.dim > _WINDOW_COL_BUDGET:
            raise ValueError(
                f"quotient window needs {win.dim} columns "
                f"(budget {_WINDOW_COL_BUDGET}); degrees too large")
        order = list(reversed(win.basis))           # descending graded-lex
        col_of = {e: i for i, e in enumerate(order)}
        shifts = MonomialWindow(2, M)
        rows = []
        for f in st.symbols:
            for g in shifts.basis:
                rows.append({col_of[(g[0] + e[0], g[1] + e[1])]: c
                             for e, c in f.terms.items()})
        pivots = _echelon(rows)
        ns = [e for i, e in enumerate(order)
              if i not in pivots and sum(e) <= K]
        if any(sum(e) == K for e in ns):
            K += 2
            M = K + 2
            prev_ns = None
            continue
        ns.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        mats = _mult_matrices(ns, pivots, order, col_of)
        if mats is not None and ns == prev_ns:
            m1, m2 = mats
            if _mat_mul(m1, m2) == _mat_mul(m2, m1):
                return ns, m1, m2
        prev_ns = ns
        M += 2
    raise RuntimeError(f"quotient basis did not stabilize for {st}")


def _mult_matrices(ns, pivots, order, col_of):
    index = {e: i for i, e in enumerate(ns)}
    dim = len(ns)
    out = []
    for var in (0, 1):
        mat = [[EXACT_ZERO] * dim for _ in range(dim)]
        for j, b in enumerate(ns):
            e = (b[0] + 1, b[1]) if var == 0 else (b[0], b[1] + 1)
            i = index.get(e)
            if i is not None:
                mat[i][j] = ExactComplex(1)
                continue
            tail = pivots.get(col_of[e])
            if tail is None:
                return None       # window misses this border monomial
            for k, c in tail.items():
                m = order[k]
                i = index.get(m)
                if i is None:
                    return None   # reduction escapes the candidate basis
                mat[i][j] = -c
        out.append(mat)
    return out[0], out[1]


# ---- floating eigensolve ------------------------------------------------------


def _joint_points(m1: np.ndarray, m2: np.ndarray, seed: int, trial: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence((seed, trial)))
    theta = rng.uniform(0.0, 2 * np.pi)
    tau = (0.75 + 0.5 * rng.uniform()) * complex(np.cos(theta), np.sin(theta))
    _, u = schur(m1 + tau * m2, output="complex")
    d1 = np.diag(u.conj().T @ m1 @ u)
    d2 = np.diag(u.conj().T @ m2 @ u)
    return np.stack([d1, d2], axis=1)


def _cluster(points: np.ndarray, radius: float) -> List[np.ndarray]:
    """Greedy transitive clustering in the max metric."""
    n = points.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.max(np.abs(points[i] - points[j])) <= radius:
                parent[find(i)] = find(j)
    groups: Dict[int, List[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [points[idx] for idx in groups.values()]


def _classify(point: np.ndarray, margin: float) -> str:
    m = float(np.max(np.abs(point)))
    if m < 1.0 - margin:
        return "inside"
    if m > 1.0 + margin:
        return "outside"
    return "boundary_proximate"


def common_zeros(st: SymbolTuple, *, seed: int = 0,
                 cluster_radius: float = CLUSTER_RADIUS,
                 boundary_margin: float = BOUNDARY_MARGIN) -> ZeroSet:
    """Locate all common zeros with multiplicities.  Requires a
    zero-dimensional pair; the multiplicity sum always equals the quotient
    dimension."""
    zd = zero_dimensionality(st)
    if zd.kind != "zero_dimensional":
        raise ValueError(f"common zero set is not finite ({zd.kind})")
    ns, m1, m2 = quotient_basis(st)
    dim = len(ns)
    if dim == 0:
        return ZeroSet((), 0, False, 0)
    a1 = np.array([[c.to_complex() for c in row] for row in m1])
    a2 = np.array([[c.to_complex() for c in row] for row in m2])
    for trial in range(2):
        pts = _joint_points(a1, a2, seed, trial)
        clusters = _cluster(pts, cluster_radius)
        centers = [np.mean(cl, axis=0) for cl in clusters]
        ok = True
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if np.max(np.abs(centers[i] - centers[j])) < 3 * cluster_radius:
                    ok = False
        if ok:
            zeros = []
            for cl, ctr in zip(clusters, centers):
                zeros.append(Zero(point=(complex(ctr[0]), complex(ctr[1])),
                                  multiplicity=cl.shape[0],
                                  location=_classify(ctr, boundary_margin)))
            zeros.sort(key=lambda z: (abs(z.point[0]), abs(z.point[1]),
                                      z.point[0].real, z.point[1].real))
            inside = sum(z.multiplicity for z in zeros if z.location == "inside")
            degenerate = any(z.location == "boundary_proximate" for z in zeros)
            return ZeroSet(tuple(zeros), inside, degenerate, dim)
    raise ClusterAmbiguityError(
        "zero clusters closer than the cluster radius persisted after a "
        "retry; refine the eigensolve or perturb the tuple")


def algebraic_index(st: SymbolTuple, *, seed: int = 0) -> int:
    """Index by zero counting: minus the number of common zeros strictly
    inside the open bidisc, with multiplicity.  Raises on non-finite zero
    sets and on zeros too close to the distinguished boundary to classify."""
    zs = common_zeros(st, seed=seed)
    if zs.degenerate:
        raise ValueError("a common zero sits within the boundary margin; "
                         "the count inside is not decidable at this precision")
    return -zs.total_inside


def gcd_reduce(st: SymbolTuple) -> GcdReduction:
    """Split off the gcd of the pair.  The reduced pair together with the
    factor satisfies p = g·p', q = g·q' exactly; the factor is additionally
    certified zero-free on the closed bidisc when possible (if it is not,
    the original tuple is not Fredholm)."""
    p, q = _require_pair(st)
    g = gcd_bivariate(p, q)
    if g.degree() == 0:
        return GcdReduction(None, st, True, None)
    reduced = symbols(2, divexact(p, g), divexact(q, g))
    cert = polydisc_lower_bound(symbols(2, g))
    return GcdReduction(g, reduced, cert.verdict == "certified", cert)
