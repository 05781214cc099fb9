"""Truncated Koszul complexes of Toeplitz tuples on monomial windows.

The Hardy space H²(𝔻ⁿ) has the monomials as an orthonormal basis, and for an
analytic polynomial symbol the Toeplitz operator is plain multiplication.  A
monomial window (all exponents below a per-variable cap) therefore carries an
exact finite section of the Koszul complex: the codomain cap of every boundary
map is the domain cap enlarged by the tuple degree, so multiplication never
truncates and consecutive boundary matrices compose to the exact zero matrix.
No tolerance is involved in the chain property; only rank decisions are
numerical.

Homology dimensions:

* h₀ is the nullity of the first boundary map.
* middle h_k compares the nullity of the next map against the image of the
  previous map *with an enlarged domain window*, intersected back into the
  stage.  The naive rank subtraction overcounts h_k by window-boundary
  syzygies whose cofactors exceed the stage cap; the enlarged-domain
  intersection removes exactly those, while genuine non-Fredholm growth (e.g.
  the repeated-symbol tuple) still shows up as growth in N.
* the top dimension h_p is NOT read off the window cokernel (corner monomials
  of the window are never reachable and would inflate it); it comes from
  ``ideal_codim_window`` below.

``ideal_codim_window`` measures dim W_K / (W_K ∩ Σ p_i·W_M) with rows
weighted by ρ^{total degree}.  The weighting realizes membership in the Hardy
norm of a slightly smaller polydisc: an ideal member whose cofactors are
genuine H² functions (not polynomials — e.g. 1 = (z₁−2)·(−Σ z₁^k/2^{k+1}))
appears as a residual decaying geometrically in M, which plain polynomial
window algebra would miss.  Singular values of the projected residual falling
in the unresolved band [rank_tol, band_top] trigger window escalation before
any integer is reported.

Index convention: Ind = Σ_k (−1)^{p+1−k} h_k, i.e. the alternating sum
anchored with coefficient −1 at the top (quotient) stage.  For a pair this is
−h₀ + h₁ − h₂; for a single operator it is dim ker − dim coker; in every
arity the coprime case gives Ind = −codim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import svdvals

from .exact import EXACT_ZERO, ExactComplex
from .poly import MultiPoly, SymbolTuple

DEFAULT_RANK_TOL = 1e-8
MATRIX_BUDGET = 20_000          # hard cap on columns of any assembled matrix
MEMBERSHIP_BAND_TOP = 0.1       # residual band treated as "possibly decaying"
SVD_PROJECT_CUT = 1e-13         # relative cut for the basis of the shift span


class MatrixBudgetError(RuntimeError):
    """Raised when a requested window would exceed the matrix-size budget."""


class MonomialWindow:
    """Graded-lex ordered exponent tuples with per-variable caps."""

    __slots__ = ("nvars", "cap", "basis", "index")

    def __init__(self, nvars: int, cap):
        if isinstance(cap, int):
            cap = (cap,) * nvars
        cap = tuple(int(c) for c in cap)
        if len(cap) != nvars or any(c < 0 for c in cap):
            raise ValueError(f"bad cap {cap} for nvars={nvars}")
        self.nvars = nvars
        self.cap = cap
        basis = sorted(product(*(range(c + 1) for c in cap)),
                       key=lambda e: (sum(e), e))
        self.basis = basis
        self.index = {e: i for i, e in enumerate(basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __repr__(self):
        return f"MonomialWindow(nvars={self.nvars}, cap={self.cap}, dim={self.dim})"


def mult_matrix(p: MultiPoly, win_in: MonomialWindow, win_out: MonomialWindow) -> np.ndarray:
    """Matrix of multiplication by ``p`` between two windows.

    The out-window must absorb every product (domain cap + symbol degree);
    otherwise the section would not be an exact subcomplex.
    """
    need = tuple(a + b for a, b in zip(win_in.cap, p.degree_vec()))
    if any(n > c for n, c in zip(need, win_out.cap)):
        raise ValueError(f"out-window cap {win_out.cap} cannot hold products up to {need}")
    pf = p.to_float()
    mat = np.zeros((win_out.dim, win_in.dim), dtype=np.complex128)
    for j, a in enumerate(win_in.basis):
        for e, c in pf.terms.items():
            t = tuple(x + y for x, y in zip(a, e))
            mat[win_out.index[t], j] = c
    return mat


def toeplitz_matrix(p: MultiPoly, N: int) -> np.ndarray:
    """Multiplication matrix from the cube window cap N into cap N + deg(p),
    columns indexed by source monomials (graded-lex)."""
    if N < 0:
        raise ValueError("window cap must be non-negative")
    d = max(p.degree_vec(), default=0) if p.terms else 0
    win_in = MonomialWindow(p.nvars, N)
    win_out = MonomialWindow(p.nvars, N + max(d, 0))
    return mult_matrix(p, win_in, win_out)


def inclusion_matrix(win_in: MonomialWindow, win_out: MonomialWindow) -> np.ndarray:
    mat = np.zeros((win_out.dim, win_in.dim))
    for j, e in enumerate(win_in.basis):
        mat[win_out.index[e], j] = 1.0
    return mat


# ---- boundary map block structure --------------------------------------------

def _subsets(p: int, k: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(p), k))


def _stage_blocks(p: int, k: int) -> List[Tuple[int, int, int, int]]:
    """(row_subset, col_subset, symbol, sign) entries of the k-th boundary map.

    Arity 2 keeps the presentation d₁ξ = (−T₂ξ, T₁ξ), d₂(ξ₁,ξ₂) = T₁ξ₁+T₂ξ₂;
    other arities use the standard exterior-algebra signs.  The two arity-2
    presentations differ by a basis relabeling, so every rank and homology
    dimension is identical either way.
    """
    if p == 2:
        if k == 1:
            return [(0, 0, 1, -1), (1, 0, 0, +1)]
        if k == 2:
            return [(0, 0, 0, +1), (0, 1, 1, +1)]
    rows = _subsets(p, k)
    cols = _subsets(p, k - 1)
    out = []
    for ci, r_set in enumerate(cols):
        for i in range(p):
            if i in r_set:
                continue
            s_set = tuple(sorted(r_set + (i,)))
            out.append((rows.index(s_set), ci, i, (-1) ** s_set.index(i)))
    return out


def _boundary_matrix(st: SymbolTuple, k: int,
                     win_in: MonomialWindow, win_out: MonomialWindow) -> np.ndarray:
    p = len(st)
    nrow_blocks = len(_subsets(p, k))
    ncol_blocks = len(_subsets(p, k - 1))
    mats = {}
    for _, _, sym, _ in _stage_blocks(p, k):
        if sym not in mats:
            mats[sym] = mult_matrix(st.symbols[sym], win_in, win_out)
    out = np.zeros((nrow_blocks * win_out.dim, ncol_blocks * win_in.dim), dtype=np.complex128)
    for ri, ci, sym, sign in _stage_blocks(p, k):
        out[ri * win_out.dim:(ri + 1) * win_out.dim,
            ci * win_in.dim:(ci + 1) * win_in.dim] = sign * mats[sym]
    return out


@dataclass(frozen=True)
class KoszulTruncation:
    """Boundary matrices of the windowed Koszul complex at domain cap N."""

    tuple: SymbolTuple
    N: int
    deg_vec: tuple
    windows: tuple                 # stage 0..p monomial windows
    boundary_matrices: tuple       # d_1..d_p
    rank_tolerance: float

    @property
    def arity(self) -> int:
        return len(self.tuple)


def build_koszul(st: SymbolTuple, N: int,
                 rank_tolerance: float = DEFAULT_RANK_TOL) -> KoszulTruncation:
    """Assemble the truncated complex 0 → Λ⁰W → Λ¹W → … → ΛᵖW → 0.

    Stage k lives on the window with cap N·1 + k·D where D is the per-variable
    degree vector of the tuple, so no boundary map truncates.
    """
    p = len(st)
    if p not in (1, 2, 3):
        raise ValueError(f"unsupported tuple arity {p} (1, 2 or 3 supported)")
    if st.nvars not in (1, 2, 3):
        raise ValueError(f"unsupported variable count {st.nvars}")
    if rank_tolerance <= 0:
        raise ValueError("rank tolerance must be positive")
    if N < 0:
        raise ValueError("N must be non-negative")
    deg = st.degree_vec()
    wins = [MonomialWindow(st.nvars, tuple(N + k * d for d in deg)) for k in range(p + 1)]
    widest = max(len(_subsets(p, k)) * wins[k].dim for k in range(p + 1))
    if widest > MATRIX_BUDGET:
        raise MatrixBudgetError(
            f"window overflow: stage would need {widest} columns (budget {MATRIX_BUDGET})")
    mats = tuple(_boundary_matrix(st, k, wins[k - 1], wins[k]) for k in range(1, p + 1))
    return KoszulTruncation(st, N, deg, tuple(wins), mats, rank_tolerance)


def chain_products(kt: KoszulTruncation) -> List[np.ndarray]:
    """d_{k+1} @ d_k for every consecutive pair; each must be exactly zero."""
    d = kt.boundary_matrices
    return [d[i + 1] @ d[i] for i in range(len(d) - 1)]


def exact_chain_check(st: SymbolTuple, N: int) -> bool:
    """Entrywise-exact verification that consecutive boundary maps compose to
    zero, in rational arithmetic when the tuple is exact."""
    if st.mode != "exact":
        return all(np.all(prod == 0) for prod in chain_products(build_koszul(st, N)))
    p = len(st)
    deg = st.degree_vec()
    wins = [MonomialWindow(st.nvars, tuple(N + k * d for d in deg)) for k in range(p + 1)]

    def exact_mult(sym: MultiPoly, win_in, win_out):
        cols = [dict() for _ in range(win_in.dim)]
        for j, a in enumerate(win_in.basis):
            for e, c in sym.terms.items():
                t = tuple(x + y for x, y in zip(a, e))
                cols[j][win_out.index[t]] = c
        return cols

    def stage(k):
        win_in, win_out = wins[k - 1], wins[k]
        ncb = len(_subsets(p, k - 1))
        blocks = {}
        for _, _, sym, _ in _stage_blocks(p, k):
            if sym not in blocks:
                blocks[sym] = exact_mult(st.symbols[sym], win_in, win_out)
        cols = [dict() for _ in range(ncb * win_in.dim)]
        for ri, ci, sym, sign in _stage_blocks(p, k):
            for j, col in enumerate(blocks[sym]):
                tgt = cols[ci * win_in.dim + j]
                for i, c in col.items():
                    key = ri * win_out.dim + i
                    val = tgt.get(key, EXACT_ZERO) + (c if sign > 0 else -c)
                    if val:
                        tgt[key] = val
                    else:
                        tgt.pop(key, None)
        return cols

    prev = stage(1)
    for k in range(2, p + 1):
        nxt = stage(k)
        for col in prev:                      # compose: nxt @ prev column by column
            acc: dict = {}
            for j, c in col.items():
                for i, c2 in nxt[j].items():
                    val = acc.get(i, EXACT_ZERO) + c2 * c
                    if val:
                        acc[i] = val
                    else:
                        acc.pop(i, None)
            if acc:
                return False
        prev = nxt
    return True


# ---- numerical rank ------------------------------------------------------------

def numerical_rank(mat: np.ndarray, tol: float) -> int:
    if mat.size == 0:
        return 0
    sv = svdvals(mat)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def stage1_sigma_min(kt: KoszulTruncation) -> float:
    """Smallest singular value of the first boundary matrix."""
    d1 = kt.boundary_matrices[0]
    if d1.size == 0:
        return 0.0
    sv = svdvals(d1)
    return float(sv[-1]) if sv.size else 0.0


def range_sum_check(matrices: Sequence[np.ndarray],
                    rank_tolerance: float = DEFAULT_RANK_TOL) -> bool:
    """Finite-dimensional closed-range identity: col-space(Σ TᵢTᵢ*) equals
    Σ col-space(Tᵢ), decided by comparing ranks of the two assemblies."""
    mats = [np.asarray(m, dtype=np.complex128) for m in matrices]
    if not mats:
        raise ValueError("empty matrix list")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ValueError("matrices must be square and share one size")
    gram = sum(m @ m.conj().T for m in mats)
    return numerical_rank(gram, rank_tolerance) == numerical_rank(np.hstack(mats), rank_tolerance)


# ---- homology dimensions --------------------------------------------------------

def homology_kernel_dims(kt: KoszulTruncation) -> List[int]:
    """[h₀, …, h_{p−1}] of the truncation (everything except the top stage).

    Middle stages subtract dim(im(d_k with domain enlarged to the stage-k cap)
    ∩ stage k) from the nullity of d_{k+1}; the intersection dimension comes
    from rank(A) + dim V − rank([A | E_V]).
    """
    st, p, tol = kt.tuple, kt.arity, kt.rank_tolerance
    d = kt.boundary_matrices
    dims = []
    h0 = d[0].shape[1] - numerical_rank(d[0], tol)
    dims.append(h0)
    for k in range(1, p):
        null_next = d[k].shape[1] - numerical_rank(d[k], tol)
        enlarged = _boundary_matrix(st, k, kt.windows[k], kt.windows[k + 1])
        incl = inclusion_matrix(kt.windows[k], kt.windows[k + 1])
        nblocks = len(_subsets(p, k))
        emb = np.kron(np.eye(nblocks), incl)
        rank_a = numerical_rank(enlarged, tol)
        rank_both = numerical_rank(np.hstack([enlarged, emb.astype(np.complex128)]), tol)
        dim_intersect = rank_a + emb.shape[1] - rank_both
        dims.append(max(null_next - dim_intersect, 0))
    return dims


@dataclass(frozen=True)
class HomologyDims:
    """Stabilized homology dimensions [h₀ … h_p] and the index estimate."""

    dims: tuple
    stabilized: bool
    index_estimate: Union[int, str]


def euler_index(dims: Sequence[int]) -> int:
    """Σ (−1)^{p+1−k} h_k — alternating sum with −1 at the top stage."""
    p = len(dims) - 1
    return sum((-1) ** (p + 1 - k) * int(h) for k, h in enumerate(dims))


# ---- windowed ideal codimension ---------------------------------------------------

# Column budgets for the membership system; SVD cost grows fast with the
# window volume, and at nvars = 3 an escalation past these sizes costs minutes
# without changing any desk-scale answer.
MEMBERSHIP_COL_BUDGET = {1: 4000, 2: 2600, 3: 1600}


def _membership_sigmas(st: SymbolTuple, K: int, M: int, rho: float) -> np.ndarray:
    """Residual singular values of the quotient candidates against the
    weighted span of shifted symbols (windows K and M)."""
    nv = st.nvars
    deg = st.degree_vec()
    big = MonomialWindow(nv, tuple(M + d for d in deg))
    shifts = MonomialWindow(nv, M)
    quot = MonomialWindow(nv, K)
    ncols = len(st) * shifts.dim
    if ncols > MEMBERSHIP_COL_BUDGET[nv]:
        raise MatrixBudgetError(
            f"window overflow: membership system needs {ncols} columns "
            f"(budget {MEMBERSHIP_COL_BUDGET[nv]} at nvars={nv})")
    w = np.array([rho ** sum(e) for e in big.basis])
    cols = []
    for s in st.to_float().symbols:
        for a in shifts.basis:
            col = np.zeros(big.dim, dtype=np.complex128)
            for e, c in s.terms.items():
                t = tuple(x + y for x, y in zip(a, e))
                col[big.index[t]] = c
            cols.append(col)
    S = np.asarray(cols).T * w[:, None]
    norms = np.linalg.norm(S, axis=0)
    norms[norms == 0] = 1.0
    S = S / norms
    # Orthonormal basis of the weighted shift span, then project the quotient
    # candidates.  (Least-squares via the general drivers mis-solves these
    # wide systems; the explicit SVD projection does not.)
    u, sv, _ = np.linalg.svd(S, full_matrices=False)
    keep = sv > SVD_PROJECT_CUT * sv[0] if sv.size else np.zeros(0, bool)
    q = u[:, keep]
    E = np.zeros((big.dim, quot.dim))
    for j, e in enumerate(quot.basis):
        E[big.index[e], j] = 1.0
    R = E - q @ (q.conj().T @ E)
    return svdvals(R) if R.size else np.zeros(0)


def _codim_resolve_band(st: SymbolTuple, K: int, M: int, rho: float,
                        rank_tol: float, step: int,
                        max_escalations: int) -> Optional[Tuple[int, int]]:
    """(codim, M used) once the residual band is clear, else None.

    A singular value inside [rank_tol, band_top] is ambiguous: either the
    geometric tail of a non-polynomial cofactor (it keeps shrinking as M
    grows) or a genuinely small quotient direction (it stays put).  Escalate
    while the band maximum shrinks; accept it as rank once it stops moving.
    """
    prev_band_max = None
    for _ in range(max_escalations + 1):
        sig = _membership_sigmas(st, K, M, rho)
        above = sig[sig > rank_tol]
        banded = above[above < MEMBERSHIP_BAND_TOP]
        if banded.size == 0:
            return int(above.size), M
        bmax = float(banded.max())
        if prev_band_max is not None and bmax > 0.5 * prev_band_max:
            return int(above.size), M
        prev_band_max = bmax
        M += step
    return None


def ideal_codim_window(st: SymbolTuple, K: int, M: Optional[int] = None,
                       rank_tolerance: float = DEFAULT_RANK_TOL,
                       rho: Optional[float] = None,
                       max_escalations: int = 6) -> Union[int, str]:
    """Codimension of the symbol ideal seen from quotient window K, cofactor
    window M, or "unstable".

    Stability requires the same integer at (K, M), (K+1, M+1), (K+2, M+2),
    each member individually clear of the decaying-residual band.  ``rho`` is
    the weighting radius; when a boundary certificate at r exists, (1+r)/2 is
    the sound choice (every interior zero then lies inside the ρ-polydisc and
    every excluded zero outside the closed polydisc stays excluded).
    """
    dmax = max(st.degree_vec(), default=0)
    if M is None:
        M = K + dmax + 2
    if M < K + dmax:
        raise ValueError(f"cofactor window M={M} must be at least K + max degree = {K + dmax}")
    if rho is None:
        rho = 0.8
    if not 0 < rho < 1:
        raise ValueError("weighting radius rho must lie in (0, 1)")
    step = 4 if st.nvars <= 2 else 2
    for _ in range(max_escalations + 1):
        vals = []
        try:
            for i in range(3):
                got = _codim_resolve_band(st, K + i, M + i, rho, rank_tolerance,
                                          step, max_escalations)
                if got is None:
                    return "unstable"
                vals.append(got[0])
        except MatrixBudgetError:
            return "unstable"
        if vals[0] == vals[1] == vals[2]:
            return vals[0]
        # agreeing failed with clear bands: the quotient window is clipping
        # the residual space — grow both windows and retry
        K += 1
        M += step
    return "unstable"


# ---- full route ---------------------------------------------------------------------

@dataclass(frozen=True)
class KoszulRouteResult:
    per_n: tuple                 # ({"N": n, "kernel_dims": [...]}, ...)
    codim: Union[int, str]
    homology: HomologyDims
    sigma_min_first: float
    chain_exact: bool

    @property
    def index(self) -> Union[int, str]:
        return self.homology.index_estimate


def koszul_route(st: SymbolTuple, n_range: Sequence[int] = None,
                 rank_tolerance: float = DEFAULT_RANK_TOL,
                 rho: Optional[float] = None) -> KoszulRouteResult:
    """Sweep truncation levels, demand three consecutive agreeing kernel-side
    homology vectors, attach the stabilized ideal codimension as the top
    dimension, and form the Euler index.  Emits "unstable" rather than any
    integer when stabilization fails."""
    p = len(st)
    if n_range is None:
        n_range = range(2, 9) if st.nvars <= 2 else range(1, 4)
    n_values = list(n_range)
    if not n_values:
        raise ValueError("empty truncation range")
    per_n = []
    history = []
    stabilized_at = None
    sigma_min = 0.0
    chain_ok = True
    for n in n_values:
        try:
            kt = build_koszul(st, n, rank_tolerance)
        except MatrixBudgetError:
            break
        dims = homology_kernel_dims(kt)
        chain_ok = chain_ok and all(np.all(prod == 0) for prod in chain_products(kt))
        sigma_min = stage1_sigma_min(kt)
        per_n.append({"N": n, "kernel_dims": list(dims)})
        history.append(tuple(dims))
        if stabilized_at is None and len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            stabilized_at = tuple(dims)
    kdim = max(2, max(st.degree_vec(), default=0) + 1)
    codim = ideal_codim_window(st, kdim, rank_tolerance=rank_tolerance, rho=rho)
    if stabilized_at is not None and isinstance(codim, int) and chain_ok:
        full = stabilized_at + (codim,)
        hom = HomologyDims(full, True, euler_index(full))
    else:
        last = history[-1] if history else tuple([0] * p)
        hom = HomologyDims(last + (codim,), False, "unstable")
    return KoszulRouteResult(tuple(per_n), codim, hom, sigma_min, chain_ok)


def dump_matrices(kt: KoszulTruncation) -> str:
    """Dense text dump (row-major, re/im pairs) of every boundary matrix."""
    out = []
    for k, m in enumerate(kt.boundary_matrices, start=1):
        out.append(f"# d{k} shape {m.shape[0]} {m.shape[1]}")
        for row in m:
            out.append(" ".join(f"{v.real:.17g} {v.imag:.17g}" for v in row))
    return "\n".join(out) + "\n"
