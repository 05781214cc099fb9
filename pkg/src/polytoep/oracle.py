"""Degree oracle: index values from perturbation counting and winding numbers.

Independent of both the operator-theoretic route and the quotient-algebra
route.  The index of a Fredholm pair is a topological invariant, so adding
random constants of magnitude ≤ ε to each symbol leaves the count of zeros
inside the bidisc unchanged while splitting multiple zeros into simple ones;
the count is then read off a resultant-plus-lifting solve and put to a
majority vote across trials.  For one variable the index is minus the
winding number of the symbol around the circle, evaluated by trapezoidal
quadrature of the logarithmic derivative.

Perturbations are exact rational constants (every float is one), so the
resultant assembly stays exact; only companion-matrix root-finding floats.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact import ExactComplex
from .poly import (
    MultiPoly,
    NotEliminableError,
    SymbolTuple,
    constant,
    divexact,
    exact_poly,
    gcd_univariate,
    resultant,
    symbols,
    univariate_coeffs,
)

BOUNDARY_MARGIN = 1e-6
_LIFT_TOL = 1e-6
_DUPLICATE_TOL = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    epsilon: float = 1e-3
    trials: int = 5
    seed: int = 0
    quadrature_points: int = 256

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.trials < 3:
            raise ValueError(f"need at least 3 trials for a majority, got {self.trials}")
        if self.quadrature_points < 64:
            raise ValueError(f"need at least 64 quadrature points, got {self.quadrature_points}")


class NoMajorityError(RuntimeError):
    pass


def _as_exact(p: MultiPoly) -> MultiPoly:
    if p.mode == "exact":
        return p
    return exact_poly(p.nvars, {e: ExactComplex(Fraction(c.real), Fraction(c.imag))
                                for e, c in p.terms.items()})


def _perturbed(st: SymbolTuple, rng: np.random.Generator, epsilon: float) -> SymbolTuple:
    out = []
    for f in st.symbols:
        rho = epsilon * (0.25 + 0.75 * rng.uniform())
        ang = rng.uniform(0.0, 2 * np.pi)
        delta = ExactComplex(Fraction(float(rho * np.cos(ang))),
                             Fraction(float(rho * np.sin(ang))))
        out.append(_as_exact(f) + constant(st.nvars, delta, "exact"))
    return symbols(st.nvars, *out)


def _squarefree_roots(p: MultiPoly, var: int) -> np.ndarray:
    """Distinct roots of an exact polynomial that is constant in the other
    variable: the squarefree part p/gcd(p, p′) is computed exactly, so the
    companion solve only ever sees simple roots."""
    p1 = exact_poly(1, {(e[var],): c for e, c in p.terms.items()})
    if p1.degree() == 0:
        return np.empty(0, dtype=complex)
    g = gcd_univariate(p1, p1.diff(0))
    if g.degree() > 0:
        p1 = divexact(p1, g)
    arr = np.array([c.to_complex() for c in univariate_coeffs(p1)])
    return np.roots(arr[::-1])


def _specialize(p: MultiPoly, var: int, value: complex) -> np.ndarray:
    """Dense ascending coefficients of p with one variable fixed."""
    other = 1 - var
    deg = p.degree_in(other)
    out = np.zeros(deg + 1, dtype=complex)
    for e, c in p.terms.items():
        cv = c.to_complex() if p.mode == "exact" else c
        out[e[other]] += cv * (value ** e[var])
    return out


def _solve_pair(p: MultiPoly, q: MultiPoly) -> np.ndarray | None:
    """All common zeros of a generic exact pair; None if the trial is bad
    (vanishing resultant or an ambiguous lift)."""
    try:
        r = resultant(p, q, eliminate=1)
        keep = 0
    except NotEliminableError:
        try:
            r = resultant(p, q, eliminate=0)
            keep = 1
        except NotEliminableError:
            return np.empty((0, 2), dtype=complex)   # two nonzero constants
    if r.is_zero():
        return None
    base = _squarefree_roots(r, keep)
    points = []
    for a in base:
        pa = _specialize(p, keep, a)
        qa = _specialize(q, keep, a)
        lead, other = (pa, qa) if len(pa) >= len(qa) else (qa, pa)
        scale = max(np.max(np.abs(lead)), np.max(np.abs(other)), 1.0)
        if len(lead) == 1:
            continue   # both specialize to constants: no finite partner
        for b in np.roots(lead[::-1]):
            res = abs(np.polyval(other[::-1], b))
            if res <= _LIFT_TOL * scale * max(1.0, abs(b)) ** max(len(other) - 1, 1):
                pt = (a, b) if keep == 0 else (b, a)
                points.append(pt)
    if not points:
        return np.empty((0, 2), dtype=complex)
    pts = np.array(points, dtype=complex)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if np.max(np.abs(pts[i] - pts[j])) < _DUPLICATE_TOL:
                return None   # perturbation failed to split a zero
    jac = [[f.diff(v).to_float() for v in (0, 1)] for f in (p, q)]
    for pt in pts:
        det = (jac[0][0].eval(pt) * jac[1][1].eval(pt)
               - jac[0][1].eval(pt) * jac[1][0].eval(pt))
        if abs(det) < 1e-10:
            return None   # a zero failed to split into simple ones
    return pts


def perturbed_count_details(st: SymbolTuple, cfg: OracleConfig | None = None) -> dict:
    """perturbed_count plus its evidence: the per-trial counts, the number of
    attempts spent, and how many trials were discarded for margin hits."""
    cfg = cfg or OracleConfig()
    if len(st) != 2 or st.nvars != 2:
        raise ValueError("perturbed counting handles pairs in two variables")
    counts = []
    margin_hits = 0
    attempt = 0
    max_attempts = 3 * cfg.trials
    while len(counts) < cfg.trials and attempt < max_attempts:
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, attempt)))
        attempt += 1
        pts = _solve_pair(*_perturbed(st, rng, cfg.epsilon).symbols)
        if pts is None:
            continue
        radii = np.max(np.abs(pts), axis=1) if len(pts) else np.empty(0)
        if np.any(np.abs(radii - 1.0) <= BOUNDARY_MARGIN):
            margin_hits += 1
            continue
        counts.append(int(np.sum(radii < 1.0 - BOUNDARY_MARGIN)))
    if not counts:
        if margin_hits:
            raise RuntimeError("every perturbation trial left a zero inside "
                               "the boundary margin")
        raise RuntimeError("no usable perturbation trial (degenerate pair?)")
    if len(counts) < cfg.trials:
        raise RuntimeError(f"only {len(counts)} of {cfg.trials} perturbation "
                           "trials were usable")
    value, hits = Counter(counts).most_common(1)[0]
    if hits * 2 <= len(counts):
        raise NoMajorityError(f"no majority among trial counts {counts}")
    return {"count": value, "trial_counts": counts, "attempts": attempt,
            "margin_hits": margin_hits, "epsilon": cfg.epsilon}


def perturbed_count(st: SymbolTuple, cfg: OracleConfig | None = None) -> int:
    """Zeros of an ε-perturbed copy strictly inside the bidisc, majority-voted
    across independent perturbation trials."""
    return perturbed_count_details(st, cfg)["count"]


def winding_number(p: MultiPoly, radius: float, cfg: OracleConfig | None = None) -> int:
    """Winding of p around the circle |z| = radius, by trapezoidal quadrature
    of z·p′(z)/p(z).  The contour is certified nonvanishing by sampling plus
    a Lipschitz bound before the quadrature is trusted."""
    cfg = cfg or OracleConfig()
    if p.nvars != 1:
        raise ValueError("winding numbers apply to one-variable symbols")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    coeffs = np.array([c.to_complex() if p.mode == "exact" else c
                       for c in univariate_coeffs(p)])
    if len(coeffs) == 1:
        if coeffs[0] == 0:
            raise ValueError("zero symbol has no winding number")
        return 0
    dcoeffs = coeffs[1:] * np.arange(1, len(coeffs))
    # sup |p'| on the circle bounds the change of p between samples
    lip = float(np.sum(np.abs(dcoeffs) * radius ** np.arange(len(dcoeffs))))
    npts = cfg.quadrature_points
    for _ in range(2):
        theta = np.linspace(0.0, 2 * np.pi, npts, endpoint=False)
        z = radius * np.exp(1j * theta)
        vals = np.polyval(coeffs[::-1], z)
        gap = radius * np.pi / npts           # half the arc between samples
        if np.min(np.abs(vals)) <= lip * gap:
            npts *= 2
            continue
        w = np.mean(z * np.polyval(dcoeffs[::-1], z) / vals)
        k = round(w.real)
        if abs(w - k) <= 0.25:
            return int(k)
        npts *= 2
    raise RuntimeError(f"winding of {p!r} on |z|={radius} did not resolve: "
                       "symbol vanishes near the contour or quadrature "
                       "failed to settle within 0.25 of an integer")


def univariate_index(p: MultiPoly, cfg: OracleConfig | None = None) -> int:
    """Index of the Toeplitz operator with one-variable polynomial symbol:
    minus the winding around the unit circle.  Raises when the symbol
    vanishes near the circle (the operator is then not Fredholm)."""
    try:
        return -winding_number(p, 1.0, cfg)
    except RuntimeError as exc:
        raise RuntimeError(f"not Fredholm: {exc}") from exc
