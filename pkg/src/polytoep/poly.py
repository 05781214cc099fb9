"""Sparse polynomials in up to three complex variables.

A polynomial is a mapping from exponent tuples to coefficients.  Two
coefficient modes coexist and never mix silently:

* ``exact`` — coefficients are :class:`~polytoep.exact.ExactComplex`
  (rational real and imaginary parts).  All elimination algebra (resultants,
  GCDs, quotient bases) runs in this mode so that "is zero" is decidable.
* ``float`` — coefficients are Python complex.  This is what the numerical
  routes consume.  Conversion exact→float is explicit (:meth:`MultiPoly.to_float`)
  and one-way.

Construction canonicalizes: zero coefficients are dropped (exactly in exact
mode; below ``1e-14`` relative to the largest magnitude in float mode), and
exponent tuples must be non-negative ints of length ``nvars``.

JSON form (shared with the CLI): ``{"nvars": n, "terms": [{"exp": [i, j],
"re": ..., "im": ...}]}`` where re/im are ``"p/q"`` rational strings in exact
mode and plain numbers in float mode.  Exact round-trips are bit-exact.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Mapping, Sequence, Union

from .exact import EXACT_ONE, EXACT_ZERO, ExactComplex

FLOAT_PRUNE_REL = 1e-14

Exponent = tuple  # tuple[int, ...]
Coefficient = Union[ExactComplex, complex]


class NotEliminableError(ValueError):
    """Raised when a resultant is requested in a variable both inputs lack."""


class ModeMismatchError(TypeError):
    """Raised when exact and float polynomials meet in one operation."""


def _grlex_key(e: Exponent):
    return (sum(e), e)


class MultiPoly:
    """Immutable sparse polynomial.  Use module helpers or operators."""

    __slots__ = ("nvars", "terms", "mode")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Coefficient], mode: str):
        if nvars not in (1, 2, 3):
            raise ValueError(f"nvars must be 1, 2 or 3, got {nvars}")
        if mode not in ("exact", "float"):
            raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
        clean: dict[Exponent, Coefficient] = {}
        for e, c in terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent {e} for nvars={nvars}")
            if mode == "exact":
                if not isinstance(c, ExactComplex):
                    raise ModeMismatchError(f"exact mode needs ExactComplex, got {type(c).__name__}")
            else:
                c = complex(c)
            if e in clean:
                clean[e] = clean[e] + c
            else:
                clean[e] = c
        if mode == "exact":
            clean = {e: c for e, c in clean.items() if c}
        else:
            top = max((abs(c) for c in clean.values()), default=0.0)
            cut = FLOAT_PRUNE_REL * top
            clean = {e: c for e, c in clean.items() if abs(c) > cut}
        self.nvars = nvars
        self.terms = clean
        self.mode = mode

    # ---- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; zero polynomial has degree -1 by convention."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_vec(self) -> tuple:
        """Per-variable maximum exponents (all zeros for the zero poly)."""
        d = [0] * self.nvars
        for e in self.terms:
            for i, x in enumerate(e):
                if x > d[i]:
                    d[i] = x
        return tuple(d)

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.nvars, self.mode, self.terms) == (other.nvars, other.mode, other.terms)

    def __hash__(self):
        return hash((self.nvars, self.mode, tuple(self.sorted_terms())))

    def __repr__(self) -> str:
        body = ", ".join(f"{e}: {c}" for e, c in self.sorted_terms())
        return f"MultiPoly({self.nvars}, {{{body}}}, {self.mode!r})"

    # ---- ring operations ------------------------------------------------

    def _check(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise ValueError(f"nvars mismatch: {self.nvars} vs {other.nvars}")
        if self.mode != other.mode:
            raise ModeMismatchError(f"mode mismatch: {self.mode} vs {other.mode}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MultiPoly(self.nvars, out, self.mode)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()}, self.mode)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out: dict[Exponent, Coefficient] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return MultiPoly(self.nvars, out, self.mode)

    def scale(self, c: Coefficient) -> "MultiPoly":
        if self.mode == "exact" and not isinstance(c, ExactComplex):
            raise ModeMismatchError("exact polynomial scaled by non-exact scalar")
        if self.mode == "float":
            c = complex(c)
        return MultiPoly(self.nvars, {e: v * c for e, v in self.terms.items()}, self.mode)

    def diff(self, var: int) -> "MultiPoly":
        """Partial derivative with respect to variable index ``var``."""
        if not 0 <= var < self.nvars:
            raise ValueError(f"variable index {var} out of range for nvars={self.nvars}")
        out = {}
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            e2 = e[:var] + (k - 1,) + e[var + 1:]
            mult = k if self.mode == "float" else ExactComplex(k)
            cc = c * mult
            out[e2] = out[e2] + cc if e2 in out else cc
        return MultiPoly(self.nvars, out, self.mode)

    # ---- evaluation ------------------------------------------------------

    def eval(self, point: Sequence[complex]) -> complex:
        """Value at a float point by nested Horner recursion on the first
        variable.  Deterministic: term grouping follows sorted exponents."""
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [complex(z) for z in point]
        items = [(e, complex(c.to_complex() if isinstance(c, ExactComplex) else c))
                 for e, c in self.sorted_terms()]
        return _horner(items, pt, 0)

    def eval_exact(self, point: Sequence[ExactComplex]) -> ExactComplex:
        if self.mode != "exact":
            raise ModeMismatchError("eval_exact requires an exact polynomial")
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        acc = EXACT_ZERO
        for e, c in self.sorted_terms():
            t = c
            for v, k in enumerate(e):
                for _ in range(k):
                    t = t * point[v]
            acc = acc + t
        return acc

    # ---- conversions -----------------------------------------------------

    def to_float(self) -> "MultiPoly":
        """Explicit, one-way conversion to float coefficients."""
        if self.mode == "float":
            return self
        return MultiPoly(self.nvars, {e: c.to_complex() for e, c in self.terms.items()}, "float")

    def conj_coeffs(self) -> "MultiPoly":
        """Polynomial with conjugated coefficients (same exponents)."""
        if self.mode == "exact":
            return MultiPoly(self.nvars, {e: c.conjugate() for e, c in self.terms.items()}, "exact")
        return MultiPoly(self.nvars, {e: c.conjugate() for e, c in self.terms.items()}, "float")


def _horner(items, point, var):
    """Horner evaluation of exponent/coefficient pairs, recursing by variable."""
    if not items:
        return 0j
    if var == len(point) - 1:
        acc = 0j
        deg = max(e[var] for e, _ in items)
        coeff = [0j] * (deg + 1)
        for e, c in items:
            coeff[e[var]] += c
        for k in range(deg, -1, -1):
            acc = acc * point[var] + coeff[k]
        return acc
    groups: dict[int, list] = {}
    for e, c in items:
        groups.setdefault(e[var], []).append((e, c))
    acc = 0j
    for k in range(max(groups), -1, -1):
        acc = acc * point[var] + (_horner(groups[k], point, var + 1) if k in groups else 0j)
    return acc


# ---- constructors ---------------------------------------------------------

def exact_poly(nvars: int, terms: Mapping[Exponent, object]) -> MultiPoly:
    """Build an exact polynomial; values may be ints, Fractions, 'p/q' strings,
    (re, im) pairs of those, or ExactComplex."""
    out = {}
    for e, v in terms.items():
        if isinstance(v, ExactComplex):
            c = v
        elif isinstance(v, tuple):
            c = ExactComplex(v[0], v[1])
        else:
            c = ExactComplex(v)
        out[tuple(e)] = c
    return MultiPoly(nvars, out, "exact")


def float_poly(nvars: int, terms: Mapping[Exponent, complex]) -> MultiPoly:
    return MultiPoly(nvars, dict(terms), "float")


def constant(nvars: int, c: Coefficient, mode: str) -> MultiPoly:
    e = (0,) * nvars
    return MultiPoly(nvars, {e: c}, mode)


def monomial(nvars: int, exp: Exponent, mode: str = "exact") -> MultiPoly:
    c = EXACT_ONE if mode == "exact" else 1 + 0j
    return MultiPoly(nvars, {tuple(exp): c}, mode)


# ---- coefficient bounds ----------------------------------------------------

def coefficient_bounds(p: MultiPoly) -> tuple:
    """(sup_bound, gradient_bound) on the closed unit polydisc.

    sup_bound = Σ|c| bounds |p|; gradient_bound = Σ_v Σ_terms e_v·|c| bounds
    the sum over variables of sup|∂p/∂z_v|.  Returned as floats (upper bounds
    survive the rounding slack at these magnitudes).
    """
    sup = 0.0
    grad = 0.0
    for e, c in p.terms.items():
        a = sqrt(float(c.abs2())) if isinstance(c, ExactComplex) else abs(c)
        sup += a
        grad += a * sum(e)
    return sup, grad


def directional_gradient_bounds(p: MultiPoly) -> tuple:
    """Per-variable bounds sup|∂p/∂z_v| ≤ Σ_terms e_v·|c| on the closed unit
    polydisc; sums to the gradient_bound of coefficient_bounds."""
    out = [0.0] * p.nvars
    for e, c in p.terms.items():
        a = sqrt(float(c.abs2())) if isinstance(c, ExactComplex) else abs(c)
        for v, ev in enumerate(e):
            if ev:
                out[v] += a * ev
    return tuple(out)


# ---- univariate helpers ----------------------------------------------------

def univariate_coeffs(p: MultiPoly) -> list:
    """Dense ascending coefficient list of a 1-variable polynomial."""
    if p.nvars != 1:
        raise ValueError("univariate_coeffs needs nvars=1")
    d = p.degree_in(0)
    if p.mode == "exact":
        out = [EXACT_ZERO] * (d + 1)
    else:
        out = [0j] * (d + 1)
    for (k,), c in p.terms.items():
        out[k] = c
    return out


def _poly1_from_coeffs(coeffs, mode: str) -> MultiPoly:
    return MultiPoly(1, {(k,): c for k, c in enumerate(coeffs)}, mode)


def gcd_univariate(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Monic GCD of two exact univariate polynomials (Euclid)."""
    if p.nvars != 1 or q.nvars != 1:
        raise ValueError("gcd_univariate needs nvars=1")
    if p.mode != "exact" or q.mode != "exact":
        raise ModeMismatchError("gcd_univariate runs in exact mode only")
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    a, b = p, q
    while not b.is_zero():
        a, b = b, _rem_univariate(a, b)
    if a.is_zero():
        return a
    lead = univariate_coeffs(a)[-1]
    return a.scale(EXACT_ONE / lead)


def _rem_univariate(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    ca = univariate_coeffs(a)
    cb = univariate_coeffs(b)
    if len(cb) == 0:
        raise ZeroDivisionError("remainder by zero polynomial")
    while len(ca) >= len(cb):
        if not ca[-1]:
            ca.pop()
            continue
        f = ca[-1] / cb[-1]
        off = len(ca) - len(cb)
        for i, c in enumerate(cb):
            ca[off + i] = ca[off + i] - f * c
        ca.pop()
    return _poly1_from_coeffs(ca, "exact")


def divexact(p: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Exact quotient p/g; raises ValueError when g does not divide p."""
    if p.mode != "exact" or g.mode != "exact":
        raise ModeMismatchError("divexact runs in exact mode only")
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    rem = dict(p.terms)
    quo: dict[Exponent, ExactComplex] = {}
    ge, gc = max(g.terms.items(), key=lambda kv: _grlex_key(kv[0]))
    while rem:
        e, c = max(rem.items(), key=lambda kv: _grlex_key(kv[0]))
        d = tuple(a - b for a, b in zip(e, ge))
        if any(x < 0 for x in d):
            raise ValueError("polynomial division is not exact")
        f = c / gc
        quo[d] = quo.get(d, EXACT_ZERO) + f
        for e2, c2 in g.terms.items():
            t = tuple(a + b for a, b in zip(d, e2))
            val = rem.get(t, EXACT_ZERO) - f * c2
            if val:
                rem[t] = val
            else:
                rem.pop(t, None)
    return MultiPoly(p.nvars, quo, "exact")


# ---- bivariate structure ---------------------------------------------------

def _as_univariate_in(p: MultiPoly, var: int) -> list:
    """Coefficients of p as a polynomial in z_var; each is univariate in the
    other variable (nvars=2 only)."""
    if p.nvars != 2:
        raise ValueError("expected nvars=2")
    other = 1 - var
    d = p.degree_in(var)
    out = [dict() for _ in range(d + 1)]
    for e, c in p.terms.items():
        out[e[var]][(e[other],)] = c
    return [MultiPoly(1, t, p.mode) for t in out]


def _from_univariate_in(coeffs: Sequence[MultiPoly], var: int) -> MultiPoly:
    terms: dict[Exponent, Coefficient] = {}
    mode = None
    for k, cp in enumerate(coeffs):
        mode = cp.mode
        for (j,), c in cp.terms.items():
            e = (k, j) if var == 0 else (j, k)
            terms[e] = terms.get(e, EXACT_ZERO if cp.mode == "exact" else 0j) + c
    return MultiPoly(2, terms, mode or "exact")


def resultant(p: MultiPoly, q: MultiPoly, eliminate: int) -> MultiPoly:
    """Sylvester resultant of two exact bivariate polynomials, eliminating
    the given variable.  Returns a univariate exact polynomial in the kept
    variable.

    The determinant is computed by exact interpolation: the Sylvester matrix
    (entries univariate in the kept variable) is evaluated at integer nodes,
    each scalar determinant is taken over ExactComplex, and the results are
    Lagrange-interpolated.  Degree bound: deg_v(p)·deg_keep(q) +
    deg_v(q)·deg_keep(p).
    """
    if p.nvars != 2 or q.nvars != 2:
        raise ValueError("resultant is defined for nvars=2")
    if p.mode != "exact" or q.mode != "exact":
        raise ModeMismatchError("resultant runs in exact mode only")
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of a zero polynomial")
    if eliminate not in (0, 1):
        raise ValueError("eliminate must be 0 or 1")
    keep = 1 - eliminate
    m = p.degree_in(eliminate)
    n = q.degree_in(eliminate)
    if m <= 0 and n <= 0:
        raise NotEliminableError(
            f"not eliminable: both polynomials are constant in variable {eliminate}")
    pc = _as_univariate_in(p, eliminate)
    qc = _as_univariate_in(q, eliminate)
    if m <= 0:
        return _pow_poly1(pc[0], n)
    if n <= 0:
        return _pow_poly1(qc[0], m)
    dp = max(c.degree_in(0) for c in pc)
    dq = max(c.degree_in(0) for c in qc)
    bound = m * dq + n * dp
    nodes = _integer_nodes(bound + 1)
    values = []
    for t in nodes:
        pt = [ExactComplex(t)]
        prow = [c.eval_exact(pt) for c in pc]
        qrow = [c.eval_exact(pt) for c in qc]
        values.append(_sylvester_det(prow, qrow))
    coeffs = _lagrange_interpolate(nodes, values)
    return _poly1_from_coeffs(coeffs, "exact")


def _pow_poly1(base: MultiPoly, k: int) -> MultiPoly:
    out = constant(1, EXACT_ONE, "exact")
    for _ in range(k):
        out = out * base
    return out


def _integer_nodes(count: int) -> list:
    nodes = [0]
    k = 1
    while len(nodes) < count:
        nodes.append(k)
        if len(nodes) < count:
            nodes.append(-k)
        k += 1
    return nodes[:count]


def _sylvester_det(prow: list, qrow: list) -> ExactComplex:
    """Determinant of the Sylvester matrix built from scalar coefficient rows
    (ascending); prow has degree m = len-1, qrow degree n = len-1."""
    m = len(prow) - 1
    n = len(qrow) - 1
    size = m + n
    mat = [[EXACT_ZERO] * size for _ in range(size)]
    for i in range(n):
        for j, c in enumerate(reversed(prow)):
            mat[i][i + j] = c
    for i in range(m):
        for j, c in enumerate(reversed(qrow)):
            mat[n + i][i + j] = c
    return _det_exact(mat)


def _det_exact(mat: list) -> ExactComplex:
    """Gaussian elimination determinant over ExactComplex."""
    size = len(mat)
    det = EXACT_ONE
    for col in range(size):
        piv = None
        for r in range(col, size):
            if mat[r][col]:
                piv = r
                break
        if piv is None:
            return EXACT_ZERO
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det = det * mat[col][col]
        inv = EXACT_ONE / mat[col][col]
        for r in range(col + 1, size):
            if mat[r][col]:
                f = mat[r][col] * inv
                for cidx in range(col, size):
                    mat[r][cidx] = mat[r][cidx] - f * mat[col][cidx]
    return det


def _lagrange_interpolate(nodes: list, values: list) -> list:
    """Exact coefficients (ascending) of the interpolating polynomial."""
    k = len(nodes)
    coeffs = [EXACT_ZERO] * k
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        basis = [EXACT_ONE]
        denom = EXACT_ONE
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            new = [EXACT_ZERO] * (len(basis) + 1)
            xje = ExactComplex(xj)
            for d, b in enumerate(basis):
                new[d] = new[d] - b * xje
                new[d + 1] = new[d + 1] + b
            basis = new
            denom = denom * (ExactComplex(xi) - xje)
        w = yi / denom
        for d, b in enumerate(basis):
            coeffs[d] = coeffs[d] + w * b
    return coeffs


def gcd_bivariate(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """GCD of two exact bivariate polynomials via content/primitive-part and a
    primitive pseudo-remainder sequence in z2.  Normalized so the graded-lex
    leading coefficient is 1."""
    if p.nvars != 2 or q.nvars != 2:
        raise ValueError("gcd_bivariate needs nvars=2")
    if p.mode != "exact" or q.mode != "exact":
        raise ModeMismatchError("gcd_bivariate runs in exact mode only")
    if p.is_zero():
        return _normalize_lead(q)
    if q.is_zero():
        return _normalize_lead(p)
    cp, pp = _content_primitive(p)
    cq, pq = _content_primitive(q)
    cg = gcd_univariate(cp, cq)
    g = _primitive_prs_gcd(pp, pq)
    return _normalize_lead(_lift_univariate(cg, 0) * g)


def _content_primitive(p: MultiPoly):
    """(content in C[z1], primitive part) viewing p in (C[z1])[z2]."""
    coeffs = _as_univariate_in(p, 1)
    content = None
    for c in coeffs:
        if c.is_zero():
            continue
        content = c if content is None else gcd_univariate(content, c)
        if content.degree() == 0:
            break
    if content is None or content.is_zero():
        content = constant(1, EXACT_ONE, "exact")
    prim = [_exact_div_univariate(c, content) for c in coeffs]
    return content, _from_univariate_in(prim, 1)


def _exact_div_univariate(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    if a.is_zero():
        return a
    return divexact(a, b)


def _lift_univariate(c: MultiPoly, var: int) -> MultiPoly:
    """Embed a univariate polynomial as a bivariate one in variable ``var``."""
    terms = {}
    for (k,), v in c.terms.items():
        terms[(k, 0) if var == 0 else (0, k)] = v
    return MultiPoly(2, terms, c.mode)


def _primitive_prs_gcd(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """GCD of two z1-primitive bivariate polynomials, PRS in z2."""
    if a.degree_in(1) < b.degree_in(1):
        a, b = b, a
    while True:
        if b.is_zero():
            _, prim = _content_primitive(a)
            return prim
        r = _pseudo_rem(a, b)
        if r.is_zero():
            _, prim = _content_primitive(b)
            return prim
        _, r = _content_primitive(r)
        a, b = b, r


def _pseudo_rem(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    """Pseudo-remainder of a by b in z2: lc(b)^(da-db+1) * a mod b."""
    da = a.degree_in(1)
    db = b.degree_in(1)
    if db < 0:
        raise ZeroDivisionError("pseudo-remainder by zero")
    ca = _as_univariate_in(a, 1)
    cb = _as_univariate_in(b, 1)
    lead = cb[-1]
    r = list(ca)
    for _ in range(da - db + 1):
        if not r:
            break
        top = r[-1]
        r = [c * lead for c in r[:-1]]
        if top.is_zero():
            continue
        off = len(r) - db
        for i in range(db):
            r[off + i] = r[off + i] - top * cb[i]
    while r and r[-1].is_zero():
        r.pop()
    return _from_univariate_in(r, 1) if r else MultiPoly(2, {}, "exact")


def _normalize_lead(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    _, lead = max(p.terms.items(), key=lambda kv: _grlex_key(kv[0]))
    return p.scale(EXACT_ONE / lead)


# ---- symbol tuples ---------------------------------------------------------

@dataclass(frozen=True)
class SymbolTuple:
    """Ordered tuple of polynomial symbols sharing one variable count.

    ``assignment`` is optional and marks tensor-style inputs: entry i names
    the polydisc coordinate on which the (univariate) i-th symbol acts.
    """
    symbols: tuple
    nvars: int
    assignment: tuple = None

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("empty symbol tuple")
        for s in self.symbols:
            if s.nvars != self.nvars:
                raise ValueError("all symbols must share nvars")
        modes = {s.mode for s in self.symbols}
        if len(modes) > 1:
            raise ModeMismatchError("symbols mix exact and float modes")
        if self.assignment is not None:
            if len(self.assignment) != len(self.symbols):
                raise ValueError("assignment length must match the tuple")
            if len(set(self.assignment)) != len(self.assignment):
                raise ValueError("repeated variable assignment")

    @property
    def mode(self) -> str:
        return self.symbols[0].mode

    def __len__(self) -> int:
        return len(self.symbols)

    def to_float(self) -> "SymbolTuple":
        return SymbolTuple(tuple(s.to_float() for s in self.symbols), self.nvars, self.assignment)

    def degree_vec(self) -> tuple:
        d = [0] * self.nvars
        for s in self.symbols:
            for i, x in enumerate(s.degree_vec()):
                if x > d[i]:
                    d[i] = x
        return tuple(d)


def symbols(nvars: int, *polys: MultiPoly) -> SymbolTuple:
    return SymbolTuple(tuple(polys), nvars)


# ---- JSON ------------------------------------------------------------------

def _frac_str(f: Fraction) -> str:
    return str(f)


def poly_to_json(p: MultiPoly) -> dict:
    terms = []
    for e, c in p.sorted_terms():
        if p.mode == "exact":
            terms.append({"exp": list(e), "re": _frac_str(c.re), "im": _frac_str(c.im)})
        else:
            terms.append({"exp": list(e), "re": c.real, "im": c.imag})
    return {"nvars": p.nvars, "terms": terms}


def poly_from_json(obj: Mapping) -> MultiPoly:
    try:
        nvars = int(obj["nvars"])
        raw = obj["terms"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed polynomial object: {exc}") from exc
    exact_mode = all(isinstance(t.get("re", 0), str) and isinstance(t.get("im", 0), str)
                     for t in raw) if raw else obj.get("mode", "exact") == "exact"
    if "mode" in obj:
        exact_mode = obj["mode"] == "exact"
    terms: dict[Exponent, Coefficient] = {}
    for t in raw:
        e = tuple(int(x) for x in t["exp"])
        if exact_mode:
            c: Coefficient = ExactComplex(Fraction(t["re"]), Fraction(t["im"]))
        else:
            c = complex(float(t["re"]), float(t["im"]))
        if e in terms:
            raise ValueError(f"duplicate exponent {e} in polynomial JSON")
        terms[e] = c
    return MultiPoly(nvars, terms, "exact" if exact_mode else "float")


def tuple_to_json(st: SymbolTuple) -> dict:
    out = {"nvars": st.nvars, "symbols": [poly_to_json(s) for s in st.symbols]}
    if st.assignment is not None:
        out["assignment"] = list(st.assignment)
    return out


def tuple_from_json(obj: Mapping) -> SymbolTuple:
    try:
        nvars = int(obj["nvars"])
        polys = tuple(poly_from_json(o) for o in obj["symbols"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed symbol-tuple object: {exc}") from exc
    assignment = tuple(obj["assignment"]) if "assignment" in obj else None
    return SymbolTuple(polys, nvars, assignment)


def canonical_tuple_json(st: SymbolTuple) -> str:
    """Canonical serialization used for cache keys and report echoes."""
    return json.dumps(tuple_to_json(st), sort_keys=True, separators=(",", ":"))
