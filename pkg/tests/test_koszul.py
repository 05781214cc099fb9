"""Truncated Koszul complex: chain structure, ranks, homology, route."""
import math

import numpy as np
import pytest

from polytoep.koszul import (
    MonomialWindow,
    build_koszul,
    chain_products,
    dump_matrices,
    euler_index,
    exact_chain_check,
    homology_kernel_dims,
    ideal_codim_window,
    koszul_route,
    numerical_rank,
    range_sum_check,
    stage1_sigma_min,
    toeplitz_matrix,
)
from polytoep.poly import exact_poly, symbols

from conftest import p1, p2


def test_window_basis_and_dim():
    win = MonomialWindow(2, (2, 1))
    assert win.dim == 6
    assert win.basis[0] == (0, 0)
    # ascending graded-lex, never skipping a monomial under the cap
    degrees = [sum(e) for e in win.basis]
    assert degrees == sorted(degrees)
    assert set(win.basis) == {(a, b) for a in range(3) for b in range(2)}


def test_toeplitz_matrix_is_shift():
    z = p1({(1,): 1})
    m = toeplitz_matrix(z, 4)
    # maps window cap 4 into cap 5 without truncating: a clean shift
    assert m.shape == (6, 5)
    assert np.allclose(m, np.eye(6, 5, k=-1))


def test_chain_property_and_exactness(shift_pair, monomial_pair):
    for st in (shift_pair, monomial_pair):
        kt = build_koszul(st, 4)
        for prod in chain_products(kt):
            assert np.max(np.abs(prod)) == 0.0
        assert exact_chain_check(st, 4)


def test_sigma_min_of_shift_stage_one(shift_pair):
    kt = build_koszul(shift_pair, 5)
    # d1 ξ = (-z2 ξ, z1 ξ): columns are orthogonal pairs of unit shifts
    assert stage1_sigma_min(kt) == pytest.approx(math.sqrt(2.0), rel=1e-12)


def test_rank_nullity_accounting(quarter_pair):
    kt = build_koszul(quarter_pair, 4)
    for d in kt.boundary_matrices:
        r = numerical_rank(d, 1e-8)
        kernel = d.shape[1] - r
        assert r + kernel == d.shape[1]
        assert r <= min(d.shape)


def test_range_sum_identity_random_tuples():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = int(rng.integers(4, 9))
        mats = []
        for _ in range(int(rng.integers(2, 4))):
            r = int(rng.integers(1, n + 1))
            a = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
            b = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
            mats.append(a @ b)
        assert range_sum_check(mats, 1e-8)


def test_range_sum_check_input_validation():
    with pytest.raises(ValueError):
        range_sum_check([])
    with pytest.raises(ValueError):
        range_sum_check([np.zeros((3, 3)), np.zeros((4, 4))])


def test_euler_index_sign_convention():
    # arity 2: index = -h2 + h1 - h0
    assert euler_index([0, 0, 1]) == -1
    assert euler_index([1, 0, 0]) == -1
    assert euler_index([0, 1, 0]) == 1


def test_route_fixture_indices(shift_pair, monomial_pair, quarter_pair):
    assert koszul_route(shift_pair).index == -1
    assert koszul_route(monomial_pair).index == -6
    assert koszul_route(quarter_pair).index == -2
    far = symbols(2, p2({(1, 0): 1, (0, 0): -2}), p2({(0, 1): 1}))
    assert koszul_route(far).index == 0


def test_route_reports_chain_and_codim(shift_pair):
    route = koszul_route(shift_pair)
    assert route.chain_exact
    assert route.codim == 1
    assert route.homology.stabilized
    assert [rec["N"] for rec in route.per_n] == list(range(2, 2 + len(route.per_n)))


def test_route_scaling_invariance(quarter_pair):
    from polytoep.exact import ExactComplex
    scaled = symbols(2, *(s.scale(ExactComplex(3)) for s in quarter_pair.symbols))
    assert koszul_route(scaled).index == koszul_route(quarter_pair).index


def test_route_univariate_pairs():
    z = p1({(1,): 1})
    zz = p1({(2,): 1})
    assert koszul_route(symbols(1, z, zz)).index == 0
    assert koszul_route(symbols(1, z)).index == -1


def test_three_variable_shifts():
    st = symbols(3, exact_poly(3, {(1, 0, 0): 1}), exact_poly(3, {(0, 1, 0): 1}),
                 exact_poly(3, {(0, 0, 1): 1}))
    route = koszul_route(st)
    assert route.index == -1
    assert route.chain_exact


def test_unstable_is_reported_not_guessed(repeated_pair, shift_pair):
    # (z1, z1) vanishes on a curve: kernel dims keep growing with N
    route = koszul_route(repeated_pair)
    assert route.index == "unstable"
    assert not route.homology.stabilized
    # an honest route refuses short sweeps instead of emitting an integer
    short = koszul_route(shift_pair, range(2, 4))
    assert short.index == "unstable"


def test_ideal_codim_window_values(shift_pair, monomial_pair):
    assert ideal_codim_window(shift_pair, 4) == 1
    assert ideal_codim_window(monomial_pair, 6) == 6


def test_dump_matrices_format(shift_pair):
    text = dump_matrices(build_koszul(shift_pair, 2))
    assert text.startswith("# d1 shape ")
    header, first_row = text.splitlines()[:2]
    rows, cols = map(int, header.split()[3:5])
    assert len(first_row.split()) == cols * 2  # re/im pairs
