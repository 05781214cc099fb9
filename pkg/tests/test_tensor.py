"""Tensor-product index formula and single-disc reductions."""
import numpy as np
import pytest

from polytoep.poly import exact_poly, symbols
from polytoep.tensor import (
    TrigPoly,
    disc_tuple_index,
    tensor_tuple_index,
    trig_from_json,
    trig_from_poly,
    trig_to_json,
    trig_toeplitz_index,
)

from conftest import p1, p2


def test_trig_poly_values():
    f = TrigPoly({1: 1.0, 0: 2.0})          # 2 + e^{iθ}
    th = np.array([0.0, np.pi])
    assert f.values(th) == pytest.approx([3.0, 1.0])
    assert f.derivative_values(th)[0] == pytest.approx(1j)
    assert f.min_index == 0 and f.max_index == 1
    with pytest.raises(ValueError):
        TrigPoly({})


def test_trig_json_round_trip():
    f = TrigPoly({-2: 1.5 + 0.5j, 3: -1.0})
    g = trig_from_json(trig_to_json(f))
    assert g.coeffs == f.coeffs
    with pytest.raises(ValueError):
        trig_from_json({"fourier": [{"k": 1, "re": 1, "im": 0},
                                    {"k": 1, "re": 2, "im": 0}]})


def test_trig_from_poly():
    f = trig_from_poly(p1({(2,): 1, (0,): "-1/4"}))
    assert f.coeffs[2] == 1.0 and f.coeffs[0] == -0.25
    g = trig_from_poly(p2({(0, 3): 2}), var=1)
    assert g.coeffs[3] == 2.0
    with pytest.raises(ValueError):
        trig_from_poly(p2({(1, 1): 1}), var=0)


def test_factor_indices():
    fwd = trig_toeplitz_index(TrigPoly({1: 1.0}))
    assert fwd.fredholm and fwd.index == -1 and not fwd.invertible_flag
    bwd = trig_toeplitz_index(TrigPoly({-1: 1.0}))
    assert bwd.index == 1
    inv = trig_toeplitz_index(TrigPoly({0: 2.0, 1: 1.0}))
    assert inv.fredholm and inv.index == 0 and inv.invertible_flag
    broken = trig_toeplitz_index(TrigPoly({1: 1.0, 0: -1.0}))   # vanishes at θ=0
    assert not broken.fredholm and broken.index is None


def test_index_reversal_negation():
    f = TrigPoly({2: 1.0, 0: 0.25})
    a = trig_toeplitz_index(f)
    b = trig_toeplitz_index(f.reversed_indices())
    assert a.index == -b.index


def test_tensor_monomial_grid():
    for a in (1, 2, 3, 4):
        for b in (1, 2, 3, 4):
            rep = tensor_tuple_index([TrigPoly({a: 1.0}), TrigPoly({b: 1.0})], [0, 1])
            assert rep.tuple_fredholm and rep.tuple_index == -a * b


def test_tensor_three_factors():
    rep = tensor_tuple_index([TrigPoly({1: 1.0})] * 3, [0, 1, 2])
    assert rep.tuple_index == -1       # (-1)^{n+1} * (-1)^3 with n = 3
    rep2 = tensor_tuple_index([TrigPoly({1: 1.0}), TrigPoly({2: 1.0}),
                               TrigPoly({1: 1.0})], [0, 1, 2])
    assert rep2.tuple_index == -2


def test_tensor_invertible_factor_kills_index():
    rep = tensor_tuple_index([TrigPoly({1: 1.0}), TrigPoly({0: 2.0, 1: 1.0})], [0, 1])
    assert rep.tuple_index == 0
    assert "invertible" in rep.note


def test_tensor_undefined_and_validation():
    rep = tensor_tuple_index([TrigPoly({1: 1.0}), TrigPoly({1: 1.0, 0: -1.0})], [0, 1])
    assert not rep.tuple_fredholm and rep.tuple_index == "undefined"
    with pytest.raises(ValueError):
        tensor_tuple_index([TrigPoly({1: 1.0})], [0])
    with pytest.raises(ValueError):
        tensor_tuple_index([TrigPoly({1: 1.0})] * 2, [0, 0])


def test_disc_tuple_fixtures():
    z = p1({(1,): 1})
    half = p1({(0,): "1/2"})
    assert disc_tuple_index(symbols(1, z, z - half)) == 0
    assert disc_tuple_index(symbols(1, z, p1({(2,): 1}))) == 0
    assert disc_tuple_index(symbols(1, p1({(2,): 1}), z - half)) == 0


def test_disc_tuple_rejects_joint_boundary_zeros():
    z = p1({(1,): 1})
    one = p1({(0,): 1})
    with pytest.raises(RuntimeError, match="not Fredholm"):
        disc_tuple_index(symbols(1, z - one, p1({(2,): 1, (0,): -1})))


def test_disc_tuple_validation(shift_pair):
    with pytest.raises(ValueError):
        disc_tuple_index(symbols(1, p1({(1,): 1})))
    with pytest.raises(ValueError):
        disc_tuple_index(shift_pair)
