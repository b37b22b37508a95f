import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isolab.curlfit import (H1, Cochain, GridComplex, H2down, H2up, c_up, curl_fit, d0, d1,
                            exact_simplex, face_coefficient, fill1_exact, filling_constant,
                            homotopy_defect, permute_cochain, random_cochain, slice_witness,
                            weighted_constant, weighted_curl_fit)
from isolab.errors import InfeasibleError, ResourceError


def test_complex_counts():
    K = GridComplex((3, 4))
    assert K.count(0) == 12
    assert K.count(1) == 2 * 4 + 3 * 3
    assert K.count(2) == 2 * 3
    with pytest.raises(ValueError):
        GridComplex((0, 3))


def test_cochain_rejects_foreign_cells():
    with pytest.raises(IndexError):
        Cochain(1, GridComplex((2, 2)), {(0, (1, 0)): 1})


def test_curl_of_y_dx_is_minus_one():
    K = GridComplex((3, 3))
    c = Cochain(1, K, {(0, x): x[1] for x in K.vertices() if x[0] < 2})
    assert set(d1(c).values.values()) == {Fraction(-1)}
    assert len(d1(c).values) == 4


def test_exact_forms_fit_perfectly():
    rng = random.Random(5)
    K = GridComplex((3, 4, 2))
    u = Cochain(0, K, {x: Fraction(rng.randint(-5, 5), 3) for x in K.vertices()})
    c = d0(u)
    assert d1(c).is_zero()
    fit = curl_fit(c)
    assert fit.residual_l1 == 0
    assert d0(fit.potential) == c


def test_c_up_values():
    assert c_up((5, 5)) == 4
    assert c_up((3, 3, 3)) == max(face_coefficient((3, 3, 3), 1), face_coefficient((3, 3, 3), 2))
    assert c_up((3, 3, 3)) == 6
    assert c_up((7,)) == 0
    assert c_up((2, 5), order=(1, 0)) == 1


@pytest.mark.parametrize("N", [2, 3, 5, 8])
def test_planar_witness_is_tight(N):
    fit = curl_fit(slice_witness((N, N)))
    assert fit.curl_l1 == 1
    assert fit.residual_l1 == N - 1 == fit.bound


def test_weighted_example():
    # alpha = 1, beta = 4 on a planar N x N grid gives (N - 1) / 4
    for N in (3, 5):
        assert weighted_constant((N, N), (1, 1), {(0, 1): 4}) == Fraction(N - 1, 4)
        # only the lower axis weight of a face pair enters the constant
        assert weighted_constant((N, N), (1, 2), {(0, 1): 4}) == Fraction(N - 1, 4)
    c = slice_witness((5, 5))
    w = weighted_curl_fit(c, (1, 1), {(0, 1): 4})
    assert w.holds and w.residual == w.constant * w.curl
    with pytest.raises(ValueError):
        weighted_curl_fit(c, (0, 1), {(0, 1): 1})


def test_permute_roundtrip():
    rng = random.Random(2)
    c = random_cochain(rng, (2, 3, 4))
    order = (2, 0, 1)
    inv = (1, 2, 0)
    assert permute_cochain(permute_cochain(c, order), inv) == c
    assert d1(permute_cochain(c, order)).l1() == d1(c).l1()


def test_reordered_fit_respects_its_bound():
    rng = random.Random(9)
    for _ in range(20):
        c = random_cochain(rng, (2, 4, 3))
        for order in ((0, 1, 2), (2, 1, 0), (1, 2, 0)):
            fit = curl_fit(c, order)
            assert fit.residual_l1 <= c_up(c.complex.N, order) * fit.curl_l1


def test_h2down_is_supported_inside():
    rng = random.Random(4)
    b = random_cochain(rng, (3, 3), degree=2)
    assert H2down(b).degree == 1


def test_json_roundtrip():
    c = random_cochain(random.Random(1), (2, 3))
    assert Cochain.from_json(c.to_json()) == c


def test_simplex_small():
    # min x + y  s.t. x - y = 1
    res = exact_simplex([1, 1], [[1, -1]], [1])
    assert res.value == 1 and res.x == [1, 0]
    with pytest.raises(InfeasibleError):
        exact_simplex([1, 1], [[1, 1]], [-1])


def test_fill1_examples():
    K = GridComplex((3, 3))
    face = ((0, 1), (0, 0))
    assert fill1_exact(Cochain(2, K, {face: 1})) == 1
    assert fill1_exact(Cochain(2, K, {face: Fraction(-3, 2)})) == Fraction(3, 2)
    # a shared edge enters the two neighbouring faces with opposite signs
    dipole = Cochain(2, K, {face: 1, ((0, 1), (1, 0)): -1})
    assert fill1_exact(dipole) == 1
    assert fill1_exact(Cochain(2, K, {face: 1, ((0, 1), (1, 0)): 1})) == 2
    assert fill1_exact(Cochain(2, K, {})) == 0
    assert filling_constant((3, 3)) == 1
    with pytest.raises(ValueError):
        filling_constant((2, 2, 2))
    with pytest.raises(ResourceError):
        fill1_exact(Cochain(2, GridComplex((9, 9)), {face: 1}))


def test_fill1_never_beats_homotopy():
    rng = random.Random(6)
    for _ in range(10):
        c = random_cochain(rng, (3, 3))
        b = d1(c)
        assert fill1_exact(b) <= (c - d0(H1(c))).l1()


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(0, 10 ** 6))
def test_homotopy_identity(N, seed):
    c = random_cochain(random.Random(seed), N)
    assert homotopy_defect(c).is_zero()
    assert d1(d0(H1(c))).is_zero()
    assert (c - d0(H1(c))) == H2up(d1(c))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=3), st.integers(0, 10 ** 6))
def test_curl_fit_bound(N, seed):
    fit = curl_fit(random_cochain(random.Random(seed), N))
    assert fit.residual_l1 <= fit.bound
