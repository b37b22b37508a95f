import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isolab.cayley import ZdStencil
from isolab.errors import DegenerateInputError
from isolab.spectral import (box, box_lambda1, cheeger_check, dirichlet_lambda1,
                             dirichlet_matrix, fk_box_check, interval_lambda1, kernel_1d,
                             local_cheeger, mixing_time, nash_check, nash_quotient,
                             polyominoes, torus_distance, torus_kernel, torus_kernel_dense,
                             torus_lambda1, torus_mixing)

Z1, Z2 = ZdStencil(1), ZdStencil(2)


def test_singleton_eigenvalue_is_one():
    assert dirichlet_lambda1([(0, 0)], Z2) == pytest.approx(1.0)
    assert dirichlet_lambda1([(0,)], Z1) == pytest.approx(1.0)


def test_interval_closed_form():
    for n in (1, 2, 5, 17):
        assert dirichlet_lambda1([(i,) for i in range(n)], Z1) == pytest.approx(interval_lambda1(n))


def test_box_closed_form():
    for n in (2, 4, 7):
        assert dirichlet_lambda1(box(n, 2), Z2) == pytest.approx(box_lambda1(n, 2))
    assert dirichlet_lambda1(box(3, 3), ZdStencil(3)) == pytest.approx(box_lambda1(3, 3))


def test_empty_domain():
    with pytest.raises(DegenerateInputError):
        dirichlet_matrix([], Z2)


def test_polyomino_counts():
    # fixed polyominoes: 1, 2, 6, 19, 63, 216, 760, 2725
    shapes = polyominoes(8)
    assert [len(shapes[k]) for k in range(1, 9)] == [1, 2, 6, 19, 63, 216, 760, 2725]


def test_local_cheeger_examples():
    assert local_cheeger([(0, 0)], Z2) == 4
    assert local_cheeger([(0, 0), (1, 0)], Z2) == 3
    sq = box(2, 2)
    assert local_cheeger(sq, Z2) == 2


def test_cheeger_small():
    rep = cheeger_check(5)
    assert rep.ok and rep.checked == 1 + 2 + 6 + 19 + 63
    assert rep.worst_margin > 0


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_domain_monotonicity(seed):
    rng = random.Random(seed)
    cells = {(0, 0)}
    while len(cells) < 10:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
        cells.add((x + dx, y + dy))
    order = sorted(cells)
    inner = set(order[:5]) | {(0, 0)}
    assert dirichlet_lambda1(cells, Z2) <= dirichlet_lambda1(inner, Z2) + 1e-12


def test_faber_krahn_boxes():
    rows = fk_box_check(40, 2)
    assert all(r["ok"] for r in rows)
    assert rows[0]["lambda1"] == pytest.approx(1.0)


def test_nash_spike_and_check():
    assert nash_quotient({(0, 0): 1.0}, Z2, 2) == pytest.approx(1.0)
    out = nash_check(trials=30)
    assert out["K"] >= out["spike"] == pytest.approx(1.0)
    with pytest.raises(DegenerateInputError):
        nash_quotient({(0, 0): 0.0}, Z2, 2)


def test_kernel_is_distribution():
    p = kernel_1d(9, 3.7)
    assert p.sum() == pytest.approx(1.0)
    assert (p > -1e-15).all()
    assert kernel_1d(9, 0)[0] == pytest.approx(1.0)


@pytest.mark.parametrize("d,m,t", [(1, 7, 2.0), (2, 5, 1.3), (3, 4, 0.9), (2, 6, 11.0)])
def test_factorized_kernel_matches_dense(d, m, t):
    assert np.abs(torus_kernel(d, m, t) - torus_kernel_dense(d, m, t)).max() < 1e-12


def test_distance_decreases():
    vals = [torus_distance(2, 8, t) for t in (1, 5, 20, 80)]
    assert vals == sorted(vals, reverse=True)
    assert torus_distance(2, 8, 0.0) == pytest.approx(1 - 1 / 64)
    with pytest.raises(ValueError):
        torus_distance(2, 8, 1.0, "kl")


def test_mixing_time_brackets_threshold():
    t = mixing_time(2, 10)
    assert torus_distance(2, 10, t) <= 0.25 < torus_distance(2, 10, t * 0.99)
    assert mixing_time(2, 10, distance="linf") > t
    with pytest.raises(DegenerateInputError):
        mixing_time(2, 1)


def test_relaxation_lower_bound():
    out = torus_mixing(2, [6, 10, 14])
    assert all(r["relaxation_ok"] for r in out["rows"])
    assert torus_lambda1(1, 4) == pytest.approx(1.0)
    assert math.isfinite(out["slope"])
