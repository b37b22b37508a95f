import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from isolab.cayley import LEFT, Lamplighter, ZdStencil, edge_boundary, vertex_boundary
from isolab.errors import DegenerateInputError
from isolab.profiles import EDGE, VERTEX, exact_profile
from isolab.tfchains import (BalloonGraph, Chain, NestedFamily, balloon_prefix_boundary,
                             balloon_profile, body_points, canonical_expand, cofactor_fit,
                             exits_right, interleave_from_nnm, interleaving_bound, lamp_block,
                             lamp_configs, lamplighter_checkpoints, lamplighter_split,
                             layer_diagnostics, ring_exit_formula, ring_exits_brute,
                             semidirect_stack, spiral_order, split_boundary, split_formula,
                             verify_tf)

Z2 = ZdStencil(2)


def test_canonical_expand_singleton():
    plus = canonical_expand([(0, 0)], Z2)
    assert len(plus) == 5
    assert edge_boundary(plus) == 12 <= 5 * 4
    with pytest.raises(DegenerateInputError):
        canonical_expand([], Z2)


def test_expansion_increment_is_boundary():
    rng = random.Random(1)
    for _ in range(30):
        Y = {(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(8)}
        Yp = canonical_expand(Y, Z2)
        assert len(Yp) - len(Y) == len(vertex_boundary(Y, Z2))
        assert len(vertex_boundary(Yp)) <= (1 + Z2.degree) * len(vertex_boundary(Y, Z2))


def test_spiral_is_nested_squares():
    order = spiral_order(25)
    assert len(set(order)) == 25
    for n in (1, 2, 3, 4, 5):
        pts = order[: n * n]
        xs, ys = {p[0] for p in pts}, {p[1] for p in pts}
        assert len(xs) == len(ys) == n


def test_chain_must_be_nested():
    with pytest.raises(ValueError):
        Chain([[(0, 0)], [(1, 0)]], Z2)
    with pytest.raises(ValueError):
        NestedFamily([(0, 0), (0, 0)], Z2)


@pytest.fixture(scope="module")
def z2_tables():
    return exact_profile(Z2, 10, VERTEX), exact_profile(Z2, 10, EDGE)


def test_interleaving_on_squares(z2_tables):
    pv, pe = z2_tables
    W = NestedFamily.spiral_squares(10)
    il = interleave_from_nnm(W, 1, pv.minorant_at, r_stop=10, edge_minorant=pe.minorant_at)
    assert il.deficit_ok
    assert all(len(F) <= 10 for F in il.chain.sets)
    rep = verify_tf(il.chain, pv, VERTEX)
    assert rep.B_observed == 1.0
    assert rep.A_observed <= interleaving_bound(il.C0, 4, 1.0)
    assert rep.ratio_ok


def test_interleaving_small_theta_steps_by_one(z2_tables):
    pv, _ = z2_tables
    il = interleave_from_nnm(NestedFamily.spiral_squares(6), 0.01, pv.minorant_at)
    assert il.levels == [1, 2, 3, 4, 5, 6]
    with pytest.raises(ValueError):
        interleave_from_nnm(NestedFamily.spiral_squares(6), 0, pv.minorant_at)


def test_verify_tf_without_profile():
    ch = Chain([[(0, 0)], [(0, 0), (1, 0)]], Z2)
    rep = verify_tf(ch)
    assert not rep.clause_i_evaluated and rep.A_observed is None
    assert rep.B_observed == 1.0
    assert rep.folner_ratios == [4.0, 3.0]


def test_split_example():
    assert exits_right([0, 1, 2]) == 2
    assert lamp_configs(3, 1, 1) == 4
    assert split_formula([0, 1, 2], 1, 1, 1) == 14
    assert lamplighter_split([0, 1, 2], 1, 1) == (14, 14)
    assert len(lamp_block([0, 1, 2], 1, 1)) == 12


def test_split_all_lamps_allowed():
    for n in (2, 3, 4):
        U = range(n)
        assert split_formula(U, n, 2, 1) == exits_right(U) * lamp_configs(n, n, 2) == 2 * 3 ** n


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(-4, 4), min_size=1, max_size=5), st.integers(1, 2), st.data())
def test_split_matches_enumeration(U, q, data):
    M = data.draw(st.integers(0, len(U)))
    f, b = lamplighter_split(sorted(U), M, q)
    assert f == b


def test_ring_exits():
    for U, ring, m, ell in [([0, 1, 2], [3, 4], 1, 1), ([0, 1], [2, 3, 4], 1, 1),
                            ([0, 1, 2], [3, 4], 2, 0)]:
        assert ring_exit_formula(len(U), len(ring), m, ell, 1) == ring_exits_brute(U, ring, m, ell, 1)
    assert ring_exit_formula(2, 2, 1, 2, 1) == 0


def test_checkpoints_match_enumeration():
    L = Lamplighter(1)
    for c in lamplighter_checkpoints(range(2, 6)):
        Y = set(lamp_block(range(c.k), c.lamps, 1))
        assert len(Y) == c.size
        assert sum(1 for g in Y for k in range(L.degree) if L.step(g, k) not in Y) == c.boundary


def test_checkpoints_tend_to_zero():
    rows = lamplighter_checkpoints([8, 16, 32, 64, 128])
    assert all(a.ratio > b.ratio for a, b in zip(rows, rows[1:]))
    assert all(float(c.ratio) * math.sqrt(c.n) < 3 for c in rows)
    assert rows[0].lamps == 4 and rows[0].ratio == Fraction(rows[0].boundary, rows[0].size)


def test_vertical_boundary_is_twice_base():
    A, K = [[2, 1], [1, 1]], ("box", (1, 1))
    Y = semidirect_stack(A, K, 20, 2)
    hor, vert = split_boundary(Y)
    X0 = body_points(K, 20)
    assert vert == 2 * len(X0)
    assert hor + vert == edge_boundary(Y, side=LEFT)
    assert hor + vert >= 2 * len(Y) / 5


def test_body_points():
    assert len(body_points(("box", (1, 1)), 2)) == 25
    assert len(body_points(("l1", (2, 1)), 2)) == 13
    assert len(body_points(("l2", (2, 1)), 1)) == 5
    with pytest.raises(ValueError):
        body_points(("ball", 1), 2)


def test_layer_diagnostics():
    dg = layer_diagnostics([[2, 1], [1, 1]], ("box", (1, 1)), [4, 8, 16], 0.5)
    assert dg.folner_regime
    assert all(r["nested"] for r in dg.rows)
    assert all(r["vert"] == 2 * r["X0"] for r in dg.rows)
    folner = [r["folner"] for r in dg.rows]
    assert folner == sorted(folner, reverse=True)
    with pytest.warns(RuntimeWarning):
        layer_diagnostics([[2, 1], [1, 1]], ("box", (1, 1)), [4], 2.0)


def test_cofactor_fit():
    C, Lam = cofactor_fit([[2, 1], [1, 1]])
    assert Lam == pytest.approx((3 + math.sqrt(5)) / 2 * 1.01)
    assert 0 < C < 10


def test_balloon_graph_validation():
    with pytest.raises(ValueError):
        BalloonGraph([4, 10])
    with pytest.raises(ValueError):
        BalloonGraph([1, 3])
    G = BalloonGraph([4, 12])
    assert G.order == 16 and G.bridges == 1
    assert G.edge_cheeger(0) == 2


def test_balloon_dp_against_brute_force():
    G = BalloonGraph([2, 6])
    E = G.explicit()
    verts = list(range(G.order))
    for r in range(1, G.order):
        best = min(edge_boundary(set(S), graph=E) for S in itertools.combinations(verts, r))
        val = balloon_profile(G, r)
        # the tail continuation only adds options, and a far bridge costs at most one
        assert val.lower <= best + 1
        assert val.lower <= val.upper


def test_balloon_examples():
    G = BalloonGraph([4, 12, 36])
    v = balloon_profile(G, G.prefix(2) + 6)
    assert v.lower >= 24
    assert balloon_prefix_boundary(G, 1) == 1
    G = BalloonGraph([4, 12, 36, 108])
    mids = [balloon_profile(G, G.prefix(k) + G.sizes[k] // 2).lower for k in range(4)]
    assert all(b >= 2 * a for a, b in zip(mids, mids[1:]))
    for n in range(1, 5):
        assert balloon_prefix_boundary(G, n) <= 1
