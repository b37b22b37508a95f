"""Acceptance criteria, one check per criterion at its stated tolerance.

Each check returns ``(ok, detail)``.  Under pytest every criterion is a
parametrized test and its PASS/FAIL line is repeated in the terminal summary.
Run this file directly for the same lines without pytest.
"""

import itertools
import math
import random
import sys
import time
from fractions import Fraction

from isolab.carnot import caploss_experiment, check_heis_stack, coarea_check, random_stack
from isolab.carnot import interval_sd, interval_sd_brute
from isolab.cayley import LEFT, RIGHT, Heisenberg, VertexSet, ZdStencil, sigma_boundary
from isolab.coarse import compression_scan, dyadic_cubes, dyadic_spec, tempered_ratios
from isolab.curlfit import H1, curl_fit, d0, d1, homotopy_defect, random_cochain, slice_witness
from isolab.gridtv import AxisBox, Disk, orthotropic_energy, rate_fit, sample, IN, OUT
from isolab.profiles import EDGE, VERTEX, check_lipschitz, check_trim_subadd, exact_profile
from isolab.spectral import cheeger_check, torus_mixing
from isolab.tfchains import (BalloonGraph, NestedFamily, balloon_prefix_boundary,
                             balloon_profile, body_points, interleave_from_nnm,
                             interleaving_bound, lamplighter_checkpoints, lamplighter_split,
                             semidirect_stack, split_boundary, verify_tf)
from isolab.wulff import Anisotropy, fiber_lift_ratio, wulff_ratio_scan

CRITERIA = {}


def criterion(cid):
    def wrap(fn):
        CRITERIA[cid] = fn
        return fn
    return wrap


def random_walk_set(G, rng, n):
    pts = {G.identity}
    cur = [G.identity]
    while len(pts) < n:
        g = rng.choice(cur)
        h = G.step(g, rng.randrange(G.degree), rng.choice([LEFT, RIGHT]))
        if h not in pts:
            pts.add(h)
            cur.append(h)
    return VertexSet(pts, G, validate=False)


# ---------------------------------------------------------------------------
# exact identities


@criterion("1a")
def heisenberg_decomposition():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    bad = sum(bool(check_heis_stack(random_stack(rng, max_side=8, max_height=12)))
              for _ in range(500))
    dt = time.perf_counter() - t0
    return bad == 0 and dt < 60, f"500 stacks, {bad} mismatches, {dt:.1f}s (< 60s)"


@criterion("1b")
def interval_formula():
    bad = sum(interval_sd(a, b, t) != interval_sd_brute(a, b, t)
              for a in range(21) for b in range(21) for t in range(-50, 51))
    return bad == 0, f"{21 * 21 * 101} triples, {bad} mismatches"


@criterion("1c")
def cochain_homotopy():
    rng = random.Random(7)
    bad = 0
    for _ in range(500):
        N = [rng.randint(1, 5) for _ in range(rng.choice([1, 2, 3]))]
        c = random_cochain(rng, N)
        if not homotopy_defect(c).is_zero() or not d1(d0(H1(c))).is_zero():
            bad += 1
    return bad == 0, f"500 cochains up to 5x5x5, {bad} failures"


@criterion("1d")
def lamplighter_split_exact():
    bad = checked = 0
    for n in range(1, 6):
        # every finite U in Z up to translation with diameter below 7
        for rest in itertools.combinations(range(1, 7), n - 1):
            U = (0,) + rest
            for q in (1, 2):
                for M in range(n + 1):
                    f, b = lamplighter_split(U, M, q)
                    bad += f != b
                    checked += 1
    return bad == 0, f"{checked} instances, {bad} mismatches"


@criterion("1e")
def colored_sum():
    rng = random.Random(11)
    bad = 0
    for G in (ZdStencil(2), Heisenberg()):
        for _ in range(200):
            s = sigma_boundary(random_walk_set(G, rng, rng.randint(1, 25)))
            bad += s.colored != s.left + s.right_via_inverse
    return bad == 0, f"400 sets over two families, {bad} mismatches"


@criterion("1f")
def vertical_drift():
    rng = random.Random(5)
    mats = [[[2, 1], [1, 1]], [[1, 1], [0, 1]], [[0, -1], [1, 0]], [[3, 2], [1, 1]],
            [[1, 1, 0], [0, 1, 1], [0, 0, 1]]]
    bad = 0
    for _ in range(50):
        A = rng.choice(mats)
        d = len(A)
        kind = rng.choice(["box", "l1", "l2"])
        K = ("box", tuple([1] * d)) if kind == "box" else (kind, (d, 1))
        R = rng.randint(1, 8 if d == 2 else 4)
        T = rng.randint(0, 3)
        Y = semidirect_stack(A, K, R, T)
        _, vert = split_boundary(Y)
        bad += vert != 2 * len(body_points(K, R))
    return bad == 0, f"50 instances, {bad} mismatches"


@criterion("1g")
def coarea():
    rng = random.Random(13)
    bad = 0
    for _ in range(200):
        n = rng.randint(1, 7)
        ell = {(x, y): rng.randint(0, 9) for x in range(n) for y in range(n)
               if rng.random() < 0.8}
        var, levels = coarea_check(ell, 2)
        bad += var != levels
    return bad == 0, f"200 height functions, {bad} mismatches"


# ---------------------------------------------------------------------------
# sharp constants


@criterion("2a")
def axis_wulff():
    sq = wulff_ratio_scan(Anisotropy.axis(2), [1, 2, 5, 10, 20, 40])
    square_ok = all(r["ratio"] == 4.0 for r in sq)
    T = exact_profile(ZdStencil(2), 12, EDGE)
    per_ok = all(T.value(r) >= 4 * math.sqrt(r) for r in range(1, 13))
    t0 = time.perf_counter()
    z3 = wulff_ratio_scan(Anisotropy.axis(3), [40])[-1]["ratio"]
    dt = time.perf_counter() - t0
    z3_ok = abs(z3 - 6) / 6 <= 0.05 and dt < 120
    return (square_ok and per_ok and z3_ok,
            f"squares exact={square_ok}, Per>=4sqrt(r) r<=12 {per_ok}, Z3 ratio {z3:.4f} "
            f"in {dt:.1f}s")


@criterion("2b")
def fiber_lift():
    r = fiber_lift_ratio(2, 2, [60])[0]["ratio"]
    target = 4 * math.sqrt(2)
    return abs(r - target) / target <= 0.05, f"ratio {r:.4f} vs {target:.4f}"


@criterion("2c")
def curl_fit_bound():
    rng = random.Random(3)
    over = 0
    for _ in range(200):
        N = [rng.randint(1, 5) for _ in range(rng.choice([2, 3]))]
        fit = curl_fit(random_cochain(rng, N))
        over += fit.residual_l1 > fit.bound
    tight = all(curl_fit(slice_witness((n, n))).residual_l1 == n - 1 for n in range(2, 9))
    return over == 0 and tight, f"200 instances, {over} exceed; witness N-1 attained: {tight}"


@criterion("2d")
def gamma_rate():
    hs = [Fraction(1, 2 ** j) for j in range(4, 9)]
    disk = Disk((0.0, 0.0), 1.0)
    axis = rate_fit(disk, h_list=hs).slope
    sten = rate_fit(disk, Anisotropy(2, [(1, 0), (0, 1), (1, 1)]), hs, stencil=True).slope
    unit = AxisBox((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
    square = all(orthotropic_energy(sample(unit, h, m)) == 4 for h in hs for m in (IN, OUT))
    ok = 0.8 <= axis <= 1.2 and 0.8 <= sten <= 1.2 and square
    return ok, f"disk slope {axis:.3f}, 3-vector stencil slope {sten:.3f}, square exact {square}"


@criterion("2e")
def caploss():
    t0 = time.perf_counter()
    rows = caploss_experiment([8, 16, 32])
    dt = time.perf_counter() - t0
    norm = [r.normalized for r in rows]
    ok = all(a > b for a, b in zip(norm, norm[1:])) and dt < 180
    return ok, "CapLoss/rho^3 = " + ", ".join(f"{v:.4f}" for v in norm) + f" in {dt:.1f}s"


# ---------------------------------------------------------------------------
# TF and profile structure


@criterion("3a")
def profile_structure():
    out = []
    ok = True
    for name, G, r in (("Z2", ZdStencil(2), 12), ("Heisenberg", Heisenberg(), 8)):
        T = exact_profile(G, r, EDGE)
        lip, trim = check_lipschitz(T), check_trim_subadd(T)
        ok = ok and lip.ok and trim.ok
        out.append(f"{name} r<={r} lipschitz={lip.ok} trim/subadd={trim.ok}")
    return ok, "; ".join(out)


@criterion("3b")
def interleaving():
    G = ZdStencil(2)
    r = 10
    pv, pe = exact_profile(G, r, VERTEX), exact_profile(G, r, EDGE)
    il = interleave_from_nnm(NestedFamily.spiral_squares(r), 1, pv.minorant_at, r_stop=r,
                             edge_minorant=pe.minorant_at)
    rep = verify_tf(il.chain, pv, VERTEX)
    bound = interleaving_bound(il.C0, G.degree, 1.0)
    ok = rep.B_observed == 1 and rep.A_observed <= bound and rep.ratio_ok
    return ok, (f"B={rep.B_observed}, A={rep.A_observed:.3f} <= {bound:.3f}, "
                f"ratio bound holds on r<={r}: {rep.ratio_ok}")


@criterion("3c")
def lamplighter_checkpoints_decrease():
    t0 = time.perf_counter()
    rows = lamplighter_checkpoints(range(4, 65))
    dt = time.perf_counter() - t0
    ups = [b.k for a, b in zip(rows, rows[1:]) if not b.ratio < a.ratio]
    ok = not ups and dt < 1
    shown = ", ".join(map(str, ups[:6])) + (" ..." if len(ups) > 6 else "")
    return ok, f"k=4..64 in {dt:.2f}s; increases at k = {shown or 'none'}"


@criterion("3d")
def balloon_chain():
    G = BalloonGraph([4, 12, 36, 108])
    mids = [balloon_profile(G, G.prefix(k) + G.sizes[k] // 2) for k in range(4)]
    ratios = [v.ratio_lower for v in mids]
    grow = all(b >= 2 * a for a, b in zip(ratios, ratios[1:]))
    prefix = [balloon_prefix_boundary(G, n) for n in range(1, 5)]
    ok = grow and all(p <= 1 for p in prefix)
    return ok, f"mid-balloon ratios {ratios}, prefix boundaries {prefix}"


# ---------------------------------------------------------------------------
# spectral and coarse


@criterion("4a")
def cheeger():
    rep = cheeger_check(8)
    return rep.ok, (f"{rep.checked} polyominoes, {len(rep.violations)} violations, "
                    f"worst margin {rep.worst_margin:.4f}")


@criterion("4b")
def mixing():
    t0 = time.perf_counter()
    d3 = torus_mixing(3, [8, 12, 16, 24])
    d2 = torus_mixing(2, list(range(8, 41)))
    dt = time.perf_counter() - t0
    ok3 = 1.8 <= d3["slope"] <= 2.2
    ok2 = d2["ratio_drift"] < 0.25
    return (ok3 and ok2 and dt < 120,
            f"d=3 slope {d3['slope']:.3f} ({'ok' if ok3 else 'out of range'}); d=2 drift of "
            f"t_mix/(m^2 log m) {d2['ratio_drift']:.3f} ({'ok' if ok2 else '>= 0.25'}); {dt:.1f}s")


@criterion("4c")
def tempered():
    worst = []
    ok = True
    for d in (1, 2, 3):
        sets, G = dyadic_cubes(d, 5)
        for inclusive in (False, True):
            T = tempered_ratios(sets, G, inclusive=inclusive)
            ok = ok and all(t < 2 ** d for t in T)
        worst.append(f"d={d} max {float(max(T)):.4f} < {2 ** d}")
    return ok, "; ".join(worst)


@criterion("4d")
def compression():
    scan = compression_scan(dyadic_spec(1, 10), range(1, 10 ** 4 + 1), samples=2)
    ok = scan.c_low > 0 and scan.envelope_ok
    return ok, (f"t<=10^4, c_low={scan.c_low:.4f}, c_up={scan.c_up:.4f}, "
                f"envelope holds {scan.envelope_ok}")


def evaluate(cid):
    ok, detail = CRITERIA[cid]()
    return ok, f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}"


if __name__ == "__main__":
    failed = 0
    for cid in CRITERIA:
        ok, line = evaluate(cid)
        failed += not ok
        print(line, flush=True)
    sys.exit(1 if failed else 0)
else:
    import pytest

    @pytest.mark.parametrize("cid", list(CRITERIA))
    def test_criterion(cid, acceptance_log):
        ok, line = evaluate(cid)
        print(line)
        acceptance_log.append(line)
        assert ok, line
