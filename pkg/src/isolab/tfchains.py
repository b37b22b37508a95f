"""Tempered Folner chains and the families where they can be built by hand.

A chain is a nested sequence of finite sets.  Clause (i) of the tempered
condition compares the boundary of each set with the increasing minorant of
the profile; clause (ii) compares each increment with the current boundary.
Here the chains are built explicitly and every record is recomputed from the
sets themselves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .cayley import (LEFT, RIGHT, Explicit, Lamplighter, Semidirect, VertexSet,
                     ZdStencil, as_vertex_set, edge_boundary, vertex_boundary)
from .errors import DegenerateInputError, ResourceError
from .profiles import VERTEX, ProfileTable

# ---------------------------------------------------------------------------
# chains and reports


@dataclass
class Chain:
    sets: list
    graph: object
    side: str = RIGHT

    def __post_init__(self):
        self.sets = [as_vertex_set(s, self.graph) for s in self.sets]
        for a, b in zip(self.sets, self.sets[1:]):
            if not a.members <= b.members:
                raise ValueError("chain is not nested")

    def __len__(self):
        return len(self.sets)

    def records(self):
        """(size, vertex boundary, edge boundary, increment to the next set)."""
        out = []
        for i, F in enumerate(self.sets):
            inc = len(self.sets[i + 1]) - len(F) if i + 1 < len(self.sets) else None
            out.append({"size": len(F),
                        "vertex_boundary": len(vertex_boundary(F, side=self.side)),
                        "edge_boundary": edge_boundary(F, side=self.side),
                        "increment": inc})
        return out

    def to_json_lines(self):
        import json
        return "\n".join(json.dumps([list(_plain(v)) if isinstance(v, tuple) else v
                                     for v in F]) for F in self.sets)


def _plain(v):
    return [(_plain(x) if isinstance(x, tuple) else x) for x in v]


@dataclass
class TFReport:
    A_observed: float | None
    B_observed: float | None
    increment_ratio: float | None
    folner_ratios: list
    records: list
    window: int
    clause_i_evaluated: bool
    ratio_bound: float | None = None
    ratio_violations: list = field(default_factory=list)
    delta: int = 0

    @property
    def ratio_ok(self):
        return not self.ratio_violations

    def to_json(self):
        return {"A_observed": self.A_observed, "B_observed": self.B_observed,
                "increment_ratio": self.increment_ratio,
                "folner_ratios": self.folner_ratios, "window": self.window,
                "clause_i_evaluated": self.clause_i_evaluated,
                "ratio_bound": self.ratio_bound, "ratio_ok": self.ratio_ok,
                "records": self.records}


def verify_tf(chain: Chain, profile: ProfileTable | None = None,
              normalization=VERTEX) -> TFReport:
    """Measure both tempered clauses on a chain.

    Clause (i) uses the profile's minorant and is only evaluated for sets
    whose size lies inside the profile window.  Clause (ii) is always checked.
    """
    recs = chain.records()
    key = "vertex_boundary" if normalization == VERTEX else "edge_boundary"
    b_vals = [r["increment"] / r[key] for r in recs[:-1] if r[key] > 0]
    # tempered constants are normalized to be at least 1
    B = max([1.0] + b_vals) if b_vals else None
    window = profile.r_max if profile is not None else 0
    a_vals = []
    if profile is not None:
        if profile.normalization != normalization:
            raise ValueError("profile normalization does not match")
        for r in recs:
            if r["size"] <= window and profile.minorant_at(r["size"]) > 0:
                a_vals.append(r[key] / profile.minorant_at(r["size"]))
    A = max([1.0] + a_vals) if a_vals else None
    raw = max(b_vals) if b_vals else None
    folner = [r["edge_boundary"] / r["size"] for r in recs]
    rep = TFReport(A, B, raw, folner, recs, window, bool(a_vals), delta=chain.graph.degree)
    if A is not None and B is not None and profile is not None:
        bound = A + rep.delta * A * B
        rep.ratio_bound = bound
        rep.ratio_violations = [r for r in range(1, window + 1) if profile.ratio(r) > bound + 1e-12]
    return rep


def canonical_expand(Y, graph=None, side=RIGHT) -> VertexSet:
    """Y together with its outer vertex boundary."""
    Y = as_vertex_set(Y, graph)
    if not len(Y):
        raise DegenerateInputError("expansion of the empty set")
    return Y.union(vertex_boundary(Y, side=side))


# ---------------------------------------------------------------------------
# nested near-minimizers and budgeted interleaving


def spiral_order(count):
    """First count cells of the square spiral around the origin of Z^2."""
    out = [(0, 0)]
    x = y = 0
    dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    run, di = 1, 0
    while len(out) < count:
        for _ in range(2):
            dx, dy = dirs[di % 4]
            for _ in range(run):
                x, y = x + dx, y + dy
                out.append((x, y))
                if len(out) >= count:
                    return out
            di += 1
        run += 1
    return out[:count]


class NestedFamily:
    """W_r = first r elements of a fixed ordering, so the family is nested."""

    def __init__(self, order, graph):
        self.order = list(order)
        self.graph = graph
        if len(set(self.order)) != len(self.order):
            raise ValueError("ordering repeats a vertex; family would not be nested")

    @classmethod
    def spiral_squares(cls, r_max):
        return cls(spiral_order(r_max), ZdStencil(2))

    @property
    def r_max(self):
        return len(self.order)

    def __getitem__(self, r):
        if not 1 <= r <= self.r_max:
            raise IndexError(r)
        return VertexSet(self.order[:r], self.graph, validate=False)


@dataclass
class Interleaving:
    chain: Chain
    levels: list
    deficits: list
    deficit_ok: bool
    C0: float | None
    theta: float


def confined_step(F: VertexSet, W: VertexSet, side=RIGHT) -> VertexSet:
    return VertexSet((F.members | vertex_boundary(F, side=side).members) & W.members,
                     F.graph, validate=False)


def interleave_from_nnm(W: NestedFamily, theta, minorant, r0=1, r_stop=None,
                        edge_minorant=None, side=RIGHT) -> Interleaving:
    """Budgeted interleaving through the nested family W.

    ``minorant(r)`` is the increasing vertex minorant used by the schedule
    ``r_{j+1} = r_j + max(1, floor(theta * minorant(r_j)))``.  The optional
    ``edge_minorant`` is used to fit the near-minimizer constant C0.
    """
    theta = Fraction(theta).limit_denominator(10 ** 6)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    r_stop = W.r_max if r_stop is None else min(r_stop, W.r_max)
    levels = [r0]
    while levels[-1] < r_stop:
        nxt = levels[-1] + max(1, math.floor(theta * minorant(levels[-1])))
        levels.append(min(nxt, r_stop))
    F = W[r0]
    sets, deficits, ok = [F], [], True
    for target in levels[1:]:
        Wt = W[target]
        while len(F) < target:
            deficit = target - len(F)
            deficits.append(deficit)
            if deficit > max(1, theta * minorant(len(F))):
                ok = False
            F = confined_step(F, Wt, side)
            sets.append(F)
        if F.members != Wt.members:
            raise AssertionError("confined step did not reach the checkpoint")
    C0 = None
    if edge_minorant is not None:
        vals = [edge_boundary(W[r], side=side) / edge_minorant(r)
                for r in range(r0, r_stop + 1) if edge_minorant(r) > 0]
        C0 = max(vals) if vals else None
    return Interleaving(Chain(sets, W.graph, side), levels, deficits, ok, C0, float(theta))


def interleaving_bound(C0, delta, theta):
    return C0 * delta + (C0 * delta ** 2 + 1) * theta


# ---------------------------------------------------------------------------
# lamplighters over Z


def lamp_configs(n, M, q):
    """Sigma(n, M) = sum_{j <= M} C(n, j) q^j."""
    return sum(comb(n, j) * q ** j for j in range(min(M, n) + 1))


def exits_right(U):
    """E_->(U) for the base Z with generators +-1."""
    U = set(U)
    return sum(1 for x in U for s in (1, -1) if x + s not in U)


def split_formula(U, M, q, t):
    n = len(U)
    return exits_right(U) * lamp_configs(n, M, q) + t * n * comb(n - 1, M) * q ** M


def lamp_block(U, M, q, guard=100_000):
    """F(U, M) as lamplighter vertices with cursor and lamps in U."""
    U = sorted(set(U))
    size = len(U) * lamp_configs(len(U), M, q)
    if size > guard:
        raise ResourceError(f"block has {size} elements (> {guard})")
    out = []
    for j in range(min(M, len(U)) + 1):
        for sites in _combinations(U, j):
            for vals in _product(range(1, q + 1), j):
                lamps = tuple(((s,), v) for s, v in zip(sites, vals))
                for x in U:
                    out.append((lamps, (x,)))
    return out


def _combinations(U, j):
    import itertools
    return itertools.combinations(U, j)


def _product(r, j):
    import itertools
    return itertools.product(r, repeat=j)


def default_toggles(q):
    """Symmetric closure of {1} in Z_{q+1}."""
    return sorted({1 % (q + 1), (-1) % (q + 1)})


def lamplighter_split(U, M, q, t=None, brute=True, guard=100_000):
    """Return (formula, brute) for the directed boundary of F(U, M)."""
    toggles = default_toggles(q) if t is None else list(range(1, t + 1))
    G = Lamplighter(q, toggles=_symmetric(toggles, q))
    t_eff = len(G.toggles)
    formula = split_formula(U, M, q, t_eff)
    value = None
    if brute:
        Y = set(lamp_block(U, M, q, guard))
        value = sum(1 for g in Y for k in range(G.degree) if G.step(g, k) not in Y)
    return formula, value


def _symmetric(toggles, q):
    n = q + 1
    out = set()
    for a in toggles:
        out.add(a % n)
        out.add((-a) % n)
    out.discard(0)
    if not out:
        raise ValueError("no nonzero toggles")
    return sorted(out)


def ring_exit_formula(n_inner, delta, m, ell, q, t=1):
    if ell >= delta:
        return 0
    return t * delta * comb(delta - 1, ell) * q ** ell * lamp_configs(n_inner, m, q)


def ring_exits_brute(U, ring, m, ell, q):
    """Toggle exits at unlit ring sites when the ring budget is saturated."""
    import itertools
    U, ring = sorted(set(U)), sorted(set(ring))
    G = Lamplighter(q)
    sites = U + ring
    count = 0
    for ju in range(min(m, len(U)) + 1):
        for su in itertools.combinations(U, ju):
            for jr in range(min(ell, len(ring)) + 1):
                for sr in itertools.combinations(ring, jr):
                    lit = su + sr
                    for vals in itertools.product(range(1, q + 1), repeat=len(lit)):
                        lamps = dict(((s,), v) for s, v in zip(lit, vals))
                        for x in sites:
                            if x not in ring or (x,) in lamps or jr != ell:
                                continue
                            for a in G.toggles:
                                nl = dict(lamps)
                                nl[(x,)] = a
                                lr = sum(1 for s in ring if (s,) in nl)
                                if lr > ell:
                                    count += 1
    return count


@dataclass
class Checkpoint:
    k: int
    n: int
    lamps: int
    size: int
    boundary: int
    ratio: Fraction


def lamplighter_checkpoints(k_values, q=1, t=None):
    """Folner ratios of F([0, k), ceil(p k)) with p = q / (1 + q), from formulas."""
    t = len(default_toggles(q)) if t is None else t
    p = Fraction(q, q + 1)
    rows = []
    for k in k_values:
        M = math.ceil(p * k)
        size = k * lamp_configs(k, M, q)
        B = split_formula(range(k), M, q, t)
        rows.append(Checkpoint(k, k, M, size, B, Fraction(B, size)))
    return rows


# ---------------------------------------------------------------------------
# semidirect products Z^d x|_A Z with left generators


def body_points(K, R):
    """Integer points of R*K for K = ('box', half_widths) or ('l1'|'l2', radius)."""
    kind, param = K
    R = Fraction(R)
    if kind == "box":
        hw = [Fraction(h) * R for h in param]
        axes = [range(-math.floor(h), math.floor(h) + 1) for h in hw]
        import itertools
        return {tuple(p) for p in itertools.product(*axes)}
    if kind in ("l1", "l2"):
        d, rad = param
        rr = Fraction(rad) * R
        b = math.floor(rr)
        import itertools
        out = set()
        for p in itertools.product(range(-b, b + 1), repeat=d):
            if kind == "l1" and sum(abs(a) for a in p) <= rr:
                out.add(p)
            if kind == "l2" and sum(a * a for a in p) <= rr * rr:
                out.add(p)
        return out
    raise ValueError(f"unknown body {kind!r}")


def body_box_count(K, R) -> int:
    """Points of the bounding box of R*K; an upper bound for body_points."""
    kind, param = K
    R = Fraction(R)
    if kind == "box":
        return math.prod(2 * math.floor(Fraction(h) * R) + 1 for h in param)
    if kind not in ("l1", "l2"):
        raise ValueError(f"unknown body {kind!r}")
    d, rad = param
    return (2 * math.floor(Fraction(rad) * R) + 1) ** d


def semidirect_stack(A, K, R, T, guard=2_000_000) -> VertexSet:
    """Union over |k| <= T of (A^k X0) x {k} with X0 = R K cap Z^d."""
    G = Semidirect(A)
    if body_box_count(K, R) * (2 * T + 1) > guard:
        raise ResourceError("layer-nested set too large")
    X0 = body_points(K, R)
    pts = {(G.act(k, x), k) for k in range(-T, T + 1) for x in X0}
    return VertexSet(pts, G, validate=False)


def split_boundary(Y: VertexSet):
    """(horizontal, vertical) undirected edge boundary under left generators."""
    G = Y.graph
    hor = vert = 0
    for g in Y.members:
        for k in range(G.degree):
            if G.step(g, k, LEFT) not in Y.members:
                if G.generators[k].label[0] in ("t", "t-"):
                    vert += 1
                else:
                    hor += 1
    return hor, vert


def cofactor_norms(A, k_range=range(-8, 9)):
    G = Semidirect(A)
    out = {}
    for k in k_range:
        P = np.array(G.power(-k), dtype=float)
        det = round(np.linalg.det(np.array(G.power(k), dtype=float)))
        out[k] = float(np.linalg.norm(det * P.T, 2))
    return out


def spectral_growth(A):
    ev = np.linalg.eigvals(np.array(A, dtype=float))
    inv = np.linalg.eigvals(np.linalg.inv(np.array(A, dtype=float)))
    return max(np.abs(ev).max(), np.abs(inv).max())


def cofactor_fit(A, Lam=None, k_range=range(-8, 9)):
    """Smallest C with ||cof(A^k)|| <= C Lam^|k| on the range."""
    Lam = spectral_growth(A) * 1.01 if Lam is None else Lam
    norms = cofactor_norms(A, k_range)
    return max(v / Lam ** abs(k) for k, v in norms.items()), Lam


@dataclass
class LayerDiagnostics:
    rows: list
    c1: float
    c2: float
    c3: float
    B_pred: float
    B_obs: float
    alpha: float
    Lam: float
    folner_regime: bool


def layer_diagnostics(A, K, R_values, alpha, Lam=None) -> LayerDiagnostics:
    """Per-R records for E_R with T(R) = floor(alpha log R)."""
    Lam = spectral_growth(A) * 1.01 if Lam is None else Lam
    regime = alpha * math.log(Lam) < 1
    if not regime:
        warnings.warn("alpha * log(Lambda) >= 1: layer stacks need not be Folner",
                      RuntimeWarning, stacklevel=2)
    d = len(A)
    rows = []
    for R in sorted(R_values):
        T = math.floor(alpha * math.log(R))
        Y = semidirect_stack(A, K, R, T)
        Y1 = semidirect_stack(A, K, R + 1, math.floor(alpha * math.log(R + 1)))
        hor, vert = split_boundary(Y)
        X0 = body_points(K, R)
        rows.append({"R": R, "T": T, "size": len(Y), "X0": len(X0),
                     "annulus": len(body_points(K, R + 1) - X0),
                     "hor": hor, "vert": vert, "boundary": hor + vert,
                     "folner": (hor + vert) / len(Y),
                     "increment": len(Y1.members - Y.members),
                     "nested": Y.members <= Y1.members})
    c1 = min(r["X0"] / r["R"] ** d for r in rows)
    c2 = max(r["X0"] / r["R"] ** d for r in rows)
    c3 = max(r["annulus"] / r["R"] ** (d - 1) for r in rows)
    B_obs = max(r["increment"] / r["boundary"] for r in rows)
    return LayerDiagnostics(rows, c1, c2, c3, (4 * c2 + c3) / (2 * c1), B_obs, alpha,
                            Lam, regime)


# ---------------------------------------------------------------------------
# balloon chains


class BalloonGraph:
    """Complete graphs K_{N_1}, ..., K_{N_K} joined in a path by single bridges.

    Vertex (k, i) is the i-th vertex of balloon k; the bridge leaves balloon k
    from (k, 0) and enters balloon k + 1 at (k + 1, 0).
    """

    def __init__(self, sizes):
        sizes = [int(n) for n in sizes]
        if not sizes or any(n < 2 for n in sizes):
            raise ValueError("balloons need at least two vertices")
        if any(b < 3 * a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("balloon sizes must grow by a factor of at least 3")
        self.sizes = sizes

    @property
    def order(self):
        return sum(self.sizes)

    @property
    def bridges(self):
        return len(self.sizes) - 1

    def prefix(self, n):
        return sum(self.sizes[:n])

    def explicit(self) -> Explicit:
        adj = {}
        base = 0
        starts = []
        for n in self.sizes:
            starts.append(base)
            for i in range(n):
                adj[base + i] = [base + j for j in range(n) if j != i]
            base += n
        for a, b in zip(starts, starts[1:]):
            adj[a].append(b)
            adj[b].append(a)
        return Explicit(adj)

    def edge_cheeger(self, k):
        n = self.sizes[k]
        return min(a * (n - a) / a for a in range(1, n // 2 + 1))


def _balloon_dp(sizes, r):
    INF = float("inf")
    best = [0] + [INF] * r
    for n in sizes:
        nxt = [INF] * (r + 1)
        for have in range(r + 1):
            if best[have] == INF:
                continue
            for a in range(0, min(n, r - have) + 1):
                v = best[have] + a * (n - a)
                if v < nxt[have + a]:
                    nxt[have + a] = v
        best = nxt
    return best[r]


@dataclass
class BalloonValue:
    r: int
    lower: int
    upper: int
    minorant_upper: int
    tail_balloons: int

    @property
    def ratio_lower(self):
        return self.lower / self.minorant_upper if self.minorant_upper else math.inf


def balloon_profile(G: BalloonGraph, r: int) -> BalloonValue:
    """Edge profile of the chain continued by ever larger balloons.

    Ignoring bridges the cost is a separable sum of A_k (N_k - A_k); bridges
    add at most one each, giving an interval.  Tail balloons are appended
    until placing even one vertex in the next one costs more than the best
    value found, so the continuation never changes the answer.
    """
    if not 1 <= r:
        raise ValueError("volume must be positive")
    sizes = list(G.sizes)
    value = _balloon_dp(sizes, r) if r <= sum(sizes) else math.inf
    tails = 0
    while True:
        nxt = 3 * sizes[-1]
        if nxt - 1 > value and sum(sizes) >= r:
            break
        sizes.append(nxt)
        tails += 1
        value = _balloon_dp(sizes, r)
    bridges = len(sizes) - 1
    minorant = 1
    return BalloonValue(r, int(value), int(value) + bridges, minorant, tails)


def balloon_prefix_boundary(G: BalloonGraph, n: int) -> int:
    """Edge boundary of the first n balloons in the continued chain (one bridge)."""
    E = G.explicit()
    S = set(range(G.prefix(n)))
    inner = sum(1 for v in S for w in E.neighbor_vertices(v) if w not in S)
    continued = 1 if n == len(G.sizes) else 0
    return inner + continued
