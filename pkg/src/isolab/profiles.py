"""Exact isoperimetric profiles by enumeration, minorants and structural checks.

For infinite vertex-transitive group families the profile is assembled from
the minimum over connected classes plus a partition DP: far-apart components
have additive boundary.  For the edge boundary "connected" means connected in
the Cayley graph.  For the vertex boundary components must additionally be at
distance at least three, so classes are enumerated in the graph with steps of
length one or two.  Enumeration is Redelmeier's algorithm with a
branch-and-bound cut from monotone lower bounds.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import Counter
from dataclasses import dataclass, field
from math import comb

from .cayley import (RIGHT, Explicit, GroupGraph, Torus, VertexSet, ZdStencil, as_vertex_set,
                     edge_boundary, vertex_boundary)
from .errors import CapacityError, DegenerateInputError, ResourceError

EDGE = "edge"
VERTEX = "vertex"
DEFAULT_BUDGET = 20_000_000


def boundary_value(Y, normalization, graph=None, side=RIGHT) -> int:
    if normalization == EDGE:
        return edge_boundary(Y, "directed", graph, side)
    if normalization == VERTEX:
        return len(vertex_boundary(Y, graph, side))
    raise ValueError(f"unknown normalization {normalization!r}")


def suffix_min(values):
    out = list(values)
    for i in range(len(out) - 2, -1, -1):
        out[i] = min(out[i], out[i + 1])
    return out


@dataclass
class ProfileTable:
    graph: GroupGraph
    normalization: str
    values: list            # values[r-1] = I(r)
    witnesses: list         # VertexSet per r
    connected: list | None = None
    side: str = RIGHT
    nodes_visited: int = 0
    window_truncated: bool = True
    minorant: list = field(init=False)

    def __post_init__(self):
        self.minorant = suffix_min(self.values)

    @property
    def r_max(self) -> int:
        return len(self.values)

    def value(self, r):
        return self.values[r - 1]

    def minorant_at(self, r):
        return self.minorant[r - 1]

    def ratio(self, r):
        m = self.minorant[r - 1]
        return 1.0 if m == 0 else self.values[r - 1] / m

    def rows(self):
        out = []
        for r in range(1, self.r_max + 1):
            w = self.witnesses[r - 1]
            digest = hashlib.sha256(repr(list(w)).encode()).hexdigest()[:16]
            out.append({"r": r, "I": self.values[r - 1], "minorant": self.minorant[r - 1],
                        "ratio": self.ratio(r), "witness_size": len(w),
                        "witness_hash": digest})
        return out

    def to_json(self):
        return {"graph": self.graph.to_json(), "normalization": self.normalization,
                "window": [1, self.r_max], "window_truncated": self.window_truncated,
                "values": self.values, "minorant": self.minorant,
                "connected": self.connected,
                "witnesses": [[_jsonable(v) for v in w] for w in self.witnesses]}


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# upper bounds by greedy growth


def greedy_chain(graph: GroupGraph, r_max: int, normalization=EDGE, side=RIGHT):
    """Nested connected sets grown by adding the boundary vertex that keeps
    the boundary smallest (ties broken by encoding order)."""
    cur = {graph.identity}
    chain = [frozenset(cur)]
    while len(cur) < r_max:
        cand = set()
        for y in cur:
            for z in graph.neighbor_vertices(y, side):
                if z not in cur:
                    cand.add(z)
        best = None
        for z in sorted(cand):
            val = boundary_value(cur | {z}, normalization, graph, side)
            if best is None or val < best[0]:
                best = (val, z)
        cur.add(best[1])
        chain.append(frozenset(cur))
    return chain


# ---------------------------------------------------------------------------
# connected-class enumeration


def _is_axis(graph):
    if not isinstance(graph, ZdStencil):
        return False
    return sorted(graph.stencil) == sorted(ZdStencil(graph.d).stencil)


def _class_offsets(graph, normalization, side):
    """Group elements w with v -> v*w (right) giving the class adjacency."""
    e = graph.identity
    one = set(graph.neighbor_vertices(e, side))
    if normalization == EDGE:
        return sorted(one - {e})
    two = set(one)
    for w in one:
        two.update(graph.neighbor_vertices(w, side))
    two.discard(e)
    return sorted(two)


def _canonical(graph, members, abelian):
    if abelian:
        return tuple(sorted(members))
    best = None
    for y in members:
        yi = graph.inverse(y)
        t = tuple(sorted(graph.mul(yi, z) for z in members))
        if best is None or t < best:
            best = t
    return best


def connected_minima(graph: GroupGraph, r_max: int, normalization=EDGE, side=RIGHT,
                     budget: int = DEFAULT_BUDGET):
    """Minimum boundary over classes of size r <= r_max containing the identity.

    Returns ``(values, witnesses, nodes)`` with witnesses as sorted tuples.
    """
    if not graph.is_group:
        raise ValueError("connected enumeration needs a group family")
    abelian = isinstance(graph, ZdStencil)
    axis = _is_axis(graph)
    delta = graph.degree
    e = graph.identity
    offsets = _class_offsets(graph, normalization, side)
    mul = graph.mul if side == RIGHT else (lambda a, b: graph.mul(b, a))
    nbr_cache: dict = {}

    def class_nbrs(v):
        got = nbr_cache.get(v)
        if got is None:
            got = [mul(v, w) for w in offsets]
            nbr_cache[v] = got
        return got

    snbr_cache: dict = {}

    def s_nbrs(v):
        got = snbr_cache.get(v)
        if got is None:
            got = graph.neighbor_vertices(v, side)
            snbr_cache[v] = got
        return got

    allowed = (lambda v: v >= e) if abelian else (lambda v: True)

    # upper bounds from a greedy chain (connected sets, so valid for c(r))
    best = [None] * (r_max + 1)
    wit = [None] * (r_max + 1)
    for s in greedy_chain(graph, r_max, normalization, side):
        r = len(s)
        best[r] = boundary_value(s, normalization, graph, side)
        wit[r] = _canonical(graph, s, abelian)

    P: list = []
    inP: set = set()
    state = {"B": 0, "dV": 0, "nodes": 0}
    cnt: Counter = Counter()
    proj = [Counter() for _ in range(graph.d)] if axis else None

    def proj_key(v, i):
        return v[:i] + v[i + 1:]

    def lower_bound(size, r):
        if normalization == EDGE:
            lb = state["B"] - delta * (r - size)
            if axis:
                lb = max(lb, 2 * sum(len(c) for c in proj))
        else:
            lb = state["dV"] - (r - size)
            if axis:
                lb = max(lb, 2 * max(len(c) for c in proj))
        return lb

    def add(v):
        P.append(v)
        inP.add(v)
        nb = s_nbrs(v)
        if normalization == EDGE:
            inside = sum(1 for z in nb if z in inP)
            state["B"] += delta - 2 * inside
        else:
            if cnt[v] > 0:
                state["dV"] -= 1
            for z in set(nb):
                cnt[z] += 1
                if cnt[z] == 1 and z not in inP:
                    state["dV"] += 1
        if axis:
            for i in range(graph.d):
                proj[i][proj_key(v, i)] += 1

    def remove(v):
        P.pop()
        inP.discard(v)
        nb = s_nbrs(v)
        if normalization == EDGE:
            inside = sum(1 for z in nb if z in inP)
            state["B"] -= delta - 2 * inside
        else:
            for z in set(nb):
                cnt[z] -= 1
                if cnt[z] == 0 and z not in inP:
                    state["dV"] -= 1
                if cnt[z] == 0:
                    del cnt[z]
            if cnt[v] > 0:
                state["dV"] += 1
        if axis:
            for i in range(graph.d):
                k = proj_key(v, i)
                proj[i][k] -= 1
                if proj[i][k] == 0:
                    del proj[i][k]

    def current_value():
        return state["B"] if normalization == EDGE else state["dV"]

    seen = {e}

    def rec(untried):
        untried = list(untried)
        while untried:
            v = untried.pop()
            add(v)
            state["nodes"] += 1
            if state["nodes"] > budget:
                raise ResourceError(f"profile enumeration exceeded budget of {budget} nodes")
            size = len(P)
            val = current_value()
            if val <= best[size]:
                cand = _canonical(graph, P, abelian)
                if val < best[size] or cand < wit[size]:
                    best[size], wit[size] = val, cand
            if size < r_max:
                prune = all(lower_bound(size, r) > best[r] for r in range(size, r_max + 1))
                if not prune:
                    new = [u for u in class_nbrs(v) if u not in seen and allowed(u)]
                    seen.update(new)
                    rec(untried + new)
                    seen.difference_update(new)
            remove(v)

    rec([e])
    return best[1:], wit[1:], state["nodes"]


def _power(graph, g, k):
    out = graph.identity
    for _ in range(k):
        out = graph.mul(out, g)
    return out


def _place_apart(graph, A, B, normalization, side, target):
    """Union of A and a translate of B with additive boundary."""
    span = 4 * (len(A) + len(B)) + 8
    for _ in range(12):
        g = _power(graph, graph.element(0), span)
        moved = [graph.mul(g, b) if side == RIGHT else graph.mul(b, g) for b in B]
        U = frozenset(A) | frozenset(moved)
        if len(U) == len(A) + len(B) and boundary_value(U, normalization, graph, side) == target:
            return tuple(sorted(U))
        span *= 2
    raise RuntimeError("could not separate components")


def exact_profile(graph: GroupGraph, r_max: int, normalization=EDGE, side=RIGHT,
                  budget: int = DEFAULT_BUDGET, ground=None) -> ProfileTable:
    """Exact I(r) for 1 <= r <= r_max.

    Infinite group families use connected enumeration plus the partition DP.
    Finite graphs (torus, explicit) use exhaustive search over ``ground``
    (default: every vertex), guarded by ``budget`` subsets.
    """
    if r_max < 1:
        raise ValueError("r_max must be positive")
    if normalization not in (EDGE, VERTEX):
        raise ValueError(f"unknown normalization {normalization!r}")
    if isinstance(graph, (Torus, Explicit)):
        return _finite_profile(graph, r_max, normalization, side, budget, ground)
    conn, cwit, nodes = connected_minima(graph, r_max, normalization, side, budget)
    vals = list(conn)
    wits = [tuple(w) for w in cwit]
    how = [None] * r_max
    for r in range(2, r_max + 1):
        for k in range(1, r // 2 + 1):
            v = vals[k - 1] + vals[r - k - 1]
            if v < vals[r - 1]:
                vals[r - 1] = v
                how[r - 1] = k
    for r in range(1, r_max + 1):
        k = how[r - 1]
        if k is not None:
            wits[r - 1] = _place_apart(graph, wits[k - 1], wits[r - k - 1], normalization, side,
                                       vals[r - 1])
    witnesses = [VertexSet(w, graph, validate=False) for w in wits]
    return ProfileTable(graph, normalization, vals, witnesses, list(conn), side, nodes)


def _finite_vertices(graph):
    if isinstance(graph, Explicit):
        return graph.vertices()
    return sorted(itertools.product(range(graph.m), repeat=graph.d))


def _finite_profile(graph, r_max, normalization, side, budget, ground):
    pts = sorted(ground) if ground is not None else _finite_vertices(graph)
    if r_max > len(pts):
        raise CapacityError("window exceeds ground set")
    total = sum(comb(len(pts), r) for r in range(1, r_max + 1))
    if total > budget:
        raise ResourceError(f"exhaustive search needs {total} subsets (> {budget})")
    vals, wits = [], []
    for r in range(1, r_max + 1):
        best = None
        for combo in itertools.combinations(pts, r):
            v = boundary_value(frozenset(combo), normalization, graph, side)
            if best is None or v < best[0]:
                best = (v, combo)
        vals.append(best[0])
        wits.append(VertexSet(best[1], graph, validate=False))
    t = ProfileTable(graph, normalization, vals, wits, None, side, total)
    return t


def box_exhaustive_profile(graph: ZdStencil, r_max: int, box, normalization=EDGE):
    """Minimum over all subsets of a finite box (boundary measured in Z^d)."""
    pts = sorted(itertools.product(*[range(n) for n in box]))
    out = []
    for r in range(1, r_max + 1):
        out.append(min(boundary_value(frozenset(c), normalization, graph)
                       for c in itertools.combinations(pts, r)))
    return out


# ---------------------------------------------------------------------------
# structural checks


@dataclass
class CheckReport:
    name: str
    ok: bool
    checked: int
    violations: list
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _step_constant(table):
    return 1 if table.normalization == VERTEX else table.graph.degree


def check_lipschitz(table: ProfileTable) -> CheckReport:
    """|I(r+1)-I(r)| <= Delta and the reverse bound I(r) <= I(r+1) + c."""
    delta = table.graph.degree
    c = _step_constant(table)
    viol, steps = [], []
    for r in range(1, table.r_max):
        a, b = table.value(r), table.value(r + 1)
        steps.append(b - a)
        if abs(b - a) > delta:
            viol.append({"r": r, "kind": "lipschitz", "I_r": a, "I_r1": b})
        if a > b + c:
            viol.append({"r": r, "kind": "reverse", "I_r": a, "I_r1": b})
    return CheckReport("lipschitz", not viol, len(steps), viol,
                       {"max_step": max((abs(s) for s in steps), default=0), "delta": delta})


def check_trim_subadd(table: ProfileTable) -> CheckReport:
    """Trimming I(r) <= I(s) + c(s-r) for r < s, and subadditivity."""
    c = _step_constant(table)
    viol, n = [], 0
    R = table.r_max
    for r in range(1, R + 1):
        for s in range(r + 1, R + 1):
            n += 1
            if table.value(r) > table.value(s) + c * (s - r):
                viol.append({"kind": "trim", "r": r, "s": s})
    for r1 in range(1, R + 1):
        for r2 in range(r1, R - r1 + 1):
            n += 1
            if table.value(r1 + r2) > table.value(r1) + table.value(r2):
                viol.append({"kind": "subadd", "r1": r1, "r2": r2})
    return CheckReport("trim_subadd", not viol, n, viol)


def ratio_scan(table: ProfileTable):
    """Return ``(max_ratio, argmax, ratios)`` with ratio 1 where the minorant is 0."""
    if all(m == 0 for m in table.minorant):
        raise DegenerateInputError("minorant vanishes on the whole window")
    ratios = [table.ratio(r) for r in range(1, table.r_max + 1)]
    k = max(range(len(ratios)), key=lambda i: (ratios[i], -i))
    return ratios[k], k + 1, ratios


def right_lipschitz_minorant(table: ProfileTable) -> CheckReport:
    delta = table.graph.degree
    m = table.minorant
    viol = []
    for r in range(len(m)):
        for s in range(r, len(m)):
            diff = m[s] - m[r]
            if diff < 0 or diff > delta * (s - r):
                viol.append({"r": r + 1, "s": s + 1})
    return CheckReport("right_lipschitz_minorant", not viol, len(m) * (len(m) + 1) // 2, viol)


def padding(Y, k: int, graph=None, side=RIGHT) -> VertexSet:
    """Add k points, boundary vertices first (smallest encoding first)."""
    Y = as_vertex_set(Y, graph)
    G = Y.graph
    if k < 0:
        raise ValueError("k must be nonnegative")
    cur = set(Y.members)
    for _ in range(k):
        bd = vertex_boundary(cur, G, side)
        if len(bd):
            cur.add(next(iter(bd)))
            continue
        if cur or isinstance(G, (Torus, Explicit)):
            rest = [v for v in _finite_vertices(G) if v not in cur]
            if not rest:
                raise CapacityError("graph has no room for more points")
            cur.add(rest[0])
        else:
            cur.add(G.identity)
    return VertexSet(cur, G, validate=False)
