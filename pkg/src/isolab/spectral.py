"""Dirichlet eigenvalues, Cheeger and Faber-Krahn checks, torus mixing.

Walks run in continuous time with generator ``L = I - P`` where ``P`` averages
over the generators (counted with multiplicity).  On tori the heat kernel
factorizes over coordinates, which keeps every mixing computation at the
cost of a few one-dimensional transforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .cayley import ZdStencil, as_vertex_set
from .errors import DegenerateInputError, ResourceError

DENSE_LIMIT = 4000


def dirichlet_matrix(U, graph=None):
    """L = I - P restricted to U (walk killed on leaving U)."""
    U = as_vertex_set(U, graph)
    n = len(U)
    if n == 0:
        raise DegenerateInputError("empty domain")
    if n > DENSE_LIMIT:
        raise ResourceError(f"domain has {n} vertices (> {DENSE_LIMIT})")
    G = U.graph
    idx = {v: i for i, v in enumerate(U)}
    deg = G.degree
    M = np.eye(n)
    for v, i in idx.items():
        for w in G.neighbor_vertices(v):
            j = idx.get(w)
            if j is not None:
                M[i, j] -= 1.0 / deg
    return M


def dirichlet_lambda1(U, graph=None) -> float:
    M = dirichlet_matrix(U, graph)
    M = (M + M.T) / 2
    return float(linalg.eigh(M, eigvals_only=True, subset_by_index=[0, 0])[0])


def interval_lambda1(n: int) -> float:
    return 1 - math.cos(math.pi / (n + 1))


def box_lambda1(n: int, d: int) -> float:
    """Closed form for the cube [1, n]^d: each axis contributes equally."""
    return interval_lambda1(n)


def box(n, d):
    import itertools
    return list(itertools.product(range(n), repeat=d))


# ---------------------------------------------------------------------------
# Cheeger constants by subset search


def polyominoes(max_size):
    """All fixed connected subsets of Z^2 up to translation, grouped by size."""
    seen = {1: {((0, 0),)}}
    for size in range(2, max_size + 1):
        nxt = set()
        for shape in seen[size - 1]:
            cells = set(shape)
            for (x, y) in shape:
                for c in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if c in cells:
                        continue
                    new = cells | {c}
                    mx = min(p[0] for p in new)
                    my = min(p[1] for p in new)
                    nxt.add(tuple(sorted((p[0] - mx, p[1] - my) for p in new)))
        seen[size] = nxt
    return seen


def local_cheeger(Y, graph) -> float:
    """min over nonempty Z in Y of |outer vertex boundary of Z| / |Z|."""
    Y = list(Y)
    n = len(Y)
    if n > 20:
        raise ResourceError("subset search limited to 20 vertices")
    cells = {v: i for i, v in enumerate(Y)}
    for v in Y:
        for w in graph.neighbor_vertices(v):
            if w not in cells:
                cells[w] = len(cells)
    nb = [0] * n
    for v in Y:
        m = 0
        for w in graph.neighbor_vertices(v):
            m |= 1 << cells[w]
        nb[cells[v]] = m
    acc = [0] * (1 << n)
    best = math.inf
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        acc[mask] = acc[mask & (mask - 1)] | nb[low]
        bd = bin(acc[mask] & ~mask).count("1")
        best = min(best, bd / bin(mask).count("1"))
    return best


@dataclass
class CheegerReport:
    checked: int
    violations: list
    worst_margin: float

    @property
    def ok(self):
        return not self.violations


def cheeger_check(max_size=8, graph=None) -> CheegerReport:
    """lambda_1(Y) >= h(Y)^2 / (2 deg^2) for every polyomino Y with |Y| <= max_size."""
    graph = graph or ZdStencil(2)
    deg = graph.degree
    shapes = polyominoes(max_size)
    checked, bad, worst = 0, [], math.inf
    for size in range(1, max_size + 1):
        for Y in sorted(shapes[size]):
            lam = dirichlet_lambda1(Y, graph)
            h = local_cheeger(Y, graph)
            rhs = h * h / (2 * deg * deg)
            worst = min(worst, lam - rhs)
            if lam < rhs - 1e-12:
                bad.append(Y)
            checked += 1
    return CheegerReport(checked, bad, worst)


def fk_box_check(n_max=40, d=2):
    """Rows (n, lambda_1, FK bound) with C_iso = 2d on cubes of side n."""
    deg = 2 * d
    c_iso = 2 * d
    rows = []
    for n in range(1, n_max + 1):
        lam = box_lambda1(n, d)
        bound = (c_iso / deg) ** 2 / 2 * (n ** d) ** (-2 / d)
        rows.append({"n": n, "lambda1": lam, "bound": bound, "ok": lam >= bound})
    return rows


# ---------------------------------------------------------------------------
# Nash inequality


def dirichlet_form(f: dict, graph) -> float:
    """E(f, f) = (1 / (2 deg)) sum_x sum_s (f(xs) - f(x))^2."""
    pts = set(f)
    for v in list(f):
        pts.update(graph.neighbor_vertices(v))
    total = 0.0
    for v in pts:
        fv = f.get(v, 0.0)
        for w in graph.neighbor_vertices(v):
            total += (f.get(w, 0.0) - fv) ** 2
    return total / (2 * graph.degree)


def nash_quotient(f: dict, graph, Q):
    """||f||_2^(2+4/Q) / (E(f,f) ||f||_1^(4/Q)); the smallest valid K is its sup."""
    l1 = sum(abs(v) for v in f.values())
    if l1 == 0:
        raise DegenerateInputError("Nash quotient of the zero function")
    l2sq = sum(v * v for v in f.values())
    return l2sq ** (1 + 2 / Q) / (dirichlet_form(f, graph) * l1 ** (4 / Q))


def nash_check(d=2, trials=200, side=8, seed=0):
    """Fit K as the largest observed quotient on random functions on boxes."""
    rng = np.random.default_rng(seed)
    G = ZdStencil(d)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, side + 1))
        pts = box(n, d)
        vals = rng.normal(size=len(pts))
        if rng.random() < 0.5:
            vals = np.abs(vals)
        f = dict(zip(pts, vals.tolist()))
        worst = max(worst, nash_quotient(f, G, d))
    spike = nash_quotient({(0,) * d: 1.0}, G, d)
    ind = nash_quotient({p: 1.0 for p in box(side, d)}, G, d)
    K = max(worst, spike, ind)
    return {"K": K, "random_worst": worst, "spike": spike, "indicator": ind,
            "reference": (2 * d / (2 * d)) ** 2}


# ---------------------------------------------------------------------------
# tori


def torus_eigenvalues(m):
    """1D generator eigenvalues 1 - cos(2 pi k / m)."""
    k = np.arange(m)
    return 1 - np.cos(2 * np.pi * k / m)


def kernel_1d(m, s):
    """Distribution at time s of the 1D walk with generator I - (S + S^-1)/2."""
    lam = torus_eigenvalues(m)
    k = np.arange(m)
    x = np.arange(m)
    return (np.exp(-s * lam)[None, :] * np.cos(2 * np.pi * np.outer(x, k) / m)).sum(axis=1) / m


def torus_kernel(d, m, t):
    """p_t(0, .) as a d-dimensional array, factorized over coordinates."""
    p = kernel_1d(m, t / d)
    out = p
    for _ in range(d - 1):
        out = np.multiply.outer(out, p)
    return out


def torus_kernel_dense(d, m, t):
    """Oracle: matrix exponential of the full generator on (Z_m)^d."""
    import itertools
    pts = list(itertools.product(range(m), repeat=d))
    idx = {p: i for i, p in enumerate(pts)}
    N = len(pts)
    P = np.zeros((N, N))
    for p in pts:
        for i in range(d):
            for s in (1, -1):
                q = list(p)
                q[i] = (q[i] + s) % m
                P[idx[p], idx[tuple(q)]] += 1 / (2 * d)
    K = linalg.expm(-t * (np.eye(N) - P))
    return K[0].reshape((m,) * d)


def torus_distance(d, m, t, distance="tv"):
    p = torus_kernel(d, m, t)
    N = m ** d
    if distance == "tv":
        return 0.5 * np.abs(p - 1 / N).sum()
    if distance == "linf":
        return np.abs(N * p - 1).max()
    raise ValueError(f"unknown distance {distance!r}")


def torus_lambda1(d, m):
    return (1 - math.cos(2 * math.pi / m)) / d


def mixing_time(d, m, eps=0.25, distance="tv", tol=1e-6):
    """Smallest t with distance <= eps, located by bisection."""
    if m < 2:
        raise DegenerateInputError("torus side must be at least 2")
    hi = 1.0
    while torus_distance(d, m, hi, distance) > eps:
        hi *= 2
        if hi > 1e9:
            raise ResourceError("mixing time search diverged")
    lo = 0.0
    while hi - lo > tol * hi:
        mid = (lo + hi) / 2
        if torus_distance(d, m, mid, distance) > eps:
            lo = mid
        else:
            hi = mid
    return hi


def torus_mixing(d, m_list, eps=0.25, distance="tv"):
    """Mixing table with the log-log slope and the ratio to the model rate."""
    rows = []
    for m in m_list:
        t = mixing_time(d, m, eps, distance)
        model = m * m * (math.log(m) if d == 2 else 1.0)
        relax = math.log(2) / torus_lambda1(d, m)
        rows.append({"m": m, "t_mix": t, "model": model, "ratio": t / model,
                     "relaxation_bound": relax, "relaxation_ok": t >= relax})
    x = np.log([r["m"] for r in rows])
    y = np.log([r["t_mix"] for r in rows])
    slope = float(np.polyfit(x, y, 1)[0]) if len(rows) > 1 else float("nan")
    ratios = [r["ratio"] for r in rows]
    drift = (max(ratios) - min(ratios)) / min(ratios)
    return {"rows": rows, "slope": slope, "ratio_drift": drift}
