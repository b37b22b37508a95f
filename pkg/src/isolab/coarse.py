"""Property A witnesses, Hilbert-space embeddings of Z^d and tempered constants.

Level ``j`` of an embedding sends ``x`` to ``w_j * sqrt(a_x)`` where ``a_x`` is
the uniform probability measure on the translate ``x + F_j``.  For uniform
measures the squared l2 distance of square roots is ``|xF triangle yF| / |F|``,
so every quantity below is an exact rational before the final square root.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cayley import LEFT, DIRECTED, ZdStencil, as_vertex_set, edge_boundary
from .errors import DegenerateInputError, ResourceError

ANALYTIC_LOW = math.sqrt(3) * math.log(2) / (2 * math.sqrt(2) * math.pi)
ANALYTIC_UP = 1 / (2 * math.sqrt(2))

PRODUCT_BUDGET = 5_000_000


# ---------------------------------------------------------------------------
# witnesses


def witness_oscillation(F, x, y, graph=None) -> Fraction:
    """||a_x - a_y||_1 = |xF sym-diff yF| / |F| for left-adjacent x, y."""
    F = as_vertex_set(F, graph)
    G = F.graph
    x, y = G.validate(x), G.validate(y)
    if len(F) == 0:
        raise DegenerateInputError("empty witness set")
    if x == y:
        return Fraction(0)
    if y not in G.neighbor_vertices(x, LEFT):
        raise ValueError(f"{x} and {y} are not adjacent")
    xF = {G.mul(x, f) for f in F}
    yF = {G.mul(y, f) for f in F}
    return Fraction(len(xF ^ yF), len(F))


def oscillation_bound(F, graph=None) -> Fraction:
    """2 B(F) / |F| with B the directed left edge boundary."""
    F = as_vertex_set(F, graph)
    return Fraction(2 * edge_boundary(F, DIRECTED, side=LEFT), len(F))


# ---------------------------------------------------------------------------
# embeddings of Z^d by cubes


@dataclass(frozen=True)
class Level:
    radius: int
    weight2: float
    eps: Fraction  # per-edge oscillation bound 2B/|F|


@dataclass
class EmbeddingSpec:
    d: int
    levels: list
    shift: int = 0
    basepoint: tuple = None

    def __post_init__(self):
        if self.basepoint is None:
            self.basepoint = (0,) * self.d

    @property
    def lipschitz_sum(self) -> float:
        return sum(L.weight2 * float(L.eps) for L in self.levels)

    def to_json(self):
        return {"d": self.d, "shift": self.shift, "basepoint": list(self.basepoint),
                "levels": [{"radius": L.radius, "weight2": L.weight2,
                            "eps": str(L.eps)} for L in self.levels]}

    @classmethod
    def from_json(cls, doc):
        levels = [Level(int(L["radius"]), float(L["weight2"]), Fraction(L["eps"]))
                  for L in doc["levels"]]
        bp = doc.get("basepoint")
        return cls(int(doc["d"]), levels, int(doc.get("shift", 0)),
                   tuple(bp) if bp is not None else None)


def cube_eps(R, d) -> Fraction:
    # directed boundary of [-R, R]^d is 2d (2R+1)^(d-1)
    return Fraction(2 * 2 * d, 2 * R + 1)


def calibration_shift(d) -> int:
    """Least s with delta(2^(j+s)) <= 2^-(j+4) for every j >= 1, delta = B/|F|."""
    # delta(R) = 2d/(2R+1); the constraint reads 2d * 2^(j+4) <= 2^(j+s+1) + 1
    s = 0
    while not all(2 * d * 2 ** (j + 4) <= 2 ** (j + s + 1) + 1 for j in range(1, 40)):
        s += 1
    return s


def dyadic_spec(d=1, J=10, shift=None) -> EmbeddingSpec:
    """Levels j = 1..J with R_j = 2^(j+shift) and w_j^2 = (6/pi^2) 2^j / j^2."""
    s = calibration_shift(d) if shift is None else shift
    levels = []
    for j in range(1, J + 1):
        R = 2 ** (j + s)
        levels.append(Level(R, 6 / math.pi ** 2 * 2 ** j / j ** 2, cube_eps(R, d)))
    return EmbeddingSpec(d, levels, s)


def calibration_report(spec: EmbeddingSpec):
    """Per level: radius window and delta constraint, with the shifted index."""
    rows = []
    for j, L in enumerate(spec.levels, 1):
        delta = L.eps / 2
        rows.append({"j": j, "radius": L.radius,
                     "radius_ok": 2 ** (j + spec.shift) <= L.radius < 2 ** (j + spec.shift + 1),
                     "delta": delta, "delta_ok": delta <= Fraction(1, 2 ** (j + 4)),
                     "literal_window_ok": 2 ** j <= L.radius < 2 ** (j + 1)})
    return rows


def cube_level_sq(R, d, v) -> Fraction:
    """|C sym-diff (C+v)| / |C| for C = [-R, R]^d."""
    side = 2 * R + 1
    overlap = 1
    for a in v:
        overlap *= max(0, side - abs(a))
    return Fraction(2 * (side ** d - overlap), side ** d)


def cube_level_sq_direct(R, d, x, y) -> Fraction:
    """Oracle: enumerate both translates."""
    C = list(itertools.product(range(-R, R + 1), repeat=d))
    xs = {tuple(a + b for a, b in zip(x, c)) for c in C}
    ys = {tuple(a + b for a, b in zip(y, c)) for c in C}
    return Fraction(len(xs ^ ys), len(C))


def level_terms(spec: EmbeddingSpec, x, y):
    v = tuple(b - a for a, b in zip(x, y))
    return [cube_level_sq(L.radius, spec.d, v) for L in spec.levels]


def embedding_sq_distance(spec: EmbeddingSpec, x, y) -> float:
    return sum(L.weight2 * float(t) for L, t in zip(spec.levels, level_terms(spec, x, y)))


def embedding_distance(spec: EmbeddingSpec, x, y) -> float:
    return math.sqrt(embedding_sq_distance(spec, x, y))


def l1(x, y):
    return sum(abs(a - b) for a, b in zip(x, y))


def lower_sq_bound(spec: EmbeddingSpec, t) -> float:
    """Sum of 2 w_j^2 over levels whose translates are disjoint at distance t."""
    return sum(2 * L.weight2 for L in spec.levels if 2 * L.radius < t)


def distance_bounds(spec: EmbeddingSpec, x, y):
    """(lower, measured, upper) with upper = sqrt(d(x,y) * sum w^2 eps)."""
    t = l1(x, y)
    return (math.sqrt(lower_sq_bound(spec, t)), embedding_distance(spec, x, y),
            math.sqrt(t * spec.lipschitz_sum))


def model_lower(t):
    return math.sqrt(t) / (1 + math.log(1 + t))


def random_displacement(rng, d, t):
    """Uniform-ish integer vector with l1 norm exactly t."""
    if d == 1:
        return (int(rng.choice([-t, t])),)
    cuts = np.sort(rng.integers(0, t + 1, size=d - 1))
    parts = np.diff(np.concatenate([[0], cuts, [t]]))
    signs = rng.choice([-1, 1], size=d)
    return tuple(int(p * s) for p, s in zip(parts, signs))


@dataclass
class CompressionScan:
    rows: list
    c_low: float
    c_up: float
    analytic_low: float = ANALYTIC_LOW
    analytic_up: float = ANALYTIC_UP
    vacuous: list = field(default_factory=list)
    lipschitz_violations: int = 0

    @property
    def envelope_ok(self):
        return self.c_low > 0 and all(
            self.c_low * model_lower(r["t"]) <= r["measured"] * (1 + 1e-12)
            and r["measured"] <= self.c_up * math.sqrt(r["t"]) * (1 + 1e-12)
            for r in self.rows)


def compression_scan(spec: EmbeddingSpec, t_list, samples=4, seed=0) -> CompressionScan:
    """Minimum embedded distance over sampled pairs at each graph distance t."""
    rng = np.random.default_rng(seed)
    rows, vacuous, viol = [], [], 0
    for t in t_list:
        t = int(t)
        if t < 1:
            raise DegenerateInputError("distances start at 1")
        best = math.inf
        for _ in range(samples):
            x = tuple(int(a) for a in rng.integers(-1000, 1001, size=spec.d))
            v = random_displacement(rng, spec.d, t)
            y = tuple(a + b for a, b in zip(x, v))
            lo, m, up = distance_bounds(spec, x, y)
            if m > up * (1 + 1e-12) or m < lo * (1 - 1e-12):
                viol += 1
            best = min(best, m)
        lo = math.sqrt(lower_sq_bound(spec, t))
        if lo == 0:
            vacuous.append(t)
        rows.append({"t": t, "measured": best, "lower": lo,
                     "upper": math.sqrt(t * spec.lipschitz_sum),
                     "analytic_lower": ANALYTIC_LOW * model_lower(t),
                     "analytic_upper": ANALYTIC_UP * math.sqrt(t)})
    c_low = min(r["measured"] / model_lower(r["t"]) for r in rows)
    c_up = max(r["measured"] / math.sqrt(r["t"]) for r in rows)
    return CompressionScan(rows, c_low, c_up, vacuous=vacuous, lipschitz_violations=viol)


# ---------------------------------------------------------------------------
# tempered constants


def _as_box(S, graph):
    """Return per-axis (lo, hi) if S is a full axis box in Z^d, else None."""
    if not isinstance(graph, ZdStencil):
        return None
    pts = list(S)
    if not pts:
        return None
    d = graph.d
    lo = [min(p[i] for p in pts) for i in range(d)]
    hi = [max(p[i] for p in pts) for i in range(d)]
    vol = 1
    for a, b in zip(lo, hi):
        vol *= b - a + 1
    return list(zip(lo, hi)) if vol == len(pts) else None


def _box_volume(box):
    out = 1
    for a, b in box:
        out *= b - a + 1
    return out


def product_size(U, E, graph) -> int:
    """|U E| for finite U, E; boxes in Z^d use interval arithmetic."""
    ub, eb = _as_box(U, graph), _as_box(E, graph)
    if ub is not None and eb is not None:
        return _box_volume([(a + c, b + e) for (a, b), (c, e) in zip(ub, eb)])
    if len(U) * len(E) > PRODUCT_BUDGET:
        raise ResourceError(f"product set needs {len(U) * len(E)} multiplications")
    mul = graph.mul
    return len({mul(u, e) for u in U for e in E})


def product_size_brute(U, E, graph) -> int:
    return len({graph.mul(u, e) for u in U for e in E})


def tempered_ratios(sets, graph=None, inclusive=False):
    """T_k = |(union_{j<k} E_j^-1) E_k| / |E_k| for each k (exact Fractions).

    The first set has no predecessors; it uses |E^-1 E| / |E|.  With
    ``inclusive`` the union also contains E_k^-1, which for nested families
    reduces to |E_k^-1 E_k| / |E_k|.
    """
    sets = [as_vertex_set(S, graph) for S in sets]
    if not sets:
        raise DegenerateInputError("empty family")
    G = sets[0].graph
    for a, b in zip(sets, sets[1:]):
        if not a.members <= b.members:
            raise ValueError("family is not nested")
    out = []
    for k, E in enumerate(sets):
        if k == 0 or inclusive:
            U = E.inverse()
        else:
            # nested, so the union of earlier inverses is the last one
            U = sets[k - 1].inverse()
        out.append(Fraction(product_size(U, E, G), len(E)))
    return out


def tempered_constant(sets, graph=None, inclusive=False) -> Fraction:
    return max(tempered_ratios(sets, graph, inclusive))


def dyadic_cubes(d, k_max, k_min=0):
    G = ZdStencil(d)
    sets = []
    for k in range(k_min, k_max + 1):
        R = 2 ** k
        sets.append(as_vertex_set(itertools.product(range(-R, R + 1), repeat=d), G))
    return sets, G


def cube_tempered_closed_form(d, k, inclusive=False, k_min=0) -> Fraction:
    R = 2 ** k
    if k == k_min or inclusive:
        return Fraction(4 * R + 1, 2 * R + 1) ** d
    return Fraction(3 * R + 1, 2 * R + 1) ** d
